//! The Nikol'skii-Besov class functional in its four equivalent forms and
//! the membership test against a majorant.
//!
//! * integral form `I(δ)` over the modulus of smoothness,
//! * series form `J(n)` over `ω(1/ν)`,
//! * coefficient forms (monotone `a_ν`, lacunary `a_μ`),
//! * dyadic best-approximation form over `E_{2^μ}`.
//!
//! Infinite sums over moduli are truncated at `ν_max` and the remainder is
//! extrapolated from a power law fitted over the last octave of terms.

use rayon::prelude::*;
use serde::Serialize;

use crate::approximation::dyadic_best_approx_curve;
use crate::error::{Error, Result};
use crate::function_model::{
    modulus_curve, modulus_p2_exact, ModulusPath, DEFAULT_GRID, DEFAULT_H_SAMPLES,
};
use crate::phi::{phi_eval, MajorantPhi};
use crate::summation::Neumaier;
use crate::tail;
use crate::types::{ClassParams, CosineSeries, CurveLabel, FunctionalCurve, SeriesTag};

/// Remainders above this fraction of the computed partial sum raise a
/// truncation warning.
pub const TRUNCATION_WARN_FRACTION: f64 = 0.01;

/// Default slope tolerance of the membership trend rule.
pub const DEFAULT_SLOPE_TOL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truncation {
    /// Sums were complete or closed-form.
    Exact,
    /// A remainder was extrapolated from terms decaying like `ν^{-exponent}`
    /// (dyadic forms: like `2^{-exponent·μ}`).
    Extrapolated { exponent: f64 },
    /// The terms do not decay fast enough for the infinite sum to converge.
    Divergent { exponent: f64 },
}

/// A functional value together with its truncation bookkeeping.
///
/// `partial` and `remainder` live on the `θ`-power scale:
/// `value = (partial + remainder)^{1/θ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub partial: f64,
    pub remainder: f64,
    pub truncation: Truncation,
}

impl FunctionalValue {
    fn assemble(partial: f64, remainder: f64, truncation: Truncation, theta: f64) -> Self {
        let value = match truncation {
            Truncation::Divergent { .. } => f64::INFINITY,
            _ => (partial + remainder).powf(1.0 / theta),
        };
        Self {
            value,
            partial,
            remainder,
            truncation,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.truncation, Truncation::Divergent { .. })
    }

    /// Remainder exceeds [`TRUNCATION_WARN_FRACTION`] of the partial sum.
    pub fn truncation_warning(&self) -> bool {
        self.is_divergent() || self.remainder > TRUNCATION_WARN_FRACTION * self.partial
    }

    pub fn remainder_fraction(&self) -> f64 {
        if self.partial > 0.0 {
            self.remainder / self.partial
        } else {
            0.0
        }
    }
}

/// Grid and shift resolution of modulus evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusOptions {
    pub h_samples: usize,
    pub grid: usize,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self {
            h_samples: DEFAULT_H_SAMPLES,
            grid: DEFAULT_GRID,
        }
    }
}

/// `ω_k(f, 1/ν)_p` for `ν = 1..=ν_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaTable {
    k: u32,
    p: f64,
    path: ModulusPath,
    values: Vec<f64>,
}

impl OmegaTable {
    /// Uses the Parseval closed form at `p = 2` and grid moduli otherwise.
    pub fn compute(
        series: &CosineSeries,
        k: u32,
        p: f64,
        nu_max: u64,
        opts: &ModulusOptions,
    ) -> Result<Self> {
        if nu_max < 2 {
            return Err(Error::Precondition("ν_max must be at least 2".into()));
        }
        let (path, values) = if p == 2.0 {
            let values = (1..=nu_max)
                .into_par_iter()
                .map(|nu| modulus_p2_exact(series, k, 1.0 / nu as f64, opts.h_samples))
                .collect();
            (ModulusPath::ExactP2, values)
        } else {
            let ts: Vec<f64> = (1..=nu_max).map(|nu| 1.0 / nu as f64).collect();
            let values = modulus_curve(series, k, p, &ts, opts.h_samples, opts.grid)?;
            (ModulusPath::Grid, values)
        };
        Ok(Self {
            k,
            p,
            path,
            values,
        })
    }

    pub fn for_params(
        series: &CosineSeries,
        params: &ClassParams,
        nu_max: u64,
        opts: &ModulusOptions,
    ) -> Result<Self> {
        Self::compute(series, params.k, params.p, nu_max, opts)
    }

    /// Wrap externally computed values `ω(1/ν)`, `ν = 1..=values.len()`.
    pub fn from_values(k: u32, p: f64, path: ModulusPath, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::ConstraintViolation(
                "modulus table needs ≥ 2 finite non-negative values".into(),
            ));
        }
        Ok(Self {
            k,
            p,
            path,
            values,
        })
    }

    pub fn nu_max(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn path(&self) -> ModulusPath {
        self.path
    }

    /// `ω(1/ν)`.
    pub fn omega(&self, nu: u64) -> f64 {
        self.values[nu as usize - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check(&self, params: &ClassParams, n: u64) -> Result<()> {
        if self.k != params.k || self.p != params.p {
            return Err(Error::ConstraintViolation(format!(
                "modulus table has (k, p) = ({}, {}), parameters ask for ({}, {})",
                self.k, self.p, params.k, params.p
            )));
        }
        if n == 0 {
            return Err(Error::Domain("n must be ≥ 1".into()));
        }
        if self.nu_max() < 4 * n {
            return Err(Error::Precondition(format!(
                "ν_max = {} must be at least 4n = {}",
                self.nu_max(),
                4 * n
            )));
        }
        Ok(())
    }
}

/// Remainder `Σ_{ν > ν_max} g(ν)` extrapolated from a least-squares power
/// law over the last octave `[ν_max/2, ν_max]`.
fn extrapolate_power_tail(nu_max: u64, g: impl Fn(u64) -> f64) -> (f64, Truncation) {
    let last = g(nu_max);
    if last == 0.0 {
        return (0.0, Truncation::Exact);
    }
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for nu in (nu_max / 2).max(1)..=nu_max {
        let v = g(nu);
        if v > 0.0 {
            let (x, y) = ((nu as f64).ln(), v.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            count += 1.0;
        }
    }
    let denom = count * sxx - sx * sx;
    let exponent = if count >= 2.0 && denom > 0.0 {
        -(count * sxy - sx * sy) / denom
    } else {
        0.0
    };
    match tail::power_tail(nu_max + 1, exponent) {
        Ok(t) => {
            let remainder = (last.ln() + exponent * (nu_max as f64).ln() + t.value.ln()).exp();
            (remainder, Truncation::Extrapolated { exponent })
        }
        Err(_) => (f64::INFINITY, Truncation::Divergent { exponent }),
    }
}

/// `∫_a^b t^{-q-1} dt` over the harmonic cell `[1/(ν+1), 1/ν]`:
/// `((ν+1)^q − ν^q)/q`, written to avoid cancellation at large `ν`.
fn cell_weight(nu: u64, q: f64) -> f64 {
    let x = nu as f64;
    x.powf(q) * (q * (1.0 / x).ln_1p()).exp_m1() / q
}

/// Integral form at `δ = 1/(n+1)`:
/// `(∫_0^δ t^{-rθ-1} ω(t)^θ dt + δ^{λθ} ∫_δ^1 t^{-(r+λ)θ-1} ω(t)^θ dt)^{1/θ}`,
/// with `ω` frozen at `ω(1/ν)` on each harmonic cell `[1/(ν+1), 1/ν]`.
pub fn integral_functional_i(
    table: &OmegaTable,
    params: &ClassParams,
    n: u64,
) -> Result<FunctionalValue> {
    table.check(params, n)?;
    let th = params.theta;
    let q_near = params.r * th;
    let q_far = (params.r + params.lambda) * th;
    let term = |nu: u64, q: f64| table.omega(nu).powf(th) * cell_weight(nu, q);

    let mut near = Neumaier::new();
    for nu in n + 1..=table.nu_max() {
        near.add(term(nu, q_near));
    }
    let mut far = Neumaier::new();
    for nu in 1..=n {
        far.add(term(nu, q_far));
    }
    let delta = 1.0 / (n + 1) as f64;
    let partial = near.value() + delta.powf(params.lambda * th) * far.value();
    let (remainder, truncation) = extrapolate_power_tail(table.nu_max(), |nu| term(nu, q_near));
    Ok(FunctionalValue::assemble(partial, remainder, truncation, th))
}

/// Series form:
/// `(Σ_{ν>n} ω(1/ν)^θ ν^{rθ−1} + n^{−λθ} Σ_{ν≤n} ω(1/ν)^θ ν^{(r+λ)θ−1})^{1/θ}`.
pub fn series_functional_j(
    table: &OmegaTable,
    params: &ClassParams,
    n: u64,
) -> Result<FunctionalValue> {
    table.check(params, n)?;
    let th = params.theta;
    let w_near = params.r * th - 1.0;
    let w_far = (params.r + params.lambda) * th - 1.0;
    let term = |nu: u64, w: f64| table.omega(nu).powf(th) * (nu as f64).powf(w);

    let mut near = Neumaier::new();
    for nu in n + 1..=table.nu_max() {
        near.add(term(nu, w_near));
    }
    let mut far = Neumaier::new();
    for nu in 1..=n {
        far.add(term(nu, w_far));
    }
    let partial = near.value() + (n as f64).powf(-params.lambda * th) * far.value();
    let (remainder, truncation) = extrapolate_power_tail(table.nu_max(), |nu| term(nu, w_near));
    Ok(FunctionalValue::assemble(partial, remainder, truncation, th))
}

/// Exponent `rθ + θ − θ/p − 1` of the monotone coefficient condition.
fn monotone_weight(params: &ClassParams) -> f64 {
    let th = params.theta;
    params.r * th + th - th / params.p - 1.0
}

fn divergence_exponent(err: Error, fallback: f64) -> Result<f64> {
    match err {
        Error::Divergent(_) => Ok(fallback),
        other => Err(other),
    }
}

/// Coefficient form for monotone series:
/// `(Σ_{ν>n} a_ν^θ ν^{w} + n^{−λθ} Σ_{ν≤n} a_ν^θ ν^{w+λθ})^{1/θ}`,
/// `w = rθ + θ − θ/p − 1`, with power-law tails in closed form.
pub fn monotone_coefficient_functional(
    series: &CosineSeries,
    params: &ClassParams,
    n: u64,
) -> Result<FunctionalValue> {
    series.require(SeriesTag::Monotone)?;
    if n == 0 {
        return Err(Error::Domain("n must be ≥ 1".into()));
    }
    let th = params.theta;
    let w = monotone_weight(params);
    let head = series.dense_weighted_sum(1, Some(n), th, w + params.lambda * th)?;
    let attenuated = (n as f64).powf(-params.lambda * th) * head;
    match series.dense_weighted_sum(n + 1, None, th, w) {
        Ok(tail_sum) => Ok(FunctionalValue::assemble(
            tail_sum + attenuated,
            0.0,
            Truncation::Exact,
            th,
        )),
        Err(e) => {
            let exponent = match series.tail() {
                crate::types::TailModel::PowerLaw { exponent, .. } => exponent * th - w,
                crate::types::TailModel::Zero => 0.0,
            };
            let exponent = divergence_exponent(e, exponent)?;
            Ok(FunctionalValue::assemble(
                attenuated,
                f64::INFINITY,
                Truncation::Divergent { exponent },
                th,
            ))
        }
    }
}

/// `⌊log2 m⌋` for `m ≥ 1`.
fn floor_log2(m: u64) -> u64 {
    63 - m.leading_zeros() as u64
}

/// Coefficient form for lacunary series, in the reduced dyadic form
/// `(Σ_{2^μ>m} a_μ^θ 2^{μrθ} + m^{−λθ} Σ_{2^μ≤m} a_μ^θ 2^{μ(r+λ)θ})^{1/θ}`.
pub fn lacunary_functional_d(
    series: &CosineSeries,
    params: &ClassParams,
    m: u64,
) -> Result<FunctionalValue> {
    series.require(SeriesTag::Lacunary)?;
    if m == 0 {
        return Err(Error::Domain("m must be ≥ 1".into()));
    }
    let th = params.theta;
    let split = floor_log2(m);
    let head = series.dyadic_weighted_sum(0, Some(split), th, (params.r + params.lambda) * th)?;
    let attenuated = (m as f64).powf(-params.lambda * th) * head;
    match series.dyadic_weighted_sum(split + 1, None, th, params.r * th) {
        Ok(tail_sum) => Ok(FunctionalValue::assemble(
            tail_sum + attenuated,
            0.0,
            Truncation::Exact,
            th,
        )),
        Err(e) => {
            let exponent = match series.tail() {
                crate::types::TailModel::PowerLaw { exponent, .. } => {
                    (exponent - params.r) * th
                }
                crate::types::TailModel::Zero => 0.0,
            };
            let exponent = divergence_exponent(e, exponent)?;
            Ok(FunctionalValue::assemble(
                attenuated,
                f64::INFINITY,
                Truncation::Divergent { exponent },
                th,
            ))
        }
    }
}

/// Dyadic best-approximation form at level `n`:
/// `(Σ_{μ>n} 2^{μrθ} E_{2^μ}^θ + 2^{−nλθ} Σ_{μ≤n} 2^{μ(r+λ)θ} E_{2^μ}^θ)^{1/θ}`.
///
/// `e_curve` holds `(2^μ, E_{2^μ})` for `μ = 0..=L` (see
/// [`dyadic_best_approx_curve`]); the sum beyond `L` is extrapolated from
/// the ratio of its last two terms.
pub fn dyadic_e_functional(
    e_curve: &FunctionalCurve,
    params: &ClassParams,
    n: u32,
) -> Result<FunctionalValue> {
    let entries = e_curve.entries();
    let levels = entries.len();
    if entries.iter().enumerate().any(|(mu, &(m, _))| m != 1u64 << mu) {
        return Err(Error::ConstraintViolation(
            "E-curve must be indexed by 2^μ for μ = 0, 1, ...".into(),
        ));
    }
    if levels < n as usize + 3 {
        return Err(Error::Precondition(format!(
            "E-curve has {levels} levels; level {n} needs at least {}",
            n + 3
        )));
    }
    let th = params.theta;
    let ln2 = std::f64::consts::LN_2;
    let term = |mu: usize, w: f64| {
        let e = entries[mu].1;
        if e == 0.0 {
            0.0
        } else {
            (th * e.ln() + mu as f64 * w * th * ln2).exp()
        }
    };
    let n = n as usize;
    let mut near = Neumaier::new();
    for mu in n + 1..levels {
        near.add(term(mu, params.r));
    }
    let mut far = Neumaier::new();
    for mu in 0..=n {
        far.add(term(mu, params.r + params.lambda));
    }
    let partial = near.value() + (-(n as f64) * params.lambda * th * ln2).exp() * far.value();

    let last = term(levels - 1, params.r);
    let prev = term(levels - 2, params.r);
    let (remainder, truncation) = if last == 0.0 {
        (0.0, Truncation::Exact)
    } else {
        let q = last / prev;
        let exponent = -q.log2();
        if q < 1.0 {
            (last * q / (1.0 - q), Truncation::Extrapolated { exponent })
        } else {
            (f64::INFINITY, Truncation::Divergent { exponent })
        }
    };
    Ok(FunctionalValue::assemble(partial, remainder, truncation, th))
}

/// Convenience wrapper computing the `E`-curve to `max_level` first.
pub fn dyadic_e_functional_for(
    series: &CosineSeries,
    params: &ClassParams,
    n: u32,
    max_level: u32,
    grid: usize,
) -> Result<FunctionalValue> {
    let curve = dyadic_best_approx_curve(series, max_level, params.p, grid)?;
    dyadic_e_functional(&curve, params, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    UnboundedTrend,
    Divergent,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Bounded => "bounded",
            Verdict::UnboundedTrend => "unbounded-trend",
            Verdict::Divergent => "divergent",
        }
    }
}

/// Outcome of testing `value(n) ≤ C φ(1/n)` on a sampled curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub curve: FunctionalCurve,
    pub phi: MajorantPhi,
    /// `(n, value(n) / φ(1/n))`.
    pub per_n_ratios: Vec<(u64, f64)>,
    /// Empirical constant `C`.
    pub sup_ratio: f64,
    /// Least-squares slope of `ln ratio` against `ln n` over the last half.
    pub tail_slope: f64,
    pub verdict: Verdict,
}

/// Log-log least-squares slope over the positive entries of the last half.
fn tail_slope(ratios: &[(u64, f64)]) -> f64 {
    let tail = &ratios[ratios.len() / 2..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|&&(_, r)| r > 0.0)
        .map(|&(n, r)| ((n as f64).ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let count = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / count, sy / count);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in &pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Ratio test of a curve against `φ(1/n)`. The verdict is `bounded` when the
/// tail slope is at most `slope_tol`.
pub fn membership_test(
    curve: &FunctionalCurve,
    phi: &MajorantPhi,
    slope_tol: f64,
) -> Result<MembershipReport> {
    if curve.is_empty() {
        return Err(Error::Precondition("membership test needs a non-empty curve".into()));
    }
    let per_n_ratios = curve
        .entries()
        .iter()
        .map(|&(n, v)| {
            let bound = phi_eval(phi, 1.0 / n as f64)?;
            if bound == 0.0 {
                return Err(Error::DivideByZero(format!("φ(1/{n}) = 0")));
            }
            Ok((n, v / bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_ratio = per_n_ratios.iter().fold(0.0f64, |m, &(_, r)| m.max(r));
    let slope = tail_slope(&per_n_ratios);
    let verdict = if slope <= slope_tol {
        Verdict::Bounded
    } else {
        Verdict::UnboundedTrend
    };
    Ok(MembershipReport {
        curve: curve.clone(),
        phi: phi.clone(),
        per_n_ratios,
        sup_ratio,
        tail_slope: slope,
        verdict,
    })
}

/// Build a curve from functional values, or `None` if any entry diverges.
pub fn curve_from_values(
    label: CurveLabel,
    params: Option<ClassParams>,
    values: &[(u64, FunctionalValue)],
) -> Result<Option<FunctionalCurve>> {
    if values.iter().any(|(_, v)| v.is_divergent()) {
        return Ok(None);
    }
    FunctionalCurve::new(label, params, values.iter().map(|&(n, v)| (n, v.value)).collect())
        .map(Some)
}
