//! Domain types shared by every module: cosine series, class parameters,
//! sampled grid functions and functional curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::Neumaier;
use crate::tail;

/// Structural tag of a cosine series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesTag {
    General,
    Monotone,
    Lacunary,
}

impl SeriesTag {
    pub fn name(self) -> &'static str {
        match self {
            SeriesTag::General => "general",
            SeriesTag::Monotone => "monotone",
            SeriesTag::Lacunary => "lacunary",
        }
    }
}

/// Analytic continuation of the coefficients past the stored range.
///
/// For dense series the tail is `a_ν = scale · ν^{-exponent}`. For lacunary
/// series it is indexed by the dyadic level:
/// `a_μ = scale · 2^{-μ·exponent} · (μ+1)^{-log_exponent}`, which is the same
/// power law in the frequency `ν = 2^μ` with an optional logarithmic factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    Zero,
    PowerLaw {
        scale: f64,
        exponent: f64,
        #[serde(default)]
        log_exponent: f64,
    },
}

impl TailModel {
    pub fn power_law(scale: f64, exponent: f64) -> Self {
        TailModel::PowerLaw {
            scale,
            exponent,
            log_exponent: 0.0,
        }
    }
}

/// A cosine series `Σ_{ν≥1} a_ν cos νx` without constant term.
///
/// Dense series (`general`, `monotone`) store `a_1..a_N` at `coeffs[ν-1]`.
/// Lacunary series store the amplitudes `a_μ` of `cos 2^μ x` at `coeffs[μ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosineSeries {
    coeffs: Vec<f64>,
    tag: SeriesTag,
    tail: TailModel,
}

/// Highest dyadic level whose frequency still fits in a `u64`.
pub const MAX_LACUNARY_LEVEL: usize = 62;

impl CosineSeries {
    pub fn new(coeffs: Vec<f64>, tag: SeriesTag, tail: TailModel) -> Result<Self> {
        let series = Self { coeffs, tag, tail };
        series.validate()?;
        Ok(series)
    }

    pub fn general(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs, SeriesTag::General, TailModel::Zero)
    }

    pub fn monotone(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs, SeriesTag::Monotone, TailModel::Zero)
    }

    /// Lacunary series from its dyadic amplitudes `a_0, a_1, ...`.
    pub fn lacunary(amplitudes: Vec<f64>) -> Result<Self> {
        Self::new(amplitudes, SeriesTag::Lacunary, TailModel::Zero)
    }

    /// Lacunary series from a dense coefficient vector `λ_1..λ_N`, which must
    /// vanish away from powers of two.
    pub fn lacunary_from_dense(dense: &[f64]) -> Result<Self> {
        let mut amplitudes = Vec::new();
        for (i, &c) in dense.iter().enumerate() {
            let nu = i + 1;
            if nu.is_power_of_two() {
                amplitudes.push(c);
            } else if c != 0.0 {
                return Err(Error::ConstraintViolation(format!(
                    "lacunary coefficient at ν = {nu} (not a power of two) is {c}"
                )));
            }
        }
        Self::lacunary(amplitudes)
    }

    pub fn with_tail(self, tail: TailModel) -> Result<Self> {
        Self::new(self.coeffs, self.tag, tail)
    }

    fn validate(&self) -> Result<()> {
        let violation = |msg: String| Err(Error::ConstraintViolation(msg));
        if let Some((i, c)) = self.coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return violation(format!("coefficient #{i} is not finite ({c})"));
        }
        if self.tag != SeriesTag::General {
            if let Some((i, c)) = self.coeffs.iter().enumerate().find(|(_, &c)| c < 0.0) {
                return violation(format!("coefficient #{i} is negative ({c})"));
            }
        }
        if self.tag == SeriesTag::Monotone {
            if let Some(w) = self.coeffs.windows(2).position(|w| w[1] > w[0]) {
                return violation(format!(
                    "monotone series increases between ν = {} and ν = {}",
                    w + 1,
                    w + 2
                ));
            }
        }
        if self.tag == SeriesTag::Lacunary && self.coeffs.len() > MAX_LACUNARY_LEVEL + 1 {
            return violation(format!(
                "lacunary series stores {} levels, at most {} supported",
                self.coeffs.len(),
                MAX_LACUNARY_LEVEL + 1
            ));
        }
        if let TailModel::PowerLaw {
            scale,
            exponent,
            log_exponent,
        } = self.tail
        {
            if !(scale.is_finite() && exponent.is_finite() && log_exponent.is_finite()) {
                return violation("tail parameters must be finite".into());
            }
            if self.tag != SeriesTag::General && scale < 0.0 {
                return violation(format!("tail scale {scale} is negative"));
            }
            match self.tag {
                SeriesTag::Lacunary => {
                    let square_summable =
                        exponent > 0.0 || (exponent == 0.0 && 2.0 * log_exponent > 1.0);
                    if !square_summable {
                        return violation(format!(
                            "lacunary tail 2^(-μ·{exponent}) (μ+1)^(-{log_exponent}) is not square-summable"
                        ));
                    }
                }
                _ => {
                    if log_exponent != 0.0 {
                        return violation("dense power-law tails take no log factor".into());
                    }
                    if exponent <= 0.5 {
                        return violation(format!(
                            "power-law tail exponent {exponent} must exceed 1/2"
                        ));
                    }
                }
            }
            if self.tag == SeriesTag::Monotone {
                if let Some(&last) = self.coeffs.last() {
                    let first_tail = self.tail_coefficient(self.coeffs.len() as u64 + 1);
                    if first_tail > last {
                        return violation(format!(
                            "tail starts at {first_tail}, above the last stored coefficient {last}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn tag(&self) -> SeriesTag {
        self.tag
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    /// Stored coefficients (dense: `a_ν` at `ν-1`; lacunary: `a_μ` at `μ`).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn stored_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_lacunary(&self) -> bool {
        self.tag == SeriesTag::Lacunary
    }

    pub fn require(&self, tag: SeriesTag) -> Result<()> {
        if self.tag == tag {
            Ok(())
        } else {
            Err(Error::Tag {
                required: tag.name(),
                found: self.tag.name(),
            })
        }
    }

    /// Frequency of the stored slot `i`.
    pub fn frequency(&self, i: usize) -> u64 {
        match self.tag {
            SeriesTag::Lacunary => 1u64 << i,
            _ => i as u64 + 1,
        }
    }

    /// Stored `(frequency, amplitude)` pairs in ascending frequency.
    pub fn harmonics(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| (self.frequency(i), a))
    }

    /// Largest frequency with a non-zero stored amplitude (0 for the zero series).
    pub fn max_frequency(&self) -> u64 {
        self.harmonics()
            .filter(|&(_, a)| a != 0.0)
            .map(|(nu, _)| nu)
            .last()
            .unwrap_or(0)
    }

    /// Tail-model value at slot index `idx` (dense: `ν`; lacunary: `μ`).
    fn tail_coefficient(&self, idx: u64) -> f64 {
        match self.tail {
            TailModel::Zero => 0.0,
            TailModel::PowerLaw {
                scale,
                exponent,
                log_exponent,
            } => match self.tag {
                SeriesTag::Lacunary => {
                    let mu = idx as f64;
                    scale
                        * (-mu * exponent * std::f64::consts::LN_2 - log_exponent * (mu + 1.0).ln())
                            .exp()
                }
                _ => scale * (idx as f64).powf(-exponent),
            },
        }
    }

    /// Dense coefficient `a_ν` (tail model included). For lacunary series
    /// this is `λ_ν`, zero off powers of two.
    pub fn coefficient(&self, nu: u64) -> f64 {
        if nu == 0 {
            return 0.0;
        }
        match self.tag {
            SeriesTag::Lacunary => {
                if nu.is_power_of_two() {
                    self.amplitude(nu.trailing_zeros() as u64)
                } else {
                    0.0
                }
            }
            _ => match self.coeffs.get(nu as usize - 1) {
                Some(&a) => a,
                None => self.tail_coefficient(nu),
            },
        }
    }

    /// Dyadic amplitude `a_μ` of a lacunary series (tail model included).
    pub fn amplitude(&self, mu: u64) -> f64 {
        match self.coeffs.get(mu as usize) {
            Some(&a) => a,
            None => self.tail_coefficient(mu),
        }
    }

    /// Multiply every coefficient (and the tail) by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let tail = match self.tail {
            TailModel::Zero => TailModel::Zero,
            TailModel::PowerLaw {
                scale,
                exponent,
                log_exponent,
            } => TailModel::PowerLaw {
                scale: scale * c,
                exponent,
                log_exponent,
            },
        };
        Self::new(self.coeffs.iter().map(|a| a * c).collect(), self.tag, tail)
    }

    /// `Σ |a_ν|^q ν^w` over dense indices `lo ≤ ν ≤ hi` (`hi = None` for ∞),
    /// with the tail model summed in closed form.
    pub fn dense_weighted_sum(&self, lo: u64, hi: Option<u64>, q: f64, w: f64) -> Result<f64> {
        debug_assert!(self.tag != SeriesTag::Lacunary);
        let lo = lo.max(1);
        let stored = self.coeffs.len() as u64;
        let stored_hi = hi.map_or(stored, |h| h.min(stored));
        let mut acc = Neumaier::new();
        for nu in lo..=stored_hi {
            let a = self.coeffs[nu as usize - 1].abs();
            if a != 0.0 {
                acc.add(a.powf(q) * (nu as f64).powf(w));
            }
        }
        if let TailModel::PowerLaw {
            scale, exponent, ..
        } = self.tail
        {
            let start = lo.max(stored + 1);
            let c = scale.abs().powf(q);
            let sigma = exponent * q - w;
            if c != 0.0 {
                match hi {
                    Some(h) => acc.add(c * tail::power_sum(start, h, sigma)),
                    None => acc.add(c * tail::power_tail(start, sigma)?.value),
                }
            }
        }
        Ok(acc.value())
    }

    /// `Σ a_μ^q 2^{μ w}` over dyadic levels `lo ≤ μ ≤ hi` of a lacunary series.
    pub fn dyadic_weighted_sum(&self, lo: u64, hi: Option<u64>, q: f64, w: f64) -> Result<f64> {
        debug_assert!(self.tag == SeriesTag::Lacunary);
        let ln2 = std::f64::consts::LN_2;
        let stored = self.coeffs.len() as u64;
        let mut acc = Neumaier::new();
        let stored_end = hi.map_or(stored, |h| h.saturating_add(1).min(stored));
        for mu in lo..stored_end {
            let a = self.coeffs[mu as usize];
            if a != 0.0 {
                acc.add((q * a.ln() + mu as f64 * w * ln2).exp());
            }
        }
        if let TailModel::PowerLaw {
            scale,
            exponent,
            log_exponent,
        } = self.tail
        {
            if scale != 0.0 {
                let start = lo.max(stored);
                let g = w - exponent * q;
                let log_q = log_exponent * q;
                let cq = scale.powf(q);
                match hi {
                    Some(h) => {
                        for mu in start..=h {
                            let m = mu as f64;
                            acc.add(cq * (m * g * ln2 - log_q * (m + 1.0).ln()).exp());
                        }
                    }
                    None => acc.add(cq * tail::dyadic_log_tail(start, g, log_q)?),
                }
            }
        }
        Ok(acc.value())
    }

    /// `Σ a_ν²` over frequencies `ν ≥ n`, tail included.
    pub fn energy_from(&self, n: u64) -> Result<f64> {
        match self.tag {
            SeriesTag::Lacunary => {
                // first level with 2^μ ≥ n
                let mu0 = if n <= 1 {
                    0
                } else {
                    64 - (n - 1).leading_zeros() as u64
                };
                self.dyadic_weighted_sum(mu0, None, 2.0, 0.0)
            }
            _ => self.dense_weighted_sum(n, None, 2.0, 0.0),
        }
    }
}

/// The tuple `(p, θ, r, λ, k)` of a Nikol'skii-Besov type class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassParams {
    pub p: f64,
    pub theta: f64,
    pub r: f64,
    pub lambda: f64,
    pub k: u32,
}

impl ClassParams {
    pub fn new(p: f64, theta: f64, r: f64, lambda: f64, k: u32) -> Result<Self> {
        validate_params(p, theta, r, lambda, k)
    }
}

/// Validate a class parameter tuple: `1 < p < ∞`, `θ, r, λ > 0`, `k > r + λ`.
pub fn validate_params(p: f64, theta: f64, r: f64, lambda: f64, k: u32) -> Result<ClassParams> {
    let violation = |msg: String| Err(Error::ConstraintViolation(msg));
    if !(p > 1.0 && p.is_finite()) {
        return violation(format!("p = {p} is not in (1, ∞)"));
    }
    for (name, v) in [("θ", theta), ("r", r), ("λ", lambda)] {
        if !(v > 0.0 && v.is_finite()) {
            return violation(format!("{name} = {v} must be a positive real"));
        }
    }
    if !(k as f64 > r + lambda) {
        return violation(format!("k = {k} must exceed r + λ = {}", r + lambda));
    }
    Ok(ClassParams {
        p,
        theta,
        r,
        lambda,
        k,
    })
}

/// Uniform samples of a 2π-periodic function at `x_j = 2πj/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::ConstraintViolation(format!(
                "grid size {n} must be a power of two ≥ 8"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::ConstraintViolation("grid samples must be finite".into()));
        }
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let step = std::f64::consts::TAU / n as f64;
        Self::new((0..n).map(|j| f(j as f64 * step)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Which quantity a [`FunctionalCurve`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveLabel {
    IntegralI,
    SeriesJ,
    MonotoneCoefficient,
    LacunaryD,
    DyadicE,
    BestApproximation,
    Modulus,
}

/// A sampled map `n ↦ value` with `n` strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalCurve {
    label: CurveLabel,
    params: Option<ClassParams>,
    entries: Vec<(u64, f64)>,
}

impl FunctionalCurve {
    pub fn new(
        label: CurveLabel,
        params: Option<ClassParams>,
        entries: Vec<(u64, f64)>,
    ) -> Result<Self> {
        if entries.first().is_some_and(|&(n, _)| n == 0) {
            return Err(Error::ConstraintViolation("curve indices start at 1".into()));
        }
        if entries.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::ConstraintViolation(
                "curve indices must be strictly increasing".into(),
            ));
        }
        if let Some(&(n, v)) = entries.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::ConstraintViolation(format!(
                "curve value at n = {n} is {v}; values must be finite and ≥ 0"
            )));
        }
        Ok(Self {
            label,
            params,
            entries,
        })
    }

    pub fn label(&self) -> CurveLabel {
        self.label
    }

    pub fn params(&self) -> Option<ClassParams> {
        self.params
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
