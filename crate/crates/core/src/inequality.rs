//! Brute-force checkers for the discrete inequalities behind the
//! equivalence theorems, with empirical constant tracking.
//!
//! Notation: `b_ν = a_ν ν^λ`, the weight is `μ^{α−1}` for tail sums
//! `Σ_{ν=μ}^n b_ν` and `μ^{−α−1}` for head sums `Σ_{ν=s}^μ b_ν`. The
//! comparison side is always `Σ_μ w_μ (a_μ μ^{λ+1})^p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::{sum, Neumaier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    Jensen,
    HardyUpper,
    HardyLower,
    ReverseCopson,
    TwoSided,
}

impl LemmaId {
    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Jensen => "jensen",
            LemmaId::HardyUpper => "hardy-upper",
            LemmaId::HardyLower => "hardy-lower",
            LemmaId::ReverseCopson => "reverse-copson",
            LemmaId::TwoSided => "two-sided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Tail,
    Head,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Tail => "tail",
            Variant::Head => "head",
        }
    }
}

/// Direction in which `lhs` is compared with `C · rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `lhs ≤ C · rhs`; the empirical constant is an upper one.
    AtMost,
    /// `lhs ≥ c · rhs`; the empirical constant is a lower one.
    AtLeast,
}

/// Sequence `a_1, a_2, ...` (stored from index 0) with the exponents and
/// index range of one inequality instance.
#[derive(Debug, Clone, PartialEq)]
pub struct IneqCase {
    pub seq: Vec<f64>,
    pub alpha: f64,
    pub lambda_exp: f64,
    pub p: f64,
    pub m: usize,
    pub n: usize,
}

impl IneqCase {
    pub fn new(
        seq: Vec<f64>,
        alpha: f64,
        lambda_exp: f64,
        p: f64,
        m: usize,
        n: usize,
    ) -> Result<Self> {
        if seq.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::ConstraintViolation(
                "sequence must be finite and non-negative".into(),
            ));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::ConstraintViolation(format!("α = {alpha} must be positive")));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::ConstraintViolation(format!("p = {p} must be positive")));
        }
        if !lambda_exp.is_finite() {
            return Err(Error::ConstraintViolation("λ must be finite".into()));
        }
        if m == 0 || n < m || n > seq.len() {
            return Err(Error::ConstraintViolation(format!(
                "need 1 ≤ m ≤ n ≤ {} (got m = {m}, n = {n})",
                seq.len()
            )));
        }
        Ok(Self {
            seq,
            alpha,
            lambda_exp,
            p,
            m,
            n,
        })
    }

    /// Non-increasing on `1..=n`.
    pub fn is_monotone(&self) -> bool {
        self.seq[..self.n].windows(2).all(|w| w[0] >= w[1])
    }

    /// Same case with the sequence multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            seq: self.seq.iter().map(|a| a * c).collect(),
            ..self.clone()
        }
    }

    fn a(&self, nu: usize) -> f64 {
        self.seq[nu - 1]
    }

    fn weight(&self, variant: Variant, mu: usize) -> f64 {
        match variant {
            Variant::Tail => (mu as f64).powf(self.alpha - 1.0),
            Variant::Head => (mu as f64).powf(-self.alpha - 1.0),
        }
    }

    /// `Σ_{μ=lhs_start}^n w_μ (inner_μ)^p` with `inner_μ = Σ_{ν=μ}^n b_ν`
    /// (tail) or `Σ_{ν=inner_start}^μ b_ν` (head).
    fn lhs(&self, variant: Variant, lhs_start: usize, inner_start: usize) -> f64 {
        let n = self.n;
        let b = |nu: usize| self.a(nu) * (nu as f64).powf(self.lambda_exp);
        let mut inner = vec![0.0; n + 1];
        match variant {
            Variant::Tail => {
                let mut acc = Neumaier::new();
                for mu in (lhs_start..=n).rev() {
                    acc.add(b(mu));
                    inner[mu] = acc.value();
                }
            }
            Variant::Head => {
                let mut acc = Neumaier::new();
                for nu in inner_start..lhs_start {
                    acc.add(b(nu));
                }
                for mu in lhs_start..=n {
                    acc.add(b(mu));
                    inner[mu] = acc.value();
                }
            }
        }
        sum((lhs_start..=n).map(|mu| self.weight(variant, mu) * inner[mu].powf(self.p)))
    }

    /// `Σ_{μ=start}^n w_μ (a_μ μ^{λ+1})^p`.
    fn rhs(&self, variant: Variant, start: usize) -> f64 {
        sum((start..=self.n).map(|mu| {
            let term = self.a(mu) * (mu as f64).powf(self.lambda_exp + 1.0);
            self.weight(variant, mu) * term.powf(self.p)
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IneqVerdict {
    pub lemma: LemmaId,
    pub variant: Option<Variant>,
    pub direction: Direction,
    /// Clause of the reverse inequality exercised (1: `p ≥ 1`, 2: `p < 1`).
    pub clause: Option<u8>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs` when `rhs > 0`.
    pub ratio: Option<f64>,
    /// Empirical constant of this case; equals `ratio`.
    pub holds_with: Option<f64>,
}

impl IneqVerdict {
    fn new(
        lemma: LemmaId,
        variant: Option<Variant>,
        direction: Direction,
        clause: Option<u8>,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        let ratio = (rhs > 0.0).then(|| lhs / rhs);
        Self {
            lemma,
            variant,
            direction,
            clause,
            lhs,
            rhs,
            ratio,
            holds_with: ratio,
        }
    }

    /// Whether the inequality holds with constant 1 up to `rel_tol`.
    pub fn holds_with_unit_constant(&self, rel_tol: f64) -> bool {
        match self.direction {
            Direction::AtMost => self.lhs <= self.rhs * (1.0 + rel_tol),
            Direction::AtLeast => self.lhs >= self.rhs * (1.0 - rel_tol),
        }
    }
}

/// `(Σ a^β)^{1/β} ≤ (Σ a^α)^{1/α}` for `0 < α < β`.
pub fn check_jensen(seq: &[f64], alpha: f64, beta: f64) -> Result<IneqVerdict> {
    if !(alpha > 0.0 && alpha < beta && beta.is_finite()) {
        return Err(Error::Domain(format!("need 0 < α < β < ∞, got α = {alpha}, β = {beta}")));
    }
    if seq.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::ConstraintViolation(
            "sequence must be finite and non-negative".into(),
        ));
    }
    // Scale by the maximum so that large exponents cannot overflow.
    let top = seq.iter().fold(0.0f64, |m, &a| m.max(a));
    if top == 0.0 {
        return Ok(IneqVerdict::new(LemmaId::Jensen, None, Direction::AtMost, None, 0.0, 0.0));
    }
    let norm = |q: f64| top * sum(seq.iter().map(|a| (a / top).powf(q))).powf(1.0 / q);
    Ok(IneqVerdict::new(
        LemmaId::Jensen,
        None,
        Direction::AtMost,
        None,
        norm(beta),
        norm(alpha),
    ))
}

fn require_gap(case: &IneqCase) -> Result<()> {
    if case.m >= case.n {
        return Err(Error::Precondition(format!(
            "need m < n (got m = {}, n = {})",
            case.m, case.n
        )));
    }
    Ok(())
}

/// Upper Hardy-type inequality over `μ = m..=n`, meant for `p ≥ 1`.
pub fn check_hardy_upper(case: &IneqCase, variant: Variant) -> Result<IneqVerdict> {
    require_gap(case)?;
    if case.p < 1.0 {
        return Err(Error::Precondition(format!("upper direction needs p ≥ 1, got {}", case.p)));
    }
    let lhs = case.lhs(variant, case.m, case.m);
    let rhs = case.rhs(variant, case.m);
    Ok(IneqVerdict::new(
        LemmaId::HardyUpper,
        Some(variant),
        Direction::AtMost,
        None,
        lhs,
        rhs,
    ))
}

/// Lower Hardy-type inequality over `μ = m..=n`, meant for `0 < p ≤ 1`.
pub fn check_hardy_lower(case: &IneqCase, variant: Variant) -> Result<IneqVerdict> {
    require_gap(case)?;
    if case.p > 1.0 {
        return Err(Error::Precondition(format!("lower direction needs p ≤ 1, got {}", case.p)));
    }
    let lhs = case.lhs(variant, case.m, case.m);
    let rhs = case.rhs(variant, case.m);
    Ok(IneqVerdict::new(
        LemmaId::HardyLower,
        Some(variant),
        Direction::AtLeast,
        None,
        lhs,
        rhs,
    ))
}

/// Index ranges `(lhs_start, inner_start, rhs_start)` of the reverse
/// inequality, with its clause and direction.
fn copson_ranges(p: f64, m: usize, variant: Variant) -> (u8, Direction, usize, usize, usize) {
    if p >= 1.0 {
        match variant {
            Variant::Tail => (1, Direction::AtLeast, m, m, 8 * m),
            Variant::Head => (1, Direction::AtLeast, m, m, 4 * m),
        }
    } else {
        (2, Direction::AtMost, 4 * m, 4 * m, m)
    }
}

/// Reverse Copson/Leindler inequality for non-increasing sequences.
///
/// `p ≥ 1`, `n ≥ 16m`:
/// `Σ_{μ=m}^n μ^{α−1}(Σ_{ν=μ}^n b_ν)^p ≥ c Σ_{μ=8m}^n μ^{α−1}(a_μ μ^{λ+1})^p`
/// and the head form with `Σ_{ν=m}^μ` against `Σ_{μ=4m}^n`.
///
/// `p < 1`, `n ≥ 4m`: the left sums start at `4m` (the head inner sum too),
/// the right sums at `m`, and the direction is `≤`.
pub fn check_reverse_copson(case: &IneqCase, variant: Variant) -> Result<IneqVerdict> {
    if !case.is_monotone() {
        return Err(Error::ConstraintViolation(
            "reverse inequality needs a non-increasing sequence".into(),
        ));
    }
    let (clause, direction, lhs_start, inner_start, rhs_start) =
        copson_ranges(case.p, case.m, variant);
    let gap = if clause == 1 { 16 } else { 4 };
    if case.n < gap * case.m {
        return Err(Error::Precondition(format!(
            "clause {clause} needs n ≥ {gap}m (got m = {}, n = {})",
            case.m, case.n
        )));
    }
    let lhs = case.lhs(variant, lhs_start, inner_start);
    let rhs = case.rhs(variant, rhs_start);
    Ok(IneqVerdict::new(
        LemmaId::ReverseCopson,
        Some(variant),
        direction,
        Some(clause),
        lhs,
        rhs,
    ))
}

/// Two-sided comparison over `μ = 1..=n` for non-increasing sequences.
/// Returns the lower (`≥ c`) and upper (`≤ C`) readings of the same ratio.
pub fn check_two_sided_asymp(
    case: &IneqCase,
    variant: Variant,
) -> Result<(IneqVerdict, IneqVerdict)> {
    if !case.is_monotone() {
        return Err(Error::ConstraintViolation(
            "two-sided inequality needs a non-increasing sequence".into(),
        ));
    }
    let lhs = case.lhs(variant, 1, 1);
    let rhs = case.rhs(variant, 1);
    let lower = IneqVerdict::new(
        LemmaId::TwoSided,
        Some(variant),
        Direction::AtLeast,
        None,
        lhs,
        rhs,
    );
    Ok((
        lower,
        IneqVerdict {
            direction: Direction::AtMost,
            ..lower
        },
    ))
}

/// Sequence families for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceFamily {
    /// `ν^{−s}`.
    Power { s: f64 },
    /// `q^ν`.
    Geometric { q: f64 },
    /// `ν^{−s} / ln(ν + 1)^β`.
    LogPower { s: f64, beta: f64 },
    /// Running maxima of i.i.d. uniforms taken from the far end; non-increasing.
    RandomMonotone,
    /// i.i.d. uniforms on `[0, 1)`.
    RandomUniform,
}

impl SequenceFamily {
    pub fn name(&self) -> String {
        match *self {
            SequenceFamily::Power { s } => format!("power({s})"),
            SequenceFamily::Geometric { q } => format!("geometric({q})"),
            SequenceFamily::LogPower { s, beta } => format!("log-power({s};{beta})"),
            SequenceFamily::RandomMonotone => "random-monotone".into(),
            SequenceFamily::RandomUniform => "random-uniform".into(),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, SequenceFamily::RandomMonotone | SequenceFamily::RandomUniform)
    }

    /// `a_1..a_len`. Random families draw from ChaCha8 seeded with `seed`
    /// on stream `stream`; a shorter sequence is a prefix of a longer one
    /// only for [`SequenceFamily::RandomUniform`].
    pub fn generate(&self, len: usize, seed: u64, stream: u64) -> Vec<f64> {
        match *self {
            SequenceFamily::Power { s } => (1..=len).map(|nu| (nu as f64).powf(-s)).collect(),
            SequenceFamily::Geometric { q } => (1..=len).map(|nu| q.powi(nu as i32)).collect(),
            SequenceFamily::LogPower { s, beta } => (1..=len)
                .map(|nu| (nu as f64).powf(-s) / ((nu + 1) as f64).ln().powf(beta))
                .collect(),
            SequenceFamily::RandomMonotone => {
                let mut seq = uniforms(len, seed, stream);
                for i in (0..len.saturating_sub(1)).rev() {
                    seq[i] = seq[i].max(seq[i + 1]);
                }
                seq
            }
            SequenceFamily::RandomUniform => uniforms(len, seed, stream),
        }
    }
}

fn uniforms(len: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..len).map(|_| rng.random::<f64>()).collect()
}

/// A random Jensen instance: length in `1..=64`, entries uniform in
/// `[0, 1)`, exponents `0 < α < β ≤ 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct JensenCase {
    pub seq: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

pub fn jensen_case(seed: u64, index: u64) -> JensenCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let len = rng.random_range(1..=64usize);
    let seq = (0..len).map(|_| rng.random::<f64>()).collect();
    let (mut alpha, mut beta) = (rng.random_range(0.01..4.0f64), rng.random_range(0.01..4.0f64));
    if alpha > beta {
        std::mem::swap(&mut alpha, &mut beta);
    }
    if alpha == beta {
        beta = (alpha + 0.01).min(4.0);
        alpha = beta - 0.01;
    }
    JensenCase { seq, alpha, beta }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Precondition not met; the row carries no values.
    Skip,
}

/// One exported sweep result.
///
/// Jensen rows put `β` in the `p` column and the sequence length in `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub lemma_id: LemmaId,
    pub variant: Option<Variant>,
    pub family: String,
    pub clause: Option<u8>,
    pub alpha: f64,
    pub lambda_exp: Option<f64>,
    pub p: f64,
    pub m: Option<usize>,
    pub n: usize,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub seed: u64,
    pub status: RowStatus,
}

/// Grid of a sequence-inequality sweep. Every combination of lemma,
/// variant, family, `(α, λ, p)`, `m` and `n` becomes one row; Jensen
/// contributes `jensen_cases` random rows instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepGrid {
    pub lemmas: Vec<LemmaId>,
    pub variants: Vec<Variant>,
    pub families: Vec<SequenceFamily>,
    pub alphas: Vec<f64>,
    pub lambda_exps: Vec<f64>,
    pub ps: Vec<f64>,
    pub m_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub jensen_cases: u64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            lemmas: vec![
                LemmaId::Jensen,
                LemmaId::HardyUpper,
                LemmaId::HardyLower,
                LemmaId::ReverseCopson,
                LemmaId::TwoSided,
            ],
            variants: vec![Variant::Tail, Variant::Head],
            families: vec![
                SequenceFamily::Power { s: 2.0 },
                SequenceFamily::Geometric { q: 0.9 },
                SequenceFamily::LogPower { s: 1.0, beta: 2.0 },
                SequenceFamily::RandomMonotone,
            ],
            alphas: vec![0.5, 1.0, 2.0],
            lambda_exps: vec![-0.5, 0.0, 0.5],
            ps: vec![0.5, 1.0, 2.0],
            m_values: vec![1, 2, 4],
            n_values: vec![16, 32, 64, 128],
            jensen_cases: 1000,
        }
    }
}

struct SweepItem {
    lemma: LemmaId,
    variant: Variant,
    family: SequenceFamily,
    family_index: u64,
    alpha: f64,
    lambda_exp: f64,
    p: f64,
    m: usize,
    n: usize,
}

fn applies(lemma: LemmaId, p: f64) -> bool {
    match lemma {
        LemmaId::HardyUpper => p >= 1.0,
        LemmaId::HardyLower => p <= 1.0,
        _ => true,
    }
}

fn run_item(item: &SweepItem, seq: &[f64], seed: u64) -> Result<Vec<SweepRow>> {
    let case = IneqCase::new(seq.to_vec(), item.alpha, item.lambda_exp, item.p, item.m, item.n)?;
    let verdicts = match item.lemma {
        LemmaId::HardyUpper => check_hardy_upper(&case, item.variant).map(|v| vec![v]),
        LemmaId::HardyLower => check_hardy_lower(&case, item.variant).map(|v| vec![v]),
        LemmaId::ReverseCopson => check_reverse_copson(&case, item.variant).map(|v| vec![v]),
        LemmaId::TwoSided => check_two_sided_asymp(&case, item.variant).map(|(lo, _)| vec![lo]),
        LemmaId::Jensen => unreachable!("jensen rows are generated separately"),
    };
    let row = |clause, lhs, rhs, ratio, status| SweepRow {
        lemma_id: item.lemma,
        variant: Some(item.variant),
        family: item.family.name(),
        clause,
        alpha: item.alpha,
        lambda_exp: Some(item.lambda_exp),
        p: item.p,
        m: Some(item.m),
        n: item.n,
        lhs,
        rhs,
        ratio,
        seed,
        status,
    };
    match verdicts {
        Ok(vs) => Ok(vs
            .into_iter()
            .map(|v| row(v.clause, Some(v.lhs), Some(v.rhs), v.ratio, RowStatus::Ok))
            .collect()),
        Err(Error::Precondition(_)) => {
            let clause = (item.lemma == LemmaId::ReverseCopson)
                .then(|| copson_ranges(item.p, item.m, item.variant).0);
            Ok(vec![row(clause, None, None, None, RowStatus::Skip)])
        }
        Err(e) => Err(e),
    }
}

/// Run a sweep. Rows come back in grid order whatever the thread count.
pub fn run_sweep(grid: &SweepGrid, seed: u64) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    if grid.lemmas.contains(&LemmaId::Jensen) {
        let jensen: Vec<SweepRow> = (0..grid.jensen_cases)
            .into_par_iter()
            .map(|i| {
                let c = jensen_case(seed, i);
                let v = check_jensen(&c.seq, c.alpha, c.beta)?;
                Ok(SweepRow {
                    lemma_id: LemmaId::Jensen,
                    variant: None,
                    family: SequenceFamily::RandomUniform.name(),
                    clause: None,
                    alpha: c.alpha,
                    lambda_exp: None,
                    p: c.beta,
                    m: None,
                    n: c.seq.len(),
                    lhs: Some(v.lhs),
                    rhs: Some(v.rhs),
                    ratio: v.ratio,
                    seed,
                    status: RowStatus::Ok,
                })
            })
            .collect::<Result<_>>()?;
        rows.extend(jensen);
    }

    let max_n = grid.n_values.iter().copied().max().unwrap_or(0);
    let sequences: Vec<Vec<f64>> = grid
        .families
        .iter()
        .enumerate()
        .map(|(i, f)| f.generate(max_n, seed, i as u64))
        .collect();
    let mut items = Vec::new();
    for &lemma in grid.lemmas.iter().filter(|&&l| l != LemmaId::Jensen) {
        for &variant in &grid.variants {
            for (fi, &family) in grid.families.iter().enumerate() {
                for &alpha in &grid.alphas {
                    for &lambda_exp in &grid.lambda_exps {
                        for &p in grid.ps.iter().filter(|&&p| applies(lemma, p)) {
                            for &m in &grid.m_values {
                                for &n in &grid.n_values {
                                    items.push(SweepItem {
                                        lemma,
                                        variant,
                                        family,
                                        family_index: fi as u64,
                                        alpha,
                                        lambda_exp,
                                        p,
                                        m,
                                        n,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let rest: Vec<Vec<SweepRow>> = items
        .par_iter()
        .map(|item| run_item(item, &sequences[item.family_index as usize], seed))
        .collect::<Result<_>>()?;
    rows.extend(rest.into_iter().flatten());
    Ok(rows)
}
