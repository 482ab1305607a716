//! Sums of power-law and log-corrected geometric sequences.
//!
//! Infinite tails of `ν^{-σ}` are evaluated by brute force over a short head
//! followed by an Euler-Maclaurin expansion of the remainder, which is exact
//! to rounding once the expansion point exceeds a few multiples of `|σ|`.

use crate::error::{Error, Result};
use crate::summation::Neumaier;

/// `B_{2j} / (2j)!` for j = 1..=4.
const EM_COEFFS: [f64; 4] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
];
/// `|B_10| / 10!`, used for the truncation estimate.
const EM_NEXT: f64 = 1.0 / 47_900_160.0;

fn em_start(sigma: f64) -> u64 {
    64u64.max((8.0 * sigma.abs()).ceil() as u64 + 8)
}

/// `m`-th derivative of `x^{-σ}`.
fn power_derivative(x: f64, sigma: f64, m: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..m {
        c *= -(sigma + i as f64);
    }
    c * x.powf(-sigma - m as f64)
}

/// `∫_a^b x^{-σ} dx`, stable near `σ = 1`.
fn power_integral(a: f64, b: f64, sigma: f64) -> f64 {
    let u = 1.0 - sigma;
    let log_ratio = (b / a).ln();
    if (u * log_ratio).abs() < 1e-300 {
        return log_ratio;
    }
    a.powf(u) * (u * log_ratio).exp_m1() / u
}

fn brute(start: u64, end: u64, sigma: f64, acc: &mut Neumaier) {
    for nu in start..=end {
        acc.add((nu as f64).powf(-sigma));
    }
}

/// Finite sum `Σ_{ν=start}^{end} ν^{-σ}` for any real `σ`. Empty when `end < start`.
pub fn power_sum(start: u64, end: u64, sigma: f64) -> f64 {
    let start = start.max(1);
    if end < start {
        return 0.0;
    }
    let k = em_start(sigma);
    let mut acc = Neumaier::new();
    if end < k.max(start) + 16 {
        brute(start, end, sigma, &mut acc);
        return acc.value();
    }
    let a = if start < k {
        brute(start, k - 1, sigma, &mut acc);
        k
    } else {
        start
    };
    let (af, bf) = (a as f64, end as f64);
    acc.add(power_integral(af, bf, sigma));
    acc.add(0.5 * (af.powf(-sigma) + bf.powf(-sigma)));
    for (j, c) in EM_COEFFS.iter().enumerate() {
        let m = 2 * j as u32 + 1;
        acc.add(c * (power_derivative(bf, sigma, m) - power_derivative(af, sigma, m)));
    }
    acc.value()
}

/// An infinite tail sum together with an estimate of its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub error_bound: f64,
}

/// Infinite tail `Σ_{ν≥start} ν^{-σ}`; requires `σ > 1`.
pub fn power_tail(start: u64, sigma: f64) -> Result<TailSum> {
    if !(sigma > 1.0) {
        return Err(Error::Divergent(format!(
            "Σ ν^(-{sigma}) diverges (exponent must exceed 1)"
        )));
    }
    let start = start.max(1);
    let k = em_start(sigma);
    let mut acc = Neumaier::new();
    let a = if start < k {
        brute(start, k - 1, sigma, &mut acc);
        k
    } else {
        start
    };
    let af = a as f64;
    acc.add(af.powf(1.0 - sigma) / (sigma - 1.0));
    acc.add(0.5 * af.powf(-sigma));
    for (j, c) in EM_COEFFS.iter().enumerate() {
        acc.add(-c * power_derivative(af, sigma, 2 * j as u32 + 1));
    }
    Ok(TailSum {
        value: acc.value(),
        error_bound: EM_NEXT * power_derivative(af, sigma, 9).abs(),
    })
}

/// `Σ_{μ≥start} 2^{μ g} (μ+1)^{-q}`: the generic tail of a log-corrected
/// geometric (lacunary) sequence under a dyadic weight.
pub fn dyadic_log_tail(start: u64, g: f64, q: f64) -> Result<f64> {
    if g > 0.0 {
        return Err(Error::Divergent(format!(
            "Σ 2^(μ·{g}) (μ+1)^(-{q}) diverges (geometric ratio above 1)"
        )));
    }
    if g == 0.0 {
        return power_tail(start + 1, q).map(|t| t.value);
    }
    const MAX_TERMS: u64 = 50_000_000;
    let mut acc = Neumaier::new();
    for mu in start..start + MAX_TERMS {
        let m = mu as f64;
        let term = (m * g * std::f64::consts::LN_2 - q * (m + 1.0).ln()).exp();
        acc.add(term);
        if term <= 1e-18 * acc.value() || term == 0.0 {
            return Ok(acc.value());
        }
    }
    Err(Error::Divergent(format!(
        "Σ 2^(μ·{g}) (μ+1)^(-{q}) did not settle within {MAX_TERMS} terms"
    )))
}
