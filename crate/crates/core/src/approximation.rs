//! Best trigonometric approximation `E_n(f)_p` and the two-sided estimates
//! relating it (and the modulus of smoothness) to the coefficients.
//!
//! At `p = 2` the best approximation is exact by Parseval. For other `p` the
//! Fourier partial-sum error `‖f − S_{n−1} f‖_p` stands in for it; that is an
//! upper bound for `E_n` and exceeds it by at most a `p`-dependent factor.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function_model::{lp_norm, synthesize};
use crate::types::{CosineSeries, CurveLabel, FunctionalCurve, SeriesTag, TailModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxKind {
    ExactP2,
    PartialSumSurrogate,
}

impl ApproxKind {
    pub fn name(self) -> &'static str {
        match self {
            ApproxKind::ExactP2 => "exact_p2",
            ApproxKind::PartialSumSurrogate => "partial_sum_surrogate",
        }
    }
}

/// Approximation by polynomials of degree `≤ n − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxResult {
    pub n: u64,
    pub value: f64,
    pub kind: ApproxKind,
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} is not in (1, ∞)")))
    }
}

/// `E_n(f)_p`. Exact at `p = 2` (stored coefficients plus the analytic
/// tail); the partial-sum surrogate on an `grid`-point quadrature otherwise.
pub fn best_approx(series: &CosineSeries, n: u64, p: f64, grid: usize) -> Result<ApproxResult> {
    if n == 0 {
        return Err(Error::Domain("n must be ≥ 1".into()));
    }
    check_p(p)?;
    if p == 2.0 {
        let energy = series.energy_from(n)?;
        return Ok(ApproxResult {
            n,
            value: (PI * energy).sqrt(),
            kind: ApproxKind::ExactP2,
        });
    }
    Ok(ApproxResult {
        n,
        value: partial_sum_error(series, n, p, grid)?,
        kind: ApproxKind::PartialSumSurrogate,
    })
}

/// Drop every harmonic of frequency below `n`; the tail model is discarded.
pub fn remainder_series(series: &CosineSeries, n: u64) -> Result<CosineSeries> {
    let coeffs = series
        .harmonics()
        .map(|(nu, a)| if nu < n { 0.0 } else { a })
        .collect();
    let tag = match series.tag() {
        SeriesTag::Lacunary => SeriesTag::Lacunary,
        _ => SeriesTag::General,
    };
    CosineSeries::new(coeffs, tag, TailModel::Zero)
}

/// Quadrature `‖f − S_{n−1} f‖_p` of the stored part.
pub fn partial_sum_error(series: &CosineSeries, n: u64, p: f64, grid: usize) -> Result<f64> {
    check_p(p)?;
    let rest = remainder_series(series, n)?;
    Ok(lp_norm(&synthesize(&rest, grid)?, p))
}

/// `(2^μ, E_{2^μ}(f)_p)` for `μ = 0..=max_level`.
pub fn dyadic_best_approx_curve(
    series: &CosineSeries,
    max_level: u32,
    p: f64,
    grid: usize,
) -> Result<FunctionalCurve> {
    if max_level == 0 || max_level > 62 {
        return Err(Error::Domain(format!("max_level {max_level} must be in 1..=62")));
    }
    let entries = (0..=max_level)
        .map(|mu| {
            let n = 1u64 << mu;
            best_approx(series, n, p, grid).map(|r| (n, r.value))
        })
        .collect::<Result<Vec<_>>>()?;
    FunctionalCurve::new(CurveLabel::BestApproximation, None, entries)
}

/// The two terms of the coefficient expression that brackets
/// `ω_k(f, 1/n)_p` for monotone coefficients:
/// `n^{-k} (Σ_{ν≤n} a_ν^p ν^{(k+1)p−2})^{1/p} + (Σ_{ν>n} a_ν^p ν^{p−2})^{1/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusBracket {
    pub head: f64,
    pub tail: f64,
}

impl ModulusBracket {
    pub fn value(&self) -> f64 {
        self.head + self.tail
    }
}

pub fn modulus_bounds_monotone(
    series: &CosineSeries,
    n: u64,
    k: u32,
    p: f64,
) -> Result<ModulusBracket> {
    series.require(SeriesTag::Monotone)?;
    check_p(p)?;
    if n == 0 {
        return Err(Error::Domain("n must be ≥ 1".into()));
    }
    let kf = k as f64;
    let head_sum = series.dense_weighted_sum(1, Some(n), p, (kf + 1.0) * p - 2.0)?;
    let tail_sum = series.dense_weighted_sum(n + 1, None, p, p - 2.0)?;
    Ok(ModulusBracket {
        head: (n as f64).powf(-kf) * head_sum.powf(1.0 / p),
        tail: tail_sum.powf(1.0 / p),
    })
}

/// `‖f‖_p` against `(Σ a_μ²)^{1/2}` for a lacunary series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZygmundBounds {
    pub l2_value: f64,
    pub lp_value: f64,
    pub ratio: f64,
}

pub fn zygmund_norm_bounds(series: &CosineSeries, p: f64, grid: usize) -> Result<ZygmundBounds> {
    series.require(SeriesTag::Lacunary)?;
    check_p(p)?;
    let l2_value = crate::summation::sum(series.coeffs().iter().map(|a| a * a)).sqrt();
    if l2_value == 0.0 {
        return Err(Error::DivideByZero(
            "zero series has no norm ratio".into(),
        ));
    }
    let lp_value = lp_norm(&synthesize(series, grid)?, p);
    Ok(ZygmundBounds {
        l2_value,
        lp_value,
        ratio: lp_value / l2_value,
    })
}

/// `E_{2^n}(f)_p` against the dyadic `ℓ_2` tail `(Σ_{μ≥n} a_μ²)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LacunaryEBounds {
    pub l2_tail: f64,
    pub e_value: f64,
    /// `None` when the tail is empty.
    pub ratio: Option<f64>,
}

pub fn lacunary_e_bounds(
    series: &CosineSeries,
    level: u32,
    p: f64,
    grid: usize,
) -> Result<LacunaryEBounds> {
    series.require(SeriesTag::Lacunary)?;
    if level > 62 {
        return Err(Error::Domain(format!("level {level} exceeds 62")));
    }
    let l2_tail = series
        .dyadic_weighted_sum(level as u64, None, 2.0, 0.0)?
        .sqrt();
    let e_value = best_approx(series, 1u64 << level, p, grid)?.value;
    let ratio = (l2_tail > 0.0).then(|| e_value / l2_tail);
    Ok(LacunaryEBounds {
        l2_tail,
        e_value,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{modulus_p2_exact, DEFAULT_GRID};

    fn spike(nu: usize) -> CosineSeries {
        let mut c = vec![0.0; nu];
        c[nu - 1] = 1.0;
        CosineSeries::general(c).unwrap()
    }

    #[test]
    fn single_harmonic_best_approx() {
        let s = spike(5);
        assert_eq!(best_approx(&s, 6, 2.0, 64).unwrap().value, 0.0);
        let r = best_approx(&s, 5, 2.0, 64).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-15);
        assert_eq!(r.kind, ApproxKind::ExactP2);
        let r = best_approx(&s, 5, 3.0, 64).unwrap();
        assert_eq!(r.kind, ApproxKind::PartialSumSurrogate);
        assert!(best_approx(&s, 0, 2.0, 64).is_err());
    }

    #[test]
    fn power_tail_best_approx_matches_brute_force() {
        let coeffs: Vec<f64> = (1..=4).map(|k| (k as f64).powi(-2)).collect();
        let s = CosineSeries::monotone(coeffs)
            .unwrap()
            .with_tail(TailModel::power_law(1.0, 2.0))
            .unwrap();
        let got = best_approx(&s, 8, 2.0, 64).unwrap().value;
        // Brute force to machine convergence: terms below 1e-17 of the sum.
        let mut sum = 0.0;
        let mut nu = 8u64;
        loop {
            let t = (nu as f64).powi(-4);
            sum += t;
            if t < 1e-18 * sum {
                break;
            }
            nu += 1;
        }
        let want = (PI * sum).sqrt();
        assert!((got - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn dyadic_curve_examples() {
        let z = CosineSeries::lacunary(vec![0.0; 8]).unwrap();
        let c = dyadic_best_approx_curve(&z, 6, 2.0, 64).unwrap();
        assert!(c.entries().iter().all(|&(_, v)| v == 0.0));

        let geo: Vec<f64> = (0..60).map(|m| 0.5f64.powi(m)).collect();
        let s = CosineSeries::lacunary(geo).unwrap();
        let c = dyadic_best_approx_curve(&s, 20, 2.0, 64).unwrap();
        for (mu, &(n, v)) in c.entries().iter().enumerate() {
            assert_eq!(n, 1u64 << mu);
            let want = (PI * 4f64.powi(-(mu as i32)) * 4.0 / 3.0).sqrt();
            assert!((v - want).abs() < 1e-14 * want);
        }
        assert!(c.entries().windows(2).all(|w| w[1].1 <= w[0].1));
    }

    #[test]
    fn parseval_matches_partial_sum_quadrature() {
        let s = CosineSeries::general(vec![0.9, -0.4, 0.3, 0.0, 0.25, 0.1, -0.05]).unwrap();
        for n in 1..=8 {
            let exact = best_approx(&s, n, 2.0, 64).unwrap().value;
            let quad = partial_sum_error(&s, n, 2.0, 64).unwrap();
            assert!((exact - quad).abs() <= 1e-10 * exact.max(1e-300));
        }
    }

    #[test]
    fn surrogate_is_homogeneous_and_non_increasing() {
        let s = CosineSeries::general(vec![0.9, -0.4, 0.3, 0.0, 0.25, 0.1, -0.05]).unwrap();
        let scaled = s.scaled(-2.5).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=8 {
            let e = best_approx(&s, n, 3.0, 64).unwrap().value;
            let es = best_approx(&scaled, n, 3.0, 64).unwrap().value;
            assert!((es - 2.5 * e).abs() <= 1e-13 * es.max(1e-300));
            let e2 = best_approx(&s, n, 2.0, 64).unwrap().value;
            assert!(e2 <= prev);
            prev = e2;
        }
    }

    #[test]
    fn monotone_bracket() {
        let coeffs: Vec<f64> = (1..=4096).map(|k| (k as f64).powi(-2)).collect();
        let s = CosineSeries::monotone(coeffs)
            .unwrap()
            .with_tail(TailModel::power_law(1.0, 2.0))
            .unwrap();
        let b = modulus_bounds_monotone(&s, 16, 1, 2.0).unwrap();
        // Direct summation: head uses ν^{-4} ν^{2}, tail ν^{-4}, summed far past the stored range.
        let head: f64 = (1..=16).map(|k| (k as f64).powi(-2)).sum();
        let tail: f64 = (17..=2_000_000u64).map(|k| (k as f64).powi(-4)).sum();
        assert!((b.head - head.sqrt() / 16.0).abs() < 1e-8 * b.head);
        assert!((b.tail - tail.sqrt()).abs() < 1e-8 * b.tail);
        assert!(b.value() > 0.0);

        let scaled = modulus_bounds_monotone(&s.scaled(3.0).unwrap(), 16, 1, 2.0).unwrap();
        assert!((scaled.value() - 3.0 * b.value()).abs() < 1e-13 * scaled.value());

        let z = CosineSeries::monotone(vec![0.0; 10]).unwrap();
        let b = modulus_bounds_monotone(&z, 4, 2, 3.0).unwrap();
        assert_eq!((b.head, b.tail), (0.0, 0.0));

        let g = CosineSeries::general(vec![1.0]).unwrap();
        assert!(matches!(
            modulus_bounds_monotone(&g, 4, 1, 2.0),
            Err(Error::Tag { .. })
        ));
    }

    #[test]
    fn bracket_tracks_modulus_for_power_laws() {
        let coeffs: Vec<f64> = (1..=2048).map(|k| (k as f64).powf(-2.0)).collect();
        let s = CosineSeries::monotone(coeffs).unwrap();
        let ratios: Vec<f64> = [4u64, 16, 64]
            .iter()
            .map(|&n| {
                let w = modulus_p2_exact(&s, 1, 1.0 / n as f64, 257);
                w / modulus_bounds_monotone(&s, n, 1, 2.0).unwrap().value()
            })
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        assert!(lo > 0.0 && hi / lo < 3.0, "{ratios:?}");
    }

    #[test]
    fn zygmund_examples() {
        let s = CosineSeries::lacunary(vec![1.0]).unwrap();
        let z = zygmund_norm_bounds(&s, 2.0, 64).unwrap();
        assert!((z.ratio - PI.sqrt()).abs() < 1e-14);
        let zero = CosineSeries::lacunary(vec![0.0; 3]).unwrap();
        assert!(matches!(
            zygmund_norm_bounds(&zero, 2.0, 64),
            Err(Error::DivideByZero(_))
        ));
        let dense = CosineSeries::general(vec![1.0]).unwrap();
        assert!(matches!(zygmund_norm_bounds(&dense, 2.0, 64), Err(Error::Tag { .. })));
    }

    #[test]
    fn lacunary_e_examples() {
        let geo: Vec<f64> = (0..60).map(|m| 0.5f64.powi(m)).collect();
        let s = CosineSeries::lacunary(geo).unwrap();
        let b = lacunary_e_bounds(&s, 3, 2.0, DEFAULT_GRID).unwrap();
        assert!((b.ratio.unwrap() - PI.sqrt()).abs() < 1e-12);
        let want = (PI * 4f64.powi(-3) * 4.0 / 3.0).sqrt();
        assert!((b.e_value - want).abs() < 1e-15);

        let short = CosineSeries::lacunary(vec![1.0, 0.5]).unwrap();
        let b = lacunary_e_bounds(&short, 4, 2.0, 64).unwrap();
        assert_eq!((b.e_value, b.l2_tail, b.ratio), (0.0, 0.0, None));
    }
}
