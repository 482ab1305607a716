//! Invariants of the public API over random cosine series.

use std::f64::consts::PI;

use nbesov::approximation::best_approx;
use nbesov::function_model::{modulus_curve, modulus_p2_exact};
use nbesov::functionals::{series_functional_j, ModulusOptions, OmegaTable};
use nbesov::{ClassParams, CosineSeries};
use proptest::prelude::*;

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=16).prop_filter("non-zero", |c| {
        c.iter().any(|v| v.abs() > 1e-3)
    })
}

fn l2_norm(c: &[f64]) -> f64 {
    (PI * c.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grid_modulus_agrees_with_parseval(c in coeffs(), k in 1u32..=3, u in 0.05f64..1.0) {
        let series = CosineSeries::general(c).unwrap();
        let t = PI * u;
        let grid = modulus_curve(&series, k, 2.0, &[t], 65, 256).unwrap()[0];
        let exact = modulus_p2_exact(&series, k, t, 65);
        prop_assert!((grid - exact).abs() <= 1e-9 * exact.max(1e-300), "{} vs {}", grid, exact);
    }

    #[test]
    fn modulus_is_bounded_by_2k_norm(c in coeffs(), k in 1u32..=3, u in 0.05f64..1.0) {
        let norm = l2_norm(&c);
        let series = CosineSeries::general(c).unwrap();
        let w = modulus_p2_exact(&series, k, PI * u, 65);
        prop_assert!(w <= 2f64.powi(k as i32) * norm * (1.0 + 1e-12));
    }

    #[test]
    fn best_approx_decreases_from_full_norm(c in coeffs()) {
        let norm = l2_norm(&c);
        let len = c.len() as u64;
        let series = CosineSeries::general(c).unwrap();
        let values: Vec<f64> = (1..=len + 1)
            .map(|n| best_approx(&series, n, 2.0, 256).unwrap().value)
            .collect();
        prop_assert!((values[0] - norm).abs() <= 1e-12 * norm);
        prop_assert!(values.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(*values.last().unwrap(), 0.0);
    }

    #[test]
    fn series_functional_is_absolutely_homogeneous(c in coeffs(), scale in 0.1f64..10.0) {
        let params = ClassParams::new(2.0, 1.0, 0.5, 0.3, 1).unwrap();
        let opts = ModulusOptions::default();
        let base = CosineSeries::general(c.clone()).unwrap();
        let scaled = CosineSeries::general(c.iter().map(|v| -scale * v).collect()).unwrap();
        let j = |s: &CosineSeries| {
            let table = OmegaTable::for_params(s, &params, 64, &opts).unwrap();
            series_functional_j(&table, &params, 8).unwrap().value
        };
        let (a, b) = (j(&base), j(&scaled));
        prop_assert!((b - scale * a).abs() <= 1e-10 * b, "{} vs {}", b, scale * a);
    }
}
