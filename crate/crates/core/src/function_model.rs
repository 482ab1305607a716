//! Grid synthesis of cosine series, quadrature `L_p` norms, the `k`-th
//! difference operator and the modulus of smoothness `ω_k(f, t)_p`.
//!
//! Norms carry no `1/(2π)` normalization: `‖cos‖_2 = √π`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::{self, Neumaier};
use crate::types::{CosineSeries, GridFunction};

/// Default spatial grid size.
pub const DEFAULT_GRID: usize = 1 << 12;
/// Default number of shift samples on `[0, t]`, endpoints included.
pub const DEFAULT_H_SAMPLES: usize = 257;

/// Parameters of one modulus evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusRequest {
    pub k: u32,
    pub t: f64,
    pub p: f64,
    pub h_samples: usize,
}

impl ModulusRequest {
    /// `t = 0` is accepted and yields a zero modulus.
    pub fn new(k: u32, t: f64, p: f64, h_samples: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ConstraintViolation("order k must be ≥ 1".into()));
        }
        if !(0.0..=PI).contains(&t) {
            return Err(Error::Domain(format!("t = {t} is outside (0, π]")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p = {p} is not in (1, ∞)")));
        }
        if h_samples < 16 {
            return Err(Error::ConstraintViolation(format!(
                "h_samples = {h_samples} must be at least 16"
            )));
        }
        Ok(Self {
            k,
            t,
            p,
            h_samples,
        })
    }
}

/// Which route produced a modulus value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusPath {
    ExactP2,
    Grid,
}

fn check_grid(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::ConstraintViolation(format!(
            "grid size {n} must be a power of two ≥ 8"
        )));
    }
    Ok(())
}

fn check_alias(series: &CosineSeries, n: usize) -> Result<()> {
    check_grid(n)?;
    let top = series.max_frequency();
    if top > 0 && (n as u64) <= 2 * top {
        return Err(Error::Alias {
            grid: n,
            frequency: top,
        });
    }
    Ok(())
}

/// Planned inverse transform that turns one-sided spectra into real samples.
struct Synthesizer {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Synthesizer {
    fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(n);
        Self { n, fft }
    }

    /// Real part of `Σ_ν c_ν e^{iνx_j}`.
    fn run(&self, bins: impl Iterator<Item = (u64, Complex64)>) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for (nu, c) in bins {
            buf[nu as usize] += c;
        }
        self.fft.process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Two real syntheses from one transform: each spectrum is made
    /// Hermitian, the second is multiplied by `i`, and the real and
    /// imaginary parts of the output separate again.
    fn run_pair(
        &self,
        first: impl Iterator<Item = (u64, Complex64)>,
        second: impl Iterator<Item = (u64, Complex64)>,
    ) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        let i = Complex64::new(0.0, 1.0);
        for (spectrum, rot) in [(first.collect::<Vec<_>>(), Complex64::new(1.0, 0.0)), (second.collect(), i)] {
            for (nu, c) in spectrum {
                let nu = nu as usize;
                buf[nu] += rot * c * 0.5;
                buf[self.n - nu] += rot * c.conj() * 0.5;
            }
        }
        self.fft.process(&mut buf);
        buf
    }
}

/// `(e^{iνh} - 1)^k` in polar form: `(2 sin(νh/2))^k e^{ik(νh + π)/2}`.
fn difference_multiplier(nu: f64, h: f64, k: u32) -> Complex64 {
    let half = 0.5 * nu * h;
    let mag = (2.0 * half.sin()).powi(k as i32);
    let phase = k as f64 * (half + 0.5 * PI);
    Complex64::from_polar(mag, phase)
}

/// Sample the stored part of `series` on `n` equispaced points of `[0, 2π)`.
pub fn synthesize(series: &CosineSeries, n: usize) -> Result<GridFunction> {
    check_alias(series, n)?;
    let synth = Synthesizer::new(n);
    let samples = synth.run(
        series
            .harmonics()
            .filter(|&(_, a)| a != 0.0)
            .map(|(nu, a)| (nu, Complex64::new(a, 0.0))),
    );
    GridFunction::new(samples)
}

/// Rectangle-rule `(∫_0^{2π} |f|^p)^{1/p}`.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    lp_norm_samples(f.samples(), p)
}

fn lp_norm_samples(samples: &[f64], p: f64) -> f64 {
    lp_norm_iter(samples.iter().copied(), samples.len(), p)
}

fn lp_norm_iter(samples: impl Iterator<Item = f64> + Clone, len: usize, p: f64) -> f64 {
    let step = TAU / len as f64;
    if p == 2.0 {
        (step * summation::sum(samples.map(|v| v * v))).sqrt()
    } else {
        // Scale by the largest sample to keep |f|^p in range.
        let scale = samples.clone().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let s = summation::sum(samples.map(|v| (v.abs() / scale).powf(p)));
        scale * (step * s).powf(1.0 / p)
    }
}

/// `Δ_h^k f` for a bare grid function, with off-grid values supplied by
/// trigonometric (Fourier) interpolation of the samples.
pub fn difference(f: &GridFunction, h: f64, k: u32) -> GridFunction {
    let n = f.len();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = f
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    forward.process(&mut buf);
    let half = n / 2;
    for (j, z) in buf.iter_mut().enumerate() {
        let m = if j < half {
            difference_multiplier(j as f64, h, k)
        } else if j > half {
            difference_multiplier(j as f64 - n as f64, h, k)
        } else {
            // Nyquist mode interpolates as cos(n/2·x); only the cosine part survives on the grid.
            Complex64::new(difference_multiplier(half as f64, h, k).re, 0.0)
        };
        *z *= m;
    }
    inverse.process(&mut buf);
    let scale = 1.0 / n as f64;
    GridFunction::new(buf.into_iter().map(|z| z.re * scale).collect())
        .expect("difference preserves grid shape")
}

/// `Δ_h^k f` sampled on `n` points, evaluated exactly from the coefficients.
pub fn difference_series(series: &CosineSeries, h: f64, k: u32, n: usize) -> Result<GridFunction> {
    check_alias(series, n)?;
    let synth = Synthesizer::new(n);
    GridFunction::new(difference_with(&synth, series, h, k))
}

fn difference_with(synth: &Synthesizer, series: &CosineSeries, h: f64, k: u32) -> Vec<f64> {
    synth.run(
        series
            .harmonics()
            .filter(|&(_, a)| a != 0.0)
            .map(|(nu, a)| (nu, a * difference_multiplier(nu as f64, h, k))),
    )
}

/// Uniform shift grid on `[0, t]` with both endpoints.
pub fn shift_grid(t: f64, samples: usize) -> impl IndexedParallelIterator<Item = f64> {
    let last = (samples - 1) as f64;
    (0..samples)
        .into_par_iter()
        .map(move |i| if i + 1 == samples { t } else { t * i as f64 / last })
}

/// `ω_k(f, t)_p` on an `n`-point spatial grid: the largest `‖Δ_h^k f‖_p`
/// over `h_samples` equispaced shifts in `[0, t]`.
pub fn modulus(series: &CosineSeries, req: &ModulusRequest, n: usize) -> Result<f64> {
    check_alias(series, n)?;
    if req.t == 0.0 || series.max_frequency() == 0 {
        return Ok(0.0);
    }
    let synth = Synthesizer::new(n);
    Ok(modulus_with(&synth, series, req))
}

fn modulus_with(synth: &Synthesizer, series: &CosineSeries, req: &ModulusRequest) -> f64 {
    let hs: Vec<f64> = shift_grid(req.t, req.h_samples).collect();
    let spectrum = |h: f64| {
        series
            .harmonics()
            .filter(|&(_, a)| a != 0.0)
            .map(move |(nu, a)| (nu, a * difference_multiplier(nu as f64, h, req.k)))
    };
    let norms: Vec<f64> = hs
        .par_chunks(2)
        .flat_map_iter(|pair| match *pair {
            [h1, h2] => {
                let z = synth.run_pair(spectrum(h1), spectrum(h2));
                vec![
                    lp_norm_iter(z.iter().map(|v| v.re), z.len(), req.p),
                    lp_norm_iter(z.iter().map(|v| v.im), z.len(), req.p),
                ]
            }
            [h] => vec![lp_norm_samples(&difference_with(synth, series, h, req.k), req.p)],
            _ => unreachable!(),
        })
        .collect();
    norms.into_iter().fold(0.0, f64::max)
}

/// Grid moduli for several `t` values sharing one transform plan.
pub fn modulus_curve(
    series: &CosineSeries,
    k: u32,
    p: f64,
    ts: &[f64],
    h_samples: usize,
    n: usize,
) -> Result<Vec<f64>> {
    check_alias(series, n)?;
    let reqs = ts
        .iter()
        .map(|&t| ModulusRequest::new(k, t, p, h_samples))
        .collect::<Result<Vec<_>>>()?;
    if series.max_frequency() == 0 {
        return Ok(vec![0.0; ts.len()]);
    }
    let synth = Synthesizer::new(n);
    Ok(reqs
        .iter()
        .map(|req| {
            if req.t == 0.0 {
                0.0
            } else {
                modulus_with(&synth, series, req)
            }
        })
        .collect())
}

/// `Σ_ν a_ν² (2 sin(νh/2))^{2k}`, i.e. `‖Δ_h^k f‖_2² / π` by Parseval.
///
/// Consecutive frequencies advance `(sin, cos)` by rotation and re-anchor
/// with a direct evaluation every 16 steps.
fn difference_energy(series: &CosineSeries, h: f64, k: u32) -> f64 {
    const ANCHOR_EVERY: u32 = 16;
    let (step_s, step_c) = (0.5 * h).sin_cos();
    let mut acc = Neumaier::new();
    let mut prev = u64::MAX;
    let mut since_anchor = 0u32;
    let (mut s, mut c) = (0.0f64, 1.0f64);
    for (nu, a) in series.harmonics() {
        if prev != u64::MAX && nu == prev + 1 && since_anchor < ANCHOR_EVERY {
            (s, c) = (s * step_c + c * step_s, c * step_c - s * step_s);
            since_anchor += 1;
        } else {
            (s, c) = (0.5 * nu as f64 * h).sin_cos();
            since_anchor = 0;
        }
        prev = nu;
        if a != 0.0 {
            let m = 4.0 * s * s;
            acc.add(a * a * m.powi(k as i32));
        }
    }
    acc.value()
}

/// `ω_k(f, t)_2` from the Parseval closed form
/// `sup_{h ≤ t} (π Σ_ν a_ν² (2 sin(νh/2))^{2k})^{1/2}`, no spatial grid.
/// The supremum runs over the same shift grid as [`modulus`].
pub fn modulus_p2_exact(series: &CosineSeries, k: u32, t: f64, h_samples: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let energies: Vec<f64> = shift_grid(t, h_samples)
        .map(|h| difference_energy(series, h, k))
        .collect();
    (PI * energies.into_iter().fold(0.0, f64::max)).sqrt()
}
