use std::f64::consts::PI;

use nbesov::approximation::{best_approx, dyadic_best_approx_curve};
use nbesov::function_model::{modulus_curve, modulus_p2_exact, DEFAULT_GRID, DEFAULT_H_SAMPLES};
use nbesov::functionals::{
    dyadic_e_functional, integral_functional_i, lacunary_functional_d, membership_test,
    monotone_coefficient_functional, series_functional_j, FunctionalValue, MembershipReport,
    ModulusOptions, OmegaTable,
};
use nbesov::inequality::{run_sweep, RowStatus, SweepGrid, SweepRow};
use nbesov::{
    phi_eval, phi_property_check, ClassParams, CosineSeries, CurveLabel, FunctionalCurve,
    MajorantPhi, SeriesTag,
};
use rayon::prelude::*;

use crate::config::{example_series, CoeffColumn, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::{Cell, Report};

/// Command-line overrides shared by all subcommands.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_nu: Option<u64>,
}

fn default_n_values() -> Vec<u64> {
    (1..=8).map(|i| 1u64 << i).collect()
}

/// Smallest power of two at least `DEFAULT_GRID` that resolves every stored harmonic.
fn auto_grid(series: &CosineSeries) -> usize {
    let need = (4 * series.max_frequency().max(1)).next_power_of_two() as usize;
    need.max(DEFAULT_GRID)
}

fn exponent_p(cfg: &RunConfig) -> f64 {
    cfg.params
        .map(|p| p.p)
        .or(cfg.modulus.p)
        .unwrap_or(2.0)
}

fn ratio(num: f64, den: f64) -> Cell {
    if den > 0.0 {
        Cell::Float(num / den)
    } else {
        Cell::Empty
    }
}

/// `ω_k(f, t)_p` on the spatial grid, with the Parseval value alongside at `p = 2`.
pub fn cmd_modulus(cfg: &RunConfig) -> CliResult<Report> {
    let series = cfg.series()?;
    let k = cfg
        .modulus
        .k
        .or(cfg.params.map(|p| p.k))
        .ok_or_else(|| CliError::Config("modulus.k (or params.k) required".into()))?;
    let p = exponent_p(cfg);
    let ts = cfg
        .sweep
        .t_values
        .clone()
        .unwrap_or_else(|| (1..=8).map(|j| PI * j as f64 / 8.0).collect());
    let h_samples = cfg.modulus.h_samples.unwrap_or(DEFAULT_H_SAMPLES);
    let grid = cfg.modulus.grid.unwrap_or_else(|| auto_grid(&series));
    let omegas = modulus_curve(&series, k, p, &ts, h_samples, grid)?;

    let mut report = Report::new("modulus", &["t", "omega", "omega_exact"]);
    let mut worst = 0.0f64;
    for (&t, &w) in ts.iter().zip(&omegas) {
        let exact = (p == 2.0).then(|| modulus_p2_exact(&series, k, t, h_samples));
        if let Some(e) = exact.filter(|&e| e > 0.0) {
            worst = worst.max((w - e).abs() / e);
        }
        report.push(vec![t.into(), w.into(), Cell::opt(exact)]);
    }
    report.note(format!(
        "modulus: k = {k}, p = {p}, grid = {grid}, h_samples = {h_samples}, {} rows",
        ts.len()
    ));
    if p == 2.0 {
        report.note(format!("max relative difference grid vs exact: {worst:.3e}"));
    }
    Ok(report)
}

pub fn cmd_best_approx(cfg: &RunConfig) -> CliResult<Report> {
    let series = cfg.series()?;
    let p = exponent_p(cfg);
    let grid = cfg.modulus.grid.unwrap_or_else(|| auto_grid(&series));
    let ns = cfg.sweep.n_values.clone().unwrap_or_else(default_n_values);
    let results = ns
        .par_iter()
        .map(|&n| best_approx(&series, n, p, grid))
        .collect::<nbesov::Result<Vec<_>>>()?;
    let mut report = Report::new("best-approx", &["n", "best_approx", "method"]);
    for r in &results {
        report.push(vec![r.n.into(), r.value.into(), r.kind.name().into()]);
    }
    report.note(format!("best-approx: p = {p}, {} rows", results.len()));
    Ok(report)
}

fn check_divergence(name: &str, n: u64, v: &FunctionalValue) -> CliResult<()> {
    if v.is_divergent() {
        return Err(CliError::Truncation(format!(
            "{name} diverges at n = {n} ({:?})",
            v.truncation
        )));
    }
    Ok(())
}

fn floor_log2(n: u64) -> u32 {
    63 - n.leading_zeros()
}

/// Side-by-side table of the class functional in all available forms.
pub fn cmd_equivalence(cfg: &RunConfig, ov: Overrides) -> CliResult<Report> {
    let series = cfg.series()?;
    let params = cfg.params()?;
    let ns = cfg.sweep.n_values.clone().unwrap_or_else(default_n_values);
    let max_n = *ns.last().expect("validated non-empty");

    let coeff_kind = match (cfg.equivalence.coeff, series.tag()) {
        (CoeffColumn::Auto, SeriesTag::General) => None,
        (CoeffColumn::Auto, tag) => Some(tag),
        (CoeffColumn::Monotone, _) => Some(SeriesTag::Monotone),
        (CoeffColumn::Lacunary, _) => Some(SeriesTag::Lacunary),
    };
    if let Some(tag) = coeff_kind {
        series.require(tag)?;
    }

    let nu_max = ov
        .max_nu
        .unwrap_or_else(|| (4 * max_n).next_power_of_two().max(1024));
    let opts = ModulusOptions {
        h_samples: cfg.modulus.h_samples.unwrap_or(DEFAULT_H_SAMPLES),
        grid: cfg.modulus.grid.unwrap_or_else(|| auto_grid(&series)),
    };
    let table = OmegaTable::for_params(&series, &params, nu_max, &opts)?;
    let levels = cfg
        .sweep
        .levels
        .unwrap_or_else(|| (floor_log2(max_n) + 8).min(62));
    let e_curve = dyadic_best_approx_curve(&series, levels, params.p, opts.grid)?;

    struct Row {
        n: u64,
        i: FunctionalValue,
        j: FunctionalValue,
        coeff: Option<FunctionalValue>,
        e: FunctionalValue,
    }
    let rows = ns
        .par_iter()
        .map(|&n| {
            let i = integral_functional_i(&table, &params, n)?;
            let j = series_functional_j(&table, &params, n)?;
            let coeff = match coeff_kind {
                Some(SeriesTag::Monotone) => Some(monotone_coefficient_functional(&series, &params, n)?),
                Some(SeriesTag::Lacunary) => Some(lacunary_functional_d(&series, &params, n)?),
                _ => None,
            };
            let e = dyadic_e_functional(&e_curve, &params, floor_log2(n))?;
            Ok(Row { n, i, j, coeff, e })
        })
        .collect::<nbesov::Result<Vec<_>>>()?;

    let phi = cfg.phi.clone();
    let mut report = Report::new(
        "equivalence",
        &[
            "n", "I", "J", "coeff", "E", "phi", "J_over_I", "coeff_over_J", "coeff_over_E",
            "J_over_phi",
        ],
    );
    let mut warnings = Vec::new();
    for r in &rows {
        check_divergence("I", r.n, &r.i)?;
        check_divergence("J", r.n, &r.j)?;
        check_divergence("E", r.n, &r.e)?;
        if let Some(c) = &r.coeff {
            check_divergence("coeff", r.n, c)?;
        }
        for (name, v) in [("I", &r.i), ("J", &r.j), ("E", &r.e)] {
            if v.truncation_warning() {
                warnings.push(format!(
                    "warning: {name} remainder is {:.1}% of the partial sum at n = {}",
                    100.0 * v.remainder_fraction(),
                    r.n
                ));
            }
        }
        let phi_n = phi
            .as_ref()
            .map(|f| phi_eval(f, 1.0 / r.n as f64))
            .transpose()?;
        let coeff = r.coeff.map(|c| c.value);
        report.push(vec![
            r.n.into(),
            r.i.value.into(),
            r.j.value.into(),
            Cell::opt(coeff),
            r.e.value.into(),
            Cell::opt(phi_n),
            ratio(r.j.value, r.i.value),
            coeff.map_or(Cell::Empty, |c| ratio(c, r.j.value)),
            coeff.map_or(Cell::Empty, |c| ratio(c, r.e.value)),
            phi_n.map_or(Cell::Empty, |f| ratio(r.j.value, f)),
        ]);
    }

    report.note(format!(
        "equivalence: {} rows, ν_max = {nu_max}, modulus path = {:?}, E levels = {levels}",
        rows.len(),
        table.path()
    ));
    for name in ["J_over_I", "coeff_over_J", "coeff_over_E"] {
        if let Some((lo, hi)) = column_range(&report, name) {
            report.note(format!("{name}: min {lo:.6e}, max {hi:.6e}, max/min {:.4}", hi / lo));
        }
    }
    if let Some(phi) = &phi {
        let curve = FunctionalCurve::new(
            CurveLabel::SeriesJ,
            Some(params),
            rows.iter().map(|r| (r.n, r.j.value)).collect(),
        )?;
        let m = membership_test(&curve, phi, cfg.tolerances.slope_tol)?;
        report.note(membership_line("J", phi, &m));
    }
    report.summary.extend(warnings);
    Ok(report)
}

fn column_range(report: &Report, name: &str) -> Option<(f64, f64)> {
    let vals: Vec<f64> = report
        .column(name)?
        .into_iter()
        .filter_map(|c| match c {
            Cell::Float(v) => Some(*v),
            _ => None,
        })
        .collect();
    if vals.is_empty() {
        return None;
    }
    Some(vals.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v))))
}

pub fn phi_label(phi: &MajorantPhi) -> String {
    match phi {
        MajorantPhi::Power { alpha } => format!("power({alpha})"),
        MajorantPhi::Constant => "constant".into(),
        MajorantPhi::InvLog { alpha } => format!("inv_log({alpha})"),
        MajorantPhi::Tabulated { table } => format!("tabulated({} points)", table.len()),
    }
}

fn membership_line(what: &str, phi: &MajorantPhi, m: &MembershipReport) -> String {
    format!(
        "membership {what} vs {}: sup_ratio {:.6e}, tail slope {:.4}, verdict {}",
        phi_label(phi),
        m.sup_ratio,
        m.tail_slope,
        m.verdict.name()
    )
}

/// Parameters of the lacunary example `a_μ = 2^{-μr}(μ+1)^{-(α+1/θ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleArgs {
    pub r: f64,
    pub alpha: f64,
    pub theta: f64,
    pub lambda: f64,
    pub max_n: u32,
}

impl Default for ExampleArgs {
    fn default() -> Self {
        Self {
            r: 1.0,
            alpha: 0.5,
            theta: 1.0,
            lambda: 0.25,
            max_n: 60,
        }
    }
}

/// Rows of the example table plus the membership tests of `D_{2^n}`.
#[derive(Debug, Clone)]
pub struct ExampleOutcome {
    pub t1: Vec<(u32, f64)>,
    pub t2: Vec<(u32, f64)>,
    pub d_curve: FunctionalCurve,
    /// `Σ_μ a_μ^θ 2^{μrθ}`, finite exactly when the series is in the `B` class.
    pub b_sum: f64,
    pub memberships: Vec<MembershipReport>,
}

pub fn run_example(args: ExampleArgs, slope_tol: f64) -> CliResult<ExampleOutcome> {
    let ExampleArgs {
        r,
        alpha,
        theta,
        lambda,
        max_n,
    } = args;
    if !(r > 0.0 && alpha > 0.0 && theta > 0.0 && lambda > 0.0) {
        return Err(CliError::Config("example: r, α, θ, λ must be positive".into()));
    }
    if !(1..=61).contains(&max_n) {
        return Err(CliError::Config("example: max_n must be in 1..=61".into()));
    }
    let series = example_series(r, alpha, theta, max_n as usize + 1).map_err(crate::error::fixture)?;
    let k = (r + lambda).floor() as u32 + 1;
    let params = ClassParams::new(2.0, theta, r, lambda, k)?;

    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut d = Vec::new();
    for n in 1..=max_n {
        let nf = n as f64;
        let tail = series.dyadic_weighted_sum(n as u64 + 1, None, theta, r * theta)?;
        let head = series.dyadic_weighted_sum(0, Some(n as u64), theta, (r + lambda) * theta)?;
        let attenuated = (-nf * lambda * theta * std::f64::consts::LN_2).exp() * head;
        t1.push((n, nf.powf(alpha) * tail.powf(1.0 / theta)));
        t2.push((n, nf.powf(alpha + 1.0 / theta) * attenuated.powf(1.0 / theta)));
        let dm = lacunary_functional_d(&series, &params, 1u64 << n)?;
        d.push((1u64 << n, dm.value));
    }
    let d_curve = FunctionalCurve::new(CurveLabel::LacunaryD, Some(params), d)?;
    let b_sum = series.dyadic_weighted_sum(0, None, theta, r * theta)?;
    let phis = [
        MajorantPhi::inv_log(alpha)?,
        MajorantPhi::Constant,
        MajorantPhi::power(0.1)?,
        MajorantPhi::power(0.25)?,
    ];
    let memberships = phis
        .iter()
        .map(|phi| membership_test(&d_curve, phi, slope_tol))
        .collect::<nbesov::Result<Vec<_>>>()?;
    Ok(ExampleOutcome {
        t1,
        t2,
        d_curve,
        b_sum,
        memberships,
    })
}

pub fn cmd_example(args: ExampleArgs, slope_tol: f64) -> CliResult<Report> {
    let out = run_example(args, slope_tol)?;
    let phi = MajorantPhi::inv_log(args.alpha)?;
    let mut report = Report::new("example", &["n", "T1", "T2", "D", "phi", "D_over_phi"]);
    for ((&(n, t1), &(_, t2)), &(m, dv)) in out.t1.iter().zip(&out.t2).zip(out.d_curve.entries()) {
        let f = phi_eval(&phi, 1.0 / m as f64)?;
        report.push(vec![
            (n as u64).into(),
            t1.into(),
            t2.into(),
            dv.into(),
            f.into(),
            ratio(dv, f),
        ]);
    }
    report.note(format!(
        "example: r = {}, α = {}, θ = {}, λ = {}, n = 1..={}",
        args.r, args.alpha, args.theta, args.lambda, args.max_n
    ));
    for name in ["T1", "T2"] {
        if let Some((lo, hi)) = column_range(&report, name) {
            report.note(format!("{name}: min {lo:.6e}, max {hi:.6e}, max/min {:.4}", hi / lo));
        }
    }
    report.note(format!("B-class sum Σ a_μ^θ 2^(μrθ) = {:.6e}", out.b_sum));
    for m in &out.memberships {
        report.note(membership_line("D", &m.phi, m));
    }
    Ok(report)
}

pub fn cmd_ineq_sweep(cfg: &RunConfig, ov: Overrides) -> CliResult<Report> {
    let grid = cfg.ineq.clone().unwrap_or_else(SweepGrid::default);
    let seed = ov.seed.or(cfg.seed).unwrap_or(0);
    let rows = run_sweep(&grid, seed)?;
    let mut report = Report::new(
        "ineq-sweep",
        &[
            "lemma_id", "variant", "family", "clause", "alpha", "lambda_exp", "p", "m", "n",
            "lhs", "rhs", "ratio", "seed", "status",
        ],
    );
    for r in &rows {
        report.push(sweep_cells(r));
    }
    let skipped = rows.iter().filter(|r| r.status == RowStatus::Skip).count();
    report.note(format!(
        "ineq-sweep: seed {seed}, {} rows, {skipped} skipped",
        rows.len()
    ));
    let rel_tol = cfg.tolerances.rel_tol;
    let jensen: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.lemma_id == nbesov::inequality::LemmaId::Jensen)
        .collect();
    if !jensen.is_empty() {
        let violations = jensen
            .iter()
            .filter(|r| r.lhs.unwrap_or(0.0) > r.rhs.unwrap_or(0.0) * (1.0 + rel_tol))
            .count();
        report.note(format!("jensen: {} cases, {violations} violations", jensen.len()));
    }
    for lemma in &grid.lemmas {
        let ratios: Vec<f64> = rows
            .iter()
            .filter(|r| r.lemma_id == *lemma)
            .filter_map(|r| r.ratio)
            .collect();
        if let (Some(lo), Some(hi)) = (
            ratios.iter().copied().reduce(f64::min),
            ratios.iter().copied().reduce(f64::max),
        ) {
            report.note(format!("{}: ratio min {lo:.6e}, max {hi:.6e}", lemma.name()));
        }
    }
    Ok(report)
}

fn sweep_cells(r: &SweepRow) -> Vec<Cell> {
    vec![
        r.lemma_id.name().into(),
        r.variant.map_or(Cell::Empty, |v| v.name().into()),
        r.family.clone().into(),
        r.clause.map_or(Cell::Empty, |c| (c as u64).into()),
        r.alpha.into(),
        Cell::opt(r.lambda_exp),
        r.p.into(),
        r.m.map_or(Cell::Empty, Cell::from),
        r.n.into(),
        Cell::opt(r.lhs),
        Cell::opt(r.rhs),
        Cell::opt(r.ratio),
        r.seed.into(),
        match r.status {
            RowStatus::Ok => "ok",
            RowStatus::Skip => "skip",
        }
        .into(),
    ]
}

/// Structural constants of the configured majorant, or of the catalog
/// defaults when none is configured.
pub fn cmd_phi_check(cfg: &RunConfig) -> CliResult<Report> {
    let phis = match &cfg.phi {
        Some(phi) => vec![phi.clone()],
        None => vec![
            MajorantPhi::power(0.5)?,
            MajorantPhi::Constant,
            MajorantPhi::inv_log(1.0)?,
        ],
    };
    let mut report = Report::new("phi-check", &["phi", "c1", "c2", "pass"]);
    for phi in &phis {
        let rep = phi_property_check(phi, 256)?;
        report.push(vec![
            phi_label(phi).into(),
            rep.c1.into(),
            rep.c2.into(),
            if rep.pass { "true" } else { "false" }.into(),
        ]);
    }
    report.note(format!("phi-check: {} majorants", phis.len()));
    Ok(report)
}
