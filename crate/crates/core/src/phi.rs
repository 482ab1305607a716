//! The majorant catalog `φ` and its structural checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A majorant function on `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MajorantPhi {
    /// `δ^α`
    Power { alpha: f64 },
    /// `1`
    Constant,
    /// `(ln 1/δ)^{-α}` below `1/e`, clamped to 1 above.
    InvLog { alpha: f64 },
    /// Piecewise-linear interpolation of `(δ, φ(δ))` pairs.
    Tabulated { table: Vec<(f64, f64)> },
}

impl MajorantPhi {
    pub fn power(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Power { alpha })
    }

    pub fn inv_log(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::InvLog { alpha })
    }

    pub fn tabulated(table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::ConstraintViolation(
                "tabulated φ needs at least two points".into(),
            ));
        }
        if table.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::ConstraintViolation(
                "tabulated δ values must be strictly increasing".into(),
            ));
        }
        let (lo, hi) = (table[0].0, table[table.len() - 1].0);
        if !(lo > 0.0 && hi <= 1.0) {
            return Err(Error::ConstraintViolation(format!(
                "tabulated δ range [{lo}, {hi}] must lie in (0, 1]"
            )));
        }
        if table.iter().any(|&(_, v)| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::ConstraintViolation(
                "tabulated φ values must be finite and non-negative".into(),
            ));
        }
        if table.iter().all(|&(_, v)| v == 0.0) {
            return Err(Error::ConstraintViolation("φ must not vanish identically".into()));
        }
        Ok(Self::Tabulated { table })
    }

    /// Re-run the constructor checks, e.g. after deserialization.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Power { alpha } => Self::power(alpha),
            Self::Constant => Ok(Self::Constant),
            Self::InvLog { alpha } => Self::inv_log(alpha),
            Self::Tabulated { table } => Self::tabulated(table),
        }
    }

    /// Range of `δ` on which the majorant is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Tabulated { table } => (table[0].0, table[table.len() - 1].0),
            _ => (0.0, 1.0),
        }
    }

    pub fn eval(&self, delta: f64) -> Result<f64> {
        phi_eval(self, delta)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("α = {alpha} must be positive")))
    }
}

/// Evaluate `φ(δ)` for `δ ∈ (0, 1]`.
pub fn phi_eval(phi: &MajorantPhi, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("δ = {delta} is outside (0, 1]")));
    }
    Ok(match phi {
        MajorantPhi::Power { alpha } => delta.powf(*alpha),
        MajorantPhi::Constant => 1.0,
        MajorantPhi::InvLog { alpha } => {
            if delta < (-1.0f64).exp() {
                (-delta.ln()).powf(-alpha)
            } else {
                1.0
            }
        }
        MajorantPhi::Tabulated { table } => {
            let (lo, hi) = (table[0].0, table[table.len() - 1].0);
            if delta < lo || delta > hi {
                return Err(Error::Domain(format!(
                    "δ = {delta} is outside the table range [{lo}, {hi}]"
                )));
            }
            let i = table.partition_point(|&(d, _)| d <= delta).clamp(1, table.len() - 1);
            let (d0, v0) = table[i - 1];
            let (d1, v1) = table[i];
            v0 + (v1 - v0) * (delta - d0) / (d1 - d0)
        }
    })
}

/// Empirical quasi-monotonicity and doubling constants of a majorant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiReport {
    /// `sup φ(δ1)/φ(δ2)` over grid pairs `δ1 ≤ δ2`.
    pub c1: f64,
    /// `sup φ(2δ)/φ(δ)` over grid points `δ ≤ 1/2`.
    pub c2: f64,
    pub pass: bool,
}

/// Smallest exponent of the geometric evaluation grid: `δ_min = 2^-64`.
const GRID_LOG2_MIN: f64 = -64.0;

/// Geometric grid of `size` points spanning the majorant's domain.
pub fn phi_grid(phi: &MajorantPhi, size: usize) -> Vec<f64> {
    let (lo, hi) = match phi.domain() {
        (0.0, hi) => (GRID_LOG2_MIN.exp2(), hi),
        d => d,
    };
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..size)
        .map(|i| {
            if i + 1 == size {
                hi
            } else {
                (llo + (lhi - llo) * i as f64 / (size - 1) as f64).exp()
            }
        })
        .collect()
}

/// Estimate the constants of quasi-monotonicity (`C1`) and doubling (`C2`)
/// on a geometric grid of `grid_size` points.
pub fn phi_property_check(phi: &MajorantPhi, grid_size: usize) -> Result<PhiReport> {
    if grid_size < 16 {
        return Err(Error::Precondition(format!(
            "grid_size {grid_size} must be at least 16"
        )));
    }
    let grid = phi_grid(phi, grid_size);
    let values = grid
        .iter()
        .map(|&d| phi_eval(phi, d))
        .collect::<Result<Vec<_>>>()?;

    // Running maximum of φ over δ1 ≤ δ2 against φ(δ2).
    let mut c1: f64 = 1.0;
    let mut running: f64 = 0.0;
    for &v in &values {
        running = running.max(v);
        c1 = c1.max(ratio(running, v));
    }

    let hi = phi.domain().1;
    let mut c2: f64 = 0.0;
    for (&d, &v) in grid.iter().zip(&values) {
        if d <= 0.5 && 2.0 * d <= hi {
            c2 = c2.max(ratio(phi_eval(phi, 2.0 * d)?, v));
        }
    }
    Ok(PhiReport {
        c1,
        c2,
        pass: c1.is_finite() && c2.is_finite(),
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    match (num == 0.0, den == 0.0) {
        (true, _) => 0.0,
        (false, true) => f64::INFINITY,
        _ => num / den,
    }
}
