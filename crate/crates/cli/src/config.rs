//! Run configuration: TOML with dotted sections, or the same structure as
//! JSON when the file name ends in `.json`.
//!
//! ```toml
//! seed = 7
//!
//! [series]
//! tag = "monotone"
//! generator = { kind = "power", s = 2.0, len = 4096 }
//!
//! [params]
//! p = 2.0
//! theta = 1.0
//! r = 0.5
//! lambda = 0.3
//! k = 1
//!
//! [phi]
//! kind = "power"
//! alpha = 0.4
//!
//! [sweep]
//! n_values = [2, 4, 8, 16, 32, 64, 128, 256]
//! ```

use std::path::Path;

use nbesov::inequality::{SequenceFamily, SweepGrid};
use nbesov::{ClassParams, CosineSeries, MajorantPhi, SeriesTag, TailModel};
use serde::Deserialize;

use crate::error::{fixture, CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub series: Option<SeriesConfig>,
    pub params: Option<ParamsConfig>,
    pub phi: Option<MajorantPhi>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub modulus: ModulusConfig,
    #[serde(default)]
    pub equivalence: EquivalenceConfig,
    pub ineq: Option<SweepGrid>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub coeffs: Option<Vec<f64>>,
    pub generator: Option<Generator>,
    pub tag: Option<SeriesTag>,
    pub tail: Option<TailModel>,
}

/// Built-in fixture families.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Monotone `a_ν = ν^{-s}`, `len` stored terms plus the exact power tail.
    Power { s: f64, len: usize },
    /// Lacunary `a_μ = q^μ`, `μ = 0..levels`.
    Geometric { q: f64, levels: usize },
    /// Lacunary `a_μ = 2^{-μr}(μ+1)^{-(α+1/θ)}` with its exact tail.
    Example {
        r: f64,
        alpha: f64,
        theta: f64,
        levels: usize,
    },
    /// `harmonics` seeded uniform coefficients (tag `general`).
    Bandlimited { harmonics: usize, seed: u64 },
}

impl Generator {
    pub fn build(&self) -> nbesov::Result<CosineSeries> {
        match *self {
            Generator::Power { s, len } => {
                let coeffs = SequenceFamily::Power { s }.generate(len.max(1), 0, 0);
                CosineSeries::monotone(coeffs)?.with_tail(TailModel::power_law(1.0, s))
            }
            Generator::Geometric { q, levels } => {
                CosineSeries::lacunary((0..levels.max(1)).map(|mu| q.powi(mu as i32)).collect())
            }
            Generator::Example {
                r,
                alpha,
                theta,
                levels,
            } => example_series(r, alpha, theta, levels),
            Generator::Bandlimited { harmonics, seed } => CosineSeries::general(
                SequenceFamily::RandomUniform.generate(harmonics.max(1), seed, 0),
            ),
        }
    }
}

/// `a_μ = 2^{-μr}(μ+1)^{-(α+1/θ)}` for `μ < levels`, continued analytically.
pub fn example_series(r: f64, alpha: f64, theta: f64, levels: usize) -> nbesov::Result<CosineSeries> {
    let beta = alpha + 1.0 / theta;
    let amplitudes = (0..levels.max(1))
        .map(|mu| 2f64.powf(-(mu as f64) * r) * (mu as f64 + 1.0).powf(-beta))
        .collect();
    CosineSeries::lacunary(amplitudes)?.with_tail(TailModel::PowerLaw {
        scale: 1.0,
        exponent: r,
        log_exponent: beta,
    })
}

impl SeriesConfig {
    pub fn build(&self) -> CliResult<CosineSeries> {
        let series = match (&self.coeffs, &self.generator) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "series: give either `coeffs` or `generator`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config("series: `coeffs` or `generator` required".into()))
            }
            (Some(coeffs), None) => {
                let tag = self.tag.unwrap_or(SeriesTag::General);
                CosineSeries::new(coeffs.clone(), tag, self.tail.unwrap_or(TailModel::Zero))
                    .map_err(fixture)?
            }
            (None, Some(generator)) => {
                let mut s = generator.build().map_err(fixture)?;
                if let Some(tail) = self.tail {
                    s = s.with_tail(tail).map_err(fixture)?;
                }
                s
            }
        };
        if let Some(tag) = self.tag {
            if tag != series.tag() {
                return Err(CliError::Fixture(format!(
                    "generator produces a {} series but tag = \"{}\" was requested",
                    series.tag().name(),
                    tag.name()
                )));
            }
        }
        Ok(series)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub p: f64,
    pub theta: f64,
    pub r: f64,
    pub lambda: f64,
    pub k: u32,
}

impl ParamsConfig {
    pub fn build(&self) -> CliResult<ClassParams> {
        ClassParams::new(self.p, self.theta, self.r, self.lambda, self.k)
            .map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Option<Vec<u64>>,
    pub m_values: Option<Vec<u64>>,
    /// Highest dyadic level of `E`-curves.
    pub levels: Option<u32>,
    pub t_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulusConfig {
    pub k: Option<u32>,
    pub p: Option<f64>,
    pub h_samples: Option<usize>,
    /// Spatial grid size; chosen from the highest stored frequency if absent.
    pub grid: Option<usize>,
}

/// Which coefficient form the `coeff` column must use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffColumn {
    /// Chosen from the series tag; empty for general series.
    #[default]
    Auto,
    Monotone,
    Lacunary,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceConfig {
    #[serde(default)]
    pub coeff: CoeffColumn,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<std::path::PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub slope_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            slope_tol: nbesov::functionals::DEFAULT_SLOPE_TOL,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(CliError::ConfigNotFound(path.to_path_buf()))
            }
            Err(e) => return Err(CliError::Io(e)),
        };
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()
    }

    fn validate(mut self) -> CliResult<Self> {
        for (name, values) in [("n_values", &self.sweep.n_values), ("m_values", &self.sweep.m_values)] {
            if let Some(v) = values {
                if v.is_empty() || v[0] == 0 || v.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(CliError::Config(format!(
                        "sweep.{name} must be positive and strictly increasing"
                    )));
                }
            }
        }
        if let Some(phi) = self.phi.take() {
            self.phi = Some(phi.validated().map_err(|e| CliError::Config(format!("phi: {e}")))?);
        }
        Ok(self)
    }

    pub fn series(&self) -> CliResult<CosineSeries> {
        self.series
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [series] section".into()))?
            .build()
    }

    pub fn params(&self) -> CliResult<ClassParams> {
        self.params
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [params] section".into()))?
            .build()
    }
}
