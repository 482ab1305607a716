//! Numerical toolkit for Nikol'skii-Besov type function classes.
//!
//! The crate computes moduli of smoothness, best trigonometric
//! approximations and the four equivalent forms of the class functional
//! (integral, series over moduli, dyadic best approximations, Fourier
//! coefficients), plus brute-force checkers for the discrete Jensen,
//! Hardy and reverse Copson/Leindler inequalities that tie them together.

pub mod approximation;
pub mod error;
pub mod function_model;
pub mod functionals;
pub mod inequality;
pub mod phi;
pub mod summation;
pub mod tail;
pub mod types;

pub use error::{Error, Result};
pub use phi::{phi_eval, phi_property_check, MajorantPhi, PhiReport};
pub use types::{
    validate_params, ClassParams, CosineSeries, CurveLabel, FunctionalCurve, GridFunction,
    SeriesTag, TailModel,
};
