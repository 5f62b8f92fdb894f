//! Special functions and quadrature on complex arguments.

mod gamma;
mod quad;

pub use gamma::{gamma, log_gamma, upper_incomplete_gamma, upper_incomplete_gamma_real};
pub use quad::{integrate_ray, integrate_ray_vec, Ray};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

pub const EPS: f64 = f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("Gamma has a pole at s = {0}")]
    Pole(Complex64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("no convergence after {iterations} iterations in {what}")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
}

/// A complex value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValueWithError {
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub value: Complex64,
    pub abs_error: f64,
}

impl ComplexValueWithError {
    pub fn new(value: Complex64, abs_error: f64) -> Self {
        ComplexValueWithError { value, abs_error }
    }

    pub fn relative_error(&self) -> f64 {
        let m = self.value.norm();
        if m == 0.0 {
            self.abs_error
        } else {
            self.abs_error / m
        }
    }
}
