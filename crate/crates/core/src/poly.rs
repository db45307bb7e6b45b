//! Dense univariate polynomials with coefficients stored in ascending
//! powers of x. Everything downstream (scoring curves, fitted models,
//! derivative-based diagnostics) is built on this type.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomial must have at least one coefficient")]
    Empty,
    #[error("polynomial evaluated at non-finite input {0}")]
    NonFiniteInput(String),
}

/// Polynomial in one variable. `coefficients()[i]` multiplies `x^i`.
///
/// Invariant: the coefficient vector is non-empty. A constant polynomial
/// has exactly one coefficient; degree is `len - 1` and trailing zero
/// coefficients are kept as given (callers decide the degree they want).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        Ok(Self { coeffs })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation. Input must be finite; the result is then a
    /// plain sum of finite products and needs no further checking for
    /// the magnitudes this library works with.
    pub fn eval(&self, x: f64) -> Result<f64, PolyError> {
        if !x.is_finite() {
            return Err(PolyError::NonFiniteInput(format!("{x}")));
        }
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        Ok(acc)
    }

    /// Formal derivative. The derivative of a constant is the zero
    /// polynomial, represented as a single zero coefficient.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial { coeffs: vec![0.0] };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Polynomial { coeffs }
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = PolyError;

    fn try_from(coeffs: Vec<f64>) -> Result<Self, Self::Error> {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

/// Evenly spaced scan points over `[lo, hi]`: `lo, lo+step, ...`, with
/// `hi` appended when the stride does not land on it exactly. Grids are
/// built from integer multiples of the step so two scans over the same
/// interval always produce identical points.
pub fn grid_points(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    debug_assert!(step > 0.0 && hi >= lo);
    let mut points = Vec::new();
    let mut i = 0u64;
    loop {
        let x = lo + i as f64 * step;
        if x > hi + 1e-9 {
            break;
        }
        // Snap to hi when the stride lands there up to rounding, so the
        // endpoint appears exactly once and exactly as given.
        points.push(if (hi - x).abs() <= 1e-9 { hi } else { x });
        if points.last() == Some(&hi) {
            break;
        }
        i += 1;
    }
    if points.last() != Some(&hi) {
        points.push(hi);
    }
    points
}
