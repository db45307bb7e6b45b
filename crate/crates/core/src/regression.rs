//! Least-squares polynomial fitting.
//!
//! The predictor is centered and scaled before the design matrix is
//! built, and the system is solved through an orthogonal factorization
//! (SVD), never via explicit normal equations: bodyweights in the
//! hundreds raised to the 4th or 5th power would otherwise push the
//! normal-equation condition number past what f64 can absorb. The
//! fitted coefficients are mapped back to the raw basis afterwards so
//! callers see an ordinary polynomial in kilograms.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Error, PartialEq)]
pub enum RegressionError {
    #[error("fit degree must be at least 1, got {0}")]
    DegreeTooLow(usize),
    #[error("need at least {needed} points for a degree-{degree} fit, got {got}")]
    TooFewPoints {
        degree: usize,
        needed: usize,
        got: usize,
    },
    #[error(
        "rank-deficient design: a degree-{degree} fit needs {needed} distinct bodyweights, got {got}"
    )]
    TooFewDistinct {
        degree: usize,
        needed: usize,
        got: usize,
    },
    #[error("input contains a non-finite value: {0}")]
    NonFiniteInput(String),
    #[error("least-squares solve failed: {0}")]
    SolveFailed(String),
    #[error("R^2 is undefined: {0}")]
    DegenerateRSquared(String),
}

/// Everything a fit produces: the raw-basis polynomial plus the
/// goodness-of-fit numbers needed to judge and reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub degree: usize,
    pub poly: Polynomial,
    pub r_squared: f64,
    /// (bodyweight, observed - predicted), in input order.
    pub residuals: Vec<(f64, f64)>,
    pub sample_size: usize,
    /// Ratio of largest to smallest singular value of the scaled design.
    pub condition_estimate: f64,
}

fn check_finite(points: &[(f64, f64)]) -> Result<(), RegressionError> {
    for &(x, y) in points {
        if !x.is_finite() || !y.is_finite() {
            return Err(RegressionError::NonFiniteInput(format!("({x}, {y})")));
        }
    }
    Ok(())
}

fn count_distinct(mut xs: Vec<f64>) -> usize {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}

/// Coefficients of p(s(x)) in powers of x, where p has `scaled` as its
/// coefficients and s(x) = (x - mean) / std. Computed by accumulating
/// convolution powers of the linear map, which is exact apart from
/// ordinary rounding.
fn expand_to_raw(scaled: &[f64], mean: f64, std: f64) -> Vec<f64> {
    let lin = [-mean / std, 1.0 / std];
    let mut raw = vec![0.0; scaled.len()];
    // power = lin^j, built incrementally.
    let mut power = vec![1.0];
    for (j, &beta) in scaled.iter().enumerate() {
        for (k, &p) in power.iter().enumerate() {
            raw[k] += beta * p;
        }
        if j + 1 < scaled.len() {
            let mut next = vec![0.0; power.len() + 1];
            for (k, &p) in power.iter().enumerate() {
                next[k] += p * lin[0];
                next[k + 1] += p * lin[1];
            }
            power = next;
        }
    }
    raw
}

/// Fits `y = p(x)` by least squares and reports the polynomial in the
/// raw (kilogram) basis.
///
/// Requirements: degree >= 1, at least degree + 1 points, and at least
/// degree + 1 distinct x values; all inputs finite.
pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<FitReport, RegressionError> {
    if degree < 1 {
        return Err(RegressionError::DegreeTooLow(degree));
    }
    check_finite(points)?;
    let needed = degree + 1;
    if points.len() < needed {
        return Err(RegressionError::TooFewPoints {
            degree,
            needed,
            got: points.len(),
        });
    }
    let distinct = count_distinct(points.iter().map(|p| p.0).collect());
    if distinct < needed {
        return Err(RegressionError::TooFewDistinct {
            degree,
            needed,
            got: distinct,
        });
    }

    let n = points.len();
    let mean = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let var = points.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    debug_assert!(std > 0.0, "distinct-x check guarantees spread");

    let design = DMatrix::from_fn(n, needed, |i, j| {
        let s = (points[i].0 - mean) / std;
        s.powi(j as i32)
    });
    let rhs = DVector::from_iterator(n, points.iter().map(|p| p.1));

    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (mut smax, mut smin) = (f64::MIN, f64::MAX);
    for &s in sv.iter() {
        smax = smax.max(s);
        smin = smin.min(s);
    }
    let condition_estimate = if smin > 0.0 { smax / smin } else { f64::INFINITY };

    let scaled_coeffs = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| RegressionError::SolveFailed(e.to_string()))?;

    // Predictions come from the scaled design, the basis the solve
    // actually ran in; the raw-basis polynomial is for callers.
    let predicted = &design * &scaled_coeffs;
    let residuals: Vec<(f64, f64)> = points
        .iter()
        .zip(predicted.iter())
        .map(|(&(x, y), &p)| (x, y - p))
        .collect();

    let observed: Vec<f64> = points.iter().map(|p| p.1).collect();
    let predicted_vec: Vec<f64> = predicted.iter().copied().collect();
    let r_squared = r_squared(&observed, &predicted_vec)?;

    let raw = expand_to_raw(scaled_coeffs.as_slice(), mean, std);
    let poly = Polynomial::new(raw).expect("degree + 1 coefficients");

    Ok(FitReport {
        degree,
        poly,
        r_squared,
        residuals,
        sample_size: n,
        condition_estimate,
    })
}

/// R^2 = 1 - SS_res / SS_tot against the mean of `observed`. Errors when
/// the observations have zero variance, where the ratio is undefined.
pub fn r_squared(observed: &[f64], predicted: &[f64]) -> Result<f64, RegressionError> {
    if observed.is_empty() || observed.len() != predicted.len() {
        return Err(RegressionError::DegenerateRSquared(format!(
            "needs two equal-length non-empty series, got {} and {}",
            observed.len(),
            predicted.len()
        )));
    }
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let ss_tot: f64 = observed.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(RegressionError::DegenerateRSquared(
            "observations have zero variance".to_string(),
        ));
    }
    let ss_res: f64 = observed
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// (bodyweight, observed - predicted) under an already-fitted curve, in
/// input order.
pub fn residuals(poly: &Polynomial, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    points
        .iter()
        .map(|&(x, y)| (x, y - poly.eval(x).expect("finite input")))
        .collect()
}

/// Fits every requested degree (deduplicated, ascending) and returns
/// one entry per degree. A degree that cannot be fitted yields its
/// error in place; the sweep never aborts as a whole.
pub fn fit_sweep(
    points: &[(f64, f64)],
    degrees: &[usize],
) -> Vec<(usize, Result<FitReport, RegressionError>)> {
    let mut ds: Vec<usize> = degrees.to_vec();
    ds.sort_unstable();
    ds.dedup();
    ds.into_iter()
        .map(|d| (d, fit_polynomial(points, d)))
        .collect()
}
