//! Classic Wilks scoring, kept as a separate baseline: a fixed 5th-order
//! denominator per sex with a single 500-point normalization for everyone.

use thiserror::Error;

use crate::model::{ModelError, ScoringModel, Sex};
use crate::poly::{grid_points, Polynomial};

pub const WILKS_NORMALIZATION: f64 = 500.0;

#[derive(Debug, Error, PartialEq)]
pub enum WilksError {
    #[error("classic Wilks takes exactly 6 coefficients, got {0}")]
    WrongCoefficientCount(usize),
    #[error("denominator is not positive over [{lo}, {hi}]: g({at:.1}) = {value:.6}")]
    NonPositiveDenominator { lo: f64, hi: f64, at: f64, value: f64 },
    #[error("bodyweight {bw} kg is outside the Wilks validity interval [{lo}, {hi}] kg")]
    OutsideValidity { bw: f64, lo: f64, hi: f64 },
    #[error("inputs must be positive and finite: bodyweight {bw}, total {total}")]
    BadInput { bw: f64, total: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Coefficient set for one sex, ascending powers, with the bodyweight
/// interval the published tables are defined on. Positivity of the
/// denominator over that interval is checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WilksClassicCoefficients {
    sex: Sex,
    coefficients: [f64; 6],
    validity_kg: (f64, f64),
}

impl WilksClassicCoefficients {
    pub fn new(
        sex: Sex,
        coefficients: [f64; 6],
        validity_kg: (f64, f64),
    ) -> Result<Self, WilksError> {
        let poly = Polynomial::new(coefficients.to_vec()).expect("six coefficients");
        for x in grid_points(validity_kg.0, validity_kg.1, 0.1) {
            let value = poly.eval(x).expect("finite grid point");
            if !(value.is_finite() && value > 0.0) {
                return Err(WilksError::NonPositiveDenominator {
                    lo: validity_kg.0,
                    hi: validity_kg.1,
                    at: x,
                    value,
                });
            }
        }
        Ok(Self {
            sex,
            coefficients,
            validity_kg,
        })
    }

    /// Reads the coefficient set out of a degree-5 scoring model, using
    /// the model's domain as the validity interval.
    pub fn from_model(model: &ScoringModel) -> Result<Self, WilksError> {
        let coeffs = model.poly().coefficients();
        let arr: [f64; 6] = coeffs
            .try_into()
            .map_err(|_| WilksError::WrongCoefficientCount(coeffs.len()))?;
        Self::new(model.sex(), arr, model.domain_kg())
    }

    pub fn sex(&self) -> Sex {
        self.sex
    }

    pub fn coefficients(&self) -> &[f64; 6] {
        &self.coefficients
    }

    pub fn validity_kg(&self) -> (f64, f64) {
        self.validity_kg
    }

    fn denominator(&self, bw: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * bw + c;
        }
        acc
    }

    /// points = total * 500 / g(bodyweight).
    pub fn score(&self, bodyweight_kg: f64, total_kg: f64) -> Result<f64, WilksError> {
        if !(bodyweight_kg.is_finite()
            && bodyweight_kg > 0.0
            && total_kg.is_finite()
            && total_kg > 0.0)
        {
            return Err(WilksError::BadInput {
                bw: bodyweight_kg,
                total: total_kg,
            });
        }
        let (lo, hi) = self.validity_kg;
        if bodyweight_kg < lo || bodyweight_kg > hi {
            return Err(WilksError::OutsideValidity {
                bw: bodyweight_kg,
                lo,
                hi,
            });
        }
        Ok(total_kg * WILKS_NORMALIZATION / self.denominator(bodyweight_kg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MEN: [f64; 6] = [
        -216.0475144,
        16.2606339,
        -0.002388645,
        -0.00113732,
        7.01863e-6,
        -1.291e-8,
    ];

    fn wilks_m() -> WilksClassicCoefficients {
        WilksClassicCoefficients::new(Sex::M, MEN, (40.0, 201.9)).unwrap()
    }

    #[test]
    fn matches_hand_computed_score() {
        // g(100) = 821.5724255999999 summed term by term, so 1000 kg at
        // 100 kg bodyweight is worth 608.589071906651 points.
        let s = wilks_m().score(100.0, 1000.0).unwrap();
        assert!((s - 608.589071906651).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_validity_bodyweight() {
        assert!(matches!(
            wilks_m().score(39.0, 300.0),
            Err(WilksError::OutsideValidity { .. })
        ));
        assert!(matches!(
            wilks_m().score(202.0, 300.0),
            Err(WilksError::OutsideValidity { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            wilks_m().score(100.0, -1.0),
            Err(WilksError::BadInput { .. })
        ));
    }

    #[test]
    fn rejects_denominator_with_zero_in_interval() {
        // Linear g(x) = x - 50 is zero at 50, inside [40, 60].
        let bad = WilksClassicCoefficients::new(
            Sex::M,
            [-50.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            (40.0, 60.0),
        );
        assert!(matches!(
            bad,
            Err(WilksError::NonPositiveDenominator { .. })
        ));
    }
}
