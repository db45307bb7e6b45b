//! Scoring models: a bodyweight curve plus the normalization that turns
//! a lifted total into points, with explicit validity intervals.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{grid_points, PolyError, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sex {
    M,
    F,
}

impl Sex {
    pub fn parse(s: &str) -> Option<Sex> {
        match s {
            "M" => Some(Sex::M),
            "F" => Some(Sex::F),
            _ => None,
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::M => "M",
            Sex::F => "F",
        })
    }
}

/// Provenance of a fitted curve, carried along for reporting. Only the
/// label is mandatory; numeric fields are filled in when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub source_label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_date: Option<NaiveDate>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("normalization_points must be positive and finite, got {0}")]
    BadNormalization(f64),
    #[error("interval [{0}, {1}] is not an ordered pair of finite bounds")]
    BadInterval(f64, f64),
    #[error("extrapolation interval [{elo}, {ehi}] must contain the fitted domain [{dlo}, {dhi}]")]
    ExtrapolationExcludesDomain {
        elo: f64,
        ehi: f64,
        dlo: f64,
        dhi: f64,
    },
    #[error("curve is not positive over the extrapolation interval: f({at:.1}) = {value:.6}")]
    NonPositiveCurve { at: f64, value: f64 },
    #[error("bodyweight {bw} kg is outside the extrapolation interval [{lo}, {hi}] kg")]
    OutsideExtrapolation { bw: f64, lo: f64, hi: f64 },
    #[error("inputs must be positive and finite: bodyweight {bw}, total {total}")]
    BadScoreInput { bw: f64, total: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Result of scoring one performance. `extrapolated` flags bodyweights
/// that fall inside the allowed scoring interval but outside the range
/// the curve was actually fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Score {
    pub points: f64,
    pub extrapolated: bool,
}

/// A validated scoring model. Construction checks that the curve is
/// strictly positive across the whole extrapolation interval (sampled
/// every 0.1 kg), so scoring can never divide by zero or flip sign.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringModel {
    sex: Sex,
    poly: Polynomial,
    normalization_points: f64,
    domain_kg: (f64, f64),
    extrapolation_kg: (f64, f64),
    fit_meta: Option<FitMeta>,
}

fn check_interval(lo: f64, hi: f64) -> Result<(), ModelError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ModelError::BadInterval(lo, hi));
    }
    Ok(())
}

impl ScoringModel {
    pub fn new(
        sex: Sex,
        poly: Polynomial,
        normalization_points: f64,
        domain_kg: (f64, f64),
        extrapolation_kg: (f64, f64),
        fit_meta: Option<FitMeta>,
    ) -> Result<Self, ModelError> {
        if !(normalization_points.is_finite() && normalization_points > 0.0) {
            return Err(ModelError::BadNormalization(normalization_points));
        }
        check_interval(domain_kg.0, domain_kg.1)?;
        check_interval(extrapolation_kg.0, extrapolation_kg.1)?;
        if extrapolation_kg.0 > domain_kg.0 || extrapolation_kg.1 < domain_kg.1 {
            return Err(ModelError::ExtrapolationExcludesDomain {
                elo: extrapolation_kg.0,
                ehi: extrapolation_kg.1,
                dlo: domain_kg.0,
                dhi: domain_kg.1,
            });
        }
        for x in grid_points(extrapolation_kg.0, extrapolation_kg.1, 0.1) {
            let value = poly.eval(x)?;
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonPositiveCurve { at: x, value });
            }
        }
        Ok(Self {
            sex,
            poly,
            normalization_points,
            domain_kg,
            extrapolation_kg,
            fit_meta,
        })
    }

    pub fn sex(&self) -> Sex {
        self.sex
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn normalization_points(&self) -> f64 {
        self.normalization_points
    }

    pub fn domain_kg(&self) -> (f64, f64) {
        self.domain_kg
    }

    pub fn extrapolation_kg(&self) -> (f64, f64) {
        self.extrapolation_kg
    }

    pub fn fit_meta(&self) -> Option<&FitMeta> {
        self.fit_meta.as_ref()
    }

    /// Expected top-level total at a bodyweight, i.e. the raw curve value.
    pub fn expected_total(&self, bodyweight_kg: f64) -> Result<f64, ModelError> {
        Ok(self.poly.eval(bodyweight_kg)?)
    }

    /// points = total * normalization / f(bodyweight). Bodyweights inside
    /// the extrapolation interval but outside the fitted domain score
    /// normally and come back flagged.
    pub fn score(&self, bodyweight_kg: f64, total_kg: f64) -> Result<Score, ModelError> {
        if !(bodyweight_kg.is_finite()
            && bodyweight_kg > 0.0
            && total_kg.is_finite()
            && total_kg > 0.0)
        {
            return Err(ModelError::BadScoreInput {
                bw: bodyweight_kg,
                total: total_kg,
            });
        }
        let (lo, hi) = self.extrapolation_kg;
        if bodyweight_kg < lo || bodyweight_kg > hi {
            return Err(ModelError::OutsideExtrapolation {
                bw: bodyweight_kg,
                lo,
                hi,
            });
        }
        let denom = self.poly.eval(bodyweight_kg)?;
        let points = total_kg * self.normalization_points / denom;
        let extrapolated = bodyweight_kg < self.domain_kg.0 || bodyweight_kg > self.domain_kg.1;
        Ok(Score {
            points,
            extrapolated,
        })
    }
}
