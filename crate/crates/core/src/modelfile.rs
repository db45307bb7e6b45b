//! On-disk model format: a small JSON document with a schema version,
//! so saved curves survive library upgrades and third parties can
//! produce them without linking this crate.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FitMeta, ModelError, ScoringModel, Sex};
use crate::poly::Polynomial;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("cannot read model file: {0}")]
    Io(#[from] io::Error),
    #[error("model file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported model schema_version {found}, this build reads version {supported}")]
    SchemaVersion { found: u32, supported: u32 },
    #[error("declared degree {degree} does not match {count} coefficients")]
    DegreeMismatch { degree: usize, count: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    schema_version: u32,
    sex: Sex,
    degree: usize,
    coefficients: Vec<f64>,
    normalization_points: f64,
    domain_kg: [f64; 2],
    extrapolation_kg: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fit_meta: Option<FitMeta>,
}

/// Parses and fully validates a model document. Everything the
/// `ScoringModel` constructor checks (interval nesting, curve
/// positivity) is enforced here too, so a file that loads is a file
/// that scores.
pub fn model_from_json(json: &str) -> Result<ScoringModel, ModelFileError> {
    let doc: ModelDocument = serde_json::from_str(json)?;
    if doc.schema_version != MODEL_SCHEMA_VERSION {
        return Err(ModelFileError::SchemaVersion {
            found: doc.schema_version,
            supported: MODEL_SCHEMA_VERSION,
        });
    }
    if doc.degree + 1 != doc.coefficients.len() {
        return Err(ModelFileError::DegreeMismatch {
            degree: doc.degree,
            count: doc.coefficients.len(),
        });
    }
    let poly = Polynomial::new(doc.coefficients).map_err(ModelError::from)?;
    let model = ScoringModel::new(
        doc.sex,
        poly,
        doc.normalization_points,
        (doc.domain_kg[0], doc.domain_kg[1]),
        (doc.extrapolation_kg[0], doc.extrapolation_kg[1]),
        doc.fit_meta,
    )?;
    Ok(model)
}

pub fn read_model(path: &Path) -> Result<ScoringModel, ModelFileError> {
    let json = fs::read_to_string(path)?;
    model_from_json(&json)
}

/// Serializes a model to the current schema, pretty-printed with a
/// trailing newline so files diff cleanly.
pub fn model_to_json(model: &ScoringModel) -> String {
    let doc = ModelDocument {
        schema_version: MODEL_SCHEMA_VERSION,
        sex: model.sex(),
        degree: model.poly().degree(),
        coefficients: model.poly().coefficients().to_vec(),
        normalization_points: model.normalization_points(),
        domain_kg: [model.domain_kg().0, model.domain_kg().1],
        extrapolation_kg: [model.extrapolation_kg().0, model.extrapolation_kg().1],
        fit_meta: model.fit_meta().cloned(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model document serializes");
    out.push('\n');
    out
}
