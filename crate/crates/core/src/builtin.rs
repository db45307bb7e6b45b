//! Models shipped with the library, resolvable by name wherever a model
//! file path is accepted. The JSON documents are embedded at compile
//! time and go through the same loader as user files.

use crate::model::{ScoringModel, Sex};
use crate::modelfile::{model_from_json, ModelFileError};

/// Revised men's curve: 4th order, fitted on 60-175 kg, scores down to 50 kg.
pub const REVISED_2019_M: &str = "revised-2019-m";
/// Revised women's curve: 4th order, fitted on 44-125 kg.
pub const REVISED_2019_F: &str = "revised-2019-f";
/// Classic Wilks baseline; resolves per sex via [`builtin_for_sex`].
pub const WILKS_CLASSIC: &str = "wilks-classic";

const WILKS_CLASSIC_M: &str = "wilks-classic-m";
const WILKS_CLASSIC_F: &str = "wilks-classic-f";

/// All names `builtin_model` accepts, in documentation order.
pub const BUILTIN_NAMES: [&str; 5] = [
    REVISED_2019_M,
    REVISED_2019_F,
    WILKS_CLASSIC,
    WILKS_CLASSIC_M,
    WILKS_CLASSIC_F,
];

fn embedded_json(name: &str) -> Option<&'static str> {
    match name {
        REVISED_2019_M => Some(include_str!("../models/revised_2019_m.json")),
        REVISED_2019_F => Some(include_str!("../models/revised_2019_f.json")),
        WILKS_CLASSIC_M => Some(include_str!("../models/wilks_classic_m.json")),
        WILKS_CLASSIC_F => Some(include_str!("../models/wilks_classic_f.json")),
        _ => None,
    }
}

/// Loads a built-in model by exact name. `wilks-classic` itself is
/// sex-ambiguous and needs [`builtin_for_sex`]; the suffixed forms load
/// directly. Returns `None` for unknown names.
pub fn builtin_model(name: &str) -> Option<Result<ScoringModel, ModelFileError>> {
    embedded_json(name).map(model_from_json)
}

/// Resolves a possibly sex-generic built-in name. `wilks-classic` picks
/// the coefficient set for `sex`; sex-specific names must match `sex`
/// when one is given.
pub fn builtin_for_sex(name: &str, sex: Sex) -> Option<Result<ScoringModel, ModelFileError>> {
    let concrete = match (name, sex) {
        (WILKS_CLASSIC, Sex::M) => WILKS_CLASSIC_M,
        (WILKS_CLASSIC, Sex::F) => WILKS_CLASSIC_F,
        _ => name,
    };
    builtin_model(concrete)
}

/// True when the name refers to some built-in, including the
/// sex-generic `wilks-classic`.
pub fn is_builtin_name(name: &str) -> bool {
    BUILTIN_NAMES.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads_and_validates() {
        for name in [REVISED_2019_M, REVISED_2019_F, WILKS_CLASSIC_M, WILKS_CLASSIC_F] {
            let model = builtin_model(name)
                .unwrap_or_else(|| panic!("{name} not registered"))
                .unwrap_or_else(|e| panic!("{name} failed to load: {e}"));
            assert!(model.normalization_points() > 0.0);
        }
    }

    #[test]
    fn revised_models_carry_expected_shape() {
        let m = builtin_model(REVISED_2019_M).unwrap().unwrap();
        assert_eq!(m.sex(), Sex::M);
        assert_eq!(m.poly().degree(), 4);
        assert_eq!(m.domain_kg(), (60.0, 175.0));
        assert_eq!(m.extrapolation_kg(), (50.0, 175.0));
        assert_eq!(m.normalization_points(), 500.0);

        let f = builtin_model(REVISED_2019_F).unwrap().unwrap();
        assert_eq!(f.sex(), Sex::F);
        assert_eq!(f.poly().degree(), 4);
        assert_eq!(f.domain_kg(), (44.0, 125.0));
        assert_eq!(f.normalization_points(), 455.0);
    }

    #[test]
    fn wilks_resolves_by_sex() {
        let m = builtin_for_sex(WILKS_CLASSIC, Sex::M).unwrap().unwrap();
        assert_eq!(m.sex(), Sex::M);
        assert_eq!(m.poly().degree(), 5);
        let f = builtin_for_sex(WILKS_CLASSIC, Sex::F).unwrap().unwrap();
        assert_eq!(f.sex(), Sex::F);
        assert_eq!(f.domain_kg(), (26.51, 154.53));
    }

    #[test]
    fn unknown_names_are_none() {
        assert!(builtin_model("wilks-classic").is_none());
        assert!(builtin_model("no-such-model").is_none());
        assert!(is_builtin_name("wilks-classic"));
        assert!(!is_builtin_name("no-such-model"));
    }
}
