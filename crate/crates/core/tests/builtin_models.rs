//! Checks of the shipped models against values computed independently
//! (spreadsheet-style term-by-term sums, done outside this codebase and
//! frozen here as literals).

use liftscore::builtin::{builtin_for_sex, builtin_model, REVISED_2019_F, REVISED_2019_M, WILKS_CLASSIC};
use liftscore::diagnostics::monotonicity_check;
use liftscore::poly::grid_points as grid;
use liftscore::wilks::WilksClassicCoefficients;
use liftscore::Sex;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn mens_curve_matches_term_by_term_sums() {
    let m = builtin_model(REVISED_2019_M).unwrap().unwrap();
    // 561.53 - 15.807*100 + 0.47799*100^2 - 0.00373*100^3 + 9.31e-6*100^4
    let f100 = m.poly().eval(100.0).unwrap();
    assert!(rel_close(f100, 961.7300000000006, 1e-6), "f(100) = {f100}");
    // Extrapolation floor.
    let f50 = m.poly().eval(50.0).unwrap();
    assert!(rel_close(f50, 558.0925000000001, 1e-6), "f(50) = {f50}");
    // 1000 kg total at 100 kg bodyweight.
    let s = m.score(100.0, 1000.0).unwrap();
    assert!(rel_close(s.points, 519.896436629823, 1e-9));
    assert!(!s.extrapolated);
}

#[test]
fn womens_curve_matches_term_by_term_sums() {
    let f = builtin_model(REVISED_2019_F).unwrap().unwrap();
    let f60 = f.poly().eval(60.0).unwrap();
    assert!(rel_close(f60, 521.4255999999998, 1e-6), "f(60) = {f60}");
    // Values at the wide extrapolation edges stay positive and match
    // the independent sums.
    let f30 = f.poly().eval(30.0).unwrap();
    assert!(rel_close(f30, 112.62159999999996, 1e-6), "f(30) = {f30}");
    let f200 = f.poly().eval(200.0).unwrap();
    assert!(rel_close(f200, 581.0599999999995, 1e-6), "f(200) = {f200}");
}

#[test]
fn scoring_the_curve_itself_returns_the_normalization() {
    // A lifter whose total sits exactly on the curve scores exactly the
    // normalization level, at every half-kilogram step of the allowed
    // interval; below/above-domain points additionally carry the flag.
    for name in [REVISED_2019_M, REVISED_2019_F] {
        let model = builtin_model(name).unwrap().unwrap();
        let (lo, hi) = model.extrapolation_kg();
        for bw in grid(lo, hi, 0.5) {
            let on_curve = model.poly().eval(bw).unwrap();
            let s = model.score(bw, on_curve).unwrap();
            let rel = (s.points - model.normalization_points()).abs() / model.normalization_points();
            assert!(rel <= 1e-9, "{name} at {bw}: {} points", s.points);
            let (dlo, dhi) = model.domain_kg();
            assert_eq!(s.extrapolated, bw < dlo || bw > dhi, "{name} at {bw}");
        }
    }
}

#[test]
fn both_revised_curves_rise_across_their_domains() {
    let m = builtin_model(REVISED_2019_M).unwrap().unwrap();
    let mono_m = monotonicity_check(&m, 0.1);
    assert!(mono_m.monotone);
    // Independent scan: slope bottoms out at 0.8838925814400227 kg per
    // kg around 138.6, the flattening the 2019 revision left in on
    // purpose (still clearly rising).
    assert!(rel_close(mono_m.min_derivative, 0.8838925814400227, 1e-6));
    assert!((mono_m.argmin_kg - 138.6).abs() < 0.05, "argmin {}", mono_m.argmin_kg);

    let f = builtin_model(REVISED_2019_F).unwrap().unwrap();
    let mono_f = monotonicity_check(&f, 0.1);
    assert!(mono_f.monotone);
    assert!(rel_close(mono_f.min_derivative, 0.3990359598400133, 1e-6));
    assert!((mono_f.argmin_kg - 117.1).abs() < 0.05, "argmin {}", mono_f.argmin_kg);
}

#[test]
fn classic_wilks_matches_published_coefficient_table() {
    let m = builtin_for_sex(WILKS_CLASSIC, Sex::M).unwrap().unwrap();
    let g100 = m.poly().eval(100.0).unwrap();
    assert!(rel_close(g100, 821.5724255999999, 1e-9), "g(100) = {g100}");
    let s = m.score(100.0, 1000.0).unwrap();
    assert!(rel_close(s.points, 608.589071906651, 1e-9));

    // Published per-kg multiplier tables list 500 / g(bw) rounded to 6
    // digits; spot-check both sexes against them.
    let spots_m = [(75.0, 0.71256), (82.5, 0.669907), (90.0, 0.638394), (125.0, 0.569845)];
    for (bw, published) in spots_m {
        let coeff = 500.0 / m.poly().eval(bw).unwrap();
        assert!(
            (coeff - published).abs() < 5e-7,
            "men {bw}: {coeff} vs {published}"
        );
    }
    let f = builtin_for_sex(WILKS_CLASSIC, Sex::F).unwrap().unwrap();
    let spots_f = [(52.0, 1.246637), (60.0, 1.114887), (75.0, 0.950641), (90.0, 0.864064)];
    for (bw, published) in spots_f {
        let coeff = 500.0 / f.poly().eval(bw).unwrap();
        assert!(
            (coeff - published).abs() < 5e-7,
            "women {bw}: {coeff} vs {published}"
        );
    }
}

#[test]
fn classic_wilks_type_round_trips_from_model() {
    let m = builtin_for_sex(WILKS_CLASSIC, Sex::M).unwrap().unwrap();
    let w = WilksClassicCoefficients::from_model(&m).unwrap();
    assert_eq!(w.validity_kg(), (40.0, 201.9));
    let direct = w.score(100.0, 1000.0).unwrap();
    let via_model = m.score(100.0, 1000.0).unwrap().points;
    assert!((direct - via_model).abs() < 1e-12);

    // The revised quartic is not a classic Wilks coefficient set.
    let quartic = builtin_model(REVISED_2019_M).unwrap().unwrap();
    assert!(WilksClassicCoefficients::from_model(&quartic).is_err());
}
