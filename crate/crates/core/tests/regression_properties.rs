//! Property tests for the fitting code: least-squares optimality,
//! residual structure, nested-degree behavior, and unit invariance.

use proptest::collection::btree_set;
use proptest::prelude::*;

use liftscore::regression::{fit_polynomial, fit_sweep};

/// Distinct bodyweights on a 2.5 kg lattice in [40, 180], paired with
/// totals on a 0.25 kg lattice in [100, 1100]. The lattice keeps nodes
/// well separated so conditioning never muddies what a test asserts.
fn points_strategy(min_len: usize, max_len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    btree_set(16u32..=72, min_len..=max_len).prop_flat_map(|xs| {
        let n = xs.len();
        let xs: Vec<f64> = xs.into_iter().map(|i| 2.5 * i as f64).collect();
        prop::collection::vec(400u32..=4400, n).prop_map(move |ys| {
            xs.iter()
                .zip(ys)
                .map(|(&x, y)| (x, 0.25 * y as f64))
                .collect()
        })
    })
}

fn sse(points: &[(f64, f64)], poly: &liftscore::Polynomial) -> f64 {
    points
        .iter()
        .map(|&(x, y)| (y - poly.eval(x).unwrap()).powi(2))
        .sum()
}

proptest! {
    #[test]
    fn residuals_sum_to_zero(points in points_strategy(5, 24), degree in 1usize..=4) {
        prop_assume!(points.len() > degree + 1);
        let fit = fit_polynomial(&points, degree).unwrap();
        let total_mass: f64 = points.iter().map(|p| p.1.abs()).sum();
        let residual_sum: f64 = fit.residuals.iter().map(|r| r.1).sum();
        prop_assert!(
            residual_sum.abs() <= 1e-6 * total_mass,
            "sum {residual_sum} vs mass {total_mass}"
        );
    }

    #[test]
    fn no_small_perturbation_beats_the_fit(points in points_strategy(5, 20), degree in 1usize..=4) {
        prop_assume!(points.len() > degree + 1);
        let fit = fit_polynomial(&points, degree).unwrap();
        let base = sse(&points, &fit.poly);
        let coeffs = fit.poly.coefficients().to_vec();
        // Single-coordinate nudges of 1e-3 relative (1e-3 absolute for
        // near-zero coefficients), both signs, plus an all-coordinates one.
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        for i in 0..coeffs.len() {
            for sign in [-1.0, 1.0] {
                let mut c = coeffs.clone();
                c[i] += sign * 1e-3 * c[i].abs().max(1.0);
                candidates.push(c);
            }
        }
        candidates.push(coeffs.iter().map(|c| c + 1e-3 * c.abs().max(1.0)).collect());
        for c in candidates {
            let perturbed = liftscore::Polynomial::new(c).unwrap();
            let other = sse(&points, &perturbed);
            prop_assert!(
                other >= base - 1e-6 * (1.0 + base),
                "perturbation won: {other} < {base}"
            );
        }
    }

    #[test]
    fn r_squared_never_drops_as_degree_grows(points in points_strategy(6, 24)) {
        let sweep = fit_sweep(&points, &[1, 2, 3, 4]);
        let mut last = f64::NEG_INFINITY;
        for (degree, result) in sweep {
            if points.len() > degree + 1 {
                let fit = result.unwrap();
                prop_assert!(
                    fit.r_squared >= last - 1e-9,
                    "degree {degree}: {} < {last}",
                    fit.r_squared
                );
                prop_assert!(fit.r_squared <= 1.0 + 1e-12);
                last = fit.r_squared;
            }
        }
    }

    #[test]
    fn predictions_survive_a_grams_rescale(points in points_strategy(6, 20), degree in 1usize..=4) {
        prop_assume!(points.len() > degree + 1);
        let in_grams: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (1000.0 * x, y)).collect();
        let fit_kg = fit_polynomial(&points, degree).unwrap();
        let fit_g = fit_polynomial(&in_grams, degree).unwrap();
        for &(x, _) in &points {
            let p_kg = fit_kg.poly.eval(x).unwrap();
            let p_g = fit_g.poly.eval(1000.0 * x).unwrap();
            prop_assert!(
                (p_kg - p_g).abs() <= 1e-6 * p_kg.abs().max(1.0),
                "at {x}: {p_kg} vs {p_g}"
            );
        }
    }

    #[test]
    fn exactly_determined_fits_interpolate(points in points_strategy(3, 6)) {
        let degree = points.len() - 1;
        let fit = fit_polynomial(&points, degree).unwrap();
        for &(x, r) in &fit.residuals {
            prop_assert!(r.abs() < 1e-8, "residual {r} at {x}");
        }
    }
}
