//! Randomized invariants for the characteristic maps, sampled across all
//! families and admissible parameters rather than the frozen worked examples.

use proptest::prelude::*;

use mbwave::abel;
use mbwave::boundary::{BoundaryCurve, CharMaps, Family};

fn any_curve() -> impl Strategy<Value = BoundaryCurve> {
    prop_oneof![
        (0.05f64..0.9).prop_map(|e| BoundaryCurve::linear(e).unwrap()),
        (0.05f64..1.9).prop_map(|e| BoundaryCurve::parabolic(e).unwrap()),
        (0.05f64..4.0).prop_map(|e| BoundaryCurve::hyperbolic(e).unwrap()),
        (0.05f64..0.9).prop_map(|e| BoundaryCurve::shrinking(e).unwrap()),
    ]
}

proptest! {
    // Admissibility: the endpoint never outruns the characteristics.
    #[test]
    fn speed_stays_subunit(curve in any_curve(), t in 0.0f64..20.0) {
        let sp = curve.s_prime(t);
        prop_assert!(sp.abs() < 1.0, "{} s'({t}) = {sp}", curve.family());
        prop_assert!(curve.s(t) > 0.0);
    }

    // Both edge rays move strictly forward in time.
    #[test]
    fn edge_rays_are_increasing(curve in any_curve(), t in 0.0f64..6.0, dt in 1e-3f64..1.0) {
        let maps = CharMaps::new(curve).unwrap();
        prop_assert!(maps.alpha(t + dt).unwrap() > maps.alpha(t).unwrap());
        prop_assert!(maps.beta(t + dt).unwrap() > maps.beta(t).unwrap());
    }

    // The inverse solvers undo their maps to solver precision.
    #[test]
    fn inverses_round_trip(curve in any_curve(), t in 0.0f64..6.0) {
        let maps = CharMaps::new(curve).unwrap();
        let scale = 1.0 + t;
        let y = maps.beta(t).unwrap();
        prop_assert!((maps.beta_inv(y).unwrap() - t).abs() <= 1e-9 * scale);
        let z = maps.alpha(t).unwrap();
        prop_assert!((maps.alpha_inv(z).unwrap() - t).abs() <= 1e-9 * scale);
    }

    // gamma advances every point by the local width, and its slope is the
    // Doppler factor of the endpoint crossing at that moment.
    #[test]
    fn return_map_matches_doppler(curve in any_curve(), t in 0.0f64..6.0) {
        let maps = CharMaps::new(curve.clone()).unwrap();
        let y = maps.beta(t).unwrap();
        let z = maps.gamma(y).unwrap();
        let gap = z - y - 2.0 * curve.s(t);
        prop_assert!(gap.abs() <= 1e-8 * (1.0 + t), "gap {gap}");

        let sp = curve.s_prime(t);
        let doppler = (1.0 + sp) / (1.0 - sp);
        let slope = maps.gamma_prime(y).unwrap();
        prop_assert!(
            (slope - doppler).abs() <= 1e-7 * doppler,
            "{} slope {slope} vs doppler {doppler}",
            curve.family()
        );

        // Expanding domains stretch the return map, shrinking ones contract it.
        match curve.family() {
            Family::Shrinking => prop_assert!(slope < 1.0),
            _ => prop_assert!(slope > 1.0),
        }
    }

    // The closed-form conjugation satisfies its functional equation at
    // arbitrary parameters, not just the tabulated ones.
    #[test]
    fn conjugation_shifts_by_one(curve in any_curve(), t in 0.0f64..6.0) {
        let maps = CharMaps::new(curve.clone()).unwrap();
        let sol = abel::closed_form(&curve).unwrap();
        let lo = maps.beta(t).unwrap();
        let hi = maps.alpha(t).unwrap();
        let shift = sol.phi(hi) - sol.phi(lo) - 1.0;
        prop_assert!(shift.abs() <= 1e-9, "{} shift defect {shift}", curve.family());
        prop_assert!(sol.phi_prime(lo) > 0.0);
        prop_assert!(sol.phi_prime(hi) > 0.0);
    }

    // Reported slopes agree with a centered difference of the maps.
    #[test]
    fn slopes_match_finite_differences(curve in any_curve(), t in 0.1f64..6.0) {
        let h = 1e-5;
        let fd = (curve.s(t + h) - curve.s(t - h)) / (2.0 * h);
        prop_assert!((curve.s_prime(t) - fd).abs() <= 1e-7);

        let sol = abel::closed_form(&curve).unwrap();
        let maps = CharMaps::new(curve).unwrap();
        let y = maps.beta(t).unwrap();
        let fd = (sol.phi(y + h) - sol.phi(y - h)) / (2.0 * h);
        let dp = sol.phi_prime(y);
        prop_assert!((dp - fd).abs() <= 1e-6 * (1.0 + dp.abs()));
    }
}
