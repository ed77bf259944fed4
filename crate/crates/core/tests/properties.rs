use proptest::prelude::*;
use radial_shooting::diagnostics::ordering_report;
use radial_shooting::prelude::*;

fn shooter(profile: ManifoldProfile, p: f64, q: f64) -> Shooter {
    Shooter::new(&profile, ExponentPair::new(p, q, 3).unwrap(), IntegratorConfig::default()).unwrap()
}

fn zero_radius(o: &ShotOutcome) -> Option<(bool, f64)> {
    match o.kind {
        OutcomeKind::FirstZeroU { r, .. } => Some((true, r)),
        OutcomeKind::FirstZeroV { r, .. } => Some((false, r)),
        OutcomeKind::PositiveToHorizon { .. } => None,
    }
}

fn profile(k: usize) -> ManifoldProfile {
    match k {
        0 => ManifoldProfile::euclidean(3).unwrap(),
        1 => ManifoldProfile::hyperbolic(1.0, 3).unwrap(),
        _ => ManifoldProfile::exp_power(3.0, 3).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// With `p = q` the system is symmetric under `u ↔ v`.
    #[test]
    fn swapping_data_swaps_the_outcome(k in 0usize..3, xi in 0.2f64..5.0, eta in 0.2f64..5.0) {
        prop_assume!((xi - eta).abs() > 1e-2);
        let sh = shooter(profile(k), 5.0, 5.0);
        let a = zero_radius(&sh.shoot(xi, eta).unwrap());
        let b = zero_radius(&sh.shoot(eta, xi).unwrap());
        match (a, b) {
            (Some((ua, ra)), Some((ub, rb))) => {
                prop_assert_ne!(ua, ub);
                prop_assert!((ra - rb).abs() <= 1e-7 * ra, "{} vs {}", ra, rb);
            }
            (None, None) => {}
            other => prop_assert!(false, "asymmetric outcomes {:?}", other),
        }
    }

    /// On flat space `(λ^α ξ, λ^β η)` is the same solution rescaled by `λ`.
    #[test]
    fn euclidean_rescaling_preserves_the_class(
        p in 3.0f64..7.0,
        dq in 0.0f64..2.0,
        xi in 0.3f64..3.0,
        eta in 0.3f64..3.0,
        lambda in 0.5f64..2.0,
    ) {
        let q = 1.0 / (1.0 / 3.0 - 1.0 / (p + 1.0)) - 1.0 + dq;
        let sh = shooter(profile(0), p, q);
        let (alpha, beta) = (2.0 * (q + 1.0) / (p * q - 1.0), 2.0 * (p + 1.0) / (p * q - 1.0));
        let a = zero_radius(&sh.shoot(xi, eta).unwrap());
        let b = zero_radius(&sh.shoot(lambda.powf(alpha) * xi, lambda.powf(beta) * eta).unwrap());
        if let (Some((ua, ra)), Some((ub, rb))) = (a, b) {
            prop_assert_eq!(ua, ub);
            prop_assert!((ra - lambda * rb).abs() <= 1e-6 * ra, "{} vs {}", ra, lambda * rb);
        }
    }

    /// Raising `η` and lowering `ξ` raises `v - u` pointwise on the common interval.
    #[test]
    fn ordered_data_gives_ordered_solutions(
        k in 0usize..3,
        xi2 in 0.2f64..4.0,
        dxi in 0.0f64..1.0,
        eta1 in 0.2f64..4.0,
        deta in 1e-3f64..1.0,
    ) {
        let sh = shooter(profile(k), 4.0, 6.5);
        let first = sh.shoot(xi2 + dxi, eta1).unwrap();
        let second = sh.shoot(xi2, eta1 + deta).unwrap();
        let rep = ordering_report(&first, &second, 400).unwrap();
        prop_assert!(rep.holds(1e-10), "{:?}", rep);
    }

    /// Moving `η` up from a point of `A` stays in `A`; down from `B` stays in `B`.
    #[test]
    fn classes_are_monotone_in_eta(k in 0usize..3, xi in 0.3f64..3.0, eta in 0.3f64..3.0, step in 0.01f64..1.0) {
        let sh = shooter(profile(k), 5.0, 5.0);
        match sh.shoot(xi, eta).unwrap().kind {
            OutcomeKind::FirstZeroU { .. } => {
                prop_assert_eq!(sh.shoot(xi, eta + step).unwrap().kind.label(), "FirstZeroU");
            }
            OutcomeKind::FirstZeroV { .. } if eta - step > 0.0 => {
                prop_assert_eq!(sh.shoot(xi, eta - step).unwrap().kind.label(), "FirstZeroV");
            }
            _ => {}
        }
    }
}
