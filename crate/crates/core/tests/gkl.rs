use nicf::gkl::{
    decay_experiment, gamma_iterates, levy_comparison, preimage_limit_check, NOISE_FLOOR,
};
use nicf::measures::{measure, DensityKind};
use nicf::{IntervalUnion, MapKind, TransferOperator, WeightFamily, LOG_G};

#[test]
fn decay_respects_derivative_rates() {
    for kind in [MapKind::Folded, MapKind::EvenConjugate] {
        let r = decay_experiment(kind, 20, 64, 10_000).unwrap();
        assert!(r.verdict, "{kind}: {:?}", r.fitted_rate);
        assert!(r.max_mass_residual < 1e-12);
        for n in 3..20 {
            if r.errors[n + 1] > NOISE_FLOOR {
                assert!(r.errors[n + 1] <= r.target_rate * r.errors[n]);
            }
            assert!(r.centered_errors[n + 1] <= r.target_rate * r.centered_errors[n]);
        }
        // ‖γ_n′‖ ≤ rateⁿ ‖γ_0′‖
        let d0 = r.derivative_norms[0];
        for (n, d) in r.derivative_norms.iter().enumerate() {
            assert!(
                *d <= d0 * r.target_rate.powi(n as i32) * (1.0 + 1e-9),
                "{kind} n = {n}"
            );
        }
        // the early errors agree with the centered ones until rounding sets in
        for n in 0..6 {
            assert!((r.errors[n] - r.centered_errors[n]).abs() < 1e-13);
        }
    }
}

#[test]
fn folded_limit_constant() {
    let op = TransferOperator::new(WeightFamily::FoldedU, 64, 10_000).unwrap();
    let g = gamma_iterates(&op, 15).unwrap().pop().unwrap();
    let c = 1.0 / (2.0 * *LOG_G);
    for &v in g.values() {
        assert!((v - c).abs() < 1e-13);
    }
}

#[test]
fn lebesgue_preimages_converge_to_the_invariant_measure() {
    let op = TransferOperator::new(WeightFamily::FoldedU, 64, 10_000).unwrap();
    let e = IntervalUnion::single(0.0, 0.25).unwrap();
    let mu = measure(DensityKind::FoldedMu, &e).unwrap().value;
    for n in [1usize, 4, 12] {
        let r = preimage_limit_check(MapKind::Folded, &e, n, &op, 0, 1).unwrap();
        assert!((r.limit - 0.5 * mu).abs() < 1e-15);
        assert!(
            r.residual <= 10.0 * 0.288f64.powi(n as i32),
            "n = {n}: {}",
            r.residual
        );
    }
}

#[test]
fn operator_and_orbit_routes_agree() {
    let folded = TransferOperator::new(WeightFamily::FoldedU, 64, 10_000).unwrap();
    let conj = TransferOperator::new(WeightFamily::ConjugateU, 64, 10_000).unwrap();
    let cases = [
        (
            MapKind::Folded,
            IntervalUnion::single(0.1, 0.3).unwrap(),
            &folded,
        ),
        (
            MapKind::Odd,
            IntervalUnion::single(-0.25, 0.125).unwrap(),
            &folded,
        ),
        (
            MapKind::Even,
            IntervalUnion::single(-0.3, 0.2).unwrap(),
            &conj,
        ),
        (
            MapKind::EvenConjugate,
            IntervalUnion::single(0.6, 0.9).unwrap(),
            &conj,
        ),
    ];
    for (kind, e, op) in cases {
        for n in [1usize, 3] {
            let r = preimage_limit_check(kind, &e, n, op, 2_000_000, 5).unwrap();
            let z = r.z_score.unwrap();
            assert!(z < 4.0, "{kind} n = {n}: z = {z}");
        }
    }
}

#[test]
fn comparison_table_lists_both_operators() {
    let rows = levy_comparison(32, 2_000, 12).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].fitted_rate.unwrap() < rows[0].target);
    assert!(rows[1].fitted_rate.unwrap() < rows[1].target);
    assert!(rows[1].certified_sup.unwrap() > 0.234);
    assert!(rows[2].name == "wirsing");
}
