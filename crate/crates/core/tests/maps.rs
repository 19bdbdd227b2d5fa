use nicf::cylinders::CylinderSpec;
use nicf::maps::{
    apply_map, conjugate_j, conjugate_j_inverse, expand, inverse_branch, reconstruct,
};
use nicf::{MapKind, NicfDigit, NicfError, SMALL_G};
use proptest::prelude::*;

fn point_in(kind: MapKind) -> impl Strategy<Value = f64> {
    let d = kind.domain();
    (0.0..=1.0f64).prop_map(move |u| d.lo + u * d.length())
}

/// Continued fraction value computed from scratch with exact branch formulas.
fn evaluate(kind: MapKind, digits: &[NicfDigit]) -> f64 {
    let mut y = 0.0;
    for d in digits.iter().rev() {
        y = match (kind, *d) {
            (MapKind::Odd, NicfDigit::Signed(b)) => 1.0 / (b as f64 + y),
            (MapKind::Even, NicfDigit::Pair { a, e }) => f64::from(e) / (a as f64 + y),
            (MapKind::EvenConjugate, NicfDigit::Pair { a, e: 1 }) => 1.0 / (a as f64 + y),
            (MapKind::EvenConjugate, NicfDigit::Pair { a, .. }) => 1.0 - 1.0 / (a as f64 + y),
            (_, NicfDigit::Pair { a, e }) => 1.0 / (a as f64 + f64::from(e) * y),
            _ => unreachable!(),
        };
    }
    y
}

#[test]
fn folded_map_on_known_points() {
    // 1/0.3 = 3.33…, nearest 3, T = 1/3
    let t = apply_map(MapKind::Folded, 0.3).unwrap();
    assert!((t - 1.0 / 3.0).abs() < 1e-14);
    // 3/8 = 1/(3 − 1/3)
    let s = expand(MapKind::Folded, 0.375, 5).unwrap();
    assert_eq!(s.digits[0], NicfDigit::pair(3, -1));
    assert!((apply_map(MapKind::Folded, 0.375).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    // x = g²: 1/g² = G + 1 = 2.618…, nearest 3, e = −1, T(x) = g²
    let g2 = *SMALL_G * *SMALL_G;
    let s = expand(MapKind::Folded, g2, 8).unwrap();
    assert!(s.digits.iter().all(|&d| d == NicfDigit::pair(3, -1)));
    assert!(matches!(
        apply_map(MapKind::Folded, 0.6),
        Err(NicfError::Domain { .. })
    ));
}

#[test]
fn expansion_round_trip_against_contraction_bound() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for kind in MapKind::ALL {
        let d = kind.domain();
        for _ in 0..1000 {
            let x = d.lo + d.length() * rng.gen::<f64>();
            for n in [1usize, 2, 5, 10, 25] {
                let seq = expand(kind, x, n).unwrap();
                let n_eff = seq.len();
                let y = reconstruct(&seq).unwrap();
                let bound = 0.5 * (4.0f64 / 9.0).powi(n_eff as i32);
                let slack = if seq.terminated {
                    1e-15
                } else {
                    4e-16 * n_eff as f64
                };
                assert!(
                    (x - y).abs() <= bound + slack,
                    "{kind} x = {x} n = {n}: |x − y| = {}",
                    (x - y).abs()
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn expansions_are_admissible_and_reconstruct(kind_ix in 0usize..5, u in 0.0..1.0f64, n in 1usize..20) {
        let kind = MapKind::ALL[kind_ix];
        let d = kind.domain();
        let x = d.lo + u * d.length();
        let seq = expand(kind, x, n).unwrap();
        prop_assert!(seq.validate().is_ok());
        let y = reconstruct(&seq).unwrap();
        prop_assert!((y - evaluate(kind, &seq.digits)).abs() < 1e-15);
    }

    #[test]
    fn each_point_lies_in_its_own_cylinder(kind_ix in 0usize..5, u in 0.001..0.999f64, n in 1usize..6) {
        let kind = MapKind::ALL[kind_ix];
        let d = kind.domain();
        let x = d.lo + u * d.length();
        let seq = expand(kind, x, n).unwrap();
        prop_assume!(!seq.terminated);
        let c = CylinderSpec::new(kind, seq.digits.clone()).unwrap();
        let pad = 1e-14;
        prop_assert!(c.interval.lo - pad <= x && x <= c.interval.hi + pad,
            "{} not in {}", x, c.interval);
    }

    #[test]
    fn inverse_branches_undo_the_map(kind_ix in 0usize..5, u in 0.001..0.999f64) {
        let kind = MapKind::ALL[kind_ix];
        let d = kind.domain();
        let x = d.lo + u * d.length();
        let seq = expand(kind, x, 1).unwrap();
        let t = apply_map(kind, x).unwrap();
        let back = inverse_branch(kind, seq.digits[0], t);
        prop_assert!((back - x).abs() < 1e-15 * (1.0 + x.abs()) + 1e-15);
    }

    #[test]
    fn odd_map_is_odd(x in point_in(MapKind::Odd)) {
        prop_assert_eq!(apply_map(MapKind::Odd, -x).unwrap(), -apply_map(MapKind::Odd, x).unwrap());
    }

    #[test]
    fn even_map_is_even(x in point_in(MapKind::Even)) {
        prop_assert_eq!(apply_map(MapKind::Even, -x).unwrap(), apply_map(MapKind::Even, x).unwrap());
    }

    #[test]
    fn folded_map_is_absolute_odd_map(x in point_in(MapKind::Folded)) {
        prop_assert_eq!(apply_map(MapKind::Folded, x).unwrap(), apply_map(MapKind::Odd, x).unwrap().abs());
    }

    #[test]
    fn conjugacy_holds(i in -(1i64 << 52)..=(1i64 << 52)) {
        // points of the 2⁻⁵³ lattice, on which J is exactly invertible
        let x = i as f64 * 2f64.powi(-53);
        let lhs = conjugate_j(apply_map(MapKind::Even, x).unwrap()).unwrap();
        let rhs = apply_map(MapKind::EvenConjugate, conjugate_j(x).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
        prop_assert_eq!(conjugate_j_inverse(conjugate_j(x).unwrap()).unwrap(), x);
    }
}

#[test]
fn inadmissible_words_are_rejected() {
    let bad = [
        (MapKind::Folded, vec![NicfDigit::pair(2, -1)]),
        (MapKind::Folded, vec![NicfDigit::pair(1, 1)]),
        (
            MapKind::Odd,
            vec![NicfDigit::Signed(2), NicfDigit::Signed(-3)],
        ),
        (MapKind::Odd, vec![NicfDigit::Signed(1)]),
        (
            MapKind::Even,
            vec![NicfDigit::pair(2, 1), NicfDigit::pair(3, -1)],
        ),
        (
            MapKind::HurwitzDual,
            vec![NicfDigit::pair(3, -1), NicfDigit::pair(2, 1)],
        ),
    ];
    for (kind, digits) in bad {
        assert!(
            matches!(
                CylinderSpec::new(kind, digits.clone()),
                Err(NicfError::Inadmissible(_))
            ),
            "{kind} {digits:?}"
        );
    }
}
