use bigdiv::multiplier_rees::{
    expected_endpoints, newton_polygon, ord_brute, rees_data, staircase, staircase_by_columns, strictly_above,
    w_endpoints, w_max,
};
use bigdiv::scalar::{rat, QuadNum};
use proptest::prelude::*;

fn threshold() -> impl Strategy<Value = QuadNum> {
    prop_oneof![
        (100i64..=20_000, 1i64..=100).prop_map(|(n, d)| QuadNum::from_rat(rat(n, d))),
        (1i64..=40, 1i64..=40).prop_map(|(a, b)| QuadNum::new(rat(a, 1), rat(b, 7), 6)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn staircase_orders_agree(alpha in threshold(), beta in threshold()) {
        let a = staircase(&alpha, &beta);
        prop_assert_eq!(&a, &staircase_by_columns(&alpha, &beta));
        prop_assert!(a.is_antichain());
        for &(x, y) in &a.generators {
            prop_assert!(strictly_above(&alpha, &beta, (x, y)));
            prop_assert!(x == 0 || !strictly_above(&alpha, &beta, (x - 1, y)));
            prop_assert!(y == 0 || !strictly_above(&alpha, &beta, (x, y - 1)));
        }
    }

    #[test]
    fn side_data_matches_brute_force(alpha in threshold(), beta in threshold()) {
        let ideal = staircase(&alpha, &beta);
        let np = newton_polygon(&ideal).unwrap();
        let rees = rees_data(&np);
        for r in &rees {
            prop_assert_eq!(ord_brute(&ideal, r.a, r.b), r.ord);
            prop_assert_eq!(r.log_discrepancy, r.a + r.b);
        }
        prop_assert_eq!(w_max(&np), w_endpoints(&np));
    }
}

#[test]
fn endpoint_formula_on_random_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let alpha = QuadNum::new(rat(rng.gen_range(1..=300), 1), rat(rng.gen_range(-20..=20), 10), 6);
        let beta = QuadNum::from_rat(rat(rng.gen_range(60..=30_000), rng.gen_range(1..=100)));
        if !alpha.is_positive() {
            continue;
        }
        let np = newton_polygon(&staircase(&alpha, &beta)).unwrap();
        let (p0, pr) = expected_endpoints(&alpha, &beta);
        assert_eq!(np.vertices.first(), Some(&p0), "alpha {alpha}, beta {beta}");
        assert_eq!(np.vertices.last(), Some(&pr), "alpha {alpha}, beta {beta}");
    }
}
