use bigdiv::scalar::{rat, QuadNum, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-400i64..=400, 1i64..=30).prop_map(|(n, d)| rat(n, d))
}

fn quad() -> impl Strategy<Value = QuadNum> {
    (small_rat(), small_rat()).prop_map(|(a, b)| QuadNum::new(a, b, 6))
}

proptest! {
    #[test]
    fn field_axioms(x in quad(), y in quad(), z in quad()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x - &x), &QuadNum::zero());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.recip(), QuadNum::one());
        }
    }

    #[test]
    fn sign_is_multiplicative(x in quad(), y in quad()) {
        prop_assert_eq!((&x * &y).sign(), x.sign() * y.sign());
        prop_assert_eq!(x.abs().sign(), if x.is_zero() { 0 } else { 1 });
    }

    #[test]
    fn floor_brackets(x in quad()) {
        let f = QuadNum::from_rat(Rat::from_integer(x.floor()));
        prop_assert!(f <= x);
        prop_assert!(x < &f + &QuadNum::one());
    }

    #[test]
    fn order_matches_floats_when_far_apart(x in quad(), y in quad()) {
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 * (1.0 + fx.abs()) {
            prop_assert_eq!(x < y, fx < fy);
        }
    }

    #[test]
    fn text_and_json_round_trip(x in quad()) {
        let back: QuadNum = x.to_string().parse().unwrap();
        prop_assert_eq!(&back, &x);
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<QuadNum>(&json).unwrap(), x);
    }
}

#[test]
fn radicands_are_square_free() {
    let x = QuadNum::new(rat(1, 1), rat(1, 1), 24);
    assert_eq!(x.radicand(), 6);
    assert_eq!(x.radical_coeff(), &rat(2, 1));
    let r = QuadNum::new(rat(1, 1), rat(3, 1), 49);
    assert!(r.is_rational());
    assert_eq!(r.floor(), BigInt::from(22));
}

#[test]
fn decimal_rendering_truncates_toward_the_exact_value() {
    let c = QuadNum::new(rat(49, 50), rat(-2, 5), 6);
    assert_eq!(c.to_decimal(8), "0.00020410");
}
