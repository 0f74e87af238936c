use bigdiv::ns_lattice::NsClass;
use bigdiv::scalar::{rat, Rat};
use num_traits::Zero;
use proptest::prelude::*;

fn class() -> impl Strategy<Value = NsClass> {
    let r = || (-60i64..=60, 1i64..=6).prop_map(|(n, d)| rat(n, d));
    (r(), r(), r()).prop_map(|(x, y, z)| NsClass::new(x, y, z))
}

proptest! {
    #[test]
    fn form_is_symmetric_and_bilinear(a in class(), b in class(), c in class()) {
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!((a.clone() + b.clone()).intersect(&c), a.intersect(&c) + b.intersect(&c));
        prop_assert_eq!(a.self_intersection(), a.intersect(&a));
    }

    #[test]
    fn diagonal_coordinates_round_trip(a in class()) {
        let d = a.to_diag();
        prop_assert_eq!(d.to_class(), a.clone());
        prop_assert_eq!(d.cone_gap(), Rat::from_integer(6.into()) * a.self_intersection());
    }

    // On E×E the nef cone is the closure of the positive cone: β² ≥ 0 and
    // β·A ≥ 0 for one ample A.
    #[test]
    fn nef_matches_light_cone(a in class()) {
        let l0 = NsClass::from_ints(4, 4, 1);
        let light = a.self_intersection() >= Rat::zero() && a.intersect(&l0) >= Rat::zero();
        prop_assert_eq!(a.is_nef(), light);
        prop_assert_eq!(a.is_ample(), a.self_intersection() > Rat::zero() && a.intersect(&l0) > Rat::zero());
    }
}

#[test]
fn generators_are_null_and_meet_in_one() {
    for c in [NsClass::f1(), NsClass::f2(), NsClass::delta()] {
        assert!(c.self_intersection().is_zero());
        assert!(c.is_nef() && !c.is_ample());
    }
    assert_eq!(NsClass::f1().intersect(&NsClass::f2()), rat(1, 1));
    assert_eq!(NsClass::f1().intersect(&NsClass::delta()), rat(1, 1));
}
