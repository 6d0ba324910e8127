use std::collections::BTreeMap;

use hamsix_core::affine::{frac, q, Affine, Param, Q};
use hamsix_core::catalog::{instantiate, Params, Ranges, TypeId};
use hamsix_core::crossing::run_profile;
use hamsix_core::feasibility::{
    eliminate, equivalent, implies, verify_sample, ConstraintSystem, FeasibilityError, Provenance, Rule,
};
use proptest::prelude::*;

fn system(id: TypeId) -> ConstraintSystem {
    run_profile(&instantiate(id, &Params::default(), &Ranges::default()).unwrap())
        .unwrap()
        .constraints
}

#[test]
fn all_ones_satisfies_small_types() {
    for (id, vars) in [(TypeId::One, 2), (TypeId::Five, 5)] {
        let sys = system(id);
        assert_eq!(sys.variables.len(), vars, "{id}");
        assert_eq!(verify_sample(&sys, &vec![q(1); vars]), Ok(true), "{id}");
        assert_eq!(verify_sample(&sys, &vec![q(0); vars]), Ok(false), "{id}");
    }
}

#[test]
fn sample_dimension_is_checked() {
    let sys = system(TypeId::One);
    assert_eq!(
        verify_sample(&sys, &[q(1)]),
        Err(FeasibilityError::DimensionMismatch { expected: 2, found: 1 })
    );
}

#[test]
fn strict_versus_weak() {
    let x = || Affine::var(Param::Gap(0));
    let tag = || Provenance::new(Rule::GapPositive, "test");
    let mut sys = ConstraintSystem::new();
    sys.add_strict(x(), tag());
    sys.add_weak(-x(), tag());
    assert!(!eliminate(&sys).is_feasible());
    let mut weak = ConstraintSystem::new();
    weak.add_weak(x(), tag());
    weak.add_weak(-x(), tag());
    let s = eliminate(&weak);
    assert_eq!(s.sample().unwrap().get(Param::Gap(0)), Some(&q(0)));
}

#[test]
fn implication_and_equivalence() {
    let x = Affine::var(Param::Gap(0));
    let tag = || Provenance::new(Rule::GapPositive, "test");
    let mut a = ConstraintSystem::new();
    a.add_strict(x.clone() - Affine::int(2), tag());
    let mut b = ConstraintSystem::new();
    b.add_strict(x.clone(), tag());
    assert!(implies(&a, &b));
    assert!(!implies(&b, &a));
    let mut c = ConstraintSystem::new();
    c.add_strict(x.scale(&frac(1, 2)) - Affine::int(1), tag());
    assert!(equivalent(&a, &c));
}

fn arb_affine() -> impl Strategy<Value = Affine> {
    (-5i64..=5, prop::collection::vec((0u32..4, -5i64..=5), 0..4)).prop_map(|(c, ts)| {
        let terms: Vec<(Param, i64)> = ts.into_iter().map(|(i, a)| (Param::Gap(i), a)).collect();
        Affine::from_ints(c, &terms)
    })
}

fn arb_point() -> impl Strategy<Value = BTreeMap<Param, Q>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), 4)
        .prop_map(|v| v.into_iter().enumerate().map(|(i, (n, d))| (Param::Gap(i as u32), frac(n, d))).collect())
}

proptest! {
    #[test]
    fn substitution_commutes_with_evaluation(a in arb_affine(), b in arb_affine(), point in arb_point()) {
        let p = Param::Gap(0);
        let mut moved = point.clone();
        moved.insert(p, b.eval(&point).unwrap());
        prop_assert_eq!(a.substitute(p, &b).eval(&point), a.eval(&moved));
    }

    #[test]
    fn arithmetic_matches_evaluation(a in arb_affine(), b in arb_affine(), c in -4i64..=4, point in arb_point()) {
        let (va, vb) = (a.eval(&point).unwrap(), b.eval(&point).unwrap());
        prop_assert_eq!((a.clone() + b.clone()).eval(&point), Some(va.clone() + vb.clone()));
        prop_assert_eq!((a.clone() - b).eval(&point), Some(va.clone() - vb));
        prop_assert_eq!(a.scale(&q(c)).eval(&point), Some(va * q(c)));
    }

    #[test]
    fn normalized_keeps_the_sign_of_every_value(a in arb_affine(), point in arb_point()) {
        prop_assume!(!a.is_constant());
        let (v, w) = (a.eval(&point).unwrap(), a.normalized().eval(&point).unwrap());
        prop_assert_eq!(v == q(0), w == q(0));
    }
}
