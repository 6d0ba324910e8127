use hamsix_core::catalog::{
    check, expected_outcome, expected_variant_outcome, instances, instantiate, instantiate_variant, CatalogError,
    Params, Ranges, TypeId, Variant,
};
use hamsix_core::document::{emit_profile, parse_profile};
use hamsix_core::feasibility::Rule;
use hamsix_core::verify::{verify, Normalize};

fn variants() -> [Variant; 3] {
    [
        Variant::default(),
        Variant {
            flip: true,
            same_level: false,
        },
        Variant {
            flip: false,
            same_level: true,
        },
    ]
}

#[test]
fn every_instance_meets_its_expectations() {
    let r = Ranges::default();
    let mut checked = 0;
    for (id, params) in instances(&r) {
        for v in variants() {
            let p = match instantiate_variant(id, &params, &r, v) {
                Ok(p) => p,
                Err(CatalogError::NoSameLevelVariant(_)) => continue,
                Err(e) => panic!("{id} {params:?}: {e}"),
            };
            let ver = verify(&p, &Normalize::default()).unwrap();
            assert!(ver.checked);
            let expected = expected_variant_outcome(id, &params, &r, v).unwrap();
            for o in check(&ver.report, &ver.result, &expected) {
                assert!(o.passed, "{id} {params:?} {v:?}: {} ({})", o.expected.expectation, o.detail);
            }
            checked += 1;
        }
    }
    assert!(checked > 350);
}

#[test]
fn emitted_documents_verify_to_the_same_report() {
    let r = Ranges::default();
    for (id, params) in instances(&r) {
        let p = instantiate(id, &params, &r).unwrap();
        let back = parse_profile(&emit_profile(&p)).unwrap();
        assert_eq!(back, p, "{id} {params:?}");
        let a = verify(&p, &Normalize::default()).unwrap();
        let b = verify(&back, &Normalize::default()).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.result, b.result);
    }
}

#[test]
fn same_level_outcomes() {
    let r = Ranges::default();
    let v = Variant {
        flip: false,
        same_level: true,
    };
    let two = verify(&instantiate_variant(TypeId::Two, &Params::default(), &r, v).unwrap(), &Normalize::default()).unwrap();
    let cert = two.result.certificate().expect("type 2 on one level is infeasible");
    assert!(cert.rules(&two.system).contains(&Rule::Disjointness));
    for k in -3..=3 {
        let three = instantiate_variant(TypeId::Three, &Params::k(k), &r, v).unwrap();
        assert_eq!(verify(&three, &Normalize::default()).unwrap().is_feasible(), k == 0, "k = {k}");
    }
    assert_eq!(
        instantiate_variant(TypeId::One, &Params::default(), &r, v),
        Err(CatalogError::NoSameLevelVariant(TypeId::One))
    );
}

#[test]
fn six_a_infeasibility_cites_representability() {
    let r = Ranges::default();
    let v = verify(&instantiate(TypeId::SixA, &Params::six_a(0, 1, 1), &r).unwrap(), &Normalize::default()).unwrap();
    let cert = v.result.certificate().expect("genus 1 over genus 1 is infeasible");
    assert!(cert.rules(&v.system).contains(&Rule::Representability));
    let ok = verify(&instantiate(TypeId::SixA, &Params::six_a(0, 0, 0), &r).unwrap(), &Normalize::default()).unwrap();
    assert!(ok.is_feasible());
}

#[test]
fn parameter_errors() {
    let r = Ranges::default();
    assert_eq!("7".parse::<TypeId>(), Err(CatalogError::UnknownType("7".into())));
    assert_eq!("3alt".parse::<TypeId>(), Ok(TypeId::ThreeAlt));
    assert!(matches!(
        instantiate(TypeId::Three, &Params::k(9), &r),
        Err(CatalogError::OutOfRange { name: "k", value: 9, .. })
    ));
    assert!(matches!(
        instantiate(TypeId::One, &Params::k(1), &r),
        Err(CatalogError::UnusedParameter { name: "k", .. })
    ));
    let both = Params {
        k: Some(1),
        n: Some(2),
        ..Params::default()
    };
    assert_eq!(instantiate(TypeId::SixA, &both, &r), Err(CatalogError::ConflictingParameters));
    assert!(expected_outcome(TypeId::SixB, &Params::k(5), &r).is_err());
}

#[test]
fn n_selects_the_minimum_chern_number() {
    let r = Ranges::default();
    let by_n = Params {
        n: Some(4),
        ..Params::default()
    };
    assert_eq!(instantiate(TypeId::SixA, &by_n, &r), instantiate(TypeId::SixA, &Params::k(2), &r));
}
