use critcentre::liealg::{build_classical, Family};
use critcentre::scalars::Field;
use critcentre::sugawara::{self, Provenance};
use critcentre::vacuum::VacuumModule;

fn critical(family: Family, n: usize, field: Field) -> VacuumModule {
    VacuumModule::critical(build_classical(family, n, field).unwrap()).unwrap()
}

#[test]
fn default_families_pass_over_q() {
    for (family, n, cap) in [
        (Family::Gl, 1, 4),
        (Family::Gl, 2, 4),
        (Family::Gl, 3, 3),
        (Family::Sl, 2, 4),
        (Family::Sl, 3, 3),
        (Family::Sp, 4, 3),
        (Family::So, 5, 3),
    ] {
        let module = critical(family, n, Field::Rational);
        let fam = sugawara::default_family(&module).unwrap();
        let expected = if family == Family::Gl { module.spec().rank() } else { 1 };
        assert_eq!(fam.vectors.len(), expected, "{family}_{n}");
        assert_eq!(fam.provenance, if family == Family::Gl { Provenance::Cdet } else { Provenance::Casimir });
        for check in sugawara::family_checks_to_weight(&fam, &module, cap).unwrap() {
            assert!(check.passed(), "{family}_{n}: {} {:?}", check.name, check.witness);
        }
    }
}

#[test]
fn reduction_matches_direct_construction() {
    for (family, n) in [(Family::Sl, 2), (Family::Sp, 4), (Family::Gl, 2), (Family::Sl, 3)] {
        let over_q = sugawara::default_family(&critical(family, n, Field::Rational)).unwrap();
        for p in [5, 7] {
            let Ok(spec) = build_classical(family, n, Field::Prime(p)) else { continue };
            let module = VacuumModule::critical(spec).unwrap();
            let direct = sugawara::default_family(&module).unwrap();
            let reduced = sugawara::reduce_family(&over_q, p).unwrap();
            assert_eq!(reduced.vectors, direct.vectors, "{family}_{n} mod {p}");
            assert_eq!(reduced.normalization, direct.normalization);
            assert!(reduced.normalization.iter().all(|c| c.as_ref().is_some_and(|c| !c.is_zero())));
        }
    }
}

#[test]
fn products_with_pcentre_stay_central() {
    for (family, n, p) in [(Family::Sl, 2, 5), (Family::Gl, 2, 5), (Family::Sl, 2, 7)] {
        let module = critical(family, n, Field::Prime(p));
        let fam = sugawara::default_family(&module).unwrap();
        let s1 = fam.derived(&module, 0, 1);
        let s2 = fam.derived(&module, 0, 2);
        assert!(module.is_central(&module.nth_product(&s1, -1, &s2)));
        assert!(module.is_central(&module.nth_product(&s1, -1, &s1)));
        for x in 0..module.spec().dim() {
            let z = module.pcentre_state(x, 1).unwrap();
            assert!(module.is_central(&module.nth_product(&s1, -1, &z)), "{family}_{n} p={p}");
            assert!(module.is_central(&module.nth_product(&z, -1, &z)));
        }
    }
}

#[test]
fn casimir_not_central_off_critical() {
    for k in ["0", "1", "-1", "1/2"] {
        let spec = build_classical(Family::Sl, 2, Field::Rational).unwrap();
        let module = VacuumModule::new(spec, Field::Rational.parse(k).unwrap()).unwrap();
        let fam = sugawara::casimir_family(&module).unwrap();
        assert!(!module.is_central(&fam.vectors[0]), "k = {k}");
    }
}

#[test]
fn cdet_needs_gl() {
    let module = critical(Family::Sl, 2, Field::Rational);
    assert!(sugawara::cdet_family(&module).is_err());
}

#[test]
fn reduction_needs_rational_input() {
    let module = critical(Family::Sl, 2, Field::Prime(5));
    let fam = sugawara::default_family(&module).unwrap();
    assert!(sugawara::reduce_family(&fam, 7).is_err());
}
