use critcentre::liealg::{build_classical, classical_numbers, validate_spec, Family, LieAlgebraSpec};
use critcentre::linalg;
use critcentre::scalars::Field;
use critcentre::Error;

const SHAPES: [(Family, usize); 13] = [
    (Family::Gl, 1),
    (Family::Gl, 2),
    (Family::Gl, 3),
    (Family::Sl, 2),
    (Family::Sl, 3),
    (Family::Sl, 4),
    (Family::So, 3),
    (Family::So, 4),
    (Family::So, 5),
    (Family::So, 6),
    (Family::Sp, 2),
    (Family::Sp, 4),
    (Family::Sp, 6),
];

fn fields_for(family: Family, n: usize) -> Vec<Field> {
    let (h, _, _) = classical_numbers(family, n).unwrap();
    let mut out = vec![Field::Rational];
    // p = 3 with h = 2 is covered by rank_one_types_at_three_fail_the_order_bound
    for p in [3u64, 5, 7, 11, 13] {
        if p > h && (p, h) != (3, 2) {
            out.push(Field::Prime(p));
        }
    }
    out
}

fn all_specs() -> Vec<LieAlgebraSpec> {
    let mut out = Vec::new();
    for (family, n) in SHAPES {
        for field in fields_for(family, n) {
            out.push(build_classical(family, n, field).unwrap());
        }
    }
    out
}

#[test]
fn every_family_validates() {
    for spec in all_specs() {
        for check in validate_spec(&spec) {
            assert!(check.passed(), "{} over {}: {:?}", check.name, spec.field(), check.witness);
        }
    }
}

#[test]
fn dimensions_and_ranks() {
    for spec in all_specs() {
        let n = spec.size();
        let (dim, rank) = match spec.family() {
            Family::Gl => (n * n, n),
            Family::Sl => (n * n - 1, n - 1),
            Family::So => (n * (n - 1) / 2, n / 2),
            Family::Sp => (n * (n + 1) / 2, n / 2),
        };
        assert_eq!((spec.dim(), spec.rank()), (dim, rank), "{}_{n}", spec.family());
        assert_eq!(spec.invariant_degrees().len(), rank);
        // sum of (2 d_i - 1) is the dimension for the semisimple types
        if spec.family() != Family::Gl {
            let total: u32 = spec.invariant_degrees().iter().map(|d| 2 * d - 1).sum();
            assert_eq!(total as usize, dim);
        }
    }
}

#[test]
fn gram_matrix_invertible_off_gl() {
    for spec in all_specs().into_iter().filter(|s| s.family() != Family::Gl) {
        let inv = linalg::inverse(spec.field(), spec.form()).unwrap();
        let d = spec.dim();
        for i in 0..d {
            for j in 0..d {
                let mut s = spec.field().zero();
                for k in 0..d {
                    s += &(spec.form()[i][k].clone() * inv[k][j].clone());
                }
                assert_eq!(s.is_one(), i == j);
                assert_eq!(s.is_zero(), i != j);
            }
        }
    }
}

#[test]
fn root_vectors_nilpotent_below_p() {
    for spec in all_specs() {
        for rv in spec.root_vectors() {
            let k = spec.nilpotency_order(rv.index).unwrap();
            assert!((k as u64) < 2 * spec.coxeter());
            if let Field::Prime(p) = spec.field() {
                assert!((k as u64) < p);
            }
        }
    }
}

#[test]
fn rank_one_types_at_three_fail_the_order_bound() {
    for (family, n) in [(Family::Sl, 2), (Family::Gl, 2), (Family::So, 3), (Family::So, 4), (Family::Sp, 2)] {
        let spec = build_classical(family, n, Field::Prime(3)).unwrap();
        let failed: Vec<_> = validate_spec(&spec).into_iter().filter(|c| !c.passed()).collect();
        assert_eq!(failed.len(), 1, "{family}_{n}");
        assert!(failed[0].name.ends_with("root vectors ad-nilpotent"));
        assert!(failed[0].witness.as_deref().unwrap().contains("order 3 >= p"));
    }
}

#[test]
fn small_characteristic_rejected() {
    assert!(matches!(build_classical(Family::Sl, 3, Field::Prime(3)), Err(Error::BadCharacteristic { .. })));
    assert!(matches!(build_classical(Family::Sp, 6, Field::Prime(5)), Err(Error::BadCharacteristic { .. })));
    assert!(matches!(build_classical(Family::So, 2, Field::Rational), Err(Error::BadSize { .. })));
}

#[test]
fn critical_level_is_minus_dual_coxeter() {
    for spec in all_specs() {
        let hv = spec.dual_coxeter() as i64;
        assert_eq!(spec.critical_level(), spec.field().int(-hv));
    }
}

#[test]
fn documents_round_trip() {
    for spec in all_specs() {
        let doc = spec.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back = LieAlgebraSpec::from_document(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.to_document(), doc);
        assert!(validate_spec(&back).iter().all(|c| c.passed()));
    }
}
