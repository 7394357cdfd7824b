use std::sync::LazyLock;

use critcentre::liealg::{build_classical, Family};
use critcentre::scalars::{binomial, Field};
use critcentre::vacuum::{VState, VacuumModule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

static MODULES: LazyLock<Vec<VacuumModule>> = LazyLock::new(|| {
    let mut out = Vec::new();
    for (family, size, field, level) in [
        (Family::Sl, 2, Field::Rational, "3"),
        (Family::Sl, 2, Field::Prime(5), "critical"),
        (Family::Sl, 2, Field::Prime(7), "1"),
        (Family::Gl, 2, Field::Prime(5), "-2"),
        (Family::Sl, 3, Field::Prime(7), "critical"),
    ] {
        let spec = build_classical(family, size, field).unwrap();
        let k = if level == "critical" { spec.critical_level() } else { field.parse(level).unwrap() };
        out.push(VacuumModule::new(spec, k).unwrap());
    }
    out
});

fn states(v: &VacuumModule, seed: u64, weights: &[u32]) -> Vec<VState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    weights.iter().map(|&w| v.random_state(&mut rng, w, 2)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mode_commutator(which in 0usize..5, seed: u64, x in 0usize..8, y in 0usize..8, m in -2i64..=2, n in -2i64..=2, w in 0u32..=3) {
        let v = &MODULES[which];
        let spec = v.spec();
        let (x, y) = (x % spec.dim(), y % spec.dim());
        let s = &states(v, seed, &[w])[0];
        let lhs = v.apply_mode(x, m, &v.apply_mode(y, n, s)).minus(&v.apply_mode(y, n, &v.apply_mode(x, m, s)));
        let mut rhs = VState::zero(v.field());
        for (z, c) in spec.bracket(x, y) {
            rhs.add_scaled(&v.apply_mode(*z, m + n, s), c);
        }
        if m + n == 0 {
            let c = v.field().int(m) * v.level().value.clone() * spec.kappa(x, y).clone();
            rhs.add_scaled(s, &c);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn translation_composes(which in 0usize..5, seed: u64, a in 0u32..=3, b in 0u32..=3, w in 0u32..=3) {
        let v = &MODULES[which];
        let s = &states(v, seed, &[w])[0];
        let lhs = v.translate(a, &v.translate(b, s));
        let rhs = v.translate(a + b, s).scaled(&binomial((a + b) as i64, a as u64, v.field()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn translation_against_modes(which in 0usize..5, seed: u64, x in 0usize..8, n in -2i64..=2, w in 0u32..=3) {
        // [T, x_n] = -n x_{n-1}
        let v = &MODULES[which];
        let x = x % v.spec().dim();
        let s = &states(v, seed, &[w])[0];
        let lhs = v.translate(1, &v.apply_mode(x, n, s)).minus(&v.apply_mode(x, n, &v.translate(1, s)));
        let rhs = v.apply_mode(x, n - 1, s).scaled(&v.field().int(-n));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_field(which in 0usize..5, seed: u64, n in -2i64..=3, wa in 1u32..=2, wb in 0u32..=2) {
        // (Ta)_(n) b = -n a_(n-1) b
        let v = &MODULES[which];
        let st = states(v, seed, &[wa, wb]);
        let lhs = v.nth_product(&v.translate(1, &st[0]), n, &st[1]);
        let rhs = v.nth_product(&st[0], n - 1, &st[1]).scaled(&v.field().int(-n));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbol_is_multiplicative(which in 0usize..5, seed: u64, wa in 1u32..=3, wb in 1u32..=3) {
        let v = &MODULES[which];
        let st = states(v, seed, &[wa, wb]);
        prop_assume!(!st[0].is_zero() && !st[1].is_zero());
        let prod = v.nth_product(&st[0], -1, &st[1]);
        prop_assert_eq!(prod.symbol(), st[0].symbol().mul(&st[1].symbol()));
    }

    #[test]
    fn vacuum_is_a_unit(which in 0usize..5, seed: u64, w in 0u32..=3, k in 0u32..=3) {
        let v = &MODULES[which];
        let s = &states(v, seed, &[w])[0];
        prop_assert_eq!(&v.nth_product(&v.vacuum(), -1, s), s);
        prop_assert_eq!(v.nth_product(s, -(k as i64) - 1, &v.vacuum()), v.translate(k, s));
    }
}

fn central_states(v: &VacuumModule, max_w: u32) -> Vec<VState> {
    let mut out = Vec::new();
    for w in 1..=max_w {
        let basis = v.weight_basis(w);
        for vec in v.centre_kernel(w, 20_000).unwrap() {
            let mut s = VState::zero(v.field());
            for (m, c) in basis.iter().zip(vec) {
                s.add_term(m.clone(), c);
            }
            out.push(s);
        }
    }
    out
}

#[test]
fn centre_is_closed() {
    for which in [1, 3] {
        let v = &MODULES[which];
        let z = central_states(v, 3);
        assert!(!z.is_empty());
        for a in &z {
            assert!(v.is_central(&v.translate(1, a)));
            for b in &z {
                for n in [-1, -2] {
                    let p = v.nth_product(a, n, b);
                    assert!(v.is_central(&p), "{a} ({n}) {b}");
                }
                // the centre is commutative
                assert!(v.nth_product(a, 0, b).is_zero());
            }
        }
    }
}

#[test]
fn pcentre_states_multiply_into_the_centre() {
    let v = &MODULES[1];
    let spec = v.spec();
    let casimir = central_states(v, 2).pop().unwrap();
    for x in 0..spec.dim() {
        let z = v.pcentre_state(x, 1).unwrap();
        let p = v.nth_product(&z, -1, &casimir);
        assert!(v.is_central(&p));
    }
}
