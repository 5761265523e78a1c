mod common;

use procontra::coefficients::{Backend, Level, Matrix};
use procontra::discrete_mod::*;
use procontra::error::Error;
use procontra::homotopy::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn padic(p: u64) -> Backend {
    Backend::padic(p).unwrap()
}

fn int_rows(m: &Matrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|s| s.as_int().unwrap().to_i64().unwrap()).collect()).collect()
}

fn order(m: &FPModule) -> u64 {
    m.order().unwrap().to_i64().unwrap() as u64
}

#[test]
fn cone_of_identity_is_contractible() {
    let b = padic(3);
    let c = Complex::concentrated(&cyclic(&b, 2).unwrap(), 0);
    assert!(is_contractible(&cone(&ChainMap::identity(&c)).unwrap()).unwrap());
    assert!(!is_contractible(&c).unwrap());
}

#[test]
fn cone_of_zero_is_sum() {
    let b = padic(2);
    let a = Complex::concentrated(&cyclic(&b, 1).unwrap(), 0);
    let bb = Complex::concentrated(&cyclic(&b, 2).unwrap(), 0);
    let k = cone(&ChainMap::zero(&a, &bb)).unwrap();
    assert!(k.term(-1).is_isomorphic(&a.term(0)));
    assert!(k.term(0).is_isomorphic(&bb.term(0)));
    assert!(k.diff(-1).is_zero());
}

#[test]
fn truncations() {
    let b = padic(2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = random_module_complex(&mut rng, &b, 3, 2, 2).unwrap();
    assert_eq!(silly_truncate(&c, c.lo()).to_literal().terms.len(), c.to_literal().terms.len());
    // exact below n: the canonical truncation keeps the cohomology
    let m = cyclic(&b, 2).unwrap();
    let id = ModMorphism::identity(&m);
    let exact_below = Complex::two_term(&id, 0);
    let t = canonical_truncate_ge(&exact_below, 1);
    for k in -1..=2 {
        assert!(t.cohomology(k).is_isomorphic(&exact_below.cohomology(k)));
    }
}

#[test]
fn tot_product_of_one_row_and_unbounded() {
    let b = padic(2);
    let m = cyclic(&b, 2).unwrap();
    let row = Complex::two_term(&ModMorphism::scalar(&m, &m.ring().from_i64(2)), 0);
    let z = Complex::concentrated(&FPModule::free(&b, 2, 1), 0);
    let t = tot_product(&Bicomplex::tensor(&row, &z).unwrap()).unwrap();
    for k in -1..=2 {
        assert!(t.cohomology(k).is_isomorphic(&row.cohomology(k)));
    }
    let err = Bicomplex::from_fn(
        &b,
        (Some(0), None),
        (Some(0), Some(0)),
        |_, _| FPModule::zero(&b),
        |_, _| ModMorphism::zero(&FPModule::zero(&b), &FPModule::zero(&b)),
        |_, _| ModMorphism::zero(&FPModule::zero(&b), &FPModule::zero(&b)),
    );
    assert!(matches!(err, Err(Error::WindowError(_))));
}

#[test]
fn tensor_of_two_term_complexes_brute_force() {
    let b = padic(2);
    for seed in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_free_complex(&mut rng, &b, 2, 2);
        let y = random_free_complex(&mut rng, &b, 2, 2);
        let t = free_tensor(&x, &y).unwrap();
        let k = 2u32;
        let q = 4u64;
        let tk = t.stage(k);
        for m in t.lo()..=t.hi() {
            let g = t.rank(m);
            let inc = common::rows_mod(q, &int_rows(&t.diff(m - 1)));
            let out = common::rows_mod(q, &int_rows(&t.diff(m)));
            let expect = common::cohomology_order(q, g, &inc, t.rank(m - 1), &out);
            assert_eq!(order(&tk.cohomology(m)), expect, "seed {seed} degree {m}");
        }
        let bi = tot_product(&Bicomplex::tensor(&x.stage(k), &y.stage(k)).unwrap()).unwrap();
        for m in t.lo()..=t.hi() {
            assert!(bi.cohomology(m).is_isomorphic(&tk.cohomology(m)));
        }
    }
}

#[test]
fn exact_columns_give_acyclic_total() {
    // rows: a resolution 0 → Λ →4 Λ → Λ/4 → 0 tensored with an acyclic complex
    let b = padic(2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let c = random_contractible(&mut rng, &b, 3, 2);
    let r = resolve_cohpro(&Complex::concentrated(&cyclic(&b, 2).unwrap(), 0)).unwrap();
    let t = free_tensor(&r.complex, &c).unwrap();
    assert!(t.stage(3).is_acyclic());
}

#[test]
fn resolution_of_zero_and_xi_of_ses() {
    let b = padic(2);
    let z = Complex::zero(&b);
    assert!(resolve_cohpro(&z).unwrap().complex.is_zero());
    assert!(xi(&z).unwrap().0.is_zero());
    // 0 → Z/2 → Z/8 → Z/4 → 0: K[1] → cone(g) is a quasi-isomorphism, and the
    // lifts between the resolutions are inverse homotopy equivalences.
    let (k, bm, cm) = (cyclic(&b, 1).unwrap(), cyclic(&b, 3).unwrap(), cyclic(&b, 2).unwrap());
    let g = ModMorphism::new(&bm, &cm, Matrix::from_i64(&cm.ring(), &[vec![1]])).unwrap();
    let (cb, cc) = (Complex::concentrated(&bm, 0), Complex::concentrated(&cm, 0));
    let cone_g = cone(&ChainMap::from_fn(&cb, &cc, |_| g.clone()).unwrap()).unwrap();
    let k1 = Complex::concentrated(&k, -1);
    let incl = ChainMap::from_fn(&k1, &cone_g, |d| {
        let tgt = cone_g.term(d);
        if d == -1 {
            let ring = tgt.ring();
            let m = Matrix::from_fn(&ring, tgt.gens(), 1, |r, _| if r == tgt.gens() - 1 { ring.from_i64(4) } else { ring.zero() });
            ModMorphism::new(&k, &tgt, m).unwrap()
        } else {
            ModMorphism::zero(&k1.term(d), &tgt)
        }
    })
    .unwrap();
    assert!(incl.is_quasi_isomorphism());
    let (rk, rc) = (resolve_cohpro(&k1).unwrap(), resolve_cohpro(&cone_g).unwrap());
    let up = lift_chain_map(&incl, &rk, &rc).unwrap();
    assert!(free_cone(&up).unwrap().at_level(Level::Infinite).is_acyclic());
    let down = lift_along(&rc.complex, |d| rc.augmentation(d), &rc).unwrap();
    let id = FreeChainMap::identity(&rc.complex);
    assert!(free_null_homotopy(&down.sub(&id).unwrap(), Level::Infinite).unwrap().is_some());
    let dual = up.dual();
    let k_shift = xi(&Complex::concentrated(&k, 0)).unwrap().0.shift(-1);
    assert_eq!(dual.tgt.lo(), k_shift.lo());
    for i in k_shift.lo()..k_shift.hi() {
        assert_eq!(dual.tgt.diff(i), k_shift.diff(i).neg());
    }
}

#[test]
fn oracle_identity_class_is_nonzero() {
    let b = padic(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let m = random_module_complex(&mut rng, &b, 3, 2, 2).unwrap();
        let h = db_coh_hom_oracle(&m, &m).unwrap();
        let acyclic = m.is_acyclic();
        assert_eq!(h.is_zero(), acyclic);
    }
}

#[test]
fn pure_acyclicity_is_homotopy_invariant() {
    let b = padic(2);
    for seed in 0..6 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_free_complex(&mut rng, &b, 3, 2);
        let extra = elementary_contractible(&b, 0, 1);
        let g = FreeComplex::direct_sum(&[f.clone(), extra]).unwrap();
        let (a, c) = (pure_acyclicity_test(&ContraComplex(f), 3, seed).unwrap(), pure_acyclicity_test(&ContraComplex(g), 3, seed).unwrap());
        assert_eq!(a.pass, c.pass);
    }
}

#[test]
fn periodicity_examples() {
    let b = padic(2);
    let cert = periodicity_check_projective_cocycles(&ContraComplex(elementary_contractible(&b, 0, 1)), 4).unwrap();
    assert!(cert.certified);
    assert_eq!(cert.degrees.iter().map(|d| d.rank).collect::<Vec<_>>(), vec![Some(0), Some(1)]);
    assert!(periodicity_check_projective_cocycles(&ContraComplex(FreeComplex::zero(&b)), 4).unwrap().certified);
    let c = elementary_contractible(&b, 0, 1);
    let zero = FreeChainMap::new(&c, &c, |i| Matrix::zeros(&b.base_ring(), c.rank(i), c.rank(i))).unwrap();
    let h = null_homotopy_to_depth(&zero, 5).unwrap().unwrap();
    assert!(h.components.iter().all(|(_, m)| m.is_zero()));
    assert!(null_homotopy_to_depth(&FreeChainMap::identity(&c), 5).unwrap().is_some());
    let p = elementary_nonacyclic(&b, 0, 1);
    assert!(null_homotopy_to_depth(&FreeChainMap::identity(&p), 5).unwrap().is_none());
}

#[test]
fn generated_cocycles_free_by_enumeration() {
    let b = padic(2);
    for seed in 0..6 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_contractible(&mut rng, &b, 3, 2);
        let n = random_nonacyclic(&mut rng, &b, 3, 2);
        let free_everywhere = |f: &FreeComplex| {
            (1..=3).all(|k| (f.lo()..=f.hi()).all(|i| common::cocycles_free(2, k, f.rank(i), &common::rows_mod(1 << k, &int_rows(&f.diff(i))))))
        };
        assert!(free_everywhere(&c));
        assert!(!free_everywhere(&n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_complexes_square_to_zero(seed in 0u64..1000) {
        let b = padic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_module_complex(&mut rng, &b, 3, 2, 3).unwrap();
        let lit = c.to_literal();
        prop_assert!(lit.into_complex().is_ok());
        let f = random_free_complex(&mut rng, &b, 3, 2);
        prop_assert!(FreeComplex::new(&b, f.lo(), (f.lo()..=f.hi()).map(|i| f.rank(i)).collect(), (f.lo()..f.hi()).map(|i| f.diff(i)).collect()).is_ok());
    }

    #[test]
    fn rotation_identity(seed in 0u64..1000) {
        // cone(A → cone(id_A)) is contractible and cone(id) ⊕ B ≃ B
        let b = padic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_module_complex(&mut rng, &b, 2, 2, 2).unwrap();
        let k = cone_with_maps(&ChainMap::identity(&a)).unwrap();
        prop_assert!(is_contractible(&k.cone).unwrap());
        let (_, inj, proj) = Complex::direct_sum(&[a.clone(), k.cone.clone()]).unwrap();
        prop_assert!(homotopy_equivalence(&proj[0], &inj[0]).unwrap().is_some());
    }

    #[test]
    fn resolutions_are_quasi_isomorphisms(seed in 0u64..1000) {
        let b = padic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random_module_complex(&mut rng, &b, 3, 2, 3).unwrap();
        let r = resolve_cohpro(&n).unwrap();
        prop_assert!(r.is_quasi_isomorphism());
        prop_assert!(r.complex.span() <= n.span() + 2);
        prop_assert!(kernel_resolution(&n).unwrap().is_quasi_isomorphism());
    }
}
