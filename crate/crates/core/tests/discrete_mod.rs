mod common;

use procontra::coefficients::{Backend, Level, Matrix, Ring, Scalar};
use procontra::discrete_mod::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn padic(p: u64) -> Backend {
    Backend::padic(p).unwrap()
}

fn exps(m: &FPModule) -> Vec<u32> {
    match m.invariants() {
        Invariants::Chain { exponents } => exponents.clone(),
        other => panic!("not a chain module: {other:?}"),
    }
}

fn cyc(b: &Backend, e: u32) -> FPModule {
    FPModule::from_exponents(b, &[e]).unwrap()
}

fn times(m: &FPModule, c: i64) -> ModMorphism {
    ModMorphism::scalar(m, &m.ring().from_i64(c))
}

/// Columns of a matrix as plain integers (p-adic levels only).
fn columns(m: &Matrix) -> Vec<Vec<u64>> {
    (0..m.cols())
        .map(|j| m.column(j).iter().map(|s| s.as_int().unwrap().to_i64().unwrap() as u64).collect())
        .collect()
}

fn rows(m: &Matrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|s| s.as_int().unwrap().to_i64().unwrap() as u64).collect())
        .collect()
}

#[test]
fn kernel_of_p_on_z_mod_p_squared() {
    let b = padic(2);
    let m = cyc(&b, 2);
    let (k, incl) = times(&m, 2).kernel();
    assert_eq!(exps(&k), vec![1]);
    assert!(times(&m, 2).compose(&incl).unwrap().is_zero());
    let brute = common::kernel_exponents(2, 2, 1, &[vec![0]], 1, &[vec![0]], &[vec![2]]);
    assert_eq!(brute, vec![1]);
}

#[test]
fn kernel_of_identity_and_zero() {
    let b = padic(3);
    let m = FPModule::from_exponents(&b, &[1, 2]).unwrap();
    assert!(ModMorphism::identity(&m).kernel().0.is_zero());
    let n = cyc(&b, 3);
    let (k, _) = ModMorphism::zero(&m, &n).kernel();
    assert!(k.is_isomorphic(&m));
}

#[test]
fn cokernel_and_image_examples() {
    let b = padic(2);
    let m = cyc(&b, 2);
    assert_eq!(exps(&times(&m, 2).cokernel().0), vec![1]);
    assert!(ModMorphism::identity(&m).cokernel().0.is_zero());
    let m3 = cyc(&b, 3);
    let (im, epi, incl) = times(&m3, 2).image();
    assert_eq!(exps(&im), vec![2]);
    assert!(incl.compose(&epi).unwrap().equals(&times(&m3, 2)));
    assert!(epi.is_surjective() && incl.is_injective());
}

#[test]
fn tensor_and_hom_examples() {
    let b = padic(2);
    let t = tensor(&cyc(&b, 1), &cyc(&b, 2)).unwrap();
    assert_eq!(exps(&t), vec![1]);
    let m = FPModule::from_exponents(&b, &[1, 3]).unwrap();
    assert!(tensor(&m, &FPModule::free(&b, 3, 1)).unwrap().is_isomorphic(&m));
    let h = hom_module(&cyc(&b, 1), &cyc(&b, 2)).unwrap();
    assert_eq!(exps(&h.module), vec![1]);
    assert_eq!(common::hom_count(2, 2, 1, &[vec![2]], 1, &[vec![0]]), 2);
}

#[test]
fn free_cover_examples() {
    let b = padic(3);
    let (m, epi) = free_cover(&cyc(&b, 1));
    assert_eq!(m, 1);
    assert!(epi.is_isomorphism());
    let n = FPModule::from_exponents(&b, &[1, 3]).unwrap();
    let (m, epi) = free_cover(&n);
    assert_eq!(m, 3);
    assert_eq!(epi.src().gens(), 2);
    assert!(epi.cokernel().0.is_zero());
    let z2 = FPModule::from_integers(&[0, 0]);
    let (_, epi) = free_cover(&z2);
    assert!(epi.is_isomorphism());
    assert_eq!(epi.src().level(), Level::Infinite);
}

#[test]
fn exactness_examples() {
    let b = padic(2);
    let (a, m, c) = (cyc(&b, 1), cyc(&b, 2), cyc(&b, 1));
    let f = ModMorphism::new(&a, &m, Matrix::from_i64(&m.ring(), &[vec![2]])).unwrap();
    let g = ModMorphism::new(&m, &c, Matrix::from_i64(&c.ring(), &[vec![1]])).unwrap();
    assert!(is_short_exact(&f, &g));
    let id = ModMorphism::identity(&m);
    let z = FPModule::zero(&b);
    assert!(is_exact(&id, &ModMorphism::zero(&m, &z)));
    let n = FPModule::from_exponents(&b, &[3]).unwrap();
    let (s, inj, proj) = direct_sum(&[m.clone(), n.clone()]).unwrap();
    assert_eq!(s.gens(), 2);
    assert!(is_short_exact(&inj[0], &proj[1]));
}

#[test]
fn power_series_modules() {
    let b = Backend::power_series(2).unwrap();
    let m = cyc(&b, 3);
    let x = ModMorphism::scalar(&m, &Scalar::Poly(vec![0, 1, 1]));
    assert_eq!(exps(&x.kernel().0), vec![1]);
    assert_eq!(exps(&x.cokernel().0), vec![1]);
}

#[test]
fn integer_modules() {
    let m = FPModule::from_integers(&[6, 0]);
    match m.invariants() {
        Invariants::Integral { torsion, free_rank } => {
            assert_eq!(torsion, &vec![Ring::Integers.from_i64(6)]);
            assert_eq!(*free_rank, 1);
        }
        _ => panic!(),
    }
    let z = FPModule::from_integers(&[0]);
    let (k, _) = ModMorphism::scalar(&z, &Ring::Integers.from_i64(2)).cokernel();
    assert!(k.is_isomorphic(&FPModule::from_integers(&[2])));
}

#[test]
fn module_json_round_trip() {
    let b = padic(3);
    let m = FPModule::from_exponents(&b, &[1, 2]).unwrap();
    let json = serde_json::to_string(&m).unwrap();
    let lit: ModuleLiteral = serde_json::from_str(&json).unwrap();
    assert_eq!(lit.into_module().unwrap(), m);
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn invariants_match_enumeration(seed in any::<u64>()) {
        let b = padic(2);
        let m = random_module(&mut rng(seed), &b, 3, 3);
        prop_assume!(m.gens() > 0);
        let n = m.level().finite().unwrap();
        let brute = common::module_exponents(2, n, m.gens(), &columns(m.rels()));
        prop_assert_eq!(exps(&m), brute);
    }

    #[test]
    fn kernel_matches_enumeration_and_universal_property(seed in any::<u64>()) {
        let b = padic(2);
        let mut r = rng(seed);
        let n = 3;
        let m = FPModule::free(&b, n, 2);
        let src = submodule_free_quotient(&mut r, &b, n);
        let tgt = submodule_free_quotient(&mut r, &b, n);
        let f = random_morphism(&mut r, &src, &tgt).unwrap();
        let (k, incl) = f.kernel();
        let brute = common::kernel_exponents(2, n, src.gens(), &columns(src.rels()), tgt.gens(), &columns(tgt.rels()), &rows(f.map()));
        prop_assert_eq!(exps(&k), brute);
        prop_assert!(f.compose(&incl).unwrap().is_zero());
        // a map killed by f factors through the kernel
        let (_, k_incl) = f.kernel();
        let g = random_morphism(&mut r, &m, &k).unwrap();
        let h = k_incl.compose(&g).unwrap();
        prop_assert!(f.compose(&h).unwrap().is_zero());
        let lifted = incl.lift(&h).expect("factors");
        prop_assert!(incl.compose(&lifted).unwrap().equals(&h));
    }

    #[test]
    fn tensor_is_right_exact(seed in any::<u64>()) {
        let b = padic(3);
        let mut r = rng(seed);
        let bb = random_diagonal_module(&mut r, &b, 2, 2).unwrap();
        prop_assume!(bb.gens() > 0);
        let n = random_diagonal_module(&mut r, &b, 2, 2).unwrap();
        let a = random_diagonal_module(&mut r, &b, 2, 2).unwrap();
        let f = random_morphism(&mut r, &a, &bb).unwrap();
        let (c, g) = f.cokernel();
        let ta = tensor(&a, &n).unwrap();
        let tb = tensor(&bb, &n).unwrap();
        let tc = tensor(&c, &n).unwrap();
        let idn = ModMorphism::identity(&n);
        let tf = tensor_map(&f, &idn, &ta, &tb).unwrap();
        let tg = tensor_map(&g, &idn, &tb, &tc).unwrap();
        prop_assert!(tf.is_well_defined() && tg.is_well_defined());
        prop_assert!(is_exact(&tf, &tg));
        prop_assert!(tg.is_surjective());
    }

    #[test]
    fn invariants_stable_under_isomorphism(seed in any::<u64>()) {
        let b = padic(2);
        let mut r = rng(seed);
        let m = random_module(&mut r, &b, 3, 3);
        prop_assume!(m.gens() > 0);
        let (small, to, from) = minimize(&m);
        prop_assert!(small.is_isomorphic(&m));
        prop_assert!(from.compose(&to).unwrap().equals(&ModMorphism::identity(&m)));
        prop_assert!(to.compose(&from).unwrap().equals(&ModMorphism::identity(&small)));
        let f = random_morphism(&mut r, &m, &m).unwrap();
        let (c, _) = f.cokernel();
        let (i, _, _) = f.image();
        prop_assert_eq!(c.order().unwrap().mul(&i.order().unwrap()), m.order().unwrap());
    }
}

fn submodule_free_quotient(r: &mut ChaCha8Rng, b: &Backend, n: u32) -> FPModule {
    use rand::Rng;
    let g = r.gen_range(1..=2);
    let ring = b.level_ring(Level::Finite(n));
    let nr = r.gen_range(0..=g);
    let rels = random_matrix(r, &ring, g, nr);
    FPModule::new(*b, Level::Finite(n), g, rels).unwrap()
}
