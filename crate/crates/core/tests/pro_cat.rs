use procontra::coefficients::{Backend, Level};
use procontra::discrete_mod::{FPModule, Invariants, ModMorphism};
use procontra::pro_cat::*;
use procontra::Error;
use proptest::prelude::*;

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

fn times_levelwise(t: &Tower, c: i64) -> ProMorphism {
    let t1 = t.clone();
    ProMorphism::levelwise(t, t, move |n| {
        let m = t1.level(n);
        ModMorphism::scalar(&m, &m.ring().from_i64(c))
    })
}

/// `constant(ℤ) → (ℤ/pⁿ)ₙ` by reduction, over the discrete backend.
fn reduction_to_adic(p: u64) -> ProMorphism {
    let z = constant_tower(&FPModule::from_integers(&[0]));
    let adic = integer_adic_tower(p);
    let a1 = adic.clone();
    ProMorphism::levelwise(&z, &adic, move |n| {
        let tgt = a1.level(n);
        let src = FPModule::from_integers(&[0]);
        let map = procontra::coefficients::Matrix::from_fn(&tgt.ring(), tgt.gens(), 1, |_, _| tgt.ring().one());
        ModMorphism::unchecked(&src, &tgt, map).unwrap()
    })
}

#[test]
fn constant_towers() {
    let b = padic(3);
    let t = constant_tower(&cyc(&b, 1));
    assert!(t.is_declared_strict());
    for n in 0..4 {
        assert_eq!(exps(&t.level(n)), vec![1]);
        assert!(t.transition(n).is_isomorphism());
    }
    assert!(constant_tower(&FPModule::zero(&b)).is_zero_to(5));
    let (k, _) = kernel_pro(&ProMorphism::identity(&t));
    assert!(k.is_zero_to(5));
}

#[test]
fn strictify_examples() {
    let b = padic(2);
    // ℤ/4 with transitions ·2: images 2ℤ/4 then 0
    let t = scaled_tower(&cyc(&b, 2), &b.level_ring(Level::Finite(2)).from_i64(2));
    let s = strictify(&t, 4);
    assert_eq!(s.certificate, Certificate::Stabilized { lag: 2, depth: 4 });
    assert!(s.tower.is_zero_to(6));

    let r = ring_tower(&b, 1);
    let s = strictify(&r, 4);
    assert_eq!(s.certificate, Certificate::AlreadyStrict);
    assert!(s.tower.ptr_eq(&r));

    let z = scaled_tower(&FPModule::from_integers(&[0]), &procontra::coefficients::Ring::Integers.from_i64(2));
    for d in [1, 3, 5] {
        assert_eq!(strictify(&z, d).certificate, Certificate::Unstabilized { depth: d });
    }
}

#[test]
fn strictify_is_isomorphic_in_pro() {
    let b = padic(3);
    let lit: TowerLiteral = serde_json::from_value(serde_json::json!({
        "backend": {"kind": "padic", "prime": 3},
        "rule": "scaled",
        "module": {"backend": {"kind": "padic", "prime": 3}, "ann_level": 2, "gens": 2,
                    "rels": {"level": 2, "entries": [["0", "0"], ["3", "0"]]}},
        "scalar": "3"
    }))
    .unwrap();
    let t = lit.into_tower().unwrap();
    assert_eq!(*t.backend(), b);
    let s = strictify(&t, 4);
    assert!(s.certificate.is_certified());
    assert_eq!(s.tower.check_strict(6), Strictness::CertifiedStrict);
    let round = s.comparison.compose(&s.inclusion).unwrap();
    assert!(round.equals_to(&ProMorphism::identity(&s.tower), 4));
    let back = s.inclusion.compose(&s.comparison).unwrap();
    assert!(back.equals_to(&ProMorphism::identity(&t), 4));
}

#[test]
fn product_levels() {
    let b = padic(2);
    let r = ring_tower(&b, 1);
    let single = product_of(&b, vec![r.clone()]);
    for k in 0..5 {
        assert!(single.tower.level(k).is_isomorphic(&r.level(k)));
    }
    // level 3 collects (0, 3) and (1, 2): ℤ/2 from the constant factor and ℤ/4 from the ring tower
    let p = product_of(&b, vec![constant_tower(&cyc(&b, 1)), r]);
    assert_eq!(exps(&p.tower.level(3)), vec![1, 2]);
    assert!(p.tower.is_declared_strict());
    assert_eq!(p.tower.check_strict(5), Strictness::CertifiedStrict);
    assert!(product_of(&b, vec![]).tower.is_zero_to(3));
}

#[test]
fn finite_subproduct_factorization() {
    let b = padic(3);
    let c = constant_tower(&cyc(&b, 2));
    let p = product_of(&b, vec![c.clone(), c.clone(), c.clone()]);
    let f = p.projection(0);
    let fac = factor_through_finite_subproduct(&f, &p, 4).unwrap();
    assert_eq!(fac.m, 1);
    assert!(fac.verified);

    let g = p.projection(0).add(&p.projection(2)).unwrap();
    let fac = factor_through_finite_subproduct(&g, &p, 4).unwrap();
    assert_eq!(fac.m, 3);
    assert!(fac.verified);
    // the factor at index 2 is seen by g, so the first two factors do not suffice
    let (_, inj, _) = p.level_sum(g.reindex().apply(0));
    assert!(!g.level_map(0).compose(&inj[2]).unwrap().is_zero());

    let z = ProMorphism::zero(&p.tower, &c);
    let fac = factor_through_finite_subproduct(&z, &p, 4).unwrap();
    assert_eq!(fac.m, 0);
    assert!(fac.verified);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn product_universal_property(a in 0i64..9, c in 0i64..9, e in 1u32..3) {
        let b = padic(3);
        let r = ring_tower(&b, 1);
        let m = cyc(&b, e);
        let cm = constant_tower(&m);
        let p = product_of(&b, vec![r.clone(), cm.clone()]);
        let f0 = times_levelwise(&r, a);
        let (r1, m1) = (r.clone(), m.clone());
        let f1 = ProMorphism::from_fn(&r, &cm, Reindex::at_least(e as usize), move |n| {
            let src = r1.level(n.max(e as usize));
            let map = procontra::coefficients::Matrix::identity(&m1.ring(), 1).scale(&m1.ring().from_i64(c));
            ModMorphism::unchecked(&src, &m1, map).unwrap()
        });
        let h = p.induced(&r, &[f0.clone(), f1.clone()]).unwrap();
        prop_assert!(h.check_commuting(4));
        prop_assert!(p.projection(0).compose(&h).unwrap().equals_to(&f0, 4));
        prop_assert!(p.projection(1).compose(&h).unwrap().equals_to(&f1, 4));
    }
}

#[test]
fn kernels_and_cokernels() {
    let g = reduction_to_adic(3);
    let (k, incl) = kernel_pro(&g);
    for n in 0..5 {
        assert_eq!(*k.level(n).invariants(), Invariants::Integral { torsion: vec![], free_rank: 1 });
        // the inclusion exhibits Kₙ = 3ⁿℤ
        let (img, _, _) = incl.level_map(n).image();
        let (q, _) = incl.level_map(n).cokernel();
        assert!(!img.is_zero());
        assert_eq!(q.order().unwrap().to_i64(), Some(3i64.pow(n as u32)));
    }
    for n in 0..4 {
        let (q, _) = k.transition(n).cokernel();
        assert_eq!(q.order().unwrap().to_i64(), Some(3));
    }

    let b = padic(2);
    let c = constant_tower(&cyc(&b, 2));
    let (q, _) = cokernel_pro(&times_levelwise(&c, 2));
    assert!(q.is_declared_strict());
    for n in 0..4 {
        assert_eq!(exps(&q.level(n)), vec![1]);
        assert!(q.transition(n).is_isomorphism());
    }
}

#[test]
fn strict_kernels() {
    let s = kernel_strict(&reduction_to_adic(2), 4).unwrap();
    assert_eq!(s.certificate, Certificate::Contracting { depth: 4 });
    assert!(s.tower.is_zero_to(6));

    let b = padic(2);
    let r = ring_tower(&b, 1);
    let s = coreflect_strict(&r, 4);
    assert_eq!(s.certificate, Certificate::AlreadyStrict);

    // levelwise kernels of ·2 are 2^{n-1}ℤ/2ⁿ ≅ ℤ/2, but every transition between them vanishes
    let f = times_levelwise(&r, 2);
    let (k, _) = kernel_pro(&f);
    for n in 1..5 {
        assert_eq!(exps(&k.level(n)), vec![1]);
        assert!(k.transition(n).is_zero());
    }
    let s = kernel_strict(&f, 4).unwrap();
    assert!(matches!(s.certificate, Certificate::Stabilized { .. }));
    assert!(s.tower.is_zero_to(6));
}

#[test]
fn embedding_path_agrees() {
    let b = padic(3);
    let t = scaled_tower(&FPModule::from_exponents(&b, &[1, 3]).unwrap(), &b.level_ring(Level::Finite(3)).from_i64(3));
    let e = coreflect_via_embedding(&t, 4);
    assert!(e.agree(4));
    for n in 0..=4 {
        assert!(e.direct.tower.level(n).is_isomorphic(&e.inside.tower.level(n)));
    }
    let z = integer_adic_tower(2);
    let (k, _) = kernel_pro(&reduction_to_adic(2));
    let e = coreflect_via_embedding(&k, 3);
    assert!(e.agree(3));
    assert!(e.inside.tower.is_zero_to(3));
    assert!(z.is_declared_strict());
}

#[test]
fn admissible_sequences() {
    let b = padic(2);
    let r = ring_tower(&b, 1);
    let zero = zero_tower(&b);
    let id = ProMorphism::identity(&r);
    let to_zero = ProMorphism::zero(&r, &zero);
    assert!(is_admissible_ses(&id, &to_zero, 4).unwrap());
    let from_zero = ProMorphism::zero(&zero, &r);
    assert!(is_admissible_ses(&from_zero, &id, 4).unwrap());
    assert!(!is_admissible_ses(&from_zero, &times_levelwise(&r, 2), 4).unwrap());
    let nonstrict = scaled_tower(&cyc(&b, 2), &b.level_ring(Level::Finite(2)).from_i64(2));
    let bad = ProMorphism::identity(&nonstrict);
    let z2 = ProMorphism::zero(&nonstrict, &zero);
    assert!(matches!(is_admissible_ses(&bad, &z2, 2), Err(Error::NotStrict(_))));
}

#[test]
fn telescopes() {
    let b = padic(2);
    let m = FPModule::from_exponents(&b, &[1, 2]).unwrap();
    let t = telescope_ses(&constant_tower(&m)).unwrap();
    assert!(t.is_admissible(3).unwrap());
    let t = telescope_ses(&ring_tower(&b, 1)).unwrap();
    assert!(t.embedding.check_commuting(5));
    assert!(t.difference.check_commuting(5));
    assert!(t.is_admissible(5).unwrap());
    let t = telescope_ses(&zero_tower(&b)).unwrap();
    assert!(t.product.tower.is_zero_to(4));
    assert!(t.is_admissible(3).unwrap());
}

#[test]
fn limit_modules() {
    let b = padic(5);
    let zp = limit_module(&ring_tower(&b, 1), 4).unwrap();
    assert_eq!(exps(&zp.quotient(3)), vec![3]);
    assert!(zp.as_discrete(3).is_none());
    let m = cyc(&b, 2);
    let d = limit_module(&constant_tower(&m), 4).unwrap();
    assert!(d.as_discrete(4).unwrap().is_isomorphic(&m));
    let p = product_of(&b, vec![ring_tower(&b, 1), constant_tower(&m)]);
    let lp = limit_module(&p.tower, 4).unwrap();
    assert_eq!(exps(&lp.quotient(3)), vec![2, 3]);
    let nonstrict = scaled_tower(&m, &b.level_ring(Level::Finite(2)).from_i64(5));
    assert!(matches!(limit_module(&nonstrict, 3), Err(Error::NotStrict(_))));
}

#[test]
fn projective_covers() {
    let b = padic(3);
    let c = projective_cover_cohpro(&cyc(&b, 1));
    assert!(c.cover.ptr_eq(&c.cover));
    assert!(c.epi.level_map(4).is_surjective());
    assert!(is_admissible_ses(&c.kernel_inclusion, &c.epi, 3).unwrap());

    let n = FPModule::from_exponents(&b, &[1, 3]).unwrap();
    let c = projective_cover_cohpro(&n);
    assert_eq!(exps(&c.cover.level(4)), vec![4, 4]);
    assert_eq!(c.kernel.check_strict(6), Strictness::CertifiedStrict);
    for k in 3..6 {
        assert_eq!(exps(&c.kernel.level(k)), vec![k as u32 - 3, k as u32 - 1].into_iter().filter(|&e| e > 0).collect::<Vec<_>>());
    }
    assert!(is_admissible_ses(&c.kernel_inclusion, &c.epi, 3).unwrap());

    let c = projective_cover_cohpro(&FPModule::zero(&b));
    assert!(c.cover.is_zero_to(4));
}

#[test]
fn coreflection_property() {
    // X = ring tower × (ℤ/8 with ·2 transitions); its strict part is the ring tower
    let b = padic(2);
    let r = ring_tower(&b, 1);
    let junk = scaled_tower(&cyc(&b, 3), &b.level_ring(Level::Finite(3)).from_i64(2));
    let x = product_of(&b, vec![r.clone(), junk.clone()]);
    let s = coreflect_strict(&x.tower, 4);
    assert!(matches!(s.certificate, Certificate::Stabilized { .. }));
    for k in 0..5 {
        assert_eq!(exps(&s.tower.level(k)), exps(&r.level(k)));
    }
    for a in [1, 3, 2] {
        let phi = x
            .induced(&r, &[times_levelwise(&r, a), ProMorphism::zero(&r, &junk)])
            .unwrap();
        let psi = s.factor(&phi).expect("factors through the strict part");
        assert!(s.inclusion.compose(&psi).unwrap().equals_to(&phi, 4));
    }
}

#[test]
fn tower_literals() {
    let v = serde_json::json!({
        "backend": {"kind": "padic", "prime": 2},
        "rule": "product-of",
        "factors": [
            {"backend": {"kind": "padic", "prime": 2}, "rule": "ring-tower"},
            {"backend": {"kind": "padic", "prime": 2}, "rule": "constant",
             "module": {"backend": {"kind": "padic", "prime": 2}, "ann_level": 1, "gens": 1,
                        "rels": {"level": 1, "entries": [["0"]]}}}
        ]
    });
    let lit: TowerLiteral = serde_json::from_value(v).unwrap();
    let t = lit.into_tower().unwrap();
    assert_eq!(exps(&t.level(3)), vec![1, 3]);
    let again: TowerLiteral = serde_json::from_str(&serde_json::to_string(&lit).unwrap()).unwrap();
    assert_eq!(exps(&again.into_tower().unwrap().level(2)), vec![1, 2]);
}
