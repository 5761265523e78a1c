mod common;

use std::collections::{HashMap, HashSet};

use procontra::coefficients::{Backend, Matrix};
use procontra::contra::*;
use procontra::discrete_mod::*;
use procontra::pro_cat::ring_tower;
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

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn to_u64(m: &Matrix) -> Vec<Vec<u64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|s| s.as_int().unwrap().to_i64().unwrap() as u64).collect())
        .collect()
}

#[test]
fn free_contramodules() {
    let b = padic(2);
    assert!(free_contra(&b, 0).is_zero_to(5));
    let one = free_contra(&b, 1);
    for n in 0..5 {
        assert!(one.red_level(n).is_isomorphic(&ring_tower(&b, 1).level(n)));
    }
    assert_eq!(exps(&free_contra(&b, 2).red_level(2)), vec![2, 2]);
    assert_eq!(free_contra(&b, 2).free_rank(), Some(2));
}

#[test]
fn contratensor_examples() {
    let b = padic(3);
    for n in 1..4 {
        let v = contratensor(&cyc(&b, n), &free_contra(&b, 1)).unwrap();
        assert_eq!(exps(&v), vec![n]);
    }
    assert!(contratensor(&FPModule::zero(&b), &free_contra(&b, 2)).unwrap().is_zero());
    let torsion = FPModule::from_integers(&[9]);
    assert!(contratensor_value(&torsion, &Coefficient::Rationals).unwrap().is_zero());
    let mixed = FPModule::from_integers(&[0, 4, 0]);
    assert_eq!(rational_rank(&mixed).unwrap(), 2);
    // N ⊙ ℜ[[X]] = N^X
    let n = FPModule::from_exponents(&b, &[1, 2]).unwrap();
    assert_eq!(exps(&contratensor(&n, &free_contra(&b, 2)).unwrap()), vec![1, 1, 2, 2]);
}

#[test]
fn contratensor_rejects_mismatches() {
    let b = padic(2);
    let other = padic(3);
    assert!(contratensor(&cyc(&b, 1), &free_contra(&other, 1)).is_err());
    assert!(contratensor(&cyc(&b, 3), &free_contra(&b, 1)).is_ok());
    assert!(contratensor_at(&cyc(&b, 3), &free_contra(&b, 1), 2).is_err());
}

#[test]
fn nonseparated_towers_are_refused() {
    let b = padic(2);
    let bad = procontra::pro_cat::scaled_tower(&cyc(&b, 1), &b.level_ring(procontra::coefficients::Level::Finite(1)).from_i64(0));
    let err = ContraTower::from_tower(&bad, 3).unwrap_err();
    assert!(err.to_string().contains("not killed") || err.to_string().contains("nonseparated"));
}

#[test]
fn flatness_battery() {
    for p in [2, 3] {
        let b = padic(p);
        let ring = is_flat_to_depth(&Coefficient::Contra(free_contra(&b, 1)), 3).unwrap();
        assert!(ring.pass);
        assert!(ring.witness.is_none());
        let z_p = ContraTower::of_module(&cyc(&b, 1));
        let cert = is_flat_to_depth(&Coefficient::Contra(z_p.clone()), 3).unwrap();
        assert!(!cert.pass);
        let w = cert.witness.unwrap();
        // 0 → ℤ/p → ℤ/p² → ℤ/p → 0
        assert_eq!((w.level, w.divisors.clone()), (2, vec![1]));
        assert_eq!(w.kernel, cyc(&b, 1).describe());
        assert_eq!(w.middle, cyc(&b, 2).describe());
        assert_eq!(w.quotient, cyc(&b, 1).describe());
    }
    let q = is_flat_to_depth(&Coefficient::Rationals, 3).unwrap();
    assert!(q.pass);
    let z2 = ContraTower::of_module(&FPModule::from_integers(&[2]));
    assert!(!is_flat_to_depth(&Coefficient::Contra(z2), 2).unwrap().pass);
    let ps = Backend::power_series(2).unwrap();
    assert!(is_flat_to_depth(&Coefficient::Contra(free_contra(&ps, 2)), 3).unwrap().pass);
}

/// The witness map `ℤ/2 ⊙ Q → ℤ/4 ⊙ Q` for `Q = ℤ/2` is zero: checked on
/// every element of `ℤ/2 ⊗ ℤ/2`.
#[test]
fn flatness_witness_by_enumeration() {
    let b = padic(2);
    let q = ContraTower::of_module(&cyc(&b, 1));
    let cover = ModMorphism::unchecked(&FPModule::free(&b, 2, 1), &cyc(&b, 1), Matrix::identity(&cyc(&b, 1).ring(), 1)).unwrap();
    let (_, incl) = cover.kernel();
    let f = contratensor_map(&incl, &q).unwrap();
    let src = f.src();
    assert_eq!(src.order().unwrap().to_i64(), Some(2));
    let qn = 4;
    let img_rels: Vec<Vec<u64>> = (0..f.tgt().rels().cols()).map(|j| to_u64(f.tgt().rels()).iter().map(|r| r[j]).collect()).collect();
    let zero = common::span(qn, f.tgt().gens(), &img_rels);
    for v in common::all_vectors(qn, src.gens()) {
        let w = common::apply(qn, &to_u64(f.map()), &v);
        assert!(zero.contains(&w));
    }
}

#[test]
fn nakayama_examples() {
    let b = padic(2);
    let (n, w) = nakayama_witness(&free_contra(&b, 1), 4).unwrap().unwrap();
    assert_eq!(exps(&n), vec![1]);
    assert_eq!(w.level, 1);
    assert!(nakayama_witness(&ContraTower::zero(&b), 6).unwrap().is_none());
    let (_, w2) = nakayama_witness(&free_contra(&b, 2), 4).unwrap().unwrap();
    assert_eq!(w2.value, GroupReport::Divisors { exponents: vec![1, 1], free_rank: 0 });
}

#[test]
fn contra_literals() {
    let lit: ContraLiteral = serde_json::from_str(r#"{"contra": "free", "backend": {"kind": "padic", "prime": 2}, "rank": 2}"#).unwrap();
    let c = lit.into_coefficient(3).unwrap();
    assert!(matches!(c, Coefficient::Contra(ref q) if q.free_rank() == Some(2)));
    let r: ContraLiteral = serde_json::from_str(r#"{"contra": "rationals"}"#).unwrap();
    assert!(matches!(r.into_coefficient(3).unwrap(), Coefficient::Rationals));
}

/// Levelwise morphisms `(Rₙ^k)ₙ → (Qₙ)ₙ` found by enumerating every matrix,
/// counted against compatible `k`-tuples of elements of the reductions.
#[test]
fn hom_evaluation_identity() {
    let b = padic(2);
    let cases: Vec<(FPModule, usize, usize)> = vec![
        (cyc(&b, 1), 1, 4),
        (FPModule::from_exponents(&b, &[1, 2]).unwrap(), 1, 4),
        (cyc(&b, 2), 2, 3),
        (FPModule::from_exponents(&b, &[1, 1]).unwrap(), 2, 3),
    ];
    for (m, k, depth) in cases {
        let q = ContraTower::of_module(&m);
        let free = ring_tower(&b, k);
        // library side: distinct well-defined commuting matrices
        let mut per_level: Vec<Vec<ModMorphism>> = Vec::new();
        for n in 1..=depth {
            let (src, tgt) = (free.level(n), q.red_level(n));
            let qn = 1u64 << n;
            let ring = tgt.ring();
            let mut found: Vec<ModMorphism> = Vec::new();
            for flat in common::all_vectors(qn, tgt.gens() * k) {
                let mat = Matrix::from_fn(&ring, tgt.gens(), k, |i, j| ring.from_i64(flat[i * k + j] as i64));
                let f = ModMorphism::unchecked(&src, &tgt, mat).unwrap();
                if f.is_well_defined() && !found.iter().any(|g| g.equals(&f)) {
                    found.push(f);
                }
            }
            per_level.push(found);
        }
        let mut counts: Vec<u64> = vec![1; per_level[0].len()];
        for n in 1..depth {
            let (lower, upper) = (&per_level[n - 1], &per_level[n]);
            let mut next = vec![0u64; upper.len()];
            for (u, fu) in upper.iter().enumerate() {
                let down = q.red_transition(n).compose(fu).unwrap();
                for (l, fl) in lower.iter().enumerate() {
                    let across = fl.compose(&free.transition(n)).unwrap();
                    if down.equals(&across.with_ends(down.src(), down.tgt())) {
                        next[u] += counts[l];
                    }
                }
            }
            counts = next;
        }
        let library: u64 = counts.iter().sum();

        // oracle side: k-tuples of cosets, compatible under reduction of coordinates
        let mut tuples: Vec<HashMap<Vec<Vec<u64>>, u64>> = Vec::new();
        for n in 1..=depth {
            let qn = 1u64 << n;
            let tgt = q.red_level(n);
            let g = tgt.gens();
            let rel_cols: Vec<Vec<u64>> =
                (0..tgt.rels().cols()).map(|j| to_u64(tgt.rels()).iter().map(|r| r[j]).collect()).collect();
            let sub = common::span(qn, g, &rel_cols);
            let canon = |v: &[u64]| -> Vec<u64> {
                sub.iter().map(|s| v.iter().zip(s).map(|(a, b)| (a + b) % qn).collect::<Vec<u64>>()).min().unwrap()
            };
            let elems: HashSet<Vec<u64>> = common::all_vectors(qn, g).iter().map(|v| canon(v)).collect();
            let mut level: HashMap<Vec<Vec<u64>>, u64> = HashMap::new();
            let mut all: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
            for _ in 0..k {
                all = all.into_iter().flat_map(|t| elems.iter().map(move |e| [t.clone(), vec![e.clone()]].concat())).collect();
            }
            for t in all {
                let weight = if n == 1 {
                    1
                } else {
                    let prev = &tuples[n - 2];
                    let half = qn / 2;
                    let lower_tgt = q.red_level(n - 1);
                    let lower_cols: Vec<Vec<u64>> = (0..lower_tgt.rels().cols())
                        .map(|j| to_u64(lower_tgt.rels()).iter().map(|r| r[j]).collect())
                        .collect();
                    let lower_sub = common::span(half, lower_tgt.gens(), &lower_cols);
                    let reduced: Vec<Vec<u64>> = t
                        .iter()
                        .map(|e| {
                            let r: Vec<u64> = e.iter().map(|a| a % half).collect();
                            lower_sub.iter().map(|s| r.iter().zip(s).map(|(a, b)| (a + b) % half).collect::<Vec<u64>>()).min().unwrap()
                        })
                        .collect();
                    prev.get(&reduced).copied().unwrap_or(0)
                };
                if weight > 0 {
                    level.insert(t, weight);
                }
            }
            tuples.push(level);
        }
        let oracle: u64 = tuples[depth - 1].values().sum();
        assert_eq!(library, oracle, "module {} rank {k}", m.describe());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contratensor_is_right_exact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = padic(2);
        let q = ContraTower::of_module(&random_diagonal_module(&mut r, &b, 2, 3).unwrap());
        let bb = random_diagonal_module(&mut r, &b, 2, 3).unwrap();
        prop_assume!(bb.gens() > 0);
        let a = random_diagonal_module(&mut r, &b, 2, 3).unwrap();
        let f = random_morphism(&mut r, &a, &bb).unwrap();
        let (_, g) = f.cokernel();
        let c = 3;
        let tf = contratensor_map_at(&f, &q, c).unwrap();
        let tg = contratensor_map_at(&g, &q, c).unwrap();
        prop_assert!(is_exact(&tf, &tg));
        prop_assert!(tg.is_surjective());
    }

    #[test]
    fn reduction_identity(seed in any::<u64>(), n in 1u32..5) {
        let mut r = rng(seed);
        for b in [padic(2), padic(3), Backend::power_series(2).unwrap()] {
            let m = random_diagonal_module(&mut r, &b, 3, 4).unwrap();
            let q = ContraTower::of_module(&m);
            let v = contratensor(&FPModule::free(&b, n, 1), &q).unwrap();
            prop_assert_eq!(exps(&v), exps(&q.red_level(n as usize)));
        }
    }

    #[test]
    fn flat_certificates_are_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = padic(2);
        let m = random_diagonal_module(&mut r, &b, 2, 3).unwrap();
        let q = Coefficient::Contra(ContraTower::of_module(&m));
        let deep = is_flat_to_depth(&q, 3).unwrap();
        let shallow = is_flat_to_depth(&q, 2).unwrap();
        prop_assert!(!deep.pass || shallow.pass);
        // a nonzero torsion contramodule is caught once the battery passes its exponent
        if let Some(&e) = exps(&m).last() {
            prop_assert!(!is_flat_to_depth(&q, e as usize + 1).unwrap().pass);
        }
    }
}
