use std::sync::Arc;

use crate::coefficients::{Level, Matrix, Scalar};
use crate::discrete_mod::{minimize, FPModule, ModMorphism};
use crate::pro_cat::{ring_tower, LazySeq, ProMorphism, Reindex, Strictness, Tower};

/// An isomorphism in `Pro_ω` between a tower and `(Rₙ^rank)ₙ`, checked to `depth`.
#[derive(Clone, Debug)]
pub struct Recognition {
    pub rank: usize,
    pub power: Tower,
    /// `φ: ring^rank → T`, sending basis vectors to lifted generators.
    pub from_power: ProMorphism,
    /// `ψ: T → ring^rank`, inverse to `φ`.
    pub to_power: ProMorphism,
    pub depth: usize,
}

fn ann(m: &FPModule) -> usize {
    match m.exact_level() {
        Level::Finite(e) => e as usize,
        Level::Infinite => 0,
    }
}

/// Generators at level `n` as coordinate columns, pushed down from level
/// `top` and lifted along the transitions above it.
fn generators(t: &Tower, top: usize, memo: &LazySeq<Option<Matrix>>, n: usize) -> Option<Matrix> {
    memo.get(n, || {
        if n <= top {
            let (small, _, from) = minimize(&t.level(top));
            let g = t.composite(top, n).compose(&from).ok()?;
            debug_assert_eq!(small.gens(), g.src().gens());
            return Some(g.map().clone());
        }
        let below = generators(t, top, memo, n - 1)?;
        let (src, tgt) = (t.level(n), t.level(n - 1));
        let free = FPModule::free(src.backend(), src.level().finite().unwrap_or(0), below.cols());
        let free = if src.backend().is_discrete() { FPModule::free(src.backend(), 0, below.cols()) } else { free };
        let h = ModMorphism::unchecked(&free, &tgt, below).ok()?;
        let up = t.transition(n - 1).lift(&h)?;
        Some(up.map().clone())
    })
}

/// Recognizes a strict tower as a finite power of the ring tower. The rank
/// is the number of cyclic summands at level `depth`; `None` when the
/// comparison maps fail to be mutually inverse to `depth`.
pub fn recognize_prod_omega(t: &Tower, depth: usize) -> Option<Recognition> {
    if !(t.is_declared_strict() || t.check_strict(depth) == Strictness::CertifiedStrict) {
        return None;
    }
    let backend = *t.backend();
    let top = depth.max(1);
    let rank = minimize(&t.level(top)).0.gens();
    let power = ring_tower(&backend, rank);
    let memo: Arc<LazySeq<Option<Matrix>>> = LazySeq::new();
    for n in 0..=top {
        generators(t, top, &memo, n)?;
    }

    // φ reads level q(n) = max(n, ann Tₙ) of the power
    let discrete = backend.is_discrete();
    let mut q: Vec<usize> = Vec::new();
    for n in 0..=top {
        let need = if discrete { n } else { n.max(ann(&t.level(n))) };
        q.push(need.max(q.last().copied().unwrap_or(0)));
    }
    let q_off = q[top] as i64 - top as i64;
    let q_idx = Reindex::new(q.clone(), 1, q_off)?;
    let (t1, p1, m1) = (t.clone(), power.clone(), memo.clone());
    let qi = q_idx.clone();
    let from_power = ProMorphism::from_fn(&power, t, q_idx, move |n| {
        let (src, tgt) = (p1.level(qi.apply(n)), t1.level(n));
        let g = generators(&t1, top, &m1, n).unwrap_or_else(|| Matrix::zeros(&tgt.ring(), tgt.gens(), rank));
        phi_level(&src, &tgt, &g)
    });

    // ψ at level n reads Tₘ for the least m ≥ n where the reduction descends through φₘ
    let psi_at = |n: usize, m: usize| -> Option<ModMorphism> {
        let phi = from_power.level_map(m);
        let tgt = power.level(n);
        let red = power.composite(q_idx_apply(&from_power, m), n);
        phi.descend(&red.with_ends(phi.src(), &tgt))
    };
    let mut s: Vec<usize> = Vec::new();
    for n in 0..=top {
        let start = n.max(s.last().copied().unwrap_or(0));
        let m = (start..=start + top + 1).find(|&m| psi_at(n, m).is_some())?;
        s.push(m);
    }
    let s_off = s[top] as i64 - top as i64;
    let s_idx = Reindex::new(s.clone(), 1, s_off)?;
    let (phi2, p2, si) = (from_power.clone(), power.clone(), s_idx.clone());
    let to_power = ProMorphism::from_fn(t, &power, s_idx, move |n| {
        let m = si.apply(n);
        let phi = phi2.level_map(m);
        let tgt = p2.level(n);
        let red = p2.composite(phi2.reindex().apply(m), n);
        phi.descend(&red.with_ends(phi.src(), &tgt)).unwrap_or_else(|| ModMorphism::zero(phi.tgt(), &tgt))
    });

    let round_power = to_power.compose(&from_power).ok()?;
    let round_tower = from_power.compose(&to_power).ok()?;
    let ok = round_power.equals_to(&ProMorphism::identity(&power), depth)
        && round_tower.equals_to(&ProMorphism::identity(t), depth)
        && from_power.check_commuting(depth)
        && to_power.check_commuting(depth);
    ok.then_some(Recognition { rank, power, from_power, to_power, depth })
}

fn q_idx_apply(f: &ProMorphism, n: usize) -> usize {
    f.reindex().apply(n)
}

fn phi_level(src: &FPModule, tgt: &FPModule, g: &Matrix) -> ModMorphism {
    if src.gens() == 0 || tgt.gens() == 0 {
        return ModMorphism::zero(src, tgt);
    }
    let ring = tgt.ring();
    let m = Matrix::from_fn(&ring, tgt.gens(), src.gens(), |i, j| {
        let v: &Scalar = g.get(i, j);
        ring.coerce(v, g.ring())
    });
    ModMorphism::unchecked(src, tgt, m).expect("generator matrix")
}
