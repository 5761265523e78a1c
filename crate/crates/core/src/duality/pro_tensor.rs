use std::sync::Arc;

use serde::Serialize;

use super::ProjContra;
use crate::contra::{contratensor_at, rational_map_rank, rational_rank, Coefficient, ContraTower, GroupReport, GroupValue};
use crate::discrete_mod::{hom_module, tensor_map, FPModule, ModMorphism};
use crate::error::{Error, Result};
use crate::pro_cat::{ring_tower, ProMorphism, Strictness, Tower};

/// Levels of `rN ⊙^pro C`: modules, or ranks of `ℚ`-vector spaces.
#[derive(Clone, Debug)]
pub enum ProLevels {
    Modules(Tower),
    Rational { ranks: Vec<usize>, transition_ranks: Vec<usize>, stable_ranks: Vec<usize> },
}

/// The limit of the level tower, when it can be named.
#[derive(Clone, Debug)]
pub enum LimitValue {
    /// Strict tower whose last two transitions before the depth are
    /// isomorphisms: the limit is read as the last level.
    Finite(FPModule),
    /// A strict tower that does not settle; the limit is the complete module it presents.
    Tower(Tower),
    Rational { rank: usize },
    Unstable,
}

impl LimitValue {
    pub fn is_zero(&self) -> bool {
        match self {
            LimitValue::Finite(m) => m.is_zero(),
            LimitValue::Rational { rank } => *rank == 0,
            LimitValue::Tower(_) | LimitValue::Unstable => false,
        }
    }

    pub fn to_report(&self, depth: usize) -> LimitReport {
        match self {
            LimitValue::Finite(m) => LimitReport::Finite { value: GroupValue::Module(m.clone()).to_report() },
            LimitValue::Tower(t) => LimitReport::Tower {
                levels: (0..=depth).map(|n| GroupValue::Module(t.level(n)).to_report()).collect(),
            },
            LimitValue::Rational { rank } => LimitReport::Finite { value: GroupReport::Rational { rank: *rank } },
            LimitValue::Unstable => LimitReport::Unstable,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LimitReport {
    Finite { value: GroupReport },
    Tower { levels: Vec<GroupReport> },
    Unstable,
}

#[derive(Clone)]
pub struct ProContratensor {
    pub levels: ProLevels,
    pub limit: LimitValue,
    pub depth: usize,
    work: Option<Arc<dyn Fn(usize) -> usize + Send + Sync>>,
}

impl std::fmt::Debug for ProContratensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProContratensor").field("levels", &self.levels).field("limit", &self.limit).field("depth", &self.depth).finish()
    }
}

impl ProContratensor {
    pub fn tower(&self) -> Option<&Tower> {
        match &self.levels {
            ProLevels::Modules(t) => Some(t),
            ProLevels::Rational { .. } => None,
        }
    }

    /// The ideal index `c` with level `n` computed as `rNₙ ⊗ Q/I_c`.
    pub fn work_level(&self, n: usize) -> Option<usize> {
        self.work.as_ref().map(|w| w(n))
    }

    pub fn level_reports(&self) -> Vec<GroupReport> {
        match &self.levels {
            ProLevels::Modules(t) => (0..=self.depth).map(|n| GroupValue::Module(t.level(n)).to_report()).collect(),
            ProLevels::Rational { ranks, .. } => ranks.iter().map(|&rank| GroupReport::Rational { rank }).collect(),
        }
    }
}

fn require_strict(t: &Tower, depth: usize) -> Result<()> {
    if t.is_declared_strict() || t.check_strict(depth) == Strictness::CertifiedStrict {
        Ok(())
    } else {
        Err(Error::NotStrict(format!("pro-contratensor of {}", t.name())))
    }
}

/// Running maximum of the levels at which `rN` is presented.
fn work_levels(rn: &Tower) -> Arc<dyn Fn(usize) -> usize + Send + Sync> {
    let t = rn.clone();
    Arc::new(move |n| {
        if t.backend().is_discrete() {
            return 0;
        }
        (0..=n).map(|j| t.level(j).level().finite().unwrap_or(0) as usize).max().unwrap_or(0)
    })
}

/// `rN ⊙^pro C = lim (rNₙ ⊙ C)`. Level `n` is `rNₙ ⊗ Q/I_c` with `c` the
/// running maximum of the presentation levels, so that the transitions
/// tensor with reductions of `Q`.
pub fn pro_contratensor(rn: &Tower, c: &Coefficient, depth: usize) -> Result<ProContratensor> {
    require_strict(rn, depth)?;
    match c {
        Coefficient::Contra(q) => contra_levels(rn, q, depth),
        Coefficient::Rationals => rational_levels(rn, depth),
    }
}

fn contra_levels(rn: &Tower, q: &ContraTower, depth: usize) -> Result<ProContratensor> {
    rn.level(0).same_backend(&q.red_level(0))?;
    let work = work_levels(rn);
    let (t1, q1, w1) = (rn.clone(), q.clone(), work.clone());
    let (t2, q2, w2) = (rn.clone(), q.clone(), work.clone());
    let tower = Tower::from_fn(
        rn.backend(),
        format!("{} (.) {}", rn.name(), q.tower().name()),
        Strictness::CertifiedStrict,
        move |_, n| contratensor_at(&t1.level(n), &q1, w1(n)).expect("ideal kills the level"),
        move |t, n| {
            let (c1, c0) = (w2(n + 1), w2(n));
            let qmap = q2.tower().composite(c1, c0);
            tensor_map(&t2.transition(n), &qmap, &t.level(n + 1), &t.level(n)).expect("tensor of transitions")
        },
    );
    for n in 0..=depth {
        tower.level(n);
    }
    let limit = if (0..=depth).all(|n| tower.level(n).is_zero()) {
        LimitValue::Finite(FPModule::zero(rn.backend()))
    } else if depth > 0 && (depth.saturating_sub(2)..depth).all(|n| tower.transition(n).is_isomorphism()) {
        LimitValue::Finite(tower.level(depth))
    } else {
        LimitValue::Tower(tower.clone())
    };
    Ok(ProContratensor { levels: ProLevels::Modules(tower), limit, depth, work: Some(work) })
}

/// Dimension of the stable image `⋂ im(rN_m → rN_n) ⊗ ℚ`, read at `m ≤ top`.
fn stable_rank(rn: &Tower, n: usize, top: usize) -> Result<usize> {
    let mut best = rational_rank(&rn.level(n))?;
    for m in n + 1..=top {
        best = best.min(rational_map_rank(&rn.composite(m, n))?);
    }
    Ok(best)
}

fn rational_levels(rn: &Tower, depth: usize) -> Result<ProContratensor> {
    let top = 2 * depth.max(1);
    let ranks = (0..=depth).map(|n| rational_rank(&rn.level(n))).collect::<Result<Vec<_>>>()?;
    let transition_ranks = (0..depth).map(|n| rational_map_rank(&rn.transition(n))).collect::<Result<Vec<_>>>()?;
    let stable_ranks = (0..=depth).map(|n| stable_rank(rn, n, top)).collect::<Result<Vec<_>>>()?;
    // stable images form a surjective system of finite-dimensional spaces
    let settled = depth == 0 || stable_ranks[depth - 1] == stable_ranks[depth];
    let limit = if settled { LimitValue::Rational { rank: stable_ranks[depth] } } else { LimitValue::Unstable };
    Ok(ProContratensor { levels: ProLevels::Rational { ranks, transition_ranks, stable_ranks }, limit, depth, work: None })
}

/// `f ⊙^pro Q` between two pro-contratensor towers, where the source level
/// read by each component is presented at an ideal at least as deep as the
/// target's.
pub fn pro_contratensor_map(
    f: &ProMorphism,
    q: &ContraTower,
    src: &ProContratensor,
    tgt: &ProContratensor,
    depth: usize,
) -> Result<ProMorphism> {
    let (Some(a), Some(b)) = (src.tower(), tgt.tower()) else {
        return Err(Error::InvalidInput("rational levels carry no module maps; use rational_limit_map".into()));
    };
    let (ws, wt) = (src.work.clone().expect("module levels"), tgt.work.clone().expect("module levels"));
    for n in 0..=depth {
        if ws(f.reindex().apply(n)) < wt(n) {
            return Err(Error::LevelError(format!("source level {} is presented above the target at {n}", f.reindex().apply(n))));
        }
    }
    let (f1, q1, a1, b1) = (f.clone(), q.clone(), a.clone(), b.clone());
    let r = f.reindex().clone();
    Ok(ProMorphism::from_fn(a, b, r.clone(), move |n| {
        let m = r.apply(n);
        let qmap = q1.tower().composite(ws(m).max(wt(n)), wt(n));
        tensor_map(&f1.level_map(n), &qmap, &a1.level(m), &b1.level(n)).expect("tensor of level maps")
    }))
}

/// `lim(f ⊗ ℚ)` for a morphism of towers over the discrete backend.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalLimitMap {
    pub src_rank: usize,
    pub tgt_rank: usize,
    pub rank: usize,
    pub kernel_rank: usize,
}

pub fn rational_limit_map(f: &ProMorphism, depth: usize) -> Result<RationalLimitMap> {
    let (a, b) = (f.src(), f.tgt());
    let src = pro_contratensor(a, &Coefficient::Rationals, depth)?;
    let tgt = pro_contratensor(b, &Coefficient::Rationals, depth)?;
    let (LimitValue::Rational { rank: src_rank }, LimitValue::Rational { rank: tgt_rank }) = (&src.limit, &tgt.limit) else {
        return Err(Error::InvalidInput("rational limits did not settle".into()));
    };
    // the image of lim A in B_D is f_D of the stable image of A
    let r = f.reindex().apply(depth);
    let mut rank = rational_rank(&a.level(r))?;
    for m in r..=r + 2 * depth.max(1) {
        rank = rank.min(rational_map_rank(&f.level_map_from(m, depth))?);
    }
    Ok(RationalLimitMap { src_rank: *src_rank, tgt_rank: *tgt_rank, rank, kernel_rank: src_rank - rank })
}

/// Levelwise `Hom(Rₙ^k, Qₙ)` with transitions reducing matrices.
pub fn hom_tower(k: usize, q: &ContraTower) -> Tower {
    let backend = *q.backend();
    let free = ring_tower(&backend, k);
    let (f1, q1) = (free.clone(), q.clone());
    let (f2, q2) = (free, q.clone());
    Tower::from_fn(
        &backend,
        format!("Hom(R^{k}, {})", q.tower().name()),
        Strictness::Unknown,
        move |_, n| hom_module(&f1.level(n), &q1.red_level(n)).expect("one backend").module,
        move |t, n| {
            let upper = hom_module(&f2.level(n + 1), &q2.red_level(n + 1)).expect("one backend");
            let lower = hom_module(&f2.level(n), &q2.red_level(n)).expect("one backend");
            let (src, tgt) = (t.level(n + 1), t.level(n));
            if f2.level(n).gens() == 0 || tgt.gens() == 0 {
                return ModMorphism::zero(&src, &tgt);
            }
            let ring = tgt.ring();
            let mut cols = Vec::new();
            for j in 0..src.gens() {
                let e: Vec<_> = (0..src.gens()).map(|i| if i == j { src.ring().one() } else { src.ring().zero() }).collect();
                let f = upper.to_morphism(&e).expect("coordinates");
                let down = q2.red_transition(n).compose(&f).expect("composable");
                let g = ModMorphism::unchecked(&f2.level(n), &q2.red_level(n), down.map().clone()).expect("shape");
                let x = lower.from_morphism(&g).expect("shape").expect("reduced maps are homomorphisms");
                cols.push(x);
            }
            let m = crate::coefficients::Matrix::from_fn(&ring, tgt.gens(), src.gens(), |i, j| ring.coerce(&cols[j][i], &ring));
            ModMorphism::unchecked(&src, &tgt, m).expect("hom transition")
        },
    )
}

/// `Hom(P, Q)` two ways: as `undualize(P) ⊙^pro Q` and levelwise.
#[derive(Clone, Debug)]
pub struct HomComparison {
    pub value: ProContratensor,
    pub direct: Tower,
    pub agree: bool,
    pub direct_surjective: bool,
}

pub fn hom_via_pro_contratensor(p: &ProjContra, q: &ContraTower, depth: usize) -> Result<HomComparison> {
    let k = p.rank().ok_or_else(|| Error::InvalidInput("Hom out of a countable free contramodule".into()))?;
    let value = pro_contratensor(&super::undualize(p), &Coefficient::Contra(q.clone()), depth)?;
    let direct = hom_tower(k, q);
    let tower = value.tower().expect("module levels").clone();
    let agree = (0..=depth).all(|n| tower.level(n).is_isomorphic(&direct.level(n)));
    let direct_surjective = (0..depth).all(|n| direct.transition(n).is_surjective());
    Ok(HomComparison { value, direct, agree, direct_surjective })
}
