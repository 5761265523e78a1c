use super::limits::{is_admissible_ses, kernel_pro};
use super::morphism::ProMorphism;
use super::product::{product, Family, Product};
use super::reindex::Reindex;
use super::tower::{constant_tower, ring_tower, Tower};
use crate::coefficients::{Level, Matrix};
use crate::discrete_mod::{FPModule, ModMorphism};
use crate::error::{Error, Result};

/// `0 → T → ∏ Tₙ → ∏ Tₙ → 0` with the second map `id − shift`.
pub struct TelescopeSes {
    pub product: Product,
    pub embedding: ProMorphism,
    pub difference: ProMorphism,
}

impl TelescopeSes {
    pub fn is_admissible(&self, depth: usize) -> Result<bool> {
        is_admissible_ses(&self.embedding, &self.difference, depth)
    }
}

pub fn telescope_ses(t: &Tower) -> Result<TelescopeSes> {
    if !t.is_declared_strict() {
        return Err(Error::NotStrict(format!("telescope of {}", t.name())));
    }
    let t1 = t.clone();
    let p = product(t.backend(), Family::countable(move |n| constant_tower(&t1.level(n)), true));
    let (p1, t2) = (p.clone(), t.clone());
    let embedding = ProMorphism::levelwise(t, &p.tower, move |k| {
        let (sum, inj, _) = p1.level_sum(k);
        let mut total = ModMorphism::zero(&t2.level(k), &sum);
        for (j, i) in inj.iter().enumerate() {
            total = total.add(&i.compose(&t2.composite(k, j)).expect("composable")).expect("parallel");
        }
        total
    });
    let (p2, t3) = (p.clone(), t.clone());
    // (x₀, …, x_{k+1}) ↦ (x_j − t_j(x_{j+1}))_{j ≤ k}
    let difference = ProMorphism::from_fn(&p.tower, &p.tower, Reindex::shift(1), move |k| {
        let (src, _, proj) = p2.level_sum(k + 1);
        let (tgt, inj, _) = p2.level_sum(k);
        let mut total = ModMorphism::zero(&src, &tgt);
        for j in 0..=k {
            let shifted = t3.transition(j).compose(&proj[j + 1]).expect("composable");
            let part = proj[j].sub(&shifted.with_ends(&src, proj[j].tgt())).expect("parallel");
            total = total.add(&inj[j].compose(&part).expect("composable")).expect("parallel");
        }
        total
    });
    Ok(TelescopeSes { product: p, embedding, difference })
}

/// A strict tower read as the complete separated topological module
/// `lim Tₙ`, with open submodules the kernels of the projections to `Tₙ`.
#[derive(Clone, Debug)]
pub struct LimitModule {
    tower: Tower,
}

impl LimitModule {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// The discrete quotient by the `n`-th open submodule.
    pub fn quotient(&self, n: usize) -> FPModule {
        self.tower.level(n)
    }

    /// When every transition to `depth` is an isomorphism, the module is
    /// discrete and equal to its level 0.
    pub fn as_discrete(&self, depth: usize) -> Option<FPModule> {
        (0..depth).all(|n| self.tower.transition(n).is_isomorphism()).then(|| self.tower.level(0))
    }
}

pub fn limit_module(t: &Tower, depth: usize) -> Result<LimitModule> {
    if !(t.is_declared_strict() || t.check_strict(depth) == super::tower::Strictness::CertifiedStrict) {
        return Err(Error::NotStrict(format!("{} is not strict to depth {depth}", t.name())));
    }
    Ok(LimitModule { tower: t.clone() })
}

/// Cover of `constant(N)` by a finite power of the ring tower.
pub struct ProjectiveCover {
    pub cover: Tower,
    pub epi: ProMorphism,
    pub kernel: Tower,
    pub kernel_inclusion: ProMorphism,
}

pub fn projective_cover_cohpro(n: &FPModule) -> ProjectiveCover {
    let backend = *n.backend();
    let k = n.gens();
    let cover = ring_tower(&backend, k);
    let target = constant_tower(n);
    let start = match n.level() {
        Level::Finite(l) => l as usize,
        Level::Infinite => 0,
    };
    let n1 = n.clone();
    let c1 = cover.clone();
    let epi = ProMorphism::from_fn(&cover, &target, Reindex::at_least(start), move |m| {
        let src = c1.level(m.max(start));
        ModMorphism::unchecked(&src, &n1, Matrix::identity(&n1.ring(), k)).expect("generators map to generators")
    });
    let (kernel, kernel_inclusion) = kernel_pro(&epi);
    ProjectiveCover { cover, epi, kernel, kernel_inclusion }
}
