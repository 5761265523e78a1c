use std::sync::Arc;

use super::lazy::LazySeq;
use super::morphism::ProMorphism;
use super::reindex::Reindex;
use super::tower::{Strictness, Tower};
use crate::coefficients::{Backend, Matrix};
use crate::discrete_mod::{block_morphism, direct_sum, FPModule, ModMorphism};
use crate::error::{Error, Result};

/// A finite or countable family of towers, the latter given by a generator.
#[derive(Clone)]
pub struct Family {
    len: Option<usize>,
    generator: Arc<dyn Fn(usize) -> Tower + Send + Sync>,
    memo: Arc<LazySeq<Tower>>,
    strict: bool,
}

impl Family {
    pub fn finite(towers: Vec<Tower>) -> Family {
        let strict = towers.iter().all(Tower::is_declared_strict);
        let len = towers.len();
        let ts = Arc::new(towers);
        Family { len: Some(len), generator: Arc::new(move |n| ts[n].clone()), memo: LazySeq::new(), strict }
    }

    /// Countable family; `strict` records that every member is strict.
    pub fn countable(generator: impl Fn(usize) -> Tower + Send + Sync + 'static, strict: bool) -> Family {
        Family { len: None, generator: Arc::new(generator), memo: LazySeq::new(), strict }
    }

    pub fn len(&self) -> Option<usize> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    pub fn get(&self, n: usize) -> Tower {
        self.memo.get(n, || (self.generator)(n))
    }

    /// Indices `n` with a factor `(n, k − n)` at level `k`.
    pub fn factors_at(&self, k: usize) -> usize {
        match self.len {
            Some(l) => l.min(k + 1),
            None => k + 1,
        }
    }

    fn prefix(&self, m: usize) -> Family {
        let me = self.clone();
        Family {
            len: Some(self.len.map_or(m, |l| l.min(m))),
            generator: Arc::new(move |n| me.get(n)),
            memo: LazySeq::new(),
            strict: self.strict,
        }
    }
}

/// Product of a family along the diagonal: level `k` is `⊕_{n+m=k} Tₙ.level(m)`.
#[derive(Clone)]
pub struct Product {
    pub tower: Tower,
    family: Family,
    sums: Arc<LazySeq<(FPModule, Vec<ModMorphism>, Vec<ModMorphism>)>>,
}

impl Product {
    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Level `k` as a direct sum with its injections and projections.
    pub fn level_sum(&self, k: usize) -> (FPModule, Vec<ModMorphism>, Vec<ModMorphism>) {
        level_sum(&self.family, &self.sums, self.tower.backend(), k)
    }

    /// Projection onto the `i`-th factor, reindexed by `m ↦ m + i`.
    pub fn projection(&self, i: usize) -> ProMorphism {
        let me = self.clone();
        let t = self.family.get(i);
        ProMorphism::from_fn(&self.tower, &t, Reindex::shift(i), move |m| me.level_sum(m + i).2[i].clone())
    }

    /// The map `src → ∏ Tₙ` induced by `fs[n]: src → Tₙ` (finite families).
    pub fn induced(&self, src: &Tower, fs: &[ProMorphism]) -> Result<ProMorphism> {
        if self.family.len() != Some(fs.len()) {
            return Err(Error::ShapeError("one component per factor is required".into()));
        }
        if fs.is_empty() {
            return Ok(ProMorphism::zero(src, &self.tower));
        }
        let r = fs.iter().enumerate().fold(fs[0].reindex().clone(), |acc, (n, f)| acc.max(&f.reindex().delayed(n)));
        let (me, comps, r2) = (self.clone(), fs.to_vec(), r.clone());
        Ok(ProMorphism::from_fn(src, &self.tower, r, move |k| {
            let deep = r2.apply(k);
            let (sum, inj, _) = me.level_sum(k);
            let parts: Vec<ModMorphism> =
                (0..me.family.factors_at(k)).map(|n| comps[n].level_map_from(deep, k - n)).collect();
            let src_level = parts.first().map(|p| p.src().clone()).expect("at least one factor");
            let mut total = ModMorphism::zero(&src_level, &sum);
            for (n, p) in parts.iter().enumerate() {
                total = total.add(&inj[n].compose(p).expect("composable")).expect("parallel");
            }
            total
        }))
    }

    /// The product of the first `m` factors with the projection onto it.
    pub fn truncate(&self, m: usize) -> (Product, ProMorphism) {
        let sub = product(self.tower.backend(), self.family.prefix(m));
        let (me, sub2) = (self.clone(), sub.clone());
        let proj = ProMorphism::levelwise(&self.tower, &sub.tower, move |k| {
            let (big, _, ps) = me.level_sum(k);
            let (small, inj, _) = sub2.level_sum(k);
            let mut total = ModMorphism::zero(&big, &small);
            for (n, i) in inj.iter().enumerate() {
                total = total.add(&i.compose(&ps[n]).expect("composable")).expect("parallel");
            }
            total
        });
        (sub, proj)
    }
}

fn level_sum(
    family: &Family,
    sums: &LazySeq<(FPModule, Vec<ModMorphism>, Vec<ModMorphism>)>,
    backend: &Backend,
    k: usize,
) -> (FPModule, Vec<ModMorphism>, Vec<ModMorphism>) {
    sums.get(k, || {
        let parts: Vec<FPModule> = (0..family.factors_at(k)).map(|n| family.get(n).level(k - n)).collect();
        if parts.is_empty() {
            return (FPModule::zero(backend), Vec::new(), Vec::new());
        }
        direct_sum(&parts).expect("one backend")
    })
}

/// Countable product by the diagonal construction. Transitions act by the
/// factor transitions after projecting away the factor `(k+1, 0)`.
pub fn product(backend: &Backend, family: Family) -> Product {
    let sums = LazySeq::new();
    let (f1, s1, b1) = (family.clone(), sums.clone(), *backend);
    let (f2, s2) = (family.clone(), sums.clone());
    let declared = if family.strict { Strictness::CertifiedStrict } else { Strictness::Unknown };
    let tower = Tower::from_fn(
        backend,
        "product",
        declared,
        move |_, k| level_sum(&f1, &s1, &b1, k).0,
        move |t, k| {
            let (src, _, _) = level_sum(&f2, &s2, &b1, k + 1);
            let (tgt, _, _) = level_sum(&f2, &s2, &b1, k);
            let _ = t;
            let nt = f2.factors_at(k);
            let ns = f2.factors_at(k + 1);
            let ring = tgt.ring();
            let blocks: Vec<Vec<Matrix>> = (0..nt)
                .map(|n| {
                    let tn = f2.get(n);
                    let rows = tn.level(k - n).gens();
                    (0..ns)
                        .map(|j| {
                            let cols = f2.get(j).level(k + 1 - j).gens();
                            if j == n {
                                tn.transition(k - n).map().coerce(&ring)
                            } else {
                                Matrix::zeros(&ring, rows, cols)
                            }
                        })
                        .collect()
                })
                .collect();
            if nt == 0 {
                return ModMorphism::zero(&src, &tgt);
            }
            block_morphism(&src, &tgt, &blocks).expect("block shapes")
        },
    );
    Product { tower, family, sums }
}

pub fn product_of(backend: &Backend, towers: Vec<Tower>) -> Product {
    product(backend, Family::finite(towers))
}

/// Least `m` with `f` factoring through the first `m` factors, the
/// factorization, and the projection onto the truncated product.
pub struct Factorization {
    pub m: usize,
    pub truncated: Product,
    pub projection: ProMorphism,
    pub factor: ProMorphism,
    pub verified: bool,
}

/// Factors a morphism from a product to a constant tower through a finite
/// subproduct. Assumes the factors are strict, so vanishing on a factor at
/// one level is vanishing at all deeper levels.
pub fn factor_through_finite_subproduct(f: &ProMorphism, prod: &Product, depth: usize) -> Result<Factorization> {
    if !f.src().ptr_eq(&prod.tower) {
        return Err(Error::InvalidInput("morphism does not start at the given product".into()));
    }
    let k = f.reindex().apply(0);
    let (_, inj, _) = prod.level_sum(k);
    let f0 = f.level_map(0);
    let m = inj
        .iter()
        .enumerate()
        .filter(|(_, i)| !f0.compose(i).expect("composable").is_zero())
        .map(|(n, _)| n + 1)
        .max()
        .unwrap_or(0);
    let (truncated, projection) = prod.truncate(m);
    let (ff, tr, big) = (f.clone(), truncated.clone(), prod.clone());
    let factor = ProMorphism::from_fn(&truncated.tower, f.tgt(), f.reindex().clone(), move |n| {
        let r = ff.reindex().apply(n);
        let (small, _, small_proj) = tr.level_sum(r);
        let (_, big_inj, _) = big.level_sum(r);
        let fl = ff.level_map(n);
        let mut total = ModMorphism::zero(&small, fl.tgt());
        for (j, q) in small_proj.iter().enumerate() {
            let part = fl.compose(&big_inj[j]).expect("composable");
            total = total.add(&part.compose(q).expect("composable")).expect("parallel");
        }
        total
    });
    let verified = factor.compose(&projection)?.equals_to(f, depth);
    Ok(Factorization { m, truncated, projection, factor, verified })
}
