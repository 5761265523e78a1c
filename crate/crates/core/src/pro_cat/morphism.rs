use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::reindex::Reindex;
use super::tower::Tower;
use crate::discrete_mod::ModMorphism;
use crate::error::{Error, Result};

pub type LevelMapFn = Arc<dyn Fn(usize) -> ModMorphism + Send + Sync>;

/// Morphism of towers represented by a reindexing `r` and level maps
/// `src.level(r(n)) → tgt.level(n)`.
#[derive(Clone)]
pub struct ProMorphism(Arc<ProData>);

struct ProData {
    src: Tower,
    tgt: Tower,
    reindex: Reindex,
    map_fn: LevelMapFn,
    maps: Mutex<Vec<Arc<OnceLock<ModMorphism>>>>,
}

impl ProMorphism {
    /// `maps(n)` must describe a morphism `src.level(r(n)) → tgt.level(n)`.
    pub fn from_fn(
        src: &Tower,
        tgt: &Tower,
        reindex: Reindex,
        maps: impl Fn(usize) -> ModMorphism + Send + Sync + 'static,
    ) -> ProMorphism {
        ProMorphism(Arc::new(ProData {
            src: src.clone(),
            tgt: tgt.clone(),
            reindex,
            map_fn: Arc::new(maps),
            maps: Mutex::new(Vec::new()),
        }))
    }

    pub fn levelwise(src: &Tower, tgt: &Tower, maps: impl Fn(usize) -> ModMorphism + Send + Sync + 'static) -> ProMorphism {
        ProMorphism::from_fn(src, tgt, Reindex::identity(), maps)
    }

    pub fn identity(t: &Tower) -> ProMorphism {
        let t1 = t.clone();
        ProMorphism::levelwise(t, t, move |n| ModMorphism::identity(&t1.level(n)))
    }

    pub fn zero(src: &Tower, tgt: &Tower) -> ProMorphism {
        let (s, t) = (src.clone(), tgt.clone());
        ProMorphism::levelwise(src, tgt, move |n| ModMorphism::zero(&s.level(n), &t.level(n)))
    }

    pub fn src(&self) -> &Tower {
        &self.0.src
    }

    pub fn tgt(&self) -> &Tower {
        &self.0.tgt
    }

    pub fn reindex(&self) -> &Reindex {
        &self.0.reindex
    }

    pub fn level_map(&self, n: usize) -> ModMorphism {
        let cell = {
            let mut v = self.0.maps.lock().expect("memo table");
            while v.len() <= n {
                v.push(Arc::new(OnceLock::new()));
            }
            v[n].clone()
        };
        cell.get_or_init(|| {
            let raw = (self.0.map_fn)(n);
            raw.with_ends(&self.0.src.level(self.0.reindex.apply(n)), &self.0.tgt.level(n))
        })
        .clone()
    }

    /// Level map read from a deeper source level `m ≥ r(n)`.
    pub fn level_map_from(&self, m: usize, n: usize) -> ModMorphism {
        let r = self.0.reindex.apply(n);
        self.level_map(n).compose(&self.0.src.composite(m, r)).expect("composable")
    }

    /// Same morphism represented along a pointwise larger reindexing.
    pub fn realign(&self, r: &Reindex) -> ProMorphism {
        let me = self.clone();
        let r2 = r.clone();
        ProMorphism::from_fn(self.src(), self.tgt(), r.clone(), move |n| me.level_map_from(r2.apply(n), n))
    }

    pub fn compose(&self, first: &ProMorphism) -> Result<ProMorphism> {
        if !first.tgt().ptr_eq(self.src()) {
            return Err(Error::ShapeError("composing pro-morphisms with mismatched ends".into()));
        }
        let (g, f) = (self.clone(), first.clone());
        let r = first.reindex().after(self.reindex());
        Ok(ProMorphism::from_fn(first.src(), self.tgt(), r, move |n| {
            let m = g.reindex().apply(n);
            g.level_map(n).compose(&f.level_map(m)).expect("composable")
        }))
    }

    fn check_parallel(&self, other: &ProMorphism) -> Result<()> {
        if !self.src().ptr_eq(other.src()) || !self.tgt().ptr_eq(other.tgt()) {
            return Err(Error::ShapeError("pro-morphisms are not parallel".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ProMorphism) -> Result<ProMorphism> {
        self.check_parallel(other)?;
        let r = self.reindex().max(other.reindex());
        let (f, g, r2) = (self.clone(), other.clone(), r.clone());
        Ok(ProMorphism::from_fn(self.src(), self.tgt(), r, move |n| {
            let m = r2.apply(n);
            f.level_map_from(m, n).add(&g.level_map_from(m, n)).expect("parallel")
        }))
    }

    pub fn neg(&self) -> ProMorphism {
        let f = self.clone();
        ProMorphism::from_fn(self.src(), self.tgt(), self.reindex().clone(), move |n| f.level_map(n).neg())
    }

    pub fn sub(&self, other: &ProMorphism) -> Result<ProMorphism> {
        self.add(&other.neg())
    }

    /// Zero in `Pro_ω` to depth: each level map dies after composing with
    /// some deeper transition (at most `slack` further levels). Over a
    /// strict source the level map itself must vanish.
    pub fn is_zero_to(&self, depth: usize, slack: usize) -> bool {
        let strict = self.src().is_declared_strict();
        (0..=depth).all(|n| {
            let r = self.reindex().apply(n);
            if strict {
                return self.level_map(n).is_zero();
            }
            (r..=r + slack).any(|m| self.level_map_from(m, n).is_zero())
        })
    }

    /// Equality in `Pro_ω` to depth; exact levelwise for strict sources.
    pub fn equals_to(&self, other: &ProMorphism, depth: usize) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero_to(depth, depth),
            Err(_) => false,
        }
    }

    /// Commuting squares `t_n ∘ f_{n+1} = f_n ∘ (src composite r(n+1) → r(n))`.
    pub fn check_commuting(&self, depth: usize) -> bool {
        (0..depth).all(|n| {
            let r1 = self.reindex().apply(n + 1);
            let lhs = self.tgt().transition(n).compose(&self.level_map(n + 1)).expect("composable");
            let rhs = self.level_map_from(r1, n);
            lhs.equals(&rhs)
        })
    }

    /// Whether every level map to depth is an isomorphism of modules.
    pub fn is_levelwise_iso(&self, depth: usize) -> bool {
        (0..=depth).all(|n| self.level_map(n).is_isomorphism())
    }
}

impl fmt::Debug for ProMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProMorphism({:?} -> {:?}, {:?})", self.0.src, self.0.tgt, self.0.reindex)
    }
}
