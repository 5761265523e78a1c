use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::coefficients::{Backend, Matrix};
use crate::discrete_mod::{FPModule, ModMorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strictness {
    CertifiedStrict,
    CertifiedNonstrict,
    Unknown,
}

pub type LevelFn = Arc<dyn Fn(&Tower, usize) -> FPModule + Send + Sync>;
pub type TransitionFn = Arc<dyn Fn(&Tower, usize) -> ModMorphism + Send + Sync>;

type Slots<T> = Mutex<Vec<Arc<OnceLock<T>>>>;

/// Countably indexed inverse system `T₀ ← T₁ ← T₂ ← …` of finitely
/// presented modules, produced lazily and memoized level by level.
#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

struct TowerData {
    backend: Backend,
    name: String,
    declared: Strictness,
    level_fn: LevelFn,
    transition_fn: TransitionFn,
    levels: Slots<FPModule>,
    transitions: Slots<ModMorphism>,
    composites: Mutex<HashMap<(usize, usize), ModMorphism>>,
    explored: AtomicUsize,
}

fn slot<T>(slots: &Slots<T>, n: usize) -> Arc<OnceLock<T>> {
    let mut v = slots.lock().expect("memo table");
    while v.len() <= n {
        v.push(Arc::new(OnceLock::new()));
    }
    v[n].clone()
}

impl Tower {
    /// Tower from generator closures. `transition(t, n)` must describe a
    /// morphism `level(n+1) → level(n)`; its ends are replaced by the
    /// memoized levels.
    pub fn from_fn(
        backend: &Backend,
        name: impl Into<String>,
        declared: Strictness,
        level: impl Fn(&Tower, usize) -> FPModule + Send + Sync + 'static,
        transition: impl Fn(&Tower, usize) -> ModMorphism + Send + Sync + 'static,
    ) -> Tower {
        Tower(Arc::new(TowerData {
            backend: *backend,
            name: name.into(),
            declared,
            level_fn: Arc::new(level),
            transition_fn: Arc::new(transition),
            levels: Mutex::new(Vec::new()),
            transitions: Mutex::new(Vec::new()),
            composites: Mutex::new(HashMap::new()),
            explored: AtomicUsize::new(0),
        }))
    }

    pub fn backend(&self) -> &Backend {
        &self.0.backend
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn level(&self, n: usize) -> FPModule {
        let cell = slot(&self.0.levels, n);
        cell.get_or_init(|| {
            self.0.explored.fetch_max(n, Ordering::Relaxed);
            (self.0.level_fn)(self, n)
        })
        .clone()
    }

    /// The transition `level(n+1) → level(n)`.
    pub fn transition(&self, n: usize) -> ModMorphism {
        let cell = slot(&self.0.transitions, n);
        cell.get_or_init(|| {
            let raw = (self.0.transition_fn)(self, n);
            raw.with_ends(&self.level(n + 1), &self.level(n))
        })
        .clone()
    }

    /// The composite `level(m) → level(n)` for `m ≥ n`.
    pub fn composite(&self, m: usize, n: usize) -> ModMorphism {
        assert!(m >= n, "composite from {m} down to {n}");
        if m == n {
            return ModMorphism::identity(&self.level(n));
        }
        if let Some(f) = self.0.composites.lock().expect("memo").get(&(m, n)) {
            return f.clone();
        }
        let f = self.transition(n).compose(&self.composite(m, n + 1)).expect("consecutive levels");
        self.0.composites.lock().expect("memo").insert((m, n), f.clone());
        f
    }

    pub fn declared_strictness(&self) -> Strictness {
        self.0.declared
    }

    pub fn is_declared_strict(&self) -> bool {
        self.0.declared == Strictness::CertifiedStrict
    }

    /// Checks surjectivity of the transitions below `depth`.
    pub fn check_strict(&self, depth: usize) -> Strictness {
        if (0..depth).all(|n| self.transition(n).is_surjective()) {
            Strictness::CertifiedStrict
        } else {
            Strictness::CertifiedNonstrict
        }
    }

    /// Largest level materialized so far.
    pub fn depth_explored(&self) -> usize {
        self.0.explored.load(Ordering::Relaxed)
    }

    /// Whether levels `0..=depth` are all zero.
    pub fn is_zero_to(&self, depth: usize) -> bool {
        (0..=depth).all(|n| self.level(n).is_zero())
    }

    /// Same tower with a different declared strictness.
    pub fn with_strictness(&self, declared: Strictness) -> Tower {
        let me = self.clone();
        let me2 = self.clone();
        Tower::from_fn(self.backend(), self.name(), declared, move |_, n| me.level(n), move |_, n| me2.transition(n))
    }

    pub fn ptr_eq(&self, other: &Tower) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn describe(&self, depth: usize) -> Vec<String> {
        (0..=depth).map(|n| self.level(n).describe()).collect()
    }
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tower({}, {:?})", self.0.name, self.0.declared)
    }
}

/// Constant tower with identity transitions.
pub fn constant_tower(m: &FPModule) -> Tower {
    let m1 = m.clone();
    Tower::from_fn(
        m.backend(),
        format!("constant({})", m.describe()),
        Strictness::CertifiedStrict,
        move |_, _| m1.clone(),
        |t, n| ModMorphism::identity(&t.level(n)),
    )
}

/// `(R_n^k)_n` with reduction transitions; over the discrete backend the
/// constant tower `ℤ^k`.
pub fn ring_tower(backend: &Backend, k: usize) -> Tower {
    if backend.is_discrete() {
        return constant_tower(&FPModule::free(backend, 0, k));
    }
    let b = *backend;
    Tower::from_fn(
        backend,
        if k == 1 { "ring".to_string() } else { format!("ring^{k}") },
        Strictness::CertifiedStrict,
        move |_, n| FPModule::free(&b, n as u32, k),
        move |t, n| {
            let (src, tgt) = (t.level(n + 1), t.level(n));
            ModMorphism::unchecked(&src, &tgt, reduction_matrix(&src, &tgt)).expect("reduction")
        },
    )
}

/// Zero tower.
pub fn zero_tower(backend: &Backend) -> Tower {
    constant_tower(&FPModule::zero(backend))
}

/// Finite explicit prefix of levels and transitions, continued by the last
/// level with identity transitions.
pub fn explicit_tower(backend: &Backend, levels: Vec<FPModule>, transitions: Vec<ModMorphism>, declared: Strictness) -> Tower {
    let lv = Arc::new(levels);
    let tr = Arc::new(transitions);
    let lv2 = lv.clone();
    let zero = FPModule::zero(backend);
    Tower::from_fn(
        backend,
        "explicit",
        declared,
        move |_, n| lv.get(n).or(lv.last()).cloned().unwrap_or_else(|| zero.clone()),
        move |t, n| match tr.get(n) {
            Some(f) if n + 1 < lv2.len() => f.clone(),
            _ => ModMorphism::identity(&t.level(n)),
        },
    )
}

/// `(ℤ/pⁿ)ₙ` as a tower of abelian groups over the discrete backend.
pub fn integer_adic_tower(p: u64) -> Tower {
    let b = Backend::discrete_integers();
    Tower::from_fn(
        &b,
        format!("Z/{p}^n"),
        Strictness::CertifiedStrict,
        move |_, n| if n == 0 { FPModule::zero(&b) } else { FPModule::from_integers(&[(p as i64).pow(n as u32)]) },
        move |t, n| {
            let (src, tgt) = (t.level(n + 1), t.level(n));
            ModMorphism::unchecked(&src, &tgt, reduction_matrix(&src, &tgt)).expect("reduction")
        },
    )
}

/// Generator `i` to generator `i`, with the zero ring level dropping all of them.
fn reduction_matrix(src: &FPModule, tgt: &FPModule) -> Matrix {
    let ring = tgt.ring();
    Matrix::from_fn(&ring, tgt.gens(), src.gens(), |i, j| if i == j { ring.one() } else { ring.zero() })
}
