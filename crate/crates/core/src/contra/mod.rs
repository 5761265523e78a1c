//! Contramodules represented by their reduction towers `Q/(Iₙ⋌Q)`, the
//! contratensor product with discrete modules, and flatness batteries.

mod battery;
mod literal;

use serde::Serialize;

use crate::coefficients::{normal_form, Backend, Level, Matrix, Ring};
use crate::discrete_mod::{tensor, tensor_map, FPModule, Invariants, ModMorphism};
use crate::error::{Error, Result};
use crate::pro_cat::{ring_tower, zero_tower, Strictness, Tower};

pub use battery::{is_flat_to_depth, nakayama_witness, BatteryComposition, FlatCertificate, FlatWitness, NakayamaWitness};
pub use literal::ContraLiteral;

/// A separated complete contramodule, stored as the tower of its reductions.
#[derive(Clone)]
pub struct ContraTower {
    tower: Tower,
    free_rank: Option<usize>,
}

impl std::fmt::Debug for ContraTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContraTower").field("tower", &self.tower.name()).field("free_rank", &self.free_rank).finish()
    }
}

impl ContraTower {
    /// Wraps a tower of reductions after checking, to `depth`, that the
    /// transitions are onto and that `Iₙ` kills level `n`. Over the discrete
    /// backend the topology is discrete and the tower must be constant.
    pub fn from_tower(t: &Tower, depth: usize) -> Result<ContraTower> {
        let discrete = t.backend().is_discrete();
        for n in 0..=depth {
            let m = t.level(n);
            if !discrete && m.exact_level() > Level::Finite(n as u32) {
                return Err(Error::LevelError(format!("level {n} of {} is not killed by I_{n}", t.name())));
            }
            if n == depth {
                break;
            }
            let tr = t.transition(n);
            let ok = if discrete { tr.is_isomorphism() } else { tr.is_surjective() };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "transition {n} of {} does not present a separated complete contramodule; \
                     nonseparated contramodules are not modelled",
                    t.name()
                )));
            }
        }
        Ok(ContraTower { tower: t.with_strictness(Strictness::CertifiedStrict), free_rank: None })
    }

    /// The reductions `M/IₙM` of a finitely presented module, i.e. the
    /// contramodule `M ⊗ ℜ`.
    pub fn of_module(m: &FPModule) -> ContraTower {
        let backend = *m.backend();
        if backend.is_discrete() {
            return ContraTower { tower: crate::pro_cat::constant_tower(m), free_rank: None };
        }
        let m1 = m.clone();
        let tower = Tower::from_fn(
            &backend,
            format!("reductions({})", m.describe()),
            Strictness::CertifiedStrict,
            move |_, n| reduce_to(&m1, n as u32),
            move |t, n| {
                let (src, tgt) = (t.level(n + 1), t.level(n));
                let ring = tgt.ring();
                let map = Matrix::from_fn(&ring, tgt.gens(), src.gens(), |i, j| if i == j { ring.one() } else { ring.zero() });
                ModMorphism::unchecked(&src, &tgt, map).expect("reduction")
            },
        );
        ContraTower { tower, free_rank: None }
    }

    pub fn zero(backend: &Backend) -> ContraTower {
        ContraTower { tower: zero_tower(backend), free_rank: Some(0) }
    }

    pub fn backend(&self) -> &Backend {
        self.tower.backend()
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn red_level(&self, n: usize) -> FPModule {
        self.tower.level(n)
    }

    pub fn red_transition(&self, n: usize) -> ModMorphism {
        self.tower.transition(n)
    }

    /// `Some(k)` for the free contramodule `ℜ[[X]]`, `|X| = k`.
    pub fn free_rank(&self) -> Option<usize> {
        self.free_rank
    }

    pub fn is_zero_to(&self, depth: usize) -> bool {
        self.tower.is_zero_to(depth)
    }
}

/// `ℜ[[X]]` for `|X| = k`: levels `(Rₙ)^k` with reductions.
pub fn free_contra(backend: &Backend, k: usize) -> ContraTower {
    ContraTower { tower: ring_tower(backend, k), free_rank: Some(k) }
}

/// `m` presented at level `n` (relations reduced or padded with `πⁿ`).
fn reduce_to(m: &FPModule, n: u32) -> FPModule {
    let level = Level::Finite(n);
    if n == 0 || m.gens() == 0 {
        return FPModule::zero(m.backend());
    }
    FPModule::new(*m.backend(), level, m.gens(), m.relations_in(level)).expect("reduction of a presentation")
}

/// Second argument of a contratensor product: a contramodule tower or the
/// torsion-free group `ℚ` over the discrete backend.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Contra(ContraTower),
    Rationals,
}

impl Coefficient {
    pub fn name(&self) -> String {
        match self {
            Coefficient::Contra(q) => q.tower.name().to_string(),
            Coefficient::Rationals => "Q".into(),
        }
    }
}

/// An abelian group produced by a contratensor product.
#[derive(Clone, Debug)]
pub enum GroupValue {
    Module(FPModule),
    Rational { rank: usize },
}

impl GroupValue {
    pub fn is_zero(&self) -> bool {
        match self {
            GroupValue::Module(m) => m.is_zero(),
            GroupValue::Rational { rank } => *rank == 0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GroupValue::Module(m) => m.describe(),
            GroupValue::Rational { rank: 0 } => "0".into(),
            GroupValue::Rational { rank: 1 } => "Q".into(),
            GroupValue::Rational { rank } => format!("Q^{rank}"),
        }
    }

    pub fn to_report(&self) -> GroupReport {
        match self {
            GroupValue::Module(m) => match m.invariants() {
                Invariants::Chain { exponents } => GroupReport::Divisors { exponents: exponents.clone(), free_rank: 0 },
                Invariants::Integral { torsion, free_rank } => GroupReport::Integral {
                    torsion: torsion.iter().map(|d| d.to_string()).collect(),
                    free_rank: *free_rank,
                },
            },
            GroupValue::Rational { rank } => GroupReport::Rational { rank: *rank },
        }
    }
}

/// JSON shape of a group value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupReport {
    Divisors { exponents: Vec<u32>, free_rank: usize },
    Integral { torsion: Vec<String>, free_rank: usize },
    Rational { rank: usize },
}

/// Level at which a discrete module is presented, i.e. an open ideal
/// killing it. Zero over the discrete backend.
pub(crate) fn working_level(n: &FPModule) -> Result<usize> {
    if n.backend().is_discrete() {
        return Ok(0);
    }
    match n.level() {
        Level::Finite(l) => Ok(l as usize),
        Level::Infinite => Err(Error::InvalidInput("module is not discrete: no open ideal annihilates it".into())),
    }
}

/// `N ⊙ Q` computed as `N ⊗ Q/(I_c⋌Q)` for an open ideal `I_c` killing `N`.
pub fn contratensor_at(n: &FPModule, q: &ContraTower, c: usize) -> Result<FPModule> {
    n.same_backend(&q.red_level(0))?;
    if !n.backend().is_discrete() && n.exact_level() > Level::Finite(c as u32) {
        return Err(Error::LevelError(format!("I_{c} does not annihilate {}", n.describe())));
    }
    let c = if n.backend().is_discrete() { 0 } else { c };
    tensor(n, &q.red_level(c))
}

pub fn contratensor(n: &FPModule, q: &ContraTower) -> Result<FPModule> {
    contratensor_at(n, q, working_level(n)?)
}

/// `f ⊙ Q` between the presentations `contratensor_at(−, Q, c)` at the
/// common level `c` of the two ends.
pub fn contratensor_map(f: &ModMorphism, q: &ContraTower) -> Result<ModMorphism> {
    let c = working_level(f.src())?.max(working_level(f.tgt())?);
    contratensor_map_at(f, q, c)
}

pub fn contratensor_map_at(f: &ModMorphism, q: &ContraTower, c: usize) -> Result<ModMorphism> {
    let src = contratensor_at(f.src(), q, c)?;
    let tgt = contratensor_at(f.tgt(), q, c)?;
    let qc = q.red_level(if f.src().backend().is_discrete() { 0 } else { c });
    tensor_map(f, &ModMorphism::identity(&qc), &src, &tgt)
}

/// `N ⊙ C` for either kind of coefficient.
pub fn contratensor_value(n: &FPModule, c: &Coefficient) -> Result<GroupValue> {
    match c {
        Coefficient::Contra(q) => contratensor(n, q).map(GroupValue::Module),
        Coefficient::Rationals => Ok(GroupValue::Rational { rank: rational_rank(n)? }),
    }
}

/// `dim_ℚ N ⊗ ℚ`: the free rank of `N`.
pub fn rational_rank(n: &FPModule) -> Result<usize> {
    if !n.backend().is_discrete() {
        return Err(Error::BackendMismatch("the rationals coefficient lives over the discrete backend".into()));
    }
    match n.invariants() {
        Invariants::Integral { free_rank, .. } => Ok(*free_rank),
        Invariants::Chain { .. } => unreachable!("discrete modules have integral invariants"),
    }
}

/// Rank of `f ⊗ ℚ`: the rank of `[f | rel(N')]` minus that of `rel(N')`.
pub fn rational_map_rank(f: &ModMorphism) -> Result<usize> {
    if !f.src().backend().is_discrete() {
        return Err(Error::BackendMismatch("the rationals coefficient lives over the discrete backend".into()));
    }
    let rels = f.tgt().rels().coerce(&Ring::Integers);
    let map = f.map().coerce(&Ring::Integers);
    let both = map.hstack(&rels)?;
    Ok(rank(&both) - rank(&rels))
}

fn rank(m: &Matrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    normal_form(m).rank()
}

/// Whether `f ⊙ C` is injective.
pub fn preserves_injectivity(f: &ModMorphism, c: &Coefficient) -> Result<bool> {
    match c {
        Coefficient::Contra(q) => Ok(contratensor_map(f, q)?.is_injective()),
        Coefficient::Rationals => Ok(rational_map_rank(f)? == rational_rank(f.src())?),
    }
}
