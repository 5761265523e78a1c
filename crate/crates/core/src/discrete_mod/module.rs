use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::coefficients::{normal_form, Backend, Int, Level, Matrix, MatrixLiteral, Ring, Scalar, Solver};
use crate::error::{Error, Result};

/// Finitely presented module `R_n^g / (column span of rels)`.
///
/// Over the p-adic and power-series backends the level `n` is a stored
/// annihilation level: all matrix work for the module happens in `R_n`.
#[derive(Clone)]
pub struct FPModule(Arc<ModData>);

struct ModData {
    backend: Backend,
    level: Level,
    gens: usize,
    rels: Matrix,
    solver: OnceLock<Solver>,
    invariants: OnceLock<Invariants>,
}

/// Isomorphism invariants.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Invariants {
    /// `⊕ R/π^{eᵢ}`, exponents nondecreasing and positive.
    Chain { exponents: Vec<u32> },
    /// `⊕ Λ/(dᵢ) ⊕ Λ^r` with `d₁ | d₂ | …` non-units.
    Integral { torsion: Vec<Scalar>, free_rank: usize },
}

impl Invariants {
    pub fn is_zero(&self) -> bool {
        match self {
            Invariants::Chain { exponents } => exponents.is_empty(),
            Invariants::Integral { torsion, free_rank } => torsion.is_empty() && *free_rank == 0,
        }
    }

    pub fn describe(&self, backend: &Backend) -> String {
        let pi = backend.uniformizer_name();
        let base = match backend.kind {
            crate::coefficients::BackendKind::PowerSeries => format!("F_{}[x]", backend.prime),
            _ => "Z".to_string(),
        };
        let parts: Vec<String> = match self {
            Invariants::Chain { exponents } => {
                exponents.iter().map(|e| format!("{base}/{pi}^{e}")).collect()
            }
            Invariants::Integral { torsion, free_rank } => torsion
                .iter()
                .map(|d| format!("{base}/{d}"))
                .chain((0..*free_rank).map(|_| base.clone()))
                .collect(),
        };
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl FPModule {
    /// Builds a module and checks that the relation matrix lives in the level ring.
    pub fn new(backend: Backend, level: Level, gens: usize, rels: Matrix) -> Result<FPModule> {
        let ring = backend.level_ring(level);
        if *rels.ring() != ring {
            return Err(Error::BackendMismatch(format!("relations over {} for a module over {ring}", rels.ring())));
        }
        if rels.rows() != gens {
            return Err(Error::ShapeError(format!("{} relation rows for {gens} generators", rels.rows())));
        }
        if backend.is_discrete() != (level == Level::Infinite) {
            return Err(Error::LevelError(format!("level {level} for backend {backend}")));
        }
        Ok(FPModule::raw(backend, level, gens, rels))
    }

    pub(crate) fn raw(backend: Backend, level: Level, gens: usize, rels: Matrix) -> FPModule {
        FPModule(Arc::new(ModData {
            backend,
            level,
            gens,
            rels,
            solver: OnceLock::new(),
            invariants: OnceLock::new(),
        }))
    }

    pub fn zero(backend: &Backend) -> FPModule {
        let level = backend.level(0);
        let ring = backend.level_ring(level);
        FPModule::raw(*backend, level, 0, Matrix::zeros(&ring, 0, 0))
    }

    /// `R_n^k` (or `ℤ^k` over the discrete backend).
    pub fn free(backend: &Backend, n: u32, k: usize) -> FPModule {
        let level = backend.level(n);
        let ring = backend.level_ring(level);
        if level == Level::Finite(0) {
            return FPModule::zero(backend);
        }
        FPModule::raw(*backend, level, k, Matrix::zeros(&ring, k, 0))
    }

    /// `⊕ R/π^{eᵢ}` over a chain backend, at level `max eᵢ`.
    pub fn from_exponents(backend: &Backend, exponents: &[u32]) -> Result<FPModule> {
        if backend.is_discrete() {
            return Err(Error::BackendMismatch("exponent presentation needs a uniformizer".into()));
        }
        let exps: Vec<u32> = exponents.iter().copied().filter(|&e| e > 0).collect();
        let n = exps.iter().copied().max().unwrap_or(0);
        let ring = backend.level_ring(Level::Finite(n));
        let diag: Vec<Scalar> = exps.iter().map(|&e| ring.pi_pow(e)).collect();
        let rels = Matrix::diagonal(&ring, exps.len(), exps.len(), &diag);
        Ok(FPModule::raw(*backend, Level::Finite(n), exps.len(), drop_zero_columns(&rels)))
    }

    /// `⊕ ℤ/dᵢ` over the discrete backend; `dᵢ = 0` contributes a free summand.
    pub fn from_integers(divisors: &[i64]) -> FPModule {
        let backend = Backend::discrete_integers();
        let ring = Ring::Integers;
        let diag: Vec<Scalar> = divisors.iter().map(|&d| ring.from_i64(d)).collect();
        let rels = Matrix::diagonal(&ring, divisors.len(), divisors.len(), &diag);
        FPModule::raw(backend, Level::Infinite, divisors.len(), drop_zero_columns(&rels))
    }

    pub fn backend(&self) -> &Backend {
        &self.0.backend
    }

    pub fn level(&self) -> Level {
        self.0.level
    }

    pub fn gens(&self) -> usize {
        self.0.gens
    }

    pub fn rels(&self) -> &Matrix {
        &self.0.rels
    }

    pub fn ring(&self) -> Ring {
        self.0.backend.level_ring(self.0.level)
    }

    pub fn same_backend(&self, other: &FPModule) -> Result<()> {
        if self.backend() != other.backend() {
            return Err(Error::BackendMismatch(format!("{} vs {}", self.backend(), other.backend())));
        }
        Ok(())
    }

    /// Relations read at another level: reduced when descending, lifted and
    /// completed by `πⁿ·I` when ascending.
    pub fn relations_in(&self, level: Level) -> Matrix {
        let target = self.0.backend.level_ring(level);
        match (self.0.level, level) {
            (Level::Finite(n), Level::Finite(l)) if l > n => {
                let lifted = self.0.rels.coerce(&target);
                let pi = Matrix::identity(&target, self.gens()).scale(&target.pi_pow(n));
                lifted.hstack(&pi).expect("same rows")
            }
            _ => self.0.rels.coerce(&target),
        }
    }

    /// The same module presented at `level`, which must not be below the
    /// exact annihilation level.
    pub fn at_level(&self, level: Level) -> Result<FPModule> {
        if level < self.exact_level() {
            return Err(Error::LevelError(format!("{} is not killed at level {level}", self.describe())));
        }
        if level == self.level() {
            return Ok(self.clone());
        }
        if level == Level::Infinite {
            return Ok(self.over_base());
        }
        let (small, _, _) = super::morphism::minimize(self);
        let ring = self.0.backend.level_ring(level);
        let rels = small.relations_in(level).coerce(&ring);
        Ok(FPModule::raw(self.0.backend, level, small.gens(), drop_zero_columns(&rels)))
    }

    /// The module read over `Λ`: lifted relations together with `π^level·I`.
    pub fn over_base(&self) -> FPModule {
        let backend = self.0.backend;
        let Level::Finite(n) = self.0.level else { return self.clone() };
        let ring = backend.base_ring();
        let lifted = self.0.rels.coerce(&ring);
        let pi = Matrix::identity(&ring, self.gens()).scale(&backend.base_pi_pow(n));
        let rels = drop_zero_columns(&lifted.hstack(&pi).expect("same rows"));
        FPModule::raw(backend, Level::Infinite, self.gens(), rels)
    }

    pub fn solver(&self) -> &Solver {
        self.0.solver.get_or_init(|| Solver::new(&self.0.rels))
    }

    /// Whether a coordinate vector represents zero.
    pub fn is_zero_element(&self, v: &[Scalar]) -> bool {
        if self.gens() == 0 {
            return true;
        }
        self.solver().contains(v).expect("element of matching length")
    }

    pub fn invariants(&self) -> &Invariants {
        self.0.invariants.get_or_init(|| {
            let ring = self.ring();
            let nf = normal_form(&self.0.rels);
            let free = self.gens() - nf.rank();
            match self.0.level {
                Level::Finite(n) => {
                    let mut exps: Vec<u32> = nf.exponents().into_iter().filter(|&e| e > 0).collect();
                    exps.extend(std::iter::repeat(n).take(if n > 0 { free } else { 0 }));
                    exps.sort_unstable();
                    Invariants::Chain { exponents: exps }
                }
                Level::Infinite => Invariants::Integral {
                    torsion: nf.diag.iter().filter(|d| !ring.is_unit(d)).cloned().collect(),
                    free_rank: free,
                },
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.gens() == 0 || self.invariants().is_zero()
    }

    pub fn is_isomorphic(&self, other: &FPModule) -> bool {
        self.backend() == other.backend() && self.invariants() == other.invariants()
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<Int> {
        match self.invariants() {
            Invariants::Chain { exponents } => {
                let q = match self.backend().kind {
                    crate::coefficients::BackendKind::PowerSeries | crate::coefficients::BackendKind::PAdic => {
                        Int::from(self.backend().prime)
                    }
                    crate::coefficients::BackendKind::DiscreteIntegers => unreachable!(),
                };
                Some(q.pow(exponents.iter().sum()))
            }
            Invariants::Integral { torsion, free_rank } => {
                if *free_rank > 0 {
                    return None;
                }
                Some(torsion.iter().fold(Int::ONE, |acc, d| acc.mul(d.as_int().expect("integer")).abs()))
            }
        }
    }

    /// Least level annihilating the module (`Infinite` over the discrete backend).
    pub fn exact_level(&self) -> Level {
        match self.invariants() {
            Invariants::Chain { exponents } => Level::Finite(exponents.last().copied().unwrap_or(0)),
            Invariants::Integral { .. } => Level::Infinite,
        }
    }

    pub fn to_literal(&self) -> ModuleLiteral {
        ModuleLiteral {
            backend: *self.backend(),
            ann_level: self.level(),
            gens: self.gens(),
            rels: self.rels().to_literal(),
        }
    }

    pub fn describe(&self) -> String {
        self.invariants().describe(self.backend())
    }

    pub(crate) fn ptr_eq(&self, other: &FPModule) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

pub(crate) fn drop_zero_columns(m: &Matrix) -> Matrix {
    let keep: Vec<usize> = (0..m.cols()).filter(|&j| m.column(j).iter().any(|x| !m.ring().is_zero(x))).collect();
    m.select_columns(&keep)
}

impl fmt::Debug for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FPModule({} @ {}: {} gens, rels {})", self.backend(), self.level(), self.gens(), self.rels())
    }
}

impl fmt::Display for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PartialEq for FPModule {
    /// Equality of presentations (not isomorphism).
    fn eq(&self, other: &FPModule) -> bool {
        self.ptr_eq(other)
            || (self.backend() == other.backend()
                && self.level() == other.level()
                && self.gens() == other.gens()
                && self.rels() == other.rels())
    }
}

/// JSON form `{backend, ann_level, gens, rels}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleLiteral {
    pub backend: Backend,
    pub ann_level: Level,
    pub gens: usize,
    pub rels: MatrixLiteral,
}

impl ModuleLiteral {
    pub fn into_module(&self) -> Result<FPModule> {
        let backend = self.backend.validated()?;
        let ring = backend.level_ring(self.ann_level);
        let mut rels = self.rels.into_matrix(&backend)?;
        if rels.cols() == 0 && rels.rows() == 0 {
            rels = Matrix::zeros(&ring, self.gens, 0);
        }
        if *rels.ring() != ring {
            // relations written at another level are read modulo the annihilation level
            rels = rels.coerce(&ring);
        }
        FPModule::new(backend, self.ann_level, self.gens, rels)
    }
}

impl Serialize for FPModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_literal().serialize(s)
    }
}
