use super::complex::{ChainMap, Complex};
use serde::{Deserialize, Serialize};

use crate::coefficients::{Backend, Level, Matrix, MatrixLiteral, Ring, Scalar, Solver};
use crate::contra::{free_contra, ContraTower};
use crate::discrete_mod::{FPModule, ModMorphism};
use crate::duality::ProjContra;
use crate::error::{Error, Result};
use crate::pro_cat::{ring_tower, ProMorphism, Tower};

/// Bounded complex of finite free `Λ`-modules with matrix differentials.
/// Its reductions mod `Iₙ` give the levelwise pictures of complexes of free
/// contramodules and of ring-tower powers.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeComplex {
    backend: Backend,
    lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<Matrix>,
}

/// JSON form `{backend, lo, ranks, diffs}` with differentials over `Λ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FreeComplexLiteral {
    pub backend: Backend,
    #[serde(default)]
    pub lo: i64,
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub diffs: Vec<MatrixLiteral>,
}

impl FreeComplexLiteral {
    pub fn into_complex(&self) -> Result<FreeComplex> {
        let backend = self.backend.validated()?;
        let diffs = self.diffs.iter().map(|m| m.into_matrix(&backend)).collect::<Result<Vec<_>>>()?;
        FreeComplex::new(&backend, self.lo, self.ranks.clone(), diffs)
    }
}

/// The `k`-th free module at `level` (`Λ^k` at the infinite level).
pub(crate) fn free_at(backend: &Backend, level: Level, k: usize) -> FPModule {
    match level {
        Level::Finite(n) => FPModule::free(backend, n, k),
        Level::Infinite if k == 0 => FPModule::zero(backend),
        Level::Infinite => FPModule::raw(*backend, Level::Infinite, k, Matrix::zeros(&backend.base_ring(), k, 0)),
    }
}

impl FreeComplex {
    pub fn new(backend: &Backend, lo: i64, ranks: Vec<usize>, diffs: Vec<Matrix>) -> Result<FreeComplex> {
        if diffs.len() != ranks.len().saturating_sub(1) {
            return Err(Error::ShapeError(format!("{} differentials for {} terms", diffs.len(), ranks.len())));
        }
        let base = backend.base_ring();
        for (j, d) in diffs.iter().enumerate() {
            if d.rows() != ranks[j + 1] || d.cols() != ranks[j] {
                return Err(Error::ShapeError(format!("differential {j} is {}x{}", d.rows(), d.cols())));
            }
            if !d.ring().same_family(&base) {
                return Err(Error::BackendMismatch(format!("differential over {}", d.ring())));
            }
        }
        let diffs: Vec<Matrix> = diffs.iter().map(|d| d.coerce(&base)).collect();
        for j in 1..diffs.len() {
            if !diffs[j].mul(&diffs[j - 1])?.is_zero() {
                return Err(Error::InvalidInput(format!("d∘d is nonzero at degree {}", lo + j as i64 - 1)));
            }
        }
        Ok(FreeComplex { backend: *backend, lo, ranks, diffs })
    }

    pub fn to_literal(&self) -> FreeComplexLiteral {
        FreeComplexLiteral {
            backend: self.backend,
            lo: self.lo,
            ranks: self.ranks.clone(),
            diffs: self.diffs.iter().map(Matrix::to_literal).collect(),
        }
    }

    pub fn zero(backend: &Backend) -> FreeComplex {
        FreeComplex { backend: *backend, lo: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn base_ring(&self) -> Ring {
        self.backend.base_ring()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn span(&self) -> usize {
        self.ranks.len().saturating_sub(1)
    }

    pub fn rank(&self, i: i64) -> usize {
        self.index(i).map_or(0, |j| self.ranks[j])
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.iter().sum()
    }

    fn index(&self, i: i64) -> Option<usize> {
        (i >= self.lo && i <= self.hi()).then(|| (i - self.lo) as usize)
    }

    /// Matrix of `dⁱ` over `Λ`, zero outside the window.
    pub fn diff(&self, i: i64) -> Matrix {
        match self.index(i) {
            Some(j) if j < self.diffs.len() => self.diffs[j].clone(),
            _ => Matrix::zeros(&self.base_ring(), self.rank(i + 1), self.rank(i)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn joint_window(&self, other: &FreeComplex) -> (i64, i64) {
        match (self.ranks.is_empty(), other.ranks.is_empty()) {
            (true, true) => (0, -1),
            (true, false) => (other.lo, other.hi()),
            (false, true) => (self.lo, self.hi()),
            (false, false) => (self.lo.min(other.lo), self.hi().max(other.hi())),
        }
    }

    /// The reduction `C ⊗ R_level`, a complex of free `R_level`-modules.
    pub fn at_level(&self, level: Level) -> Complex {
        let terms: Vec<FPModule> = self.ranks.iter().map(|&k| free_at(&self.backend, level, k)).collect();
        let diffs: Vec<ModMorphism> = self
            .diffs
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let (s, t) = (&terms[j], &terms[j + 1]);
                if s.gens() == 0 || t.gens() == 0 {
                    ModMorphism::zero(s, t)
                } else {
                    ModMorphism::unchecked(s, t, d.coerce(&t.ring())).expect("shapes")
                }
            })
            .collect();
        Complex::new(&self.backend, self.lo, terms, diffs).expect("reductions of complexes are complexes")
    }

    /// Reduction at the `n`-th level ring (`ℤ` itself over the discrete backend).
    pub fn stage(&self, n: u32) -> Complex {
        self.at_level(self.backend.level(n))
    }

    /// `Cⁱ ↦ (C^{−i})^*` with transposed differentials.
    pub fn dual(&self) -> FreeComplex {
        let ranks: Vec<usize> = self.ranks.iter().rev().copied().collect();
        let diffs: Vec<Matrix> = self.diffs.iter().rev().map(Matrix::transpose).collect();
        FreeComplex { backend: self.backend, lo: -self.hi(), ranks, diffs }
    }

    /// `C[k]` with differentials negated for odd `k`.
    pub fn shift(&self, k: i64) -> FreeComplex {
        let diffs = if k % 2 == 0 { self.diffs.clone() } else { self.diffs.iter().map(Matrix::neg).collect() };
        FreeComplex { backend: self.backend, lo: self.lo - k, ranks: self.ranks.clone(), diffs }
    }

    pub fn widened(&self, lo: i64, hi: i64) -> FreeComplex {
        let (lo, hi) = if self.ranks.is_empty() { (lo, hi) } else { (lo.min(self.lo), hi.max(self.hi())) };
        if hi < lo {
            return FreeComplex::zero(&self.backend);
        }
        FreeComplex {
            backend: self.backend,
            lo,
            ranks: (lo..=hi).map(|i| self.rank(i)).collect(),
            diffs: (lo..hi).map(|i| self.diff(i)).collect(),
        }
    }

    pub fn direct_sum(cs: &[FreeComplex]) -> Result<FreeComplex> {
        let Some(first) = cs.first() else {
            return Err(Error::InvalidInput("direct sum of no complexes".into()));
        };
        let backend = first.backend;
        if cs.iter().any(|c| c.backend != backend) {
            return Err(Error::BackendMismatch("summands over different backends".into()));
        }
        let (lo, hi) = cs.iter().filter(|c| !c.ranks.is_empty()).fold((i64::MAX, i64::MIN), |(l, h), c| (l.min(c.lo), h.max(c.hi())));
        if hi < lo {
            return Ok(FreeComplex::zero(&backend));
        }
        let base = backend.base_ring();
        let ranks = (lo..=hi).map(|i| cs.iter().map(|c| c.rank(i)).sum()).collect();
        let diffs = (lo..hi)
            .map(|i| Matrix::block_diag_all(&base, &cs.iter().map(|c| c.diff(i)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        FreeComplex::new(&backend, lo, ranks, diffs)
    }

    /// Conjugates the differentials by invertible changes of basis
    /// `gᵢ` with inverses `hᵢ`: `d'ⁱ = g_{i+1} dⁱ hᵢ`.
    pub fn change_basis(&self, g: &[Matrix], h: &[Matrix]) -> Result<FreeComplex> {
        if g.len() != self.ranks.len() || h.len() != self.ranks.len() {
            return Err(Error::ShapeError("one change of basis per term".into()));
        }
        let diffs = (0..self.diffs.len())
            .map(|j| g[j + 1].mul(&self.diffs[j])?.mul(&h[j]))
            .collect::<Result<Vec<_>>>()?;
        FreeComplex::new(&self.backend, self.lo, self.ranks.clone(), diffs)
    }
}

/// Chain map between free complexes, by `Λ`-matrices.
#[derive(Clone, Debug)]
pub struct FreeChainMap {
    pub src: FreeComplex,
    pub tgt: FreeComplex,
    lo: i64,
    maps: Vec<Matrix>,
}

impl FreeChainMap {
    pub fn new(src: &FreeComplex, tgt: &FreeComplex, f: impl Fn(i64) -> Matrix) -> Result<FreeChainMap> {
        let (lo, hi) = src.joint_window(tgt);
        let base = src.base_ring();
        let maps: Vec<Matrix> = (lo..=hi).map(|i| f(i).coerce(&base)).collect();
        let g = FreeChainMap { src: src.clone(), tgt: tgt.clone(), lo, maps };
        for i in lo..=hi {
            let m = g.component(i);
            if m.rows() != tgt.rank(i) || m.cols() != src.rank(i) {
                return Err(Error::ShapeError(format!("component {i} has the wrong shape")));
            }
        }
        for i in lo - 1..=hi {
            if tgt.diff(i).mul(&g.component(i))? != g.component(i + 1).mul(&src.diff(i))? {
                return Err(Error::InvalidInput(format!("components do not commute at degree {i}")));
            }
        }
        Ok(g)
    }

    pub fn identity(c: &FreeComplex) -> FreeChainMap {
        let base = c.base_ring();
        FreeChainMap::new(c, c, |i| Matrix::identity(&base, c.rank(i))).expect("identity")
    }

    pub fn component(&self, i: i64) -> Matrix {
        let j = i - self.lo;
        if j >= 0 && (j as usize) < self.maps.len() {
            self.maps[j as usize].clone()
        } else {
            Matrix::zeros(&self.src.base_ring(), self.tgt.rank(i), self.src.rank(i))
        }
    }

    pub fn compose(&self, first: &FreeChainMap) -> Result<FreeChainMap> {
        FreeChainMap::new(&first.src, &self.tgt, |i| self.component(i).mul(&first.component(i)).expect("shapes"))
    }

    pub fn sub(&self, other: &FreeChainMap) -> Result<FreeChainMap> {
        FreeChainMap::new(&self.src, &self.tgt, |i| self.component(i).sub(&other.component(i)).expect("shapes"))
    }

    pub fn add(&self, other: &FreeChainMap) -> Result<FreeChainMap> {
        FreeChainMap::new(&self.src, &self.tgt, |i| self.component(i).add(&other.component(i)).expect("shapes"))
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(Matrix::is_zero)
    }

    pub fn at_level(&self, level: Level) -> ChainMap {
        let (a, b) = (self.src.at_level(level), self.tgt.at_level(level));
        ChainMap::unchecked(&a, &b, |i| {
            let (s, t) = (a.term(i), b.term(i));
            if s.gens() == 0 || t.gens() == 0 {
                ModMorphism::zero(&s, &t)
            } else {
                ModMorphism::unchecked(&s, &t, self.component(i).coerce(&t.ring())).expect("shapes")
            }
        })
    }

    pub fn stage(&self, n: u32) -> ChainMap {
        self.at_level(self.src.backend.level(n))
    }

    /// The transposed map `tgt^* → src^*`.
    pub fn dual(&self) -> FreeChainMap {
        let (s, t) = (self.tgt.dual(), self.src.dual());
        FreeChainMap::new(&s, &t, |i| self.component(-i).transpose()).expect("duals of chain maps commute")
    }
}

/// `cone(f)ⁱ = Bⁱ ⊕ A^{i+1}` with `d = [[d_B, f], [0, −d_A]]`.
pub fn free_cone(f: &FreeChainMap) -> Result<FreeComplex> {
    let (a, b) = (&f.src, &f.tgt);
    let a1 = a.shift(1);
    let (lo, hi) = b.joint_window(&a1);
    if hi < lo {
        return Ok(FreeComplex::zero(&a.backend));
    }
    let base = a.base_ring();
    let ranks = (lo..=hi).map(|i| b.rank(i) + a.rank(i + 1)).collect();
    let diffs = (lo..hi)
        .map(|i| {
            let top = b.diff(i).hstack(&f.component(i + 1))?;
            let below = Matrix::zeros(&base, a.rank(i + 2), b.rank(i)).hstack(&a.diff(i + 1).neg())?;
            top.vstack(&below)
        })
        .collect::<Result<Vec<_>>>()?;
    FreeComplex::new(&a.backend, lo, ranks, diffs)
}

/// A free complex read as a complex of free contramodules `ℜ[[X]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContraComplex(pub FreeComplex);

impl ContraComplex {
    pub fn term(&self, i: i64) -> ContraTower {
        free_contra(self.0.backend(), self.0.rank(i))
    }

    pub fn projective(&self, i: i64) -> ProjContra {
        ProjContra::free(self.0.backend(), self.0.rank(i))
    }

    /// The reduction `𝔉•/Iₙ𝔉•`.
    pub fn reduction(&self, n: u32) -> Complex {
        self.0.stage(n)
    }
}

/// A free complex read as a complex of ring-tower powers in `Prod_ω(ℜ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerComplex(pub FreeComplex);

impl TowerComplex {
    pub fn term(&self, i: i64) -> Tower {
        ring_tower(self.0.backend(), self.0.rank(i))
    }

    pub fn diff(&self, i: i64) -> ProMorphism {
        let (s, t) = (self.term(i), self.term(i + 1));
        let m = self.0.diff(i);
        let (s1, t1) = (s.clone(), t.clone());
        ProMorphism::levelwise(&s, &t, move |n| {
            let (a, b) = (s1.level(n), t1.level(n));
            if a.gens() == 0 || b.gens() == 0 {
                ModMorphism::zero(&a, &b)
            } else {
                ModMorphism::unchecked(&a, &b, m.coerce(&b.ring())).expect("shapes")
            }
        })
    }

    pub fn stage(&self, n: u32) -> Complex {
        self.0.stage(n)
    }
}

/// `Tot(A ⊗ B)` with blocks `Aᵖ ⊗ B^q` ordered by `p`, basis `i·rank(B^q) + j`
/// inside a block, and `d = d_A ⊗ 1 + (−1)^p 1 ⊗ d_B`.
pub fn free_tensor(a: &FreeComplex, b: &FreeComplex) -> Result<FreeComplex> {
    let backend = a.backend;
    if b.backend != backend {
        return Err(Error::BackendMismatch("tensoring free complexes over different backends".into()));
    }
    if a.ranks.is_empty() || b.ranks.is_empty() {
        return Ok(FreeComplex::zero(&backend));
    }
    let base = a.base_ring();
    let (lo, hi) = (a.lo + b.lo, a.hi() + b.hi());
    let ps = |m: i64| -> Vec<i64> { (a.lo..=a.hi()).filter(|&p| (b.lo..=b.hi()).contains(&(m - p))).collect() };
    let ranks: Vec<usize> = (lo..=hi).map(|m| ps(m).iter().map(|&p| a.rank(p) * b.rank(m - p)).sum()).collect();
    let diffs = (lo..hi)
        .map(|m| {
            let rows = ranks[(m + 1 - lo) as usize];
            let cols = ranks[(m - lo) as usize];
            let mut d = Matrix::zeros(&base, rows, cols);
            let mut col = 0;
            for p in ps(m) {
                let q = m - p;
                let w = a.rank(p) * b.rank(q);
                let mut row = 0;
                for p2 in ps(m + 1) {
                    let q2 = m + 1 - p2;
                    let h = b.rank(q2) * a.rank(p2);
                    let block = if p2 == p + 1 {
                        Some(a.diff(p).kronecker(&Matrix::identity(&base, b.rank(q)))?)
                    } else if p2 == p {
                        let v = Matrix::identity(&base, a.rank(p)).kronecker(&b.diff(q))?;
                        Some(if p.rem_euclid(2) == 1 { v.neg() } else { v })
                    } else {
                        None
                    };
                    if let Some(block) = block {
                        for r in 0..h {
                            for c in 0..w {
                                d.set(row + r, col + c, block.get(r, c).clone());
                            }
                        }
                    }
                    row += h;
                }
                col += w;
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    FreeComplex::new(&backend, lo, ranks, diffs)
}

/// `Hom^m(A, B) = ⊕ᵢ Mat(B^{i+m} × Aⁱ)` over `Λ`, matrices vectorized
/// column by column, with `D f = d_B f − (−1)^m f d_A`.
pub struct FreeHom {
    pub src: FreeComplex,
    pub tgt: FreeComplex,
}

/// Degreewise matrices `h(i): Aⁱ → B^{i−1}` over a level ring.
#[derive(Clone, Debug)]
pub struct FreeHomotopy {
    pub level: Level,
    pub components: Vec<(i64, Matrix)>,
}

impl FreeHom {
    pub fn new(src: &FreeComplex, tgt: &FreeComplex) -> FreeHom {
        FreeHom { src: src.clone(), tgt: tgt.clone() }
    }

    /// `(i, rows, cols, offset)` for each block of `Hom^m`.
    fn parts(&self, m: i64) -> Vec<(i64, usize, usize, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        if self.src.ranks.is_empty() {
            return out;
        }
        for i in self.src.lo..=self.src.hi() {
            let (r, c) = (self.tgt.rank(i + m), self.src.rank(i));
            if r * c > 0 {
                out.push((i, r, c, off));
                off += r * c;
            }
        }
        out
    }

    pub fn dim(&self, m: i64) -> usize {
        self.parts(m).iter().map(|(_, r, c, _)| r * c).sum()
    }

    pub fn differential(&self, m: i64) -> Matrix {
        let base = self.src.base_ring();
        let (sp, tp) = (self.parts(m), self.parts(m + 1));
        let mut d = Matrix::zeros(&base, self.dim(m + 1), self.dim(m));
        let sign = if m.rem_euclid(2) == 0 { base.from_i64(-1) } else { base.one() };
        for &(i, r, c, so) in &sp {
            for &(j, r2, c2, to) in &tp {
                let block = if j == i {
                    Matrix::identity(&base, c).kronecker(&self.tgt.diff(i + m)).expect("shapes")
                } else if j + 1 == i {
                    self.src.diff(j).transpose().kronecker(&Matrix::identity(&base, r)).expect("shapes").scale(&sign)
                } else {
                    continue;
                };
                for x in 0..r2 * c2 {
                    for y in 0..r * c {
                        d.set(to + x, so + y, block.get(x, y).clone());
                    }
                }
            }
        }
        d
    }

    pub fn vectorize(&self, m: i64, f: impl Fn(i64) -> Matrix) -> Vec<Scalar> {
        let base = self.src.base_ring();
        let mut v = vec![base.zero(); self.dim(m)];
        for (i, r, c, off) in self.parts(m) {
            let x = f(i);
            for b in 0..c {
                for a in 0..r {
                    v[off + b * r + a] = base.coerce(x.get(a, b), x.ring());
                }
            }
        }
        v
    }

    pub fn components(&self, m: i64, v: &[Scalar], ring: &Ring) -> Vec<(i64, Matrix)> {
        self.parts(m)
            .into_iter()
            .map(|(i, r, c, off)| (i, Matrix::from_fn(ring, r, c, |a, b| ring.coerce(&v[off + b * r + a], ring))))
            .collect()
    }

    /// Cycles in `Hom^0` over `Λ`, as columns.
    pub fn chain_map_basis(&self) -> Matrix {
        let d = self.differential(0);
        if d.cols() == 0 {
            return d;
        }
        if d.rows() == 0 {
            return Matrix::identity(&self.src.base_ring(), d.cols());
        }
        Solver::new(&d).kernel()
    }

    pub fn chain_map(&self, v: &[Scalar]) -> Result<FreeChainMap> {
        let base = self.src.base_ring();
        let parts = self.components(0, v, &base);
        FreeChainMap::new(&self.src, &self.tgt, |i| {
            parts
                .iter()
                .find(|(j, _)| *j == i)
                .map(|(_, m)| m.clone())
                .unwrap_or_else(|| Matrix::zeros(&base, self.tgt.rank(i), self.src.rank(i)))
        })
    }
}

/// Solves `f = d h + h d` over the ring at `level` by one linear system.
pub fn free_null_homotopy(f: &FreeChainMap, level: Level) -> Result<Option<FreeHomotopy>> {
    let hom = FreeHom::new(&f.src, &f.tgt);
    let ring = f.src.backend.level_ring(level);
    let x: Vec<Scalar> = hom.vectorize(0, |i| f.component(i)).iter().map(|v| ring.coerce(v, &f.src.base_ring())).collect();
    let d = hom.differential(-1).coerce(&ring);
    let y = if x.is_empty() || x.iter().all(|v| ring.is_zero(v)) {
        vec![ring.zero(); d.cols()]
    } else if d.cols() == 0 {
        return Ok(None);
    } else {
        match Solver::new(&d).solve(&x)? {
            Some(y) => y,
            None => return Ok(None),
        }
    };
    let h = FreeHomotopy { level, components: hom.components(-1, &y, &ring) };
    if !h.verifies(f) {
        return Err(Error::InvalidInput("solved homotopy fails verification".into()));
    }
    Ok(Some(h))
}

impl FreeHomotopy {
    pub fn component(&self, i: i64, f: &FreeChainMap) -> Matrix {
        let ring = self.level_ring(f);
        self.components
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Matrix::zeros(&ring, f.tgt.rank(i - 1), f.src.rank(i)))
    }

    fn level_ring(&self, f: &FreeChainMap) -> Ring {
        f.src.backend.level_ring(self.level)
    }

    /// Whether `f ≡ d h + h d` over the ring of this homotopy.
    pub fn verifies(&self, f: &FreeChainMap) -> bool {
        let ring = self.level_ring(f);
        let (lo, hi) = f.src.joint_window(&f.tgt);
        (lo..=hi).all(|i| {
            let dh = f.tgt.diff(i - 1).coerce(&ring).mul(&self.component(i, f));
            let hd = self.component(i + 1, f).mul(&f.src.diff(i).coerce(&ring));
            match (dh, hd) {
                (Ok(x), Ok(y)) => x.add(&y).map(|s| s == f.component(i).coerce(&ring)).unwrap_or(false),
                _ => false,
            }
        })
    }

    /// The same homotopy read over a lower level.
    pub fn reduce(&self, level: Level, f: &FreeChainMap) -> FreeHomotopy {
        let ring = f.src.backend.level_ring(level);
        FreeHomotopy { level, components: self.components.iter().map(|(i, m)| (*i, m.coerce(&ring))).collect() }
    }
}
