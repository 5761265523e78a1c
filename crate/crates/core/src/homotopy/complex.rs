use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coefficients::{Backend, Matrix, MatrixLiteral};
use crate::discrete_mod::{block_morphism, direct_sum, FPModule, ModMorphism, ModuleLiteral};
use crate::error::{Error, Result};

/// Bounded cochain complex of finitely presented modules, with terms in
/// degrees `lo..=hi` and zero outside.
#[derive(Clone)]
pub struct Complex {
    backend: Backend,
    lo: i64,
    terms: Vec<FPModule>,
    diffs: Vec<ModMorphism>,
}

impl Complex {
    /// `diffs[j]: terms[j] → terms[j+1]`; checks the ends and `d² = 0`.
    pub fn new(backend: &Backend, lo: i64, terms: Vec<FPModule>, diffs: Vec<ModMorphism>) -> Result<Complex> {
        if diffs.len() != terms.len().saturating_sub(1) {
            return Err(Error::ShapeError(format!("{} differentials for {} terms", diffs.len(), terms.len())));
        }
        for t in &terms {
            if t.backend() != backend {
                return Err(Error::BackendMismatch(format!("term over {} in a complex over {backend}", t.backend())));
            }
        }
        for (j, d) in diffs.iter().enumerate() {
            if *d.src() != terms[j] || *d.tgt() != terms[j + 1] {
                return Err(Error::ShapeError(format!("differential {j} does not join consecutive terms")));
            }
        }
        let c = Complex { backend: *backend, lo, terms, diffs };
        for i in c.lo..c.hi() - 1 {
            if !c.diff(i + 1).compose(&c.diff(i))?.is_zero() {
                return Err(Error::InvalidInput(format!("d∘d is nonzero at degree {i}")));
            }
        }
        Ok(c)
    }

    /// Differentials given as matrices, checked for well-definedness.
    pub fn from_matrices(backend: &Backend, lo: i64, terms: Vec<FPModule>, mats: Vec<Matrix>) -> Result<Complex> {
        if mats.len() != terms.len().saturating_sub(1) {
            return Err(Error::ShapeError(format!("{} differentials for {} terms", mats.len(), terms.len())));
        }
        let diffs = mats
            .into_iter()
            .enumerate()
            .map(|(j, m)| ModMorphism::new(&terms[j], &terms[j + 1], m))
            .collect::<Result<Vec<_>>>()?;
        Complex::new(backend, lo, terms, diffs)
    }

    pub fn zero(backend: &Backend) -> Complex {
        Complex { backend: *backend, lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    pub fn concentrated(m: &FPModule, degree: i64) -> Complex {
        Complex { backend: *m.backend(), lo: degree, terms: vec![m.clone()], diffs: Vec::new() }
    }

    /// A two-term complex `src → tgt` with `src` in degree `degree`.
    pub fn two_term(f: &ModMorphism, degree: i64) -> Complex {
        Complex { backend: *f.src().backend(), lo: degree, terms: vec![f.src().clone(), f.tgt().clone()], diffs: vec![f.clone()] }
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Last degree of the window; `lo − 1` for the empty window.
    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn span(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    pub fn term(&self, i: i64) -> FPModule {
        self.index(i).map_or_else(|| FPModule::zero(&self.backend), |j| self.terms[j].clone())
    }

    pub fn diff(&self, i: i64) -> ModMorphism {
        match self.index(i) {
            Some(j) if j < self.diffs.len() => self.diffs[j].clone(),
            _ => ModMorphism::zero(&self.term(i), &self.term(i + 1)),
        }
    }

    fn index(&self, i: i64) -> Option<usize> {
        (i >= self.lo && i <= self.hi()).then(|| (i - self.lo) as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(FPModule::is_zero)
    }

    /// `C[k]ⁱ = C^{i+k}` with differentials negated for odd `k`.
    pub fn shift(&self, k: i64) -> Complex {
        let diffs = if k % 2 == 0 { self.diffs.clone() } else { self.diffs.iter().map(ModMorphism::neg).collect() };
        Complex { backend: self.backend, lo: self.lo - k, terms: self.terms.clone(), diffs }
    }

    /// `ker dⁱ / im d^{i−1}`.
    pub fn cohomology(&self, i: i64) -> FPModule {
        self.cohomology_data(i).module
    }

    /// Cohomology with the cycles, their inclusion and the quotient map.
    pub fn cohomology_data(&self, i: i64) -> Cohomology {
        let (cycles, inclusion) = self.diff(i).kernel();
        if cycles.gens() == 0 {
            let z = FPModule::zero(&self.backend);
            return Cohomology { projection: ModMorphism::zero(&cycles, &z), module: z, cycles, inclusion };
        }
        let into = inclusion.lift(&self.diff(i - 1)).expect("boundaries are cycles");
        let (module, projection) = into.cokernel();
        Cohomology { module, cycles, inclusion, projection }
    }

    /// Every term read over `Λ`, with the differentials lifted.
    pub fn over_base(&self) -> Complex {
        let terms: Vec<FPModule> = self.terms.iter().map(FPModule::over_base).collect();
        let ring = self.backend.base_ring();
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(j, d)| ModMorphism::unchecked(&terms[j], &terms[j + 1], d.map().coerce(&ring)).expect("shapes"))
            .collect();
        Complex { backend: self.backend, lo: self.lo, terms, diffs }
    }

    /// Largest annihilation level among the terms (`Infinite` over ℤ).
    pub fn level(&self) -> crate::coefficients::Level {
        let base = self.backend.level(0);
        self.terms.iter().map(FPModule::exact_level).fold(base, std::cmp::Ord::max)
    }

    /// First degree with nonzero cohomology.
    pub fn first_nonacyclic_degree(&self) -> Option<i64> {
        (self.lo..=self.hi()).find(|&i| !self.cohomology(i).is_zero())
    }

    pub fn is_acyclic(&self) -> bool {
        self.first_nonacyclic_degree().is_none()
    }

    /// Window covering both complexes.
    pub fn joint_window(&self, other: &Complex) -> (i64, i64) {
        match (self.terms.is_empty(), other.terms.is_empty()) {
            (true, true) => (0, -1),
            (true, false) => (other.lo, other.hi()),
            (false, true) => (self.lo, self.hi()),
            (false, false) => (self.lo.min(other.lo), self.hi().max(other.hi())),
        }
    }

    /// The same complex with its window widened to `lo..=hi` by zero terms.
    pub fn widened(&self, lo: i64, hi: i64) -> Complex {
        let (lo, hi) = if self.terms.is_empty() { (lo, hi) } else { (lo.min(self.lo), hi.max(self.hi())) };
        if hi < lo {
            return Complex::zero(&self.backend);
        }
        let terms: Vec<FPModule> = (lo..=hi).map(|i| self.term(i)).collect();
        let diffs: Vec<ModMorphism> = (lo..hi).map(|i| self.diff(i)).collect();
        Complex { backend: self.backend, lo, terms, diffs }
    }

    /// Drops zero-generator terms at both ends of the window.
    pub fn trimmed(&self) -> Complex {
        let nz: Vec<i64> = (self.lo..=self.hi()).filter(|&i| self.term(i).gens() > 0).collect();
        match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => self.window(a, b),
            _ => Complex::zero(&self.backend),
        }
    }

    fn window(&self, lo: i64, hi: i64) -> Complex {
        let terms: Vec<FPModule> = (lo..=hi).map(|i| self.term(i)).collect();
        let diffs: Vec<ModMorphism> = (lo..hi).map(|i| self.diff(i)).collect();
        Complex { backend: self.backend, lo, terms, diffs }
    }

    /// Termwise direct sum with injections and projections.
    pub fn direct_sum(cs: &[Complex]) -> Result<(Complex, Vec<ChainMap>, Vec<ChainMap>)> {
        let Some(first) = cs.first() else {
            return Err(Error::InvalidInput("direct sum of no complexes".into()));
        };
        let backend = first.backend;
        if cs.iter().any(|c| c.backend != backend) {
            return Err(Error::BackendMismatch("summands over different backends".into()));
        }
        let (lo, hi) = cs.iter().fold((0, -1), |(l, h), c| {
            if c.terms.is_empty() {
                (l, h)
            } else if h < l {
                (c.lo, c.hi())
            } else {
                (l.min(c.lo), h.max(c.hi()))
            }
        });
        if hi < lo {
            let z = Complex::zero(&backend);
            let maps = cs.iter().map(|c| ChainMap::zero(c, &z)).collect::<Vec<_>>();
            let back = cs.iter().map(|c| ChainMap::zero(&z, c)).collect();
            return Ok((z, maps, back));
        }
        let sums = (lo..=hi)
            .map(|i| direct_sum(&cs.iter().map(|c| c.term(i)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let terms: Vec<FPModule> = sums.iter().map(|s| s.0.clone()).collect();
        let diffs = (lo..hi)
            .map(|i| {
                let j = (i - lo) as usize;
                let ring = terms[j + 1].ring();
                let blocks: Vec<Matrix> = cs.iter().map(|c| c.diff(i).map().coerce(&ring)).collect();
                ModMorphism::unchecked(&terms[j], &terms[j + 1], Matrix::block_diag_all(&ring, &blocks)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let total = Complex { backend, lo, terms, diffs };
        let inj = (0..cs.len())
            .map(|n| ChainMap::from_fn(&cs[n], &total, |i| sums[(i - lo) as usize].1[n].clone()))
            .collect::<Result<Vec<_>>>()?;
        let proj = (0..cs.len())
            .map(|n| ChainMap::from_fn(&total, &cs[n], |i| sums[(i - lo) as usize].2[n].clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok((total, inj, proj))
    }

    pub fn to_literal(&self) -> ComplexLiteral {
        ComplexLiteral {
            backend: self.backend,
            lo: self.lo,
            terms: self.terms.iter().map(FPModule::to_literal).collect(),
            diffs: self.diffs.iter().map(|d| d.map().to_literal()).collect(),
        }
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex[{}..{}](", self.lo, self.hi())?;
        for (j, t) in self.terms.iter().enumerate() {
            if j > 0 {
                write!(f, " → ")?;
            }
            write!(f, "{}", t.describe())?;
        }
        write!(f, ")")
    }
}

/// `Hⁱ = Zⁱ / Bⁱ` with `Zⁱ → Cⁱ` and `Zⁱ → Hⁱ`.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub module: FPModule,
    pub cycles: FPModule,
    pub inclusion: ModMorphism,
    pub projection: ModMorphism,
}

/// The map `Hⁱ(A) → Hⁱ(B)` induced by a chain map.
pub fn induced_map(f: &ChainMap, i: i64, ha: &Cohomology, hb: &Cohomology) -> Result<ModMorphism> {
    let on_cycles = f.component(i).compose(&ha.inclusion)?;
    let into = if hb.cycles.gens() == 0 {
        ModMorphism::zero(&ha.cycles, &hb.cycles)
    } else {
        hb.inclusion.lift(&on_cycles).ok_or_else(|| Error::InvalidInput("chain map does not preserve cycles".into()))?
    };
    let down = hb.projection.compose(&into)?;
    if ha.module.gens() == 0 {
        return Ok(ModMorphism::zero(&ha.module, &hb.module));
    }
    ha.projection.descend(&down).ok_or_else(|| Error::InvalidInput("chain map does not preserve boundaries".into()))
}

/// Degreewise morphisms commuting with the differentials.
#[derive(Clone, Debug)]
pub struct ChainMap {
    src: Complex,
    tgt: Complex,
    lo: i64,
    maps: Vec<ModMorphism>,
}

impl ChainMap {
    /// Components over the joint window; checks ends and commutation.
    pub fn new(src: &Complex, tgt: &Complex, lo: i64, maps: Vec<ModMorphism>) -> Result<ChainMap> {
        let f = ChainMap { src: src.clone(), tgt: tgt.clone(), lo, maps };
        let (a, b) = src.joint_window(tgt);
        for i in a..=b {
            let c = f.component(i);
            if *c.src() != src.term(i) || *c.tgt() != tgt.term(i) {
                return Err(Error::ShapeError(format!("component {i} has the wrong ends")));
            }
        }
        if !f.commutes() {
            return Err(Error::InvalidInput("components do not commute with the differentials".into()));
        }
        Ok(f)
    }

    pub fn from_fn(src: &Complex, tgt: &Complex, f: impl Fn(i64) -> ModMorphism) -> Result<ChainMap> {
        let (a, b) = src.joint_window(tgt);
        ChainMap::new(src, tgt, a, (a..=b).map(f).collect())
    }

    pub(crate) fn unchecked(src: &Complex, tgt: &Complex, f: impl Fn(i64) -> ModMorphism) -> ChainMap {
        let (a, b) = src.joint_window(tgt);
        ChainMap { src: src.clone(), tgt: tgt.clone(), lo: a, maps: (a..=b).map(f).collect() }
    }

    pub fn identity(c: &Complex) -> ChainMap {
        ChainMap::unchecked(c, c, |i| ModMorphism::identity(&c.term(i)))
    }

    pub fn zero(src: &Complex, tgt: &Complex) -> ChainMap {
        ChainMap::unchecked(src, tgt, |i| ModMorphism::zero(&src.term(i), &tgt.term(i)))
    }

    pub fn src(&self) -> &Complex {
        &self.src
    }

    pub fn tgt(&self) -> &Complex {
        &self.tgt
    }

    pub fn component(&self, i: i64) -> ModMorphism {
        let j = i - self.lo;
        if j >= 0 && (j as usize) < self.maps.len() {
            self.maps[j as usize].clone()
        } else {
            ModMorphism::zero(&self.src.term(i), &self.tgt.term(i))
        }
    }

    pub fn commutes(&self) -> bool {
        let (a, b) = self.src.joint_window(&self.tgt);
        (a - 1..=b).all(|i| {
            let l = self.tgt.diff(i).compose(&self.component(i));
            let r = self.component(i + 1).compose(&self.src.diff(i));
            matches!((l, r), (Ok(l), Ok(r)) if l.equals(&r))
        })
    }

    pub fn compose(&self, first: &ChainMap) -> Result<ChainMap> {
        let (lo, hi) = first.src.joint_window(&self.tgt);
        let maps = (lo..=hi).map(|i| self.component(i).compose(&first.component(i))).collect::<Result<Vec<_>>>()?;
        Ok(ChainMap { src: first.src.clone(), tgt: self.tgt.clone(), lo, maps })
    }

    fn zip(&self, other: &ChainMap, op: impl Fn(&ModMorphism, &ModMorphism) -> Result<ModMorphism>) -> Result<ChainMap> {
        let (a, b) = self.src.joint_window(&self.tgt);
        let maps = (a..=b).map(|i| op(&self.component(i), &other.component(i))).collect::<Result<Vec<_>>>()?;
        Ok(ChainMap { src: self.src.clone(), tgt: self.tgt.clone(), lo: a, maps })
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        self.zip(other, |f, g| f.add(g))
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        self.zip(other, |f, g| f.sub(g))
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap { src: self.src.clone(), tgt: self.tgt.clone(), lo: self.lo, maps: self.maps.iter().map(ModMorphism::neg).collect() }
    }

    pub fn is_zero(&self) -> bool {
        let (a, b) = self.src.joint_window(&self.tgt);
        (a..=b).all(|i| self.component(i).is_zero())
    }

    pub fn equals(&self, other: &ChainMap) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// `f[k]` between the shifted complexes.
    pub fn shift(&self, k: i64) -> ChainMap {
        let (src, tgt) = (self.src.shift(k), self.tgt.shift(k));
        ChainMap::unchecked(&src, &tgt, |i| self.component(i + k))
    }

    pub fn is_quasi_isomorphism(&self) -> bool {
        cone(self).map(|c| c.is_acyclic()).unwrap_or(false)
    }
}

/// `cone(f)ⁱ = Bⁱ ⊕ A^{i+1}` with `d = [[d_B, f], [0, −d_A]]`.
pub fn cone(f: &ChainMap) -> Result<Complex> {
    Ok(cone_with_maps(f)?.cone)
}

/// The cone with its inclusion `B → cone(f)` and projection `cone(f) → A[1]`.
pub struct Cone {
    pub cone: Complex,
    pub inclusion: ChainMap,
    pub projection: ChainMap,
}

pub fn cone_with_maps(f: &ChainMap) -> Result<Cone> {
    let (a, b) = (&f.src, &f.tgt);
    let backend = a.backend;
    let (lo, hi) = b.joint_window(&a.shift(1));
    if hi < lo {
        let z = Complex::zero(&backend);
        return Ok(Cone { inclusion: ChainMap::zero(b, &z), projection: ChainMap::zero(&z, &a.shift(1)), cone: z });
    }
    let sums = (lo..=hi).map(|i| direct_sum(&[b.term(i), a.term(i + 1)])).collect::<Result<Vec<_>>>()?;
    let terms: Vec<FPModule> = sums.iter().map(|s| s.0.clone()).collect();
    let diffs = (lo..hi)
        .map(|i| {
            let j = (i - lo) as usize;
            let ring = terms[j + 1].ring();
            let below = Matrix::zeros(&ring, a.term(i + 2).gens(), b.term(i).gens());
            let blocks = vec![
                vec![b.diff(i).map().clone(), f.component(i + 1).map().clone()],
                vec![below, a.diff(i + 1).neg().map().clone()],
            ];
            block_morphism(&terms[j], &terms[j + 1], &blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    let cone = Complex { backend, lo, terms, diffs };
    let a1 = a.shift(1);
    let inclusion = ChainMap::unchecked(b, &cone, |i| match i - lo {
        j if j >= 0 && j < sums.len() as i64 => sums[j as usize].1[0].clone(),
        _ => ModMorphism::zero(&b.term(i), &cone.term(i)),
    });
    let projection = ChainMap::unchecked(&cone, &a1, |i| match i - lo {
        j if j >= 0 && j < sums.len() as i64 => sums[j as usize].2[1].clone(),
        _ => ModMorphism::zero(&cone.term(i), &a1.term(i)),
    });
    Ok(Cone { cone, inclusion, projection })
}

/// `σ_{≥n} C`: the terms in degrees `≥ n`.
pub fn silly_truncate(c: &Complex, n: i64) -> Complex {
    if n <= c.lo {
        return c.clone();
    }
    if n > c.hi() {
        return Complex::zero(&c.backend);
    }
    c.window(n, c.hi())
}

/// The subcomplex inclusion `σ_{≥n} C → C`.
pub fn silly_inclusion(c: &Complex, n: i64) -> ChainMap {
    let s = silly_truncate(c, n);
    ChainMap::unchecked(&s, c, |i| {
        if i >= n {
            ModMorphism::identity(&c.term(i)).with_ends(&s.term(i), &c.term(i))
        } else {
            ModMorphism::zero(&s.term(i), &c.term(i))
        }
    })
}

/// `τ_{≥n} C`: `coker(d^{n−1})` in degree `n`, then the terms above.
pub fn canonical_truncate_ge(c: &Complex, n: i64) -> Complex {
    canonical_with_projection(c, n).0
}

/// The quotient map `C → τ_{≥n} C`.
pub fn canonical_projection(c: &Complex, n: i64) -> ChainMap {
    canonical_with_projection(c, n).1
}

fn canonical_with_projection(c: &Complex, n: i64) -> (Complex, ChainMap) {
    if n <= c.lo {
        return (c.clone(), ChainMap::identity(c));
    }
    if n > c.hi() {
        let z = Complex::zero(&c.backend);
        return (z.clone(), ChainMap::zero(c, &z));
    }
    let (q, proj) = c.diff(n - 1).cokernel();
    let mut terms = vec![q.clone()];
    terms.extend((n + 1..=c.hi()).map(|i| c.term(i)));
    let mut diffs = Vec::new();
    if n < c.hi() {
        diffs.push(proj.descend(&c.diff(n)).expect("d vanishes on boundaries"));
        diffs.extend((n + 1..c.hi()).map(|i| c.diff(i)));
    }
    let t = Complex { backend: c.backend, lo: n, terms, diffs };
    let p = ChainMap::unchecked(c, &t, |i| {
        if i < n {
            ModMorphism::zero(&c.term(i), &t.term(i))
        } else if i == n {
            proj.clone()
        } else {
            ModMorphism::identity(&c.term(i))
        }
    });
    (t, p)
}

/// JSON form `{backend, lo, terms, diffs}` with `diffs[j]` the matrix of
/// the differential out of `terms[j]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexLiteral {
    pub backend: Backend,
    #[serde(default)]
    pub lo: i64,
    #[serde(default)]
    pub terms: Vec<ModuleLiteral>,
    #[serde(default)]
    pub diffs: Vec<MatrixLiteral>,
}

impl ComplexLiteral {
    pub fn into_complex(&self) -> Result<Complex> {
        let backend = self.backend.validated()?;
        let terms = self.terms.iter().map(ModuleLiteral::into_module).collect::<Result<Vec<_>>>()?;
        let mats = self.diffs.iter().map(|m| m.into_matrix(&backend)).collect::<Result<Vec<_>>>()?;
        Complex::from_matrices(&backend, self.lo, terms, mats)
    }
}
