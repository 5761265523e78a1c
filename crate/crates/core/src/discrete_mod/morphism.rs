use std::fmt;

use serde::{Deserialize, Serialize};

use super::module::{drop_zero_columns, FPModule, ModuleLiteral};
use crate::coefficients::{normal_form, Level, Matrix, MatrixLiteral, Scalar, Solver};
use crate::error::{Error, Result};

/// Homomorphism given by a `tgt.gens × src.gens` matrix over the target's
/// level ring, read modulo the target relations.
#[derive(Clone)]
pub struct ModMorphism {
    src: FPModule,
    tgt: FPModule,
    map: Matrix,
}

impl ModMorphism {
    /// Builds a morphism and verifies that relations map to relations.
    pub fn new(src: &FPModule, tgt: &FPModule, map: Matrix) -> Result<ModMorphism> {
        let f = ModMorphism::unchecked(src, tgt, map)?;
        if !f.is_well_defined() {
            return Err(Error::InvalidInput("matrix does not respect the source relations".into()));
        }
        Ok(f)
    }

    /// Builds a morphism without the well-definedness check; the matrix is
    /// moved into the target's level ring.
    pub fn unchecked(src: &FPModule, tgt: &FPModule, map: Matrix) -> Result<ModMorphism> {
        src.same_backend(tgt)?;
        if map.rows() != tgt.gens() || map.cols() != src.gens() {
            return Err(Error::ShapeError(format!(
                "{}x{} matrix for a map from {} to {} generators",
                map.rows(),
                map.cols(),
                src.gens(),
                tgt.gens()
            )));
        }
        if !map.ring().same_family(&tgt.ring()) {
            return Err(Error::BackendMismatch(format!("{} entries for {}", map.ring(), tgt.ring())));
        }
        let map = map.coerce(&tgt.ring());
        Ok(ModMorphism { src: src.clone(), tgt: tgt.clone(), map })
    }

    pub fn identity(m: &FPModule) -> ModMorphism {
        ModMorphism { src: m.clone(), tgt: m.clone(), map: Matrix::identity(&m.ring(), m.gens()) }
    }

    pub fn zero(src: &FPModule, tgt: &FPModule) -> ModMorphism {
        ModMorphism { src: src.clone(), tgt: tgt.clone(), map: Matrix::zeros(&tgt.ring(), tgt.gens(), src.gens()) }
    }

    /// Multiplication by a scalar of the target ring on `M → M`.
    pub fn scalar(m: &FPModule, c: &Scalar) -> ModMorphism {
        let ring = m.ring();
        ModMorphism { src: m.clone(), tgt: m.clone(), map: Matrix::identity(&ring, m.gens()).scale(c) }
    }

    pub fn src(&self) -> &FPModule {
        &self.src
    }

    pub fn tgt(&self) -> &FPModule {
        &self.tgt
    }

    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn is_well_defined(&self) -> bool {
        let rels = self.src.relations_in(self.tgt.level());
        match self.map.mul(&rels) {
            Ok(img) => (0..img.cols()).all(|j| self.tgt.is_zero_element(&img.column(j))),
            Err(_) => false,
        }
    }

    pub fn compose(&self, first: &ModMorphism) -> Result<ModMorphism> {
        if first.tgt != self.src && !first.tgt.is_same_presentation(&self.src) {
            return Err(Error::ShapeError("composing morphisms with mismatched ends".into()));
        }
        let ring = self.tgt.ring();
        let inner = first.map.coerce(&ring);
        Ok(ModMorphism { src: first.src.clone(), tgt: self.tgt.clone(), map: self.map.mul(&inner)? })
    }

    fn check_parallel(&self, other: &ModMorphism) -> Result<()> {
        if !self.src.is_same_presentation(&other.src) || !self.tgt.is_same_presentation(&other.tgt) {
            return Err(Error::ShapeError("morphisms are not parallel".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModMorphism) -> Result<ModMorphism> {
        self.check_parallel(other)?;
        Ok(ModMorphism { src: self.src.clone(), tgt: self.tgt.clone(), map: self.map.add(&other.map)? })
    }

    pub fn neg(&self) -> ModMorphism {
        ModMorphism { src: self.src.clone(), tgt: self.tgt.clone(), map: self.map.neg() }
    }

    pub fn sub(&self, other: &ModMorphism) -> Result<ModMorphism> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> ModMorphism {
        ModMorphism { src: self.src.clone(), tgt: self.tgt.clone(), map: self.map.scale(c) }
    }

    /// Image of a coordinate vector of the source.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let ring = self.tgt.ring();
        let v: Vec<Scalar> = v.iter().map(|x| ring.canonical(x)).collect();
        self.map.mul_vec(&v)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.map.cols()).all(|j| self.tgt.is_zero_element(&self.map.column(j)))
    }

    /// Equality modulo the target relations.
    pub fn equals(&self, other: &ModMorphism) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Common working level for kernels and factorizations.
    fn work_level(&self) -> Level {
        self.src.level().max(self.tgt.level())
    }

    /// Kernel with its inclusion.
    pub fn kernel(&self) -> (FPModule, ModMorphism) {
        let m = &self.src;
        if m.gens() == 0 {
            return (m.clone(), ModMorphism::identity(m));
        }
        let level = self.work_level();
        let ring = m.backend().level_ring(level);
        let a = self.map.coerce(&ring);
        let rel_n = self.tgt.relations_in(level);
        let big = a.hstack(&rel_n).expect("rows agree");
        let ker = Solver::new(&big).kernel();
        let x = ker.block(0, m.gens(), 0, ker.cols());
        let x = drop_zero_columns(&x.coerce(&m.ring()));
        submodule(m, &x)
    }

    pub fn cokernel(&self) -> (FPModule, ModMorphism) {
        let n = &self.tgt;
        let rels = n.rels().hstack(&self.map).expect("rows agree");
        let c = FPModule::raw(*n.backend(), n.level(), n.gens(), drop_zero_columns(&rels));
        let proj = ModMorphism { src: n.clone(), tgt: c.clone(), map: Matrix::identity(&n.ring(), n.gens()) };
        let (cm, to, _) = minimize(&c);
        (cm, to.compose(&proj).expect("composable"))
    }

    /// Image as a subobject of the target, with the factorization `src → im`.
    pub fn image(&self) -> (FPModule, ModMorphism, ModMorphism) {
        let n = &self.tgt;
        let x = drop_zero_columns(&self.map);
        let (im, incl) = submodule(n, &x);
        let epi = incl.factor_through_mono(self).expect("f factors through its image");
        (im, epi, incl)
    }

    /// Some `h` with `self ∘ h = f`, when the source of `f` is free or
    /// `self` is a monomorphism (otherwise the first solution found is
    /// returned only if it is well defined).
    pub fn lift(&self, f: &ModMorphism) -> Option<ModMorphism> {
        let level = self.work_level().max(f.src.level()).max(f.tgt.level());
        let ring = self.tgt.backend().level_ring(level);
        let g = self.map.coerce(&ring);
        let rel_c = self.tgt.relations_in(level);
        let big = g.hstack(&rel_c).ok()?;
        let solver = Solver::new(&big);
        let fm = f.map.coerce(&ring);
        let sol = solver.solve_matrix(&fm).ok()??;
        let h = sol.block(0, self.src.gens(), 0, sol.cols());
        let h = ModMorphism::unchecked(&f.src, &self.src, h).ok()?;
        h.is_well_defined().then_some(h)
    }

    /// For an epimorphism `self: X → Y` and `g: X → Z` vanishing on its
    /// kernel, the induced `h: Y → Z` with `h ∘ self = g`.
    pub fn descend(&self, g: &ModMorphism) -> Option<ModMorphism> {
        let y = &self.tgt;
        let level = self.work_level();
        let ring = y.backend().level_ring(level);
        let big = self.map.coerce(&ring).hstack(&y.relations_in(level)).ok()?;
        let solver = Solver::new(&big);
        let mut pre = Vec::with_capacity(y.gens());
        for j in 0..y.gens() {
            let e: Vec<Scalar> = (0..y.gens()).map(|i| if i == j { ring.one() } else { ring.zero() }).collect();
            let x = solver.solve(&e).ok()??;
            pre.push(x[..self.src.gens()].to_vec());
        }
        let zring = g.tgt.ring();
        let lift = Matrix::from_fn(&zring, self.src.gens(), y.gens(), |i, j| zring.coerce(&pre[j][i], &ring));
        let h = ModMorphism::unchecked(y, &g.tgt, g.map.mul(&lift).ok()?).ok()?;
        (h.is_well_defined() && h.compose(self).ok()?.equals(g)).then_some(h)
    }

    /// Same morphism with source and target replaced by equal presentations.
    pub fn with_ends(&self, src: &FPModule, tgt: &FPModule) -> ModMorphism {
        debug_assert!(src.gens() == self.src.gens() && tgt.gens() == self.tgt.gens());
        ModMorphism { src: src.clone(), tgt: tgt.clone(), map: self.map.coerce(&tgt.ring()) }
    }

    pub fn factor_through_mono(&self, f: &ModMorphism) -> Option<ModMorphism> {
        self.lift(f)
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().0.is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().0.is_zero()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn to_literal(&self) -> MorphismLiteral {
        MorphismLiteral { src: self.src.to_literal(), tgt: self.tgt.to_literal(), map: self.map.to_literal() }
    }
}

impl FPModule {
    pub(crate) fn is_same_presentation(&self, other: &FPModule) -> bool {
        self == other
    }
}

/// The submodule generated by the columns of `x` (coordinates in `m`),
/// minimized, with its inclusion.
pub fn submodule(m: &FPModule, x: &Matrix) -> (FPModule, ModMorphism) {
    let ring = m.ring();
    let x = x.coerce(&ring);
    let k = x.cols();
    if k == 0 {
        let z = FPModule::zero(m.backend());
        return (z.clone(), ModMorphism::zero(&z, m));
    }
    let big = x.hstack(m.rels()).expect("rows agree");
    let ker = Solver::new(&big).kernel();
    let rels = drop_zero_columns(&ker.block(0, k, 0, ker.cols()));
    let sub = FPModule::raw(*m.backend(), m.level(), k, rels);
    let incl = ModMorphism { src: sub.clone(), tgt: m.clone(), map: x };
    let (small, _, back) = minimize(&sub);
    let incl = incl.compose(&back).expect("composable");
    (small, incl)
}

/// Diagonal presentation at the exact annihilation level, with mutually
/// inverse isomorphisms `m → small` and `small → m`.
pub fn minimize(m: &FPModule) -> (FPModule, ModMorphism, ModMorphism) {
    let ring = m.ring();
    let backend = *m.backend();
    let nf = normal_form(m.rels());
    let rank = nf.rank();
    let mut keep = Vec::new();
    let mut diag = Vec::new();
    for i in 0..m.gens() {
        if i < rank {
            if !ring.is_unit(&nf.diag[i]) {
                keep.push(i);
                diag.push(nf.diag[i].clone());
            }
        } else if !(ring.level() == Some(0)) {
            keep.push(i);
            diag.push(ring.zero());
        }
    }
    let level = match m.level() {
        Level::Finite(n) => Level::Finite(
            diag.iter().map(|d| ring.valuation(d).unwrap_or(n)).max().unwrap_or(0),
        ),
        Level::Infinite => Level::Infinite,
    };
    let small_ring = backend.level_ring(level);
    let g = keep.len();
    let rels = Matrix::diagonal(&small_ring, g, g, &diag.iter().map(|d| small_ring.coerce(d, &ring)).collect::<Vec<_>>());
    let small = if g == 0 { FPModule::zero(&backend) } else { FPModule::raw(backend, level, g, drop_zero_columns(&rels)) };
    let to = nf.u.select_rows(&keep).coerce(&small.ring());
    let from = nf.u_inv.select_columns(&keep);
    let to = ModMorphism { src: m.clone(), tgt: small.clone(), map: to };
    let from = ModMorphism { src: small.clone(), tgt: m.clone(), map: from };
    (small, to, from)
}

/// Direct sum `⊕ mᵢ` with injections and projections.
pub fn direct_sum(ms: &[FPModule]) -> Result<(FPModule, Vec<ModMorphism>, Vec<ModMorphism>)> {
    let Some(first) = ms.first() else {
        return Err(Error::InvalidInput("direct sum of an empty list needs a backend".into()));
    };
    for m in ms {
        first.same_backend(m)?;
    }
    let backend = *first.backend();
    let level = ms.iter().map(FPModule::level).max().unwrap();
    let ring = backend.level_ring(level);
    let blocks: Vec<Matrix> = ms.iter().map(|m| m.relations_in(level)).collect();
    let gens: usize = ms.iter().map(FPModule::gens).sum();
    let rels = drop_zero_columns(&Matrix::block_diag_all(&ring, &blocks)?);
    let sum = if gens == 0 { FPModule::zero(&backend) } else { FPModule::raw(backend, level, gens, rels) };
    let mut inj = Vec::new();
    let mut proj = Vec::new();
    let mut offset = 0;
    for m in ms {
        let g = m.gens();
        let i = Matrix::from_fn(&ring, gens, g, |r, c| if r == offset + c { ring.one() } else { ring.zero() });
        let p = Matrix::from_fn(&m.ring(), g, gens, |r, c| if c == offset + r { m.ring().one() } else { m.ring().zero() });
        inj.push(ModMorphism { src: m.clone(), tgt: sum.clone(), map: i.coerce(&sum.ring()) });
        proj.push(ModMorphism { src: sum.clone(), tgt: m.clone(), map: p });
        offset += g;
    }
    Ok((sum, inj, proj))
}

/// Block-diagonal sum of morphisms between the given direct sums.
pub fn sum_map(src: &FPModule, tgt: &FPModule, parts: &[ModMorphism]) -> Result<ModMorphism> {
    let ring = tgt.ring();
    let blocks: Vec<Matrix> = parts.iter().map(|f| f.map().coerce(&ring)).collect();
    ModMorphism::unchecked(src, tgt, Matrix::block_diag_all(&ring, &blocks)?)
}

/// Assembles a morphism `⊕ Aⱼ → ⊕ Bᵢ` from its blocks `blocks[i][j]: Aⱼ → Bᵢ`.
pub fn block_morphism(src: &FPModule, tgt: &FPModule, blocks: &[Vec<Matrix>]) -> Result<ModMorphism> {
    let ring = tgt.ring();
    let rows: Vec<Matrix> = blocks
        .iter()
        .map(|row| {
            let r = row.first().map_or(0, Matrix::rows);
            let coerced: Vec<Matrix> = row.iter().map(|b| b.coerce(&ring)).collect();
            Matrix::hstack_all(&ring, r, &coerced)
        })
        .collect::<Result<_>>()?;
    ModMorphism::unchecked(src, tgt, Matrix::vstack_all(&ring, src.gens(), &rows)?)
}

impl fmt::Debug for ModMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModMorphism({:?} -> {:?}: {})", self.src, self.tgt, self.map)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorphismLiteral {
    pub src: ModuleLiteral,
    pub tgt: ModuleLiteral,
    pub map: MatrixLiteral,
}

impl MorphismLiteral {
    pub fn into_morphism(&self) -> Result<ModMorphism> {
        let src = self.src.into_module()?;
        let tgt = self.tgt.into_module()?;
        let map = self.map.into_matrix(tgt.backend())?;
        ModMorphism::new(&src, &tgt, map)
    }
}

impl Serialize for ModMorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_literal().serialize(s)
    }
}
