use std::collections::BTreeMap;

use super::complex::{ChainMap, Complex};
use crate::coefficients::{Matrix, Scalar, Solver};
use crate::discrete_mod::{direct_sum, hom_module, FPModule, HomModule, ModMorphism};
use crate::error::{Error, Result};

struct Part {
    i: i64,
    hom: HomModule,
    ga: usize,
    gb: usize,
    solver: Solver,
}

impl Part {
    fn new(a: &FPModule, b: &FPModule, i: i64) -> Result<Part> {
        let hom = hom_module(a, b)?;
        let power = hom.inclusion.tgt().clone();
        let big = hom.inclusion.map().hstack(&power.rels().coerce(&hom.inclusion.map().ring().clone()))?;
        Ok(Part { i, ga: a.gens(), gb: b.gens(), solver: Solver::new(&big), hom })
    }

    fn tuple_of(&self, f: &Matrix) -> Vec<Scalar> {
        let ring = self.solver.ring().clone();
        (0..self.ga * self.gb).map(|k| ring.coerce(f.get(k % self.gb, k / self.gb), f.ring())).collect()
    }

    fn coords(&self, tuple: &[Scalar]) -> Option<Vec<Scalar>> {
        let k = self.hom.module.gens();
        let ring = self.hom.module.ring();
        let sol = self.solver.solve(tuple).ok()??;
        Some(sol[..k].iter().map(|x| ring.coerce(x, self.solver.ring())).collect())
    }

    /// Generators of the hom module as `gb × ga` matrices over the power ring.
    fn generator_matrices(&self) -> Vec<Matrix> {
        let incl = self.hom.inclusion.map();
        let ring = incl.ring().clone();
        (0..incl.cols())
            .map(|c| Matrix::from_fn(&ring, self.gb, self.ga, |r, j| incl.get(j * self.gb + r, c).clone()))
            .collect()
    }
}

struct Degree {
    parts: Vec<Part>,
    module: FPModule,
    offsets: Vec<usize>,
}

/// `Hom^m(A, B) = ⊕ᵢ Hom(Aⁱ, B^{i+m})` with `D f = d_B f − (−1)^m f d_A`.
pub struct HomComplex {
    a: Complex,
    b: Complex,
    degrees: BTreeMap<i64, Degree>,
    complex: Complex,
}

impl HomComplex {
    pub fn new(a: &Complex, b: &Complex) -> Result<HomComplex> {
        if a.backend() != b.backend() {
            return Err(Error::BackendMismatch("hom complex between different backends".into()));
        }
        let backend = *a.backend();
        let (lo, hi) = if a.hi() < a.lo() || b.hi() < b.lo() { (0, -1) } else { (b.lo() - a.hi(), b.hi() - a.lo()) };
        let mut degrees = BTreeMap::new();
        for m in lo - 1..=hi + 1 {
            let parts = (a.lo()..=a.hi())
                .filter(|i| (b.lo()..=b.hi()).contains(&(i + m)))
                .map(|i| Part::new(&a.term(i), &b.term(i + m), i))
                .collect::<Result<Vec<_>>>()?;
            let modules: Vec<FPModule> = parts.iter().map(|p| p.hom.module.clone()).collect();
            let module = if modules.is_empty() { FPModule::zero(&backend) } else { direct_sum(&modules)?.0 };
            let offsets = parts
                .iter()
                .scan(0, |acc, p| {
                    let o = *acc;
                    *acc += p.hom.module.gens();
                    Some(o)
                })
                .collect();
            degrees.insert(m, Degree { parts, module, offsets });
        }
        let mut me = HomComplex { a: a.clone(), b: b.clone(), degrees, complex: Complex::zero(&backend) };
        let terms: Vec<FPModule> = (lo - 1..=hi + 1).map(|m| me.degrees[&m].module.clone()).collect();
        let diffs = (lo - 1..=hi).map(|m| me.differential(m)).collect::<Result<Vec<_>>>()?;
        me.complex = Complex::new(&backend, lo - 1, terms, diffs)?;
        Ok(me)
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn cohomology(&self, m: i64) -> FPModule {
        self.complex.cohomology(m)
    }

    pub fn module(&self, m: i64) -> FPModule {
        self.complex.term(m)
    }

    fn differential(&self, m: i64) -> Result<ModMorphism> {
        let src = &self.degrees[&m];
        let tgt = &self.degrees[&(m + 1)];
        let ring = tgt.module.ring();
        let mut mat = Matrix::zeros(&ring, tgt.module.gens(), src.module.gens());
        let sign = if m.rem_euclid(2) == 0 { -1 } else { 1 };
        for (sp, &so) in src.parts.iter().zip(&src.offsets) {
            for (g, f) in sp.generator_matrices().into_iter().enumerate() {
                for (tp, &to) in tgt.parts.iter().zip(&tgt.offsets) {
                    let pring = tp.solver.ring().clone();
                    let image = if tp.i == sp.i {
                        self.b.diff(sp.i + m).map().coerce(&pring).mul(&f.coerce(&pring))?
                    } else if tp.i == sp.i - 1 {
                        let da = self.a.diff(sp.i - 1).map().coerce(&pring);
                        f.coerce(&pring).mul(&da)?.scale(&pring.from_i64(sign))
                    } else {
                        continue;
                    };
                    let c = tp.coords(&tp.tuple_of(&image)).ok_or_else(|| {
                        Error::InvalidInput("differential leaves the hom module".into())
                    })?;
                    for (r, x) in c.into_iter().enumerate() {
                        let cur = mat.get(to + r, so + g).clone();
                        mat.set(to + r, so + g, ring.add(&cur, &ring.coerce(&x, &tp.hom.module.ring())));
                    }
                }
            }
        }
        ModMorphism::unchecked(&src.module, &tgt.module, mat)
    }

    /// Coordinates in `Hom^m` of the family `i ↦ f(i): Aⁱ → B^{i+m}`.
    pub fn coordinates(&self, m: i64, f: impl Fn(i64) -> ModMorphism) -> Result<Vec<Scalar>> {
        let Some(deg) = self.degrees.get(&m) else {
            return Ok(Vec::new());
        };
        let ring = deg.module.ring();
        let mut out = Vec::with_capacity(deg.module.gens());
        for p in &deg.parts {
            let c = p.coords(&p.tuple_of(f(p.i).map())).ok_or_else(|| Error::InvalidInput(format!("component {} is not a homomorphism", p.i)))?;
            out.extend(c.iter().map(|x| ring.coerce(x, &p.hom.module.ring())));
        }
        Ok(out)
    }

    /// The family of morphisms with the given coordinates in `Hom^m`.
    pub fn components(&self, m: i64, x: &[Scalar]) -> Result<Vec<(i64, ModMorphism)>> {
        let Some(deg) = self.degrees.get(&m) else {
            return Ok(Vec::new());
        };
        deg.parts
            .iter()
            .zip(&deg.offsets)
            .map(|(p, &o)| Ok((p.i, p.hom.to_morphism(&x[o..o + p.hom.module.gens()])?)))
            .collect()
    }

    /// Some `y ∈ Hom^{m−1}` with `D y = x`.
    pub fn preimage(&self, m: i64, x: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        let d = self.complex.diff(m - 1);
        let (src, tgt) = (d.src(), d.tgt());
        if tgt.gens() == 0 {
            return Ok(Some(vec![src.ring().zero(); src.gens()]));
        }
        let level = src.level().max(tgt.level());
        let ring = tgt.backend().level_ring(level);
        let big = d.map().coerce(&ring).hstack(&tgt.relations_in(level))?;
        let rhs: Vec<Scalar> = x.iter().map(|v| ring.coerce(v, &tgt.ring())).collect();
        let sol = Solver::new(&big).solve(&rhs)?;
        let sring = src.ring();
        Ok(sol.map(|y| y[..src.gens()].iter().map(|v| sring.coerce(v, &ring)).collect()))
    }
}

/// Degreewise maps `h(i): Aⁱ → B^{i−1}`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    pub components: Vec<(i64, ModMorphism)>,
}

impl Homotopy {
    pub fn component(&self, i: i64) -> Option<&ModMorphism> {
        self.components.iter().find(|(j, _)| *j == i).map(|(_, h)| h)
    }

    /// Whether `f = d h + h d` componentwise.
    pub fn verifies(&self, f: &ChainMap) -> bool {
        let (a, b) = (f.src(), f.tgt());
        let (lo, hi) = a.joint_window(b);
        let h = |i: i64| self.component(i).cloned().unwrap_or_else(|| ModMorphism::zero(&a.term(i), &b.term(i - 1)));
        (lo..=hi).all(|i| {
            let dh = b.diff(i - 1).compose(&h(i));
            let hd = h(i + 1).compose(&a.diff(i));
            match (dh, hd) {
                (Ok(x), Ok(y)) => x.add(&y).map(|s| s.equals(&f.component(i))).unwrap_or(false),
                _ => false,
            }
        })
    }
}

/// Deterministic linear solve for `f = d h + h d`.
pub fn is_null_homotopic(f: &ChainMap) -> Result<Option<Homotopy>> {
    let hc = HomComplex::new(f.src(), f.tgt())?;
    null_homotopy_in(&hc, f)
}

pub(crate) fn null_homotopy_in(hc: &HomComplex, f: &ChainMap) -> Result<Option<Homotopy>> {
    let x = hc.coordinates(0, |i| f.component(i))?;
    let Some(y) = hc.preimage(0, &x)? else {
        return Ok(None);
    };
    let h = Homotopy { components: hc.components(-1, &y)? };
    if !h.verifies(f) {
        return Err(Error::InvalidInput("solved homotopy fails verification".into()));
    }
    Ok(Some(h))
}

/// Explicit homotopy equivalence data: `g f ≃ id` and `f g ≃ id`.
pub struct Equivalence {
    pub left: Homotopy,
    pub right: Homotopy,
}

pub fn homotopy_equivalence(f: &ChainMap, g: &ChainMap) -> Result<Option<Equivalence>> {
    let gf = g.compose(f)?.sub(&ChainMap::identity(f.src()))?;
    let fg = f.compose(g)?.sub(&ChainMap::identity(f.tgt()))?;
    let (Some(left), Some(right)) = (is_null_homotopic(&gf)?, is_null_homotopic(&fg)?) else {
        return Ok(None);
    };
    Ok(Some(Equivalence { left, right }))
}

pub fn is_contractible(c: &Complex) -> Result<bool> {
    Ok(is_null_homotopic(&ChainMap::identity(c))?.is_some())
}
