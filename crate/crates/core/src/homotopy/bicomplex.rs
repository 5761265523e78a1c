use super::complex::Complex;
use crate::coefficients::{Backend, Matrix};
use crate::discrete_mod::{block_morphism, direct_sum, tensor, tensor_map, FPModule, ModMorphism};
use crate::error::{Error, Result};

/// Degree bounds of one direction; `None` marks an unbounded side.
pub type Bounds = (Option<i64>, Option<i64>);

/// Bounded double complex `C^{p,q}` with commuting squares:
/// `dh: C^{p,q} → C^{p+1,q}` and `dv: C^{p,q} → C^{p,q+1}`.
#[derive(Clone, Debug)]
pub struct Bicomplex {
    backend: Backend,
    p_lo: i64,
    q_lo: i64,
    terms: Vec<Vec<FPModule>>,
    dh: Vec<Vec<ModMorphism>>,
    dv: Vec<Vec<ModMorphism>>,
}

fn window(b: Bounds, what: &str) -> Result<(i64, i64)> {
    match b {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::WindowError(format!("{what} direction is unbounded"))),
    }
}

impl Bicomplex {
    /// Builds the bicomplex from its terms and differentials over bounded
    /// windows, checking `dh² = 0`, `dv² = 0` and commutation.
    pub fn from_fn(
        backend: &Backend,
        rows: Bounds,
        cols: Bounds,
        term: impl Fn(i64, i64) -> FPModule,
        dh: impl Fn(i64, i64) -> ModMorphism,
        dv: impl Fn(i64, i64) -> ModMorphism,
    ) -> Result<Bicomplex> {
        let (p_lo, p_hi) = window(rows, "first")?;
        let (q_lo, q_hi) = window(cols, "second")?;
        let terms: Vec<Vec<FPModule>> = (p_lo..=p_hi).map(|p| (q_lo..=q_hi).map(|q| term(p, q)).collect()).collect();
        let dh: Vec<Vec<ModMorphism>> = (p_lo..p_hi).map(|p| (q_lo..=q_hi).map(|q| dh(p, q)).collect()).collect();
        let dv: Vec<Vec<ModMorphism>> = (p_lo..=p_hi).map(|p| (q_lo..q_hi).map(|q| dv(p, q)).collect()).collect();
        let b = Bicomplex { backend: *backend, p_lo, q_lo, terms, dh, dv };
        b.check()?;
        Ok(b)
    }

    fn check(&self) -> Result<()> {
        let (p_hi, q_hi) = (self.p_hi(), self.q_hi());
        for p in self.p_lo..=p_hi {
            for q in self.q_lo..=q_hi {
                let (h, v) = (self.dh(p, q), self.dv(p, q));
                if *h.src() != self.term(p, q) || *v.src() != self.term(p, q) {
                    return Err(Error::ShapeError(format!("differentials out of ({p}, {q}) have the wrong source")));
                }
                let hh = self.dh(p + 1, q).compose(&h)?;
                let vv = self.dv(p, q + 1).compose(&v)?;
                let sq = self.dv(p + 1, q).compose(&h)?.sub(&self.dh(p, q + 1).compose(&v)?)?;
                if !hh.is_zero() || !vv.is_zero() || !sq.is_zero() {
                    return Err(Error::InvalidInput(format!("bicomplex identities fail at ({p}, {q})")));
                }
            }
        }
        Ok(())
    }

    /// `A ⊗ B` with `dh = d_A ⊗ 1` and `dv = 1 ⊗ d_B`.
    pub fn tensor(a: &Complex, b: &Complex) -> Result<Bicomplex> {
        if a.backend() != b.backend() {
            return Err(Error::BackendMismatch("tensoring complexes over different backends".into()));
        }
        let t = |p: i64, q: i64| tensor(&a.term(p), &b.term(q)).expect("one backend");
        Bicomplex::from_fn(
            a.backend(),
            (Some(a.lo()), Some(a.hi().max(a.lo()))),
            (Some(b.lo()), Some(b.hi().max(b.lo()))),
            t,
            |p, q| {
                let id = ModMorphism::identity(&b.term(q));
                tensor_map(&a.diff(p), &id, &t(p, q), &t(p + 1, q)).expect("shapes")
            },
            |p, q| {
                let id = ModMorphism::identity(&a.term(p));
                tensor_map(&id, &b.diff(q), &t(p, q), &t(p, q + 1)).expect("shapes")
            },
        )
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn p_hi(&self) -> i64 {
        self.p_lo + self.terms.len() as i64 - 1
    }

    pub fn q_hi(&self) -> i64 {
        self.q_lo + self.terms.first().map_or(0, Vec::len) as i64 - 1
    }

    fn at<T: Clone>(grid: &[Vec<T>], p: i64, q: i64, p_lo: i64, q_lo: i64) -> Option<T> {
        let (i, j) = (p - p_lo, q - q_lo);
        if i < 0 || j < 0 {
            return None;
        }
        grid.get(i as usize).and_then(|row| row.get(j as usize)).cloned()
    }

    pub fn term(&self, p: i64, q: i64) -> FPModule {
        Self::at(&self.terms, p, q, self.p_lo, self.q_lo).unwrap_or_else(|| FPModule::zero(&self.backend))
    }

    pub fn dh(&self, p: i64, q: i64) -> ModMorphism {
        Self::at(&self.dh, p, q, self.p_lo, self.q_lo)
            .unwrap_or_else(|| ModMorphism::zero(&self.term(p, q), &self.term(p + 1, q)))
    }

    pub fn dv(&self, p: i64, q: i64) -> ModMorphism {
        Self::at(&self.dv, p, q, self.p_lo, self.q_lo)
            .unwrap_or_else(|| ModMorphism::zero(&self.term(p, q), &self.term(p, q + 1)))
    }

    /// The single row `q` as a complex in `p`.
    pub fn row(&self, q: i64) -> Complex {
        let terms: Vec<FPModule> = (self.p_lo..=self.p_hi()).map(|p| self.term(p, q)).collect();
        let diffs: Vec<ModMorphism> = (self.p_lo..self.p_hi()).map(|p| self.dh(p, q)).collect();
        Complex::new(&self.backend, self.p_lo, terms, diffs).expect("rows are complexes")
    }
}

/// `Tot(C)^m = ∏_{p+q=m} C^{p,q}` with `d = dh + (−1)^p dv`.
pub fn tot_product(b: &Bicomplex) -> Result<Complex> {
    let (p_lo, p_hi, q_lo, q_hi) = (b.p_lo, b.p_hi(), b.q_lo, b.q_hi());
    if p_hi < p_lo || q_hi < q_lo {
        return Ok(Complex::zero(&b.backend));
    }
    let (lo, hi) = (p_lo + q_lo, p_hi + q_hi);
    let ps = |m: i64| -> Vec<i64> { (p_lo..=p_hi).filter(|&p| (q_lo..=q_hi).contains(&(m - p))).collect() };
    let terms = (lo..=hi)
        .map(|m| Ok(direct_sum(&ps(m).iter().map(|&p| b.term(p, m - p)).collect::<Vec<_>>())?.0))
        .collect::<Result<Vec<FPModule>>>()?;
    let diffs = (lo..hi)
        .map(|m| {
            let (src, tgt) = (&terms[(m - lo) as usize], &terms[(m + 1 - lo) as usize]);
            let ring = tgt.ring();
            let blocks: Vec<Vec<Matrix>> = ps(m + 1)
                .iter()
                .map(|&p2| {
                    ps(m)
                        .iter()
                        .map(|&p| {
                            let (q, q2) = (m - p, m + 1 - p2);
                            if p2 == p + 1 {
                                b.dh(p, q).map().coerce(&ring)
                            } else if p2 == p {
                                let v = b.dv(p, q);
                                if p.rem_euclid(2) == 1 { v.neg() } else { v }.map().coerce(&ring)
                            } else {
                                Matrix::zeros(&ring, b.term(p2, q2).gens(), b.term(p, q).gens())
                            }
                        })
                        .collect()
                })
                .collect();
            block_morphism(src, tgt, &blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    Complex::new(&b.backend, lo, terms, diffs)
}
