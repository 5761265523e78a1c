use serde::Serialize;

use super::bicomplex::{tot_product, Bicomplex};
use super::complex::{induced_map, ChainMap, Complex};
use super::free::{free_tensor, ContraComplex, FreeComplex};
use super::hom::HomComplex;
use super::resolve::{kernel_resolution, resolve_cohpro};
use crate::coefficients::{Level, Matrix};
use crate::contra::GroupReport;
use crate::discrete_mod::{FPModule, ModMorphism};
use crate::error::Result;
use crate::par;
use crate::pro_cat::{strictify, Certificate, Strictness, Tower};

/// Both computations of `Hom(Ξ(N•), 𝔉•)` with the agreement verdict.
#[derive(Clone, Debug)]
pub struct ContraderivedHom {
    /// `H⁰` of the totalized pro-contratensor bicomplex `P^n ⊙^pro 𝔉^i`.
    pub path_i: FPModule,
    /// `H⁰` of the totalized contratensor bicomplex `N^n ⊙ 𝔉^i`.
    pub path_ii: FPModule,
    pub agree: bool,
    /// Depth at which two consecutive depths gave the same path (i) value.
    pub certified_depth: Option<usize>,
    /// Depth the search started from.
    pub start_depth: usize,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContraderivedReport {
    pub path_i: GroupReport,
    pub path_ii: GroupReport,
    pub agree: bool,
    pub certified_depth: Option<usize>,
    pub start_depth: usize,
}

pub fn group_report(m: &FPModule) -> GroupReport {
    crate::contra::GroupValue::Module(m.clone()).to_report()
}

impl ContraderivedHom {
    pub fn report(&self) -> ContraderivedReport {
        ContraderivedReport {
            path_i: group_report(&self.path_i),
            path_ii: group_report(&self.path_ii),
            agree: self.agree,
            certified_depth: self.certified_depth,
            start_depth: self.start_depth,
        }
    }
}

fn annihilation_exponent(n: &Complex) -> usize {
    match n.level() {
        Level::Finite(e) => e as usize,
        Level::Infinite => 0,
    }
}

/// `H⁰` of `N• ⊙ 𝔉•` computed at one level `c` killing `N•`, where
/// `Nⁿ ⊙ 𝔉ⁱ = Nⁿ ⊗ 𝔉ⁱ/I_c𝔉ⁱ`.
pub fn contratensor_h0(n: &Complex, f: &ContraComplex) -> Result<FPModule> {
    let c = n.level();
    if n.is_zero() || f.0.is_zero() {
        return Ok(FPModule::zero(n.backend()));
    }
    let fc = f.0.at_level(c);
    Ok(tot_product(&Bicomplex::tensor(n, &fc)?)?.cohomology(0))
}

/// The tower `k ↦ H⁰(T/I_k)` for a free complex `T` over `Λ`.
pub fn h0_tower(t: &FreeComplex) -> Tower {
    let backend = *t.backend();
    let (t1, t2) = (t.clone(), t.clone());
    Tower::from_fn(
        &backend,
        "H0 of reductions",
        Strictness::Unknown,
        move |_, k| t1.at_level(backend.level(k as u32)).cohomology(0),
        move |_, k| {
            let (big, small) = (t2.at_level(backend.level(k as u32 + 1)), t2.at_level(backend.level(k as u32)));
            let red = reduction(&big, &small);
            induced_map(&red, 0, &big.cohomology_data(0), &small.cohomology_data(0)).expect("reduction is a chain map")
        },
    )
}

fn reduction(big: &Complex, small: &Complex) -> ChainMap {
    ChainMap::unchecked(big, small, |i| {
        let (s, t) = (big.term(i), small.term(i));
        if s.gens() == 0 || t.gens() == 0 {
            return ModMorphism::zero(&s, &t);
        }
        let ring = t.ring();
        ModMorphism::unchecked(&s, &t, Matrix::identity(&ring, t.gens())).expect("shapes")
    })
}

/// `H⁰(rP• ⊙^{pro,⊓} 𝔉•)` as the limit of the `H⁰` tower of the stagewise
/// totalizations, strictified to `depth`. Returns the value at `depth`,
/// whether it agrees with the value one level deeper, and the certificate.
fn path_i_at(t: &FreeComplex, tower: &Tower, depth: usize) -> (FPModule, bool, Certificate) {
    if t.backend().is_discrete() {
        let v = t.at_level(Level::Infinite).cohomology(0);
        return (v, true, Certificate::AlreadyStrict);
    }
    let s = strictify(tower, depth + 1);
    let (a, b) = (s.tower.level(depth), s.tower.level(depth + 1));
    let stable = a.is_isomorphic(&b) && s.certificate.is_certified();
    (a, stable, s.certificate)
}

/// `Hom_{D^bctr}(Ξ(N•), 𝔉•)` two ways: (i) through the resolution `P•` of
/// `N•` and the pro-contratensor bicomplex, increasing the depth from
/// `s + t + e + 2` until two consecutive depths agree; (ii) as `H⁰` of the
/// contratensor bicomplex `N• ⊙ 𝔉•`. The two paths run concurrently.
pub fn hom_contraderived(n: &Complex, f: &ContraComplex, max_extra: usize) -> Result<ContraderivedHom> {
    let start = n.span() + f.0.span() + annihilation_exponent(n) + 2;
    let jobs = [0usize, 1];
    let results = par::map(&jobs, |&j| -> Result<Either> {
        if j == 1 {
            return Ok(Either::Two(contratensor_h0(n, f)?));
        }
        let p = resolve_cohpro(n)?.complex;
        let t = free_tensor(&p, &f.0)?;
        let tower = h0_tower(&t);
        let mut last = None;
        for d in start..=start + max_extra {
            let (v, stable, cert) = path_i_at(&t, &tower, d);
            if stable {
                return Ok(Either::One(v, Some(d), cert));
            }
            last = Some((v, cert));
        }
        let (v, cert) = last.expect("at least one depth");
        Ok(Either::One(v, None, cert))
    });
    let mut path_i = None;
    let mut path_ii = None;
    for r in results {
        match r? {
            Either::One(v, d, c) => path_i = Some((v, d, c)),
            Either::Two(v) => path_ii = Some(v),
        }
    }
    let (path_i, certified_depth, certificate) = path_i.expect("path (i) ran");
    let path_ii = path_ii.expect("path (ii) ran");
    let agree = certified_depth.is_some() && path_i.is_isomorphic(&path_ii);
    Ok(ContraderivedHom { path_i, path_ii, agree, certified_depth, start_depth: start, certificate })
}

enum Either {
    One(FPModule, Option<usize>, Certificate),
    Two(FPModule),
}

/// `Hom_{D^b(coh)}(M•, N•)` as `H⁰ Hom(Q•, N•)` for a free resolution `Q•`
/// of `M•` over `Λ` built by kernels, reduced at a level killing `N•`.
pub fn db_coh_hom_oracle(m: &Complex, n: &Complex) -> Result<FPModule> {
    db_coh_hom_oracle_shifted(m, n, 0)
}

/// `Hom_{D^b}(M•, N•[k])`.
pub fn db_coh_hom_oracle_shifted(m: &Complex, n: &Complex, k: i64) -> Result<FPModule> {
    if m.is_zero() || n.is_zero() {
        return Ok(FPModule::zero(m.backend()));
    }
    let q = kernel_resolution(m)?.complex;
    let level = n.level();
    let hc = HomComplex::new(&q.at_level(level), n)?;
    Ok(hc.cohomology(k))
}
