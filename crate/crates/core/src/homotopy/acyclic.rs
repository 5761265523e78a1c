use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bicomplex::{tot_product, Bicomplex};
use super::complex::Complex;
use super::free::{free_null_homotopy, ContraComplex, FreeChainMap, FreeComplex, FreeHom, FreeHomotopy};
use crate::coefficients::{Backend, Level, Matrix, Ring, Scalar};
use crate::discrete_mod::{cyclic, random_module, FPModule, Invariants, ModMorphism};
use crate::duality::recognize_prod_omega;
use crate::error::Result;
use crate::par;
use crate::pro_cat::{strictify, Certificate, Strictness, Tower};

/// Which coherent modules were tried.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PureBattery {
    /// `R/Iₙ` for `n ≤ cyclic_levels` (over `ℤ`: `ℤ` and `ℤ/m`, `2 ≤ m ≤ cyclic_levels + 1`).
    pub cyclic_levels: usize,
    pub random_modules: usize,
    pub random_max_gens: usize,
    pub random_max_level: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PureWitness {
    pub module: String,
    pub degree: i64,
    pub cohomology: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PureAcyclicity {
    pub pass: bool,
    pub depth: usize,
    pub battery: PureBattery,
    pub witness: Option<PureWitness>,
}

/// `N ⊙ 𝔉•` for a complex of free contramodules.
pub fn contratensor_complex(n: &FPModule, f: &ContraComplex) -> Result<Complex> {
    if f.0.is_zero() || n.gens() == 0 {
        return Ok(Complex::zero(n.backend()));
    }
    let level = n.exact_level().max(n.backend().level(1));
    let c = Complex::concentrated(n, 0);
    tot_product(&Bicomplex::tensor(&c, &f.0.at_level(level))?)
}

fn battery_modules(backend: &Backend, depth: usize, seed: u64) -> (Vec<FPModule>, PureBattery) {
    let mut mods = Vec::new();
    if backend.is_discrete() {
        mods.push(FPModule::from_integers(&[0]));
        for m in 2..=depth as i64 + 1 {
            mods.push(FPModule::from_integers(&[m]));
        }
    } else {
        for n in 1..=depth as u32 {
            mods.push(cyclic(backend, n).expect("positive level"));
        }
    }
    let battery = PureBattery {
        cyclic_levels: depth,
        random_modules: 4,
        random_max_gens: 2,
        random_max_level: depth.min(3) as u32,
        seed,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..battery.random_modules {
        mods.push(random_module(&mut rng, backend, battery.random_max_gens, battery.random_max_level.max(1)));
    }
    (mods, battery)
}

/// Checks acyclicity of `N ⊙ 𝔉•` on the battery; the first failure is the witness.
pub fn pure_acyclicity_test(f: &ContraComplex, depth: usize, seed: u64) -> Result<PureAcyclicity> {
    let (mods, battery) = battery_modules(f.0.backend(), depth, seed);
    let found = par::map(&mods, |n| -> Result<Option<PureWitness>> {
        let c = contratensor_complex(n, f)?;
        Ok(c.first_nonacyclic_degree().map(|degree| PureWitness {
            module: n.describe(),
            degree,
            cohomology: c.cohomology(degree).describe(),
        }))
    });
    let mut witness = None;
    for w in found {
        if let Some(w) = w? {
            witness = Some(w);
            break;
        }
    }
    Ok(PureAcyclicity { pass: witness.is_none(), depth, battery, witness })
}

/// Cocycles of one degree, read off from the strictified tower
/// `k ↦ ker(dⁱ mod Iₖ)`.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleDegree {
    pub degree: i64,
    /// Rank of the free contramodule of cocycles, when recognized.
    pub rank: Option<usize>,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleCertificate {
    pub certified: bool,
    pub depth: usize,
    pub degrees: Vec<CocycleDegree>,
    pub counterexample: Option<String>,
}

/// The tower `k ↦ ker(dⁱ ⊗ R_k)` with the transitions induced by reduction.
pub fn cocycle_tower(f: &FreeComplex, i: i64) -> Tower {
    let backend = *f.backend();
    let (f1, f2) = (f.clone(), f.clone());
    let kernel = move |f: &FreeComplex, k: usize| f.at_level(backend.level(k as u32)).diff(i).kernel();
    let kernel2 = kernel.clone();
    Tower::from_fn(
        &backend,
        format!("cocycles in degree {i}"),
        Strictness::Unknown,
        move |_, k| kernel(&f1, k).0,
        move |_, k| {
            let (_, big) = kernel2(&f2, k + 1);
            let (_, small) = kernel2(&f2, k);
            if small.src().gens() == 0 || big.src().gens() == 0 {
                return ModMorphism::zero(big.src(), small.src());
            }
            let ring = small.tgt().ring();
            let red = ModMorphism::unchecked(big.tgt(), small.tgt(), Matrix::identity(&ring, small.tgt().gens())).expect("shapes");
            small.lift(&red.compose(&big).expect("composable")).expect("reductions of cocycles are cocycles")
        },
    )
}

/// Recognizes each cocycle contramodule as free of finite rank, from the
/// strictified cocycle towers to `depth`.
pub fn periodicity_check_projective_cocycles(f: &ContraComplex, depth: usize) -> Result<CocycleCertificate> {
    let c = &f.0;
    let mut degrees = Vec::new();
    let mut counterexample = None;
    if c.is_zero() {
        return Ok(CocycleCertificate { certified: true, depth, degrees, counterexample });
    }
    for i in c.lo()..=c.hi() {
        if c.backend().is_discrete() {
            let (z, _) = c.at_level(Level::Infinite).diff(i).kernel();
            let free = matches!(z.invariants(), Invariants::Integral { torsion, .. } if torsion.is_empty());
            let rank = match z.invariants() {
                Invariants::Integral { free_rank, .. } => *free_rank,
                Invariants::Chain { exponents } => exponents.len(),
            };
            if !free && counterexample.is_none() {
                counterexample = Some(format!("cocycles in degree {i} are {}", z.describe()));
            }
            degrees.push(CocycleDegree { degree: i, rank: free.then_some(rank), certificate: Certificate::AlreadyStrict });
            continue;
        }
        let s = strictify(&cocycle_tower(c, i), depth);
        let rank = recognize_prod_omega(&s.tower, depth).map(|r| r.rank);
        if (rank.is_none() || !s.certificate.is_certified()) && counterexample.is_none() {
            let levels: Vec<String> = (1..=depth).map(|k| s.tower.level(k).describe()).collect();
            counterexample = Some(format!("cocycles in degree {i} are not free: levels {}", levels.join(", ")));
        }
        degrees.push(CocycleDegree { degree: i, rank, certificate: s.certificate });
    }
    Ok(CocycleCertificate { certified: counterexample.is_none(), depth, degrees, counterexample })
}

/// A null-homotopy of `f` solved over `R_depth`, checked at every level below.
pub fn null_homotopy_to_depth(f: &FreeChainMap, depth: usize) -> Result<Option<FreeHomotopy>> {
    let backend = *f.src.backend();
    let top = backend.level(depth as u32);
    let Some(h) = free_null_homotopy(f, top)? else {
        return Ok(None);
    };
    if !backend.is_discrete() && !(1..depth as u32).all(|k| h.reduce(Level::Finite(k), f).verifies(f)) {
        return Ok(None);
    }
    Ok(Some(h))
}

fn small_scalar<R: Rng + ?Sized>(rng: &mut R, ring: &Ring) -> Scalar {
    ring.from_i64(rng.gen_range(-2..=2))
}

/// A random invertible matrix over `Λ` with its inverse, as a product of
/// elementary matrices.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, n: usize) -> (Matrix, Matrix) {
    let mut g = Matrix::identity(ring, n);
    let mut h = Matrix::identity(ring, n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            let m = ring.from_i64(-1);
            return (g.scale(&m), h.scale(&m));
        }
        return (g, h);
    }
    for _ in 0..2 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let c = small_scalar(rng, ring);
        // g ← E g with E = I + c e_ab; h ← h E⁻¹
        for j in 0..n {
            let v = ring.add(g.get(a, j), &ring.mul(&c, g.get(b, j)));
            g.set(a, j, v);
        }
        for i in 0..n {
            let v = ring.sub(h.get(i, b), &ring.mul(h.get(i, a), &c));
            h.set(i, b, v);
        }
    }
    (g, h)
}

/// `[Λ^r →1 Λ^r]` in degrees `j, j+1`.
pub fn elementary_contractible(backend: &Backend, j: i64, r: usize) -> FreeComplex {
    let base = backend.base_ring();
    FreeComplex::new(backend, j, vec![r, r], vec![Matrix::identity(&base, r)]).expect("identity is a differential")
}

/// `[Λ →π^e Λ]` in degrees `j, j+1`.
pub fn elementary_nonacyclic(backend: &Backend, j: i64, e: u32) -> FreeComplex {
    let base = backend.base_ring();
    let d = Matrix::from_fn(&base, 1, 1, |_, _| backend.base_pi_pow(e));
    FreeComplex::new(backend, j, vec![1, 1], vec![d]).expect("one differential")
}

fn scramble<R: Rng + ?Sized>(rng: &mut R, c: FreeComplex) -> FreeComplex {
    if c.is_zero() {
        return c;
    }
    let base = c.base_ring();
    let (gs, hs): (Vec<Matrix>, Vec<Matrix>) = (c.lo()..=c.hi()).map(|i| random_unimodular(rng, &base, c.rank(i))).unzip();
    c.change_basis(&gs, &hs).expect("invertible changes of basis")
}

fn summands<R: Rng + ?Sized>(rng: &mut R, terms: usize, max_rank: usize, budget: &mut [usize]) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    for j in 0..terms.saturating_sub(1) {
        let room = max_rank.saturating_sub(budget[j]).min(max_rank.saturating_sub(budget[j + 1]));
        if room == 0 {
            continue;
        }
        let r = rng.gen_range(0..=room);
        if r > 0 {
            budget[j] += r;
            budget[j + 1] += r;
            out.push((j as i64, r));
        }
    }
    out
}

/// Contractible complex of free modules: a sum of `[Λ^r →1 Λ^r]`, rebased
/// by random invertible matrices. At most `terms` terms, ranks `≤ max_rank`.
pub fn random_contractible<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, terms: usize, max_rank: usize) -> FreeComplex {
    let mut budget = vec![0; terms.max(2)];
    let parts: Vec<FreeComplex> = summands(rng, terms, max_rank, &mut budget)
        .into_iter()
        .map(|(j, r)| elementary_contractible(backend, j, r))
        .collect();
    if parts.is_empty() {
        return FreeComplex::zero(backend);
    }
    scramble(rng, FreeComplex::direct_sum(&parts).expect("one backend"))
}

/// A complex that is not pure-acyclic: a contractible part plus at least one
/// `[Λ →π^e Λ]`, rebased.
pub fn random_nonacyclic<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, terms: usize, max_rank: usize) -> FreeComplex {
    let terms = terms.max(2);
    let mut budget = vec![0; terms];
    let j = rng.gen_range(0..terms - 1);
    budget[j] += 1;
    budget[j + 1] += 1;
    let e = rng.gen_range(1..=2);
    let mut parts = vec![elementary_nonacyclic(backend, j as i64, e)];
    parts.extend(summands(rng, terms, max_rank, &mut budget).into_iter().map(|(j, r)| elementary_contractible(backend, j, r)));
    scramble(rng, FreeComplex::direct_sum(&parts).expect("one backend"))
}

/// A random bounded complex of free modules with ranks `≤ max_rank`
/// (a sum of elementary pieces, either kind), rebased.
pub fn random_free_complex<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, terms: usize, max_rank: usize) -> FreeComplex {
    let terms = terms.max(1);
    let mut parts = Vec::new();
    let mut budget = vec![0; terms + 1];
    for j in 0..terms {
        if budget[j] < max_rank && rng.gen_bool(0.4) {
            budget[j] += 1;
            parts.push(FreeComplex::new(backend, j as i64, vec![1], vec![]).expect("one term"));
        }
    }
    parts.extend(summands(rng, terms, max_rank, &mut budget).into_iter().map(|(j, r)| {
        if rng.gen_bool(0.5) {
            elementary_contractible(backend, j, r)
        } else {
            let e = rng.gen_range(1..=2);
            let base = backend.base_ring();
            let d = Matrix::diagonal(&base, r, r, &vec![backend.base_pi_pow(e); r]);
            FreeComplex::new(backend, j, vec![r, r], vec![d]).expect("diagonal differential")
        }
    }));
    if parts.is_empty() {
        return FreeComplex::zero(backend);
    }
    scramble(rng, FreeComplex::direct_sum(&parts).expect("one backend"))
}

/// A random chain map `src → tgt`: a combination of a `Λ`-basis of the
/// degree-zero cycles of the Hom complex with small coefficients.
pub fn random_chain_map<R: Rng + ?Sized>(rng: &mut R, src: &FreeComplex, tgt: &FreeComplex) -> Result<FreeChainMap> {
    let hom = FreeHom::new(src, tgt);
    let basis = hom.chain_map_basis();
    let base = src.base_ring();
    let coeffs: Vec<Scalar> = (0..basis.cols()).map(|_| small_scalar(rng, &base)).collect();
    let v = if basis.cols() == 0 { vec![base.zero(); basis.rows()] } else { basis.mul_vec(&coeffs)? };
    hom.chain_map(&v)
}

/// A random bounded complex of finite modules with `≤ terms` terms, each a
/// sum of `≤ max_gens` cyclic modules of exponent `≤ max_exp`.
pub fn random_module_complex<R: Rng + ?Sized>(
    rng: &mut R,
    backend: &Backend,
    terms: usize,
    max_gens: usize,
    max_exp: u32,
) -> Result<Complex> {
    let terms = rng.gen_range(1..=terms.max(1));
    let lo = rng.gen_range(-1..=0);
    let mods: Vec<FPModule> = (0..terms)
        .map(|_| crate::discrete_mod::random_diagonal_module(rng, backend, max_gens, max_exp))
        .collect::<Result<Vec<_>>>()?;
    let mut diffs: Vec<ModMorphism> = Vec::new();
    for j in 0..terms.saturating_sub(1) {
        let (a, b) = (&mods[j], &mods[j + 1]);
        let d = match diffs.last() {
            None => crate::discrete_mod::random_morphism(rng, a, b)?,
            Some(prev) => {
                let (q, proj) = prev.cokernel();
                crate::discrete_mod::random_morphism(rng, &q, b)?.compose(&proj)?
            }
        };
        diffs.push(d);
    }
    Complex::new(backend, lo, mods, diffs)
}
