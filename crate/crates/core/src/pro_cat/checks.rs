use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::limits::{coreflect_via_embedding, is_admissible_ses, kernel_pro, kernel_strict, Certificate};
use super::morphism::ProMorphism;
use super::product::{factor_through_finite_subproduct, product_of, Product};
use super::reindex::Reindex;
use super::tower::{constant_tower, ring_tower, zero_tower, Tower};
use crate::coefficients::{Backend, Matrix};
use crate::discrete_mod::{random_matrix, random_scalar, FPModule, ModMorphism};
use crate::error::{Error, Result};

/// A strict tower from the generator families: a ring power or a constant
/// cyclic module `R/π^e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Factor {
    Ring { rank: usize },
    Constant { exponent: u32 },
}

impl Factor {
    pub fn tower(&self, backend: &Backend) -> Result<Tower> {
        Ok(match self {
            Factor::Ring { rank } => ring_tower(backend, *rank),
            Factor::Constant { exponent } => constant_tower(&FPModule::from_exponents(backend, &[*exponent])?),
        })
    }

    fn random<R: Rng + ?Sized>(rng: &mut R, with_constants: bool) -> Factor {
        if with_constants && rng.gen_bool(0.4) {
            Factor::Constant { exponent: rng.gen_range(1..=3) }
        } else {
            Factor::Ring { rank: rng.gen_range(1..=2) }
        }
    }
}

/// `m` applied levelwise to `src → tgt`, where `src` is a ring power and
/// `tgt` is either a ring power or a constant tower with level ring `R_e`
/// (read from `src` at levels `≥ e`).
pub fn matrix_map(src: &Tower, tgt: &Tower, m: &Matrix, delay: usize) -> ProMorphism {
    let (s, t, m1) = (src.clone(), tgt.clone(), m.clone());
    let r = if delay == 0 { Reindex::identity() } else { Reindex::at_least(delay) };
    let r1 = r.clone();
    ProMorphism::from_fn(src, tgt, r, move |n| {
        let (x, y) = (s.level(r1.apply(n)), t.level(n));
        if x.gens() == 0 || y.gens() == 0 {
            return ModMorphism::zero(&x, &y);
        }
        ModMorphism::unchecked(&x, &y, m1.coerce(&y.ring())).expect("matrix shape")
    })
}

fn rank_of(f: &Factor) -> usize {
    match f {
        Factor::Ring { rank } => *rank,
        Factor::Constant { .. } => 1,
    }
}

fn delay_of(f: &Factor) -> usize {
    match f {
        Factor::Ring { .. } => 0,
        Factor::Constant { exponent } => *exponent as usize,
    }
}

/// A random morphism from `R^a` into the factor tower.
fn random_map<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, src: &Tower, a: usize, f: &Factor, tgt: &Tower) -> ProMorphism {
    let m = random_matrix(rng, &backend.base_ring(), rank_of(f), a);
    matrix_map(src, tgt, &m, delay_of(f))
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationCheck {
    pub copies: usize,
    pub exponent: u32,
    pub m: usize,
    pub expected_m: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductCheck {
    pub seed: u64,
    pub depth: usize,
    pub source_rank: usize,
    pub factors: Vec<Factor>,
    /// `π_i ∘ ⟨f⟩ = f_i` for every factor and `⟨π ∘ h⟩ = h`.
    pub universal_property: bool,
    pub admissible_product: bool,
    pub factorization: FactorizationCheck,
}

impl ProductCheck {
    pub fn pass(&self) -> bool {
        self.universal_property
            && self.admissible_product
            && self.factorization.verified
            && self.factorization.m == self.factorization.expected_m
    }
}

/// A short exact sequence of strict towers drawn from three shapes:
/// `A → A ⊕ B → B`, `0 → R → R`, and `R →(π) R → R/π`.
fn random_ses<R: Rng + ?Sized>(rng: &mut R, backend: &Backend) -> Result<(ProMorphism, ProMorphism)> {
    let pi = backend.base_pi_pow(1);
    let base = backend.base_ring();
    Ok(match rng.gen_range(0..3) {
        0 => {
            let (a, b) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
            let (ta, tb) = (ring_tower(backend, a), ring_tower(backend, b));
            let sum = product_of(backend, vec![ta.clone(), tb.clone()]);
            let f = sum.induced(&ta, &[ProMorphism::identity(&ta), ProMorphism::zero(&ta, &tb)])?;
            (f, sum.projection(1))
        }
        1 => {
            let r = ring_tower(backend, 1);
            let z = zero_tower(backend);
            (ProMorphism::zero(&z, &r), ProMorphism::identity(&r))
        }
        _ => {
            let r = ring_tower(backend, 1);
            let q = constant_tower(&FPModule::from_exponents(backend, &[1])?);
            let times = Matrix::from_fn(&base, 1, 1, |_, _| pi.clone());
            let one = Matrix::identity(&base, 1);
            (matrix_map(&r, &r, &times, 0), matrix_map(&r, &q, &one, 1))
        }
    })
}

/// The product of two sequences, with the induced maps.
fn product_ses(backend: &Backend, s1: &(ProMorphism, ProMorphism), s2: &(ProMorphism, ProMorphism)) -> Result<(ProMorphism, ProMorphism)> {
    let pa = product_of(backend, vec![s1.0.src().clone(), s2.0.src().clone()]);
    let pb = product_of(backend, vec![s1.0.tgt().clone(), s2.0.tgt().clone()]);
    let pc = product_of(backend, vec![s1.1.tgt().clone(), s2.1.tgt().clone()]);
    let f = pb.induced(&pa.tower, &[s1.0.compose(&pa.projection(0))?, s2.0.compose(&pa.projection(1))?])?;
    let g = pc.induced(&pb.tower, &[s1.1.compose(&pb.projection(0))?, s2.1.compose(&pb.projection(1))?])?;
    Ok((f, g))
}

fn universal_property(p: &Product, src: &Tower, fs: &[ProMorphism], depth: usize) -> Result<bool> {
    let h = p.induced(src, fs)?;
    if !h.check_commuting(depth) {
        return Ok(false);
    }
    for (i, f) in fs.iter().enumerate() {
        if !p.projection(i).compose(&h)?.equals_to(f, depth) {
            return Ok(false);
        }
    }
    let parts = (0..fs.len()).map(|i| p.projection(i).compose(&h)).collect::<Result<Vec<_>>>()?;
    Ok(p.induced(src, &parts)?.equals_to(&h, depth))
}

fn factorization<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, depth: usize) -> Result<FactorizationCheck> {
    let copies = rng.gen_range(1..=4);
    let exponent = rng.gen_range(1..=3);
    let c = FPModule::from_exponents(backend, &[exponent])?;
    let ct = constant_tower(&c);
    let p = product_of(backend, vec![ct.clone(); copies]);
    let ring = c.ring();
    let mut f = ProMorphism::zero(&p.tower, &ct);
    let mut expected_m = 0;
    for i in 0..copies {
        let s = if rng.gen_bool(0.3) { ring.zero() } else { random_scalar(rng, &ring) };
        let scalar = ModMorphism::scalar(&c, &s);
        if !scalar.is_zero() {
            expected_m = i + 1;
        }
        let part = ProMorphism::levelwise(&ct, &ct, move |_| scalar.clone());
        f = f.add(&part.compose(&p.projection(i))?)?;
    }
    let fac = factor_through_finite_subproduct(&f, &p, depth)?;
    Ok(FactorizationCheck { copies, exponent, m: fac.m, expected_m, verified: fac.verified })
}

fn require_tower_backend(backend: &Backend) -> Result<()> {
    if backend.is_discrete() {
        return Err(Error::BackendMismatch("the product checks need a tower backend (padic or pseries)".into()));
    }
    Ok(())
}

/// One seeded run of the product suite: the universal property of a random
/// diagonal product, admissibility of a product of two short exact
/// sequences, and the least finite subproduct for a map to a constant tower.
pub fn product_check(backend: &Backend, seed: u64, depth: usize) -> Result<ProductCheck> {
    require_tower_backend(backend)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(1..=2);
    let src = ring_tower(backend, a);
    let factors: Vec<Factor> = (0..rng.gen_range(1..=3)).map(|_| Factor::random(&mut rng, true)).collect();
    let towers = factors.iter().map(|f| f.tower(backend)).collect::<Result<Vec<_>>>()?;
    let p = product_of(backend, towers.clone());
    let fs: Vec<ProMorphism> = factors.iter().zip(&towers).map(|(f, t)| random_map(&mut rng, backend, &src, a, f, t)).collect();
    let universal_property = universal_property(&p, &src, &fs, depth)?;
    let (s1, s2) = (random_ses(&mut rng, backend)?, random_ses(&mut rng, backend)?);
    let (f, g) = product_ses(backend, &s1, &s2)?;
    let admissible_product = is_admissible_ses(&s1.0, &s1.1, depth)? && is_admissible_ses(&s2.0, &s2.1, depth)? && is_admissible_ses(&f, &g, depth)?;
    let factorization = factorization(&mut rng, backend, depth)?;
    Ok(ProductCheck { seed, depth, source_rank: a, factors, universal_property, admissible_product, factorization })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreflectorCheck {
    pub seed: u64,
    pub depth: usize,
    pub source_rank: usize,
    pub factors: Vec<Factor>,
    pub certificate: Certificate,
    /// Level invariants of the strict kernel.
    pub kernel: Vec<String>,
    pub agree: bool,
}

/// A seeded morphism `f: R^a → ∏ T_i` of strict towers; its strict kernel
/// through the coreflection of the levelwise kernel, compared with the
/// coreflection computed inside the split tower `⊕_{m≤n} K_m`.
pub fn coreflector_check(backend: &Backend, seed: u64, depth: usize) -> Result<CoreflectorCheck> {
    require_tower_backend(backend)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(1..=2);
    let src = ring_tower(backend, a);
    let factors: Vec<Factor> = (0..rng.gen_range(1..=2)).map(|_| Factor::random(&mut rng, true)).collect();
    let towers = factors.iter().map(|f| f.tower(backend)).collect::<Result<Vec<_>>>()?;
    let p = product_of(backend, towers.clone());
    let fs: Vec<ProMorphism> = factors.iter().zip(&towers).map(|(f, t)| random_map(&mut rng, backend, &src, a, f, t)).collect();
    let f = p.induced(&src, &fs)?;
    let strict = kernel_strict(&f, depth)?;
    let (k, _) = kernel_pro(&f);
    let emb = coreflect_via_embedding(&k, depth);
    let agree = emb.agree(depth) && (0..=depth).all(|n| strict.tower.level(n).is_isomorphic(&emb.inside.tower.level(n)));
    Ok(CoreflectorCheck {
        seed,
        depth,
        source_rank: a,
        factors,
        certificate: strict.certificate.clone(),
        kernel: strict.tower.describe(depth),
        agree,
    })
}
