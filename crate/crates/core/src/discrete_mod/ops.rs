use rand::Rng;

use super::module::{drop_zero_columns, FPModule};
use super::morphism::{direct_sum, ModMorphism};
use crate::coefficients::{Backend, Int, Level, Matrix, Ring, Scalar, Solver};
use crate::error::{Error, Result};

/// `M ⊗ N` from the block presentation `[Rel_M ⊗ I | I ⊗ Rel_N]` at the
/// smaller of the two levels. Generator `(i, j)` has index `i·gens(N) + j`.
pub fn tensor(m: &FPModule, n: &FPModule) -> Result<FPModule> {
    m.same_backend(n)?;
    let backend = *m.backend();
    let level = m.level().min(n.level());
    let ring = backend.level_ring(level);
    let (gm, gn) = (m.gens(), n.gens());
    if gm * gn == 0 || level == Level::Finite(0) {
        return Ok(FPModule::zero(&backend));
    }
    let a = m.relations_in(level).kronecker(&Matrix::identity(&ring, gn))?;
    let b = Matrix::identity(&ring, gm).kronecker(&n.relations_in(level))?;
    let rels = drop_zero_columns(&a.hstack(&b)?);
    Ok(FPModule::raw(backend, level, gm * gn, rels))
}

/// `f ⊗ g : M ⊗ N → M' ⊗ N'` between the tensor presentations above.
pub fn tensor_map(f: &ModMorphism, g: &ModMorphism, src: &FPModule, tgt: &FPModule) -> Result<ModMorphism> {
    if tgt.gens() == 0 || src.gens() == 0 {
        return Ok(ModMorphism::zero(src, tgt));
    }
    let ring = tgt.ring();
    let k = f.map().coerce(&ring).kronecker(&g.map().coerce(&ring))?;
    ModMorphism::unchecked(src, tgt, k)
}

/// `Hom(M, N)` as a submodule of `N^{gens(M)}`, with its inclusion.
pub struct HomModule {
    pub module: FPModule,
    pub inclusion: ModMorphism,
    src: FPModule,
    tgt: FPModule,
}

impl HomModule {
    /// The morphism represented by a coordinate vector of the hom module.
    pub fn to_morphism(&self, x: &[Scalar]) -> Result<ModMorphism> {
        let tuple = self.inclusion.apply(x)?;
        let (gm, gn) = (self.src.gens(), self.tgt.gens());
        let ring = self.tgt.ring();
        let map = Matrix::from_fn(&ring, gn, gm, |i, j| tuple[j * gn + i].clone());
        ModMorphism::unchecked(&self.src, &self.tgt, map)
    }

    /// Coordinates of a morphism in the hom module.
    pub fn from_morphism(&self, f: &ModMorphism) -> Result<Option<Vec<Scalar>>> {
        let (gm, gn) = (self.src.gens(), self.tgt.gens());
        let ring = self.tgt.ring();
        let tuple: Vec<Scalar> = (0..gm * gn).map(|k| ring.coerce(f.map().get(k % gn, k / gn), &f.map().ring().clone())).collect();
        let power = self.inclusion.tgt();
        let a = self.inclusion.map().hstack(power.rels())?;
        let k = self.module.gens();
        Ok(Solver::new(&a).solve(&tuple)?.map(|y| y[..k].to_vec()))
    }

    pub fn generators(&self) -> Result<Vec<ModMorphism>> {
        let ring = self.module.ring();
        (0..self.module.gens())
            .map(|j| {
                let e: Vec<Scalar> = (0..self.module.gens()).map(|i| if i == j { ring.one() } else { ring.zero() }).collect();
                self.to_morphism(&e)
            })
            .collect()
    }
}

pub fn hom_module(m: &FPModule, n: &FPModule) -> Result<HomModule> {
    m.same_backend(n)?;
    let backend = *m.backend();
    let copies: Vec<FPModule> = vec![n.clone(); m.gens()];
    let r = m.relations_in(n.level());
    let c = r.cols();
    if m.gens() == 0 || n.gens() == 0 {
        let z = FPModule::zero(&backend);
        let power = if m.gens() == 0 { z.clone() } else { direct_sum(&copies)?.0 };
        return Ok(HomModule { module: z.clone(), inclusion: ModMorphism::zero(&z, &power), src: m.clone(), tgt: n.clone() });
    }
    let (power, _, _) = direct_sum(&copies)?;
    let ring = n.ring();
    let phi_tgt = if c == 0 { FPModule::zero(&backend) } else { direct_sum(&vec![n.clone(); c])?.0 };
    let phi_map = if c == 0 {
        Matrix::zeros(&phi_tgt.ring(), 0, power.gens())
    } else {
        r.transpose().kronecker(&Matrix::identity(&ring, n.gens()))?
    };
    let phi = ModMorphism::unchecked(&power, &phi_tgt, phi_map)?;
    let (module, inclusion) = phi.kernel();
    Ok(HomModule { module, inclusion, src: m.clone(), tgt: n.clone() })
}

/// Free cover `R_m^k → N` with `m` the level of `N` and `k = gens(N)`.
pub fn free_cover(n: &FPModule) -> (u32, ModMorphism) {
    let backend = n.backend();
    let m = n.level().finite().unwrap_or(0);
    let free = if n.gens() == 0 {
        FPModule::zero(backend)
    } else {
        FPModule::raw(*backend, n.level(), n.gens(), Matrix::zeros(&n.ring(), n.gens(), 0))
    };
    (m, ModMorphism::unchecked(&free, n, Matrix::identity(&n.ring(), n.gens())).expect("identity cover"))
}

/// Whether `v` (coordinates in the target of `f`) lies in the image of `f`.
pub fn in_image(f: &ModMorphism, v: &[Scalar]) -> bool {
    let level = f.src().level().max(f.tgt().level());
    let ring = f.tgt().backend().level_ring(level);
    let a = f.map().coerce(&ring).hstack(&f.tgt().relations_in(level)).expect("rows agree");
    let v: Vec<Scalar> = v.iter().map(|x| ring.coerce(x, &f.tgt().ring())).collect();
    Solver::new(&a).contains(&v).unwrap_or(false)
}

/// Exactness of `A →f B →g C` at `B`.
pub fn is_exact(f: &ModMorphism, g: &ModMorphism) -> bool {
    let Ok(gf) = g.compose(f) else { return false };
    if !gf.is_zero() {
        return false;
    }
    let (_, incl) = g.kernel();
    (0..incl.map().cols()).all(|j| in_image(f, &incl.map().column(j)))
}

/// Exactness of `0 → A → B → C → 0`.
pub fn is_short_exact(f: &ModMorphism, g: &ModMorphism) -> bool {
    f.is_injective() && is_exact(f, g) && g.is_surjective()
}

/// Uniform random element of a finite level ring; small entries over ℤ and `𝔽_p[x]`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R, ring: &Ring) -> Scalar {
    match ring {
        Ring::Integers => ring.from_i64(rng.gen_range(-6..=6)),
        Ring::IntegersMod { modulus, .. } => match modulus.to_i64() {
            Some(m) => ring.from_i64(rng.gen_range(0..m)),
            None => ring.from_int(&Int::from(rng.gen::<u64>())),
        },
        Ring::PolyMod { p, n } => ring.canonical(&Scalar::Poly((0..*n).map(|_| rng.gen_range(0..*p)).collect())),
        Ring::Poly { p } => ring.canonical(&Scalar::Poly((0..3).map(|_| rng.gen_range(0..*p)).collect())),
    }
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, ring: &Ring, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(ring, rows, cols, |_, _| random_scalar(rng, ring))
}

/// Random module with at most `max_gens` generators and level at most
/// `max_level` (relations of small height over the discrete backend).
pub fn random_module<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, max_gens: usize, max_level: u32) -> FPModule {
    let gens = rng.gen_range(0..=max_gens);
    if gens == 0 {
        return FPModule::zero(backend);
    }
    let level = if backend.is_discrete() { Level::Infinite } else { Level::Finite(rng.gen_range(1..=max_level.max(1))) };
    let ring = backend.level_ring(level);
    let nrels = rng.gen_range(0..=gens);
    let rels = random_matrix(rng, &ring, gens, nrels);
    FPModule::raw(*backend, level, gens, drop_zero_columns(&rels))
}

/// Random module given by elementary divisors `π^e` with `e ≤ max_exp`.
pub fn random_diagonal_module<R: Rng + ?Sized>(rng: &mut R, backend: &Backend, max_gens: usize, max_exp: u32) -> Result<FPModule> {
    let gens = rng.gen_range(0..=max_gens);
    if backend.is_discrete() {
        let ds: Vec<i64> = (0..gens).map(|_| [0i64, 2, 3, 4, 6][rng.gen_range(0..5)]).collect();
        return Ok(FPModule::from_integers(&ds));
    }
    let exps: Vec<u32> = (0..gens).map(|_| rng.gen_range(1..=max_exp.max(1))).collect();
    FPModule::from_exponents(backend, &exps)
}

/// Random homomorphism: a random combination of generators of `Hom(src, tgt)`.
pub fn random_morphism<R: Rng + ?Sized>(rng: &mut R, src: &FPModule, tgt: &FPModule) -> Result<ModMorphism> {
    let hom = hom_module(src, tgt)?;
    let ring = hom.module.ring();
    let x: Vec<Scalar> = (0..hom.module.gens()).map(|_| random_scalar(rng, &ring)).collect();
    if x.is_empty() {
        return Ok(ModMorphism::zero(src, tgt));
    }
    hom.to_morphism(&x)
}

/// Cyclic module `R/π^e` (or `ℤ/d`).
pub fn cyclic(backend: &Backend, e: u32) -> Result<FPModule> {
    if backend.is_discrete() {
        return Err(Error::BackendMismatch("use FPModule::from_integers over the discrete backend".into()));
    }
    FPModule::from_exponents(backend, &[e])
}
