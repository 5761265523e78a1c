use serde::{Deserialize, Serialize};

use super::lazy::LazySeq;
use super::morphism::ProMorphism;
use super::product::product;
use super::product::Family;
use super::reindex::Reindex;
use super::tower::{constant_tower, zero_tower, Strictness, Tower};
use crate::discrete_mod::{FPModule, Invariants, ModMorphism};
use crate::error::{Error, Result};

/// Kernel of a morphism of towers in `Pro_ω`, with its inclusion.
///
/// Level `n` is the kernel of `f_n: S_{r(n)} → T_n`; the inclusion is
/// reindexed by a shift so that it reads from level `n + c` with `r(n + c) ≥ n`.
pub fn kernel_pro(f: &ProMorphism) -> (Tower, ProMorphism) {
    let kers = LazySeq::new();
    let (f1, k1) = (f.clone(), kers.clone());
    let level_ker = move |n: usize| -> (FPModule, ModMorphism) { k1.get(n, || f1.level_map(n).kernel()) };
    let (lk1, lk2, lk3) = (level_ker.clone(), level_ker.clone(), level_ker);
    let f2 = f.clone();
    let k = Tower::from_fn(
        f.src().backend(),
        format!("ker({})", f.src().name()),
        Strictness::Unknown,
        move |_, n| lk1(n).0,
        move |_, n| {
            let r = f2.reindex();
            let (_, i0) = lk2(n);
            let (_, i1) = lk2(n + 1);
            let down = f2.src().composite(r.apply(n + 1), r.apply(n)).compose(&i1).expect("composable");
            i0.lift(&down).expect("kernels map to kernels")
        },
    );
    let c = f.reindex().lag();
    let f3 = f.clone();
    let incl = ProMorphism::from_fn(&k, f.src(), Reindex::shift(c), move |j| {
        let (_, i) = lk3(j + c);
        let r = f3.reindex().apply(j + c);
        f3.src().composite(r, j).compose(&i).expect("composable")
    });
    (k, incl)
}

/// Levelwise cokernel `T_n / f_n(S_{r(n)})` with its projection.
pub fn cokernel_pro(f: &ProMorphism) -> (Tower, ProMorphism) {
    let cokers = LazySeq::new();
    let (f1, c1) = (f.clone(), cokers.clone());
    let level_coker = move |n: usize| -> (FPModule, ModMorphism) { c1.get(n, || f1.level_map(n).cokernel()) };
    let (lc1, lc2, lc3) = (level_coker.clone(), level_coker.clone(), level_coker);
    let f2 = f.clone();
    let declared = if f.tgt().is_declared_strict() { Strictness::CertifiedStrict } else { Strictness::Unknown };
    let c = Tower::from_fn(
        f.tgt().backend(),
        format!("coker({})", f.tgt().name()),
        declared,
        move |_, n| lc1(n).0,
        move |_, n| {
            let (_, p0) = lc2(n);
            let (_, p1) = lc2(n + 1);
            let down = p0.compose(&f2.tgt().transition(n)).expect("composable");
            p1.descend(&down).expect("images map to images")
        },
    );
    let proj = ProMorphism::levelwise(f.tgt(), &c, move |n| lc3(n).1);
    (c, proj)
}

/// How a strict replacement was obtained, with the depth it was checked to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    AlreadyStrict,
    /// Every image chain `im(T_m → T_n)`, `n ≤ depth`, is constant from `m = n + lag` to `2·depth`.
    Stabilized { lag: usize, depth: usize },
    /// Discrete backend: every image chain is torsion-free and each step
    /// lies in a proper multiple of the previous one, so the intersections vanish.
    Contracting { depth: usize },
    /// No stabilization seen up to `2·depth`; the output is a best effort.
    Unstabilized { depth: usize },
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        !matches!(self, Certificate::Unstabilized { .. })
    }

    pub fn depth(&self) -> Option<usize> {
        match self {
            Certificate::AlreadyStrict => None,
            Certificate::Stabilized { depth, .. } | Certificate::Contracting { depth } | Certificate::Unstabilized { depth } => {
                Some(*depth)
            }
        }
    }
}

/// A strict tower `E` sitting in a tower `X`.
#[derive(Clone)]
pub struct Strictified {
    pub tower: Tower,
    /// `E → X`, levelwise monomorphisms.
    pub inclusion: ProMorphism,
    /// `X → E` reading `X_{n+lag} → E_n`; inverse to the inclusion in `Pro_ω`
    /// when stabilized.
    pub comparison: ProMorphism,
    pub certificate: Certificate,
}

impl Strictified {
    /// Factors `φ: S → X` with strict source through the inclusion.
    pub fn factor(&self, phi: &ProMorphism) -> Option<ProMorphism> {
        if !phi.tgt().ptr_eq(self.inclusion.tgt()) {
            return None;
        }
        let incl = self.inclusion.clone();
        let p = phi.clone();
        if !(0..=self.certificate.depth().unwrap_or(4)).all(|n| incl.level_map(n).lift(&p.level_map(n)).is_some()) {
            return None;
        }
        Some(ProMorphism::from_fn(phi.src(), &self.tower, phi.reindex().clone(), move |n| {
            incl.level_map(n).lift(&p.level_map(n)).unwrap_or_else(|| ModMorphism::zero(p.level_map(n).src(), incl.level_map(n).src()))
        }))
    }
}

fn image_of(x: &Tower, m: usize, n: usize) -> (FPModule, ModMorphism) {
    let (im, _, incl) = x.composite(m, n).image();
    (im, incl)
}

fn same_submodule(a: &ModMorphism, b: &ModMorphism) -> bool {
    a.lift(b).is_some() && b.lift(a).is_some()
}

/// Whether `next ⊆ prev` sits inside a proper multiple of `prev`, which is torsion-free.
fn contracts(prev: &ModMorphism, next: &ModMorphism) -> bool {
    let rank = match prev.src().invariants() {
        Invariants::Integral { torsion, free_rank } if torsion.is_empty() => *free_rank,
        _ => return false,
    };
    if rank == 0 {
        return true;
    }
    let Some(step) = prev.lift(next) else { return false };
    match step.cokernel().0.invariants() {
        Invariants::Integral { torsion, free_rank } => torsion.len() + free_rank == rank,
        Invariants::Chain { .. } => false,
    }
}

fn stable_images(x: &Tower, depth: usize, allow_contracting: bool) -> Strictified {
    if x.is_declared_strict() {
        return Strictified {
            tower: x.clone(),
            inclusion: ProMorphism::identity(x),
            comparison: ProMorphism::identity(x),
            certificate: Certificate::AlreadyStrict,
        };
    }
    let top = 2 * depth.max(1);
    let stab: Vec<Option<usize>> = crate::par::range_map(depth + 1, |n| {
        let (_, last) = image_of(x, top, n);
        (n..top).find(|&m| same_submodule(&image_of(x, m, n).1, &last))
    });
    if let Some(lag) = stab.iter().enumerate().map(|(n, s)| s.map(|m| m - n)).collect::<Option<Vec<_>>>() {
        let lag = lag.into_iter().max().unwrap_or(0);
        return images_at_lag(x, lag, Certificate::Stabilized { lag, depth }, Strictness::CertifiedStrict);
    }
    if allow_contracting && x.backend().is_discrete() {
        let ok = crate::par::range_map(depth + 1, |n| {
            let chain: Vec<ModMorphism> = (n..=top).map(|m| image_of(x, m, n).1).collect();
            chain.windows(2).all(|w| contracts(&w[0], &w[1]))
        });
        if ok.into_iter().all(|b| b) {
            let z = zero_tower(x.backend());
            return Strictified {
                inclusion: ProMorphism::zero(&z, x),
                comparison: ProMorphism::zero(x, &z),
                tower: z,
                certificate: Certificate::Contracting { depth },
            };
        }
    }
    let lag = top - depth;
    images_at_lag(x, lag, Certificate::Unstabilized { depth }, Strictness::Unknown)
}

fn images_at_lag(x: &Tower, lag: usize, certificate: Certificate, declared: Strictness) -> Strictified {
    let ims = LazySeq::new();
    let (x1, i1) = (x.clone(), ims.clone());
    let image = move |n: usize| -> (FPModule, ModMorphism, ModMorphism) {
        i1.get(n, || x1.composite(n + lag, n).image())
    };
    let (g1, g2, g3, g4) = (image.clone(), image.clone(), image.clone(), image);
    let x2 = x.clone();
    let e = Tower::from_fn(
        x.backend(),
        format!("strict({})", x.name()),
        declared,
        move |_, n| g1(n).0,
        move |_, n| {
            let (_, _, i0) = g2(n);
            let (_, _, i1) = g2(n + 1);
            i0.lift(&x2.transition(n).compose(&i1).expect("composable")).expect("images are nested")
        },
    );
    let inclusion = ProMorphism::levelwise(&e, x, move |n| g3(n).2);
    let comparison = ProMorphism::from_fn(x, &e, Reindex::shift(lag), move |n| g4(n).1);
    Strictified { tower: e, inclusion, comparison, certificate }
}

/// Strict tower isomorphic to `x` in `Pro_ω` through the stabilized images.
pub fn strictify(x: &Tower, depth: usize) -> Strictified {
    stable_images(x, depth, false)
}

/// Coreflection onto strict towers: the largest strict subtower.
pub fn coreflect_strict(x: &Tower, depth: usize) -> Strictified {
    stable_images(x, depth, true)
}

fn require_strict(t: &Tower, depth: usize) -> Result<()> {
    if t.is_declared_strict() || t.check_strict(depth) == Strictness::CertifiedStrict {
        Ok(())
    } else {
        Err(Error::NotStrict(format!("tower {} has a non-surjective transition", t.name())))
    }
}

/// Kernel in the strict category: the coreflection of the levelwise kernel.
/// The inclusion lands in the source of `f`.
pub fn kernel_strict(f: &ProMorphism, depth: usize) -> Result<Strictified> {
    require_strict(f.src(), depth)?;
    require_strict(f.tgt(), depth)?;
    let (k, incl) = kernel_pro(f);
    let s = coreflect_strict(&k, depth);
    let inclusion = incl.compose(&s.inclusion)?;
    let comparison = s.comparison.clone();
    Ok(Strictified { tower: s.tower, inclusion, comparison, certificate: s.certificate })
}

/// The coreflection of a tower `B` computed inside the split tower
/// `D_n = ⊕_{m≤n} B_m`: the strict kernel of `D → E = coker(B → D)`.
/// Returns it with levelwise comparison maps from `coreflect_strict(B)`.
pub struct EmbeddingPath {
    pub inside: Strictified,
    pub direct: Strictified,
    /// Levelwise maps `direct_n → inside_n`.
    pub comparison: Vec<ModMorphism>,
}

impl EmbeddingPath {
    /// Both paths certified and levelwise isomorphic to `depth`.
    pub fn agree(&self, depth: usize) -> bool {
        if !(self.inside.certificate.is_certified() && self.direct.certificate.is_certified()) {
            return false;
        }
        (0..=depth).all(|n| {
            let (a, b) = (self.direct.tower.level(n), self.inside.tower.level(n));
            if a.is_zero() && b.is_zero() {
                return true;
            }
            self.comparison.get(n).is_some_and(|c| c.is_isomorphism())
        })
    }
}

pub fn coreflect_via_embedding(b: &Tower, depth: usize) -> EmbeddingPath {
    let fam_b = b.clone();
    let d = product(b.backend(), Family::countable(move |m| constant_tower(&fam_b.level(m)), true));
    let (b1, d1) = (b.clone(), d.clone());
    // F_n: B_n → D_n with components the composites B_n → B_m
    let embed = move |n: usize| -> ModMorphism {
        let (sum, inj, _) = d1.level_sum(n);
        let mut total = ModMorphism::zero(&b1.level(n), &sum);
        for (m, i) in inj.iter().enumerate() {
            total = total.add(&i.compose(&b1.composite(n, m)).expect("composable")).expect("parallel");
        }
        total
    };
    let e1 = embed.clone();
    let f = ProMorphism::levelwise(b, &d.tower, move |n| e1(n));
    let (_, g) = cokernel_pro(&f);
    let (ker_g, ker_incl) = kernel_pro(&g);
    let inside_raw = coreflect_strict(&ker_g, depth);
    let inside = Strictified {
        inclusion: ker_incl.compose(&inside_raw.inclusion).expect("composable"),
        tower: inside_raw.tower,
        comparison: inside_raw.comparison,
        certificate: inside_raw.certificate,
    };
    let direct = coreflect_strict(b, depth);
    let comparison = (0..=depth)
        .map(|n| {
            let into_d = embed(n).compose(&direct.inclusion.level_map(n)).expect("composable");
            inside.inclusion.level_map(n).lift(&into_d).unwrap_or_else(|| {
                ModMorphism::zero(&direct.tower.level(n), &inside.tower.level(n))
            })
        })
        .collect();
    EmbeddingPath { inside, direct, comparison }
}

/// Whether each composite `T_m → T_n` with `m ≤ n + slack` eventually vanishes.
pub fn is_pro_zero(t: &Tower, depth: usize, slack: usize) -> bool {
    (0..=depth).all(|n| (n..=n + slack).any(|m| t.composite(m, n).is_zero()))
}

/// Whether `A → B → C` of strict towers is a short exact sequence in
/// `Pro_ω`, checked to `depth` with `depth` levels of slack.
pub fn is_admissible_ses(f: &ProMorphism, g: &ProMorphism, depth: usize) -> Result<bool> {
    if !f.tgt().ptr_eq(g.src()) {
        return Err(Error::ShapeError("the sequence does not compose".into()));
    }
    let deep = 2 * depth + 2;
    for t in [f.src(), f.tgt(), g.tgt()] {
        require_strict(t, deep)?;
    }
    if !g.compose(f)?.is_zero_to(deep, depth) {
        return Ok(false);
    }
    let (kf, _) = kernel_pro(f);
    let (cg, _) = cokernel_pro(g);
    if !is_pro_zero(&kf, depth, depth) || !is_pro_zero(&cg, depth, depth) {
        return Ok(false);
    }
    let (kg, _) = kernel_pro(g);
    // f' : A → ker g, read through the levelwise kernels of g
    let rg = g.reindex().clone();
    let r = f.reindex().after(&rg);
    let (ff, gg) = (f.clone(), g.clone());
    let lifts: Vec<Option<ModMorphism>> = crate::par::range_map(deep + 1, |n| {
        let (_, i) = gg.level_map(n).kernel();
        let i = i.with_ends(&kg.level(n), i.tgt());
        i.lift(&ff.level_map(rg.apply(n)))
    });
    if lifts.iter().any(Option::is_none) {
        return Ok(false);
    }
    let lifts: Vec<ModMorphism> = lifts.into_iter().flatten().collect();
    let (ff2, gg2, kg2) = (f.clone(), g.clone(), kg.clone());
    let fprime = ProMorphism::from_fn(f.src(), &kg, r, move |n| match lifts.get(n) {
        Some(h) => h.clone(),
        None => {
            let (_, i) = gg2.level_map(n).kernel();
            let i = i.with_ends(&kg2.level(n), i.tgt());
            i.lift(&ff2.level_map(gg2.reindex().apply(n))).expect("g ∘ f vanishes levelwise")
        }
    });
    let (h, _) = cokernel_pro(&fprime);
    Ok(is_pro_zero(&h, depth, depth))
}
