use serde::Serialize;

use super::pro_tensor::{pro_contratensor, rational_limit_map, LimitValue, ProLevels, RationalLimitMap};
use crate::coefficients::{Backend, Matrix};
use crate::contra::Coefficient;
use crate::discrete_mod::{FPModule, ModMorphism};
use crate::error::{Error, Result};
use crate::pro_cat::{constant_tower, integer_adic_tower, kernel_strict, Certificate, ProMorphism};

/// The reduction map `g: ℤ → (ℤ/pⁿ)ₙ` of towers of abelian groups.
pub fn adic_reduction(p: u64) -> ProMorphism {
    let z = constant_tower(&FPModule::from_integers(&[0]));
    let adic = integer_adic_tower(p);
    let a1 = adic.clone();
    ProMorphism::levelwise(&z, &adic, move |n| {
        let tgt = a1.level(n);
        let src = FPModule::from_integers(&[0]);
        let map = Matrix::from_fn(&tgt.ring(), tgt.gens(), 1, |_, _| tgt.ring().one());
        ModMorphism::unchecked(&src, &tgt, map).expect("reduction")
    })
}

/// The values of the strict kernel of `g` and of `g ⊙^pro ℚ`.
#[derive(Clone, Debug, Serialize)]
pub struct AdicExample {
    pub prime: u64,
    pub depth: usize,
    /// Levels of `ker(g)` in the strict category.
    pub kernel_strict_zero: bool,
    pub kernel_certificate: Certificate,
    /// `dim (ℤ/pⁿ) ⊙ ℚ` for `n ≤ depth`.
    pub adic_level_ranks: Vec<usize>,
    pub adic_limit_rank: Option<usize>,
    pub constant_limit_rank: Option<usize>,
    pub limit_map: RationalLimitMap,
    pub mismatches: Vec<String>,
}

impl AdicExample {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn limit_rank(v: &LimitValue) -> Option<usize> {
    match v {
        LimitValue::Rational { rank } => Some(*rank),
        _ => None,
    }
}

/// Computes every value of the `ℤ → (ℤ/pⁿ)ₙ` example and lists the ones that
/// differ from the expected `0, 0, ℚ, ℚ`.
pub fn adic_example(p: u64, depth: usize) -> Result<AdicExample> {
    Backend::padic(p)?;
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let g = adic_reduction(p);
    let ks = kernel_strict(&g, depth)?;
    let kernel_strict_zero = ks.tower.is_zero_to(depth) && ks.certificate.is_certified();
    let e = pro_contratensor(g.tgt(), &Coefficient::Rationals, depth)?;
    let adic_level_ranks = match &e.levels {
        ProLevels::Rational { ranks, .. } => ranks.clone(),
        ProLevels::Modules(_) => Vec::new(),
    };
    let d = pro_contratensor(g.src(), &Coefficient::Rationals, depth)?;
    let limit_map = rational_limit_map(&g, depth)?;
    let (adic_limit_rank, constant_limit_rank) = (limit_rank(&e.limit), limit_rank(&d.limit));
    let mut mismatches = Vec::new();
    if !kernel_strict_zero {
        mismatches.push(format!("strict kernel of g: expected 0 with a certificate, got {:?}", ks.certificate));
    }
    if adic_level_ranks.is_empty() || adic_level_ranks.iter().any(|&r| r != 0) {
        mismatches.push(format!("levels of E ⊙ Q: expected all 0, got {adic_level_ranks:?}"));
    }
    if adic_limit_rank != Some(0) {
        mismatches.push(format!("E ⊙^pro Q: expected rank 0, got {adic_limit_rank:?}"));
    }
    if constant_limit_rank != Some(1) {
        mismatches.push(format!("D ⊙^pro Q: expected rank 1, got {constant_limit_rank:?}"));
    }
    if limit_map.kernel_rank != 1 {
        mismatches.push(format!("ker(g ⊙^pro Q): expected rank 1, got {}", limit_map.kernel_rank));
    }
    Ok(AdicExample {
        prime: p,
        depth,
        kernel_strict_zero,
        kernel_certificate: ks.certificate,
        adic_level_ranks,
        adic_limit_rank,
        constant_limit_rank,
        limit_map,
        mismatches,
    })
}
