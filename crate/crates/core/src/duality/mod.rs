//! Projective contramodules as duals of towers in `Prod_ω(ℜ)`, and the
//! pro-contratensor product.

mod example;
mod pro_tensor;
mod recognize;

use serde::{Deserialize, Serialize};

use crate::coefficients::{Backend, Matrix};
use crate::contra::{free_contra, ContraTower};
use crate::discrete_mod::ModMorphism;
use crate::error::{Error, Result};
use crate::pro_cat::{product, ring_tower, Family, ProMorphism, Tower};

pub use example::{adic_example, adic_reduction, AdicExample};
pub use pro_tensor::{
    hom_tower, hom_via_pro_contratensor, pro_contratensor, pro_contratensor_map, rational_limit_map, HomComparison,
    LimitValue, ProContratensor, ProLevels, RationalLimitMap,
};
pub use recognize::{recognize_prod_omega, Recognition};

/// Number of copies of `ℜ`; countable powers are only materialized on the
/// topological side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Power {
    Finite(usize),
    Omega,
}

/// A projective contramodule `ℜ[[X]]` together with its dual tower.
/// Projectives over the local rings in use are free, so no idempotent is
/// ever needed.
#[derive(Clone, Debug)]
pub struct ProjContra {
    power: Power,
    dual: Tower,
    contra: Option<ContraTower>,
}

impl ProjContra {
    pub fn free(backend: &Backend, k: usize) -> ProjContra {
        let contra = free_contra(backend, k);
        ProjContra { power: Power::Finite(k), dual: ring_tower(backend, k), contra: Some(contra) }
    }

    /// Dual of the countable product `∏ ℜ`; only its dual tower exists.
    pub fn omega(backend: &Backend) -> ProjContra {
        let b = *backend;
        let dual = product(backend, Family::countable(move |_| ring_tower(&b, 1), true)).tower;
        ProjContra { power: Power::Omega, dual, contra: None }
    }

    pub fn power(&self) -> Power {
        self.power
    }

    pub fn rank(&self) -> Option<usize> {
        match self.power {
            Power::Finite(k) => Some(k),
            Power::Omega => None,
        }
    }

    pub fn backend(&self) -> &Backend {
        self.dual.backend()
    }

    pub fn to_contra_tower(&self) -> Result<&ContraTower> {
        self.contra
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("free contramodules on a countable set are not materialized".into()))
    }
}

/// JSON form `{power, idempotent?}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjContraLiteral {
    pub backend: Backend,
    pub power: Power,
    #[serde(default)]
    pub idempotent: Option<serde_json::Value>,
}

impl ProjContraLiteral {
    pub fn into_proj(&self) -> Result<ProjContra> {
        if self.idempotent.is_some() {
            return Err(Error::Schema {
                pointer: "/idempotent".into(),
                message: "summands of free contramodules over a local ring are free; give the rank instead".into(),
            });
        }
        let b = self.backend.validated()?;
        Ok(match self.power {
            Power::Finite(k) => ProjContra::free(&b, k),
            Power::Omega => ProjContra::omega(&b),
        })
    }
}

/// A morphism of projective contramodules, stored on the reduction towers.
#[derive(Clone, Debug)]
pub struct ContraMorphism {
    pub src: ProjContra,
    pub tgt: ProjContra,
    pub map: ProMorphism,
}

impl ContraMorphism {
    pub fn compose(&self, first: &ContraMorphism) -> Result<ContraMorphism> {
        Ok(ContraMorphism { src: first.src.clone(), tgt: self.tgt.clone(), map: self.map.compose(&first.map)? })
    }

    pub fn equals_to(&self, other: &ContraMorphism, depth: usize) -> bool {
        self.map.equals_to(&other.map, depth)
    }
}

/// The dual tower of `C`.
pub fn undualize(c: &ProjContra) -> Tower {
    c.dual.clone()
}

/// Dual of a tower recognized in `Prod_ω(ℜ)`, with the isomorphisms between
/// the tower and the power of the ring tower.
pub fn dualize(p: &Tower, depth: usize) -> Result<(ProjContra, Recognition)> {
    let rec = recognize_prod_omega(p, depth)
        .ok_or_else(|| Error::NotInProdOmega(format!("{} is not a finite power of the ring tower to depth {depth}", p.name())))?;
    let c = ProjContra {
        power: Power::Finite(rec.rank),
        dual: rec.power.clone(),
        contra: Some(free_contra(p.backend(), rec.rank)),
    };
    Ok((c, rec))
}

/// Levelwise transpose between two families of free levels. The level map
/// at `n` of `f` has a matrix over `Rₙ`, which also describes the map from
/// `Rₙ`-level of the source, whatever the reindexing.
fn transposed(f: &ProMorphism, src: &Tower, tgt: &Tower) -> ProMorphism {
    let (f1, s1, t1) = (f.clone(), src.clone(), tgt.clone());
    ProMorphism::levelwise(src, tgt, move |n| {
        let (a, b) = (s1.level(n), t1.level(n));
        let m: Matrix = f1.level_map(n).map().transpose();
        ModMorphism::unchecked(&a, &b, m.coerce(&b.ring())).expect("transposed shape")
    })
}

/// `Hom(−, ℜ)` on a morphism `undualize(c1) → undualize(c2)`.
pub fn dualize_morphism(f: &ProMorphism, c1: &ProjContra, c2: &ProjContra) -> Result<ContraMorphism> {
    if !f.src().ptr_eq(&c1.dual) || !f.tgt().ptr_eq(&c2.dual) {
        return Err(Error::ShapeError("morphism does not run between the given dual towers".into()));
    }
    let (a, b) = (c2.to_contra_tower()?, c1.to_contra_tower()?);
    Ok(ContraMorphism { src: c2.clone(), tgt: c1.clone(), map: transposed(f, a.tower(), b.tower()) })
}

/// `Hom^cont(−, ℜ)` on a morphism of projective contramodules.
pub fn undualize_morphism(g: &ContraMorphism) -> Result<ProMorphism> {
    let (a, b) = (g.src.to_contra_tower()?, g.tgt.to_contra_tower()?);
    if !g.map.src().ptr_eq(a.tower()) || !g.map.tgt().ptr_eq(b.tower()) {
        return Err(Error::ShapeError("contramodule morphism is not stored on its reduction towers".into()));
    }
    Ok(transposed(&g.map, &g.tgt.dual, &g.src.dual))
}

/// Dual of a morphism between recognized towers: `ψ' ∘ f ∘ φ`, transposed.
pub fn dualize_tower_morphism(
    f: &ProMorphism,
    src: (&ProjContra, &Recognition),
    tgt: (&ProjContra, &Recognition),
) -> Result<ContraMorphism> {
    let through = tgt.1.to_power.compose(&f.compose(&src.1.from_power)?)?;
    dualize_morphism(&through, src.0, tgt.0)
}

/// Matrix morphism `Rₙ^a → Rₙ^b` on dual towers, levelwise.
pub fn matrix_morphism(c1: &ProjContra, c2: &ProjContra, m: &Matrix) -> Result<ProMorphism> {
    let (a, b) = (c1.rank().unwrap_or(0), c2.rank().unwrap_or(0));
    if c1.rank().is_none() || c2.rank().is_none() || m.rows() != b || m.cols() != a {
        return Err(Error::ShapeError(format!("{}x{} matrix between ranks {a} and {b}", m.rows(), m.cols())));
    }
    let (s, t, m1) = (c1.dual.clone(), c2.dual.clone(), m.clone());
    Ok(ProMorphism::levelwise(&c1.dual, &c2.dual, move |n| {
        let (x, y) = (s.level(n), t.level(n));
        if y.gens() == 0 || x.gens() == 0 {
            return ModMorphism::zero(&x, &y);
        }
        ModMorphism::unchecked(&x, &y, m1.coerce(&y.ring())).expect("matrix shape")
    }))
}
