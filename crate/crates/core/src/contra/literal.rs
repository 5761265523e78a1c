use serde::{Deserialize, Serialize};

use super::{free_contra, Coefficient, ContraTower};
use crate::coefficients::Backend;
use crate::discrete_mod::ModuleLiteral;
use crate::error::Result;
use crate::pro_cat::TowerLiteral;

/// JSON form of a contratensor coefficient.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "contra", rename_all = "kebab-case")]
pub enum ContraLiteral {
    Free { backend: Backend, rank: usize },
    /// `M ⊗ ℜ` for a finitely presented `M`.
    Reductions { module: ModuleLiteral },
    Tower { tower: TowerLiteral },
    Rationals,
}

impl ContraLiteral {
    /// Builds the coefficient; explicit towers are validated to `depth`.
    pub fn into_coefficient(&self, depth: usize) -> Result<Coefficient> {
        Ok(match self {
            ContraLiteral::Free { backend, rank } => Coefficient::Contra(free_contra(&backend.validated()?, *rank)),
            ContraLiteral::Reductions { module } => Coefficient::Contra(ContraTower::of_module(&module.into_module()?)),
            ContraLiteral::Tower { tower } => Coefficient::Contra(ContraTower::from_tower(&tower.into_tower()?, depth)?),
            ContraLiteral::Rationals => Coefficient::Rationals,
        })
    }
}
