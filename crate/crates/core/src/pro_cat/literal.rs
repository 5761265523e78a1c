use serde::{Deserialize, Serialize};

use super::product::product_of;
use super::tower::{constant_tower, explicit_tower, ring_tower, Strictness, Tower};
use crate::coefficients::{Backend, MatrixLiteral, Scalar};
use crate::discrete_mod::{FPModule, ModMorphism, ModuleLiteral};
use crate::error::{Error, Result};

/// Named generator rules for the levels past an explicit prefix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum TowerRule {
    /// `(R_n^rank)_n` with reductions.
    RingTower {
        #[serde(default = "one")]
        rank: usize,
    },
    /// Constant module, identity transitions.
    Constant { module: ModuleLiteral },
    /// Constant module whose transitions are multiplication by `scalar`.
    Scaled { module: ModuleLiteral, scalar: Scalar },
    /// Diagonal product of finitely many towers.
    ProductOf { factors: Vec<TowerLiteral> },
}

fn one() -> usize {
    1
}

/// `{backend, prefix?, rule?, strict?}`. The prefix gives levels `0..L`
/// and the transitions out of levels `1..=L` (the last one reads from the
/// rule's level `L`); without a rule the last prefix level repeats.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerLiteral {
    pub backend: Backend,
    #[serde(default)]
    pub levels: Vec<ModuleLiteral>,
    #[serde(default)]
    pub transitions: Vec<MatrixLiteral>,
    #[serde(default, flatten)]
    pub rule: Option<TowerRule>,
    #[serde(default)]
    pub strict: Option<Strictness>,
}

impl TowerLiteral {
    pub fn into_tower(&self) -> Result<Tower> {
        let backend = self.backend.validated()?;
        let levels = self.levels.iter().map(ModuleLiteral::into_module).collect::<Result<Vec<_>>>()?;
        if levels.iter().any(|m| *m.backend() != backend) {
            return Err(Error::BackendMismatch("tower levels use another backend".into()));
        }
        let declared = self.strict.unwrap_or(Strictness::Unknown);
        let Some(rule) = &self.rule else {
            if self.transitions.len() + 1 < levels.len() {
                return Err(Error::ShapeError("one transition per consecutive pair of levels".into()));
            }
            let maps = (0..levels.len().saturating_sub(1))
                .map(|n| ModMorphism::new(&levels[n + 1], &levels[n], self.transitions[n].into_matrix(&backend)?))
                .collect::<Result<Vec<_>>>()?;
            return Ok(explicit_tower(&backend, levels, maps, declared));
        };
        let tail = rule_tower(&backend, rule)?;
        if levels.is_empty() {
            return Ok(if self.strict.is_some() { tail.with_strictness(declared) } else { tail });
        }
        if self.transitions.len() != levels.len() {
            return Err(Error::ShapeError("a prefix before a rule needs one transition per prefix level".into()));
        }
        let len = levels.len();
        let maps = (0..len)
            .map(|n| {
                let src = if n + 1 < len { levels[n + 1].clone() } else { tail.level(len) };
                ModMorphism::new(&src, &levels[n], self.transitions[n].into_matrix(&backend)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let (lv, t1, t2) = (levels, tail.clone(), tail);
        Ok(Tower::from_fn(
            &backend,
            "literal",
            declared,
            move |_, n| if n < len { lv[n].clone() } else { t1.level(n) },
            move |_, n| if n < len { maps[n].clone() } else { t2.transition(n) },
        ))
    }
}

fn rule_tower(backend: &Backend, rule: &TowerRule) -> Result<Tower> {
    match rule {
        TowerRule::RingTower { rank } => Ok(ring_tower(backend, *rank)),
        TowerRule::Constant { module } => Ok(constant_tower(&module.into_module()?)),
        TowerRule::Scaled { module, scalar } => {
            let m = module.into_module()?;
            let c = m.ring().parse_scalar(scalar)?;
            Ok(scaled_tower(&m, &c))
        }
        TowerRule::ProductOf { factors } => {
            let ts = factors.iter().map(TowerLiteral::into_tower).collect::<Result<Vec<_>>>()?;
            Ok(product_of(backend, ts).tower)
        }
    }
}

/// Constant module with transitions multiplication by `c`.
pub fn scaled_tower(m: &FPModule, c: &Scalar) -> Tower {
    let (m1, c1) = (m.clone(), c.clone());
    Tower::from_fn(m.backend(), "scaled", Strictness::Unknown, move |_, _| m1.clone(), move |t, n| {
        ModMorphism::scalar(&t.level(n), &c1)
    })
}
