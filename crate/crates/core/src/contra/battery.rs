use serde::Serialize;

use super::{contratensor, preserves_injectivity, Coefficient, ContraTower, GroupReport, GroupValue};
use crate::coefficients::{Backend, Level, Matrix};
use crate::discrete_mod::{FPModule, ModMorphism};
use crate::error::Result;
use crate::par;

/// One battery sequence `0 → K → Rₙ^k → ⊕ R/π^{eᵢ} → 0`; over the discrete
/// backend `ℤ^k → ⊕ ℤ/eᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatWitness {
    pub level: u32,
    pub divisors: Vec<u32>,
    pub kernel: String,
    pub middle: String,
    pub quotient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BatteryComposition {
    pub sequences: usize,
    pub max_level: u32,
    pub max_rank: usize,
    pub max_divisor: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatCertificate {
    pub pass: bool,
    pub depth: usize,
    pub battery: BatteryComposition,
    pub witness: Option<FlatWitness>,
}

struct Item {
    level: u32,
    divisors: Vec<u32>,
}

/// Nondecreasing sequences of length `k` with entries in `lo..=hi`.
fn multisets(k: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        for mut rest in multisets(k - 1, first, hi) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn battery(backend: &Backend, d: usize) -> Vec<Item> {
    let d32 = d as u32;
    let mut items = Vec::new();
    if backend.is_discrete() {
        for k in 1..=d {
            for divisors in multisets(k, 2, d32 + 1) {
                items.push(Item { level: 0, divisors });
            }
        }
        return items;
    }
    for n in 1..=d32 {
        for k in 1..=d {
            for divisors in multisets(k, 1, n) {
                items.push(Item { level: n, divisors });
            }
        }
    }
    items
}

/// The cover `Rₙ^k → M` of a battery item and its kernel inclusion.
fn sequence(backend: &Backend, item: &Item) -> (ModMorphism, ModMorphism) {
    let k = item.divisors.len();
    let quotient = if backend.is_discrete() {
        FPModule::from_integers(&item.divisors.iter().map(|&e| e as i64).collect::<Vec<_>>())
    } else {
        let ring = backend.level_ring(Level::Finite(item.level));
        let diag: Vec<_> = item.divisors.iter().map(|&e| ring.pi_pow(e)).collect();
        FPModule::new(*backend, Level::Finite(item.level), k, Matrix::diagonal(&ring, k, k, &diag)).expect("diagonal module")
    };
    let free = FPModule::free(backend, item.level, k);
    let cover = ModMorphism::unchecked(&free, &quotient, Matrix::identity(&quotient.ring(), k)).expect("identity cover");
    let (_, incl) = cover.kernel();
    (cover, incl)
}

/// Runs the battery of short exact sequences built from cyclic sums with
/// level, rank and divisor exponent at most `d`. Since `− ⊙ Q` is right
/// exact, only injectivity on the kernel is checked. The witness is the
/// first failure in the order (level, rank, divisors).
pub fn is_flat_to_depth(q: &Coefficient, d: usize) -> Result<FlatCertificate> {
    let backend = match q {
        Coefficient::Contra(t) => *t.backend(),
        Coefficient::Rationals => Backend::discrete_integers(),
    };
    let items = battery(&backend, d);
    let verdicts = par::map(&items, |item| {
        let (_, incl) = sequence(&backend, item);
        preserves_injectivity(&incl, q)
    });
    let mut witness = None;
    for (item, ok) in items.iter().zip(verdicts) {
        if !ok? {
            let (cover, incl) = sequence(&backend, item);
            witness = Some(FlatWitness {
                level: item.level,
                divisors: item.divisors.clone(),
                kernel: incl.src().describe(),
                middle: cover.src().describe(),
                quotient: cover.tgt().describe(),
            });
            break;
        }
    }
    let battery = BatteryComposition {
        sequences: items.len(),
        max_level: if backend.is_discrete() { 0 } else { d as u32 },
        max_rank: d,
        max_divisor: if backend.is_discrete() { d as u32 + 1 } else { d as u32 },
    };
    Ok(FlatCertificate { pass: witness.is_none(), depth: d, battery, witness })
}

#[derive(Clone, Debug, Serialize)]
pub struct NakayamaWitness {
    pub level: u32,
    pub value: GroupReport,
}

/// First `N = R/Iₙ`, `1 ≤ n ≤ d`, with `N ⊙ Q ≠ 0`; over the discrete
/// backend only `N = ℤ` is tried.
pub fn nakayama_witness(q: &ContraTower, d: usize) -> Result<Option<(FPModule, NakayamaWitness)>> {
    let backend = *q.backend();
    let levels: Vec<u32> = if backend.is_discrete() { vec![0] } else { (1..=d as u32).collect() };
    for n in levels {
        let r = FPModule::free(&backend, n, 1);
        let value = contratensor(&r, q)?;
        if !value.is_zero() {
            let report = GroupValue::Module(value).to_report();
            return Ok(Some((r, NakayamaWitness { level: n, value: report })));
        }
    }
    Ok(None)
}
