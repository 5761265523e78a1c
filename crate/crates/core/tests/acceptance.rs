//! Acceptance run: one line per criterion with the elapsed time against its
//! limit. Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use procontra::coefficients::{Backend, Matrix};
use procontra::contra::{contratensor, free_contra, ContraTower};
use procontra::discrete_mod::{FPModule, Invariants};
use procontra::duality::adic_example;
use procontra::homotopy::*;
use procontra::par;
use procontra::pro_cat::{coreflector_check, product_check};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, total: usize) -> Outcome {
    let detail = match failures.first() {
        None => format!("{total} cases"),
        Some(f) => format!("{}/{total} failed, first: {f}", failures.len()),
    };
    Outcome { pass: failures.is_empty(), detail }
}

fn padic(p: u64) -> Backend {
    Backend::padic(p).unwrap()
}

fn exps(m: &FPModule) -> Vec<u32> {
    match m.invariants() {
        Invariants::Chain { exponents } => exponents.clone(),
        _ if m.is_zero() => Vec::new(),
        other => panic!("not a chain module: {other:?}"),
    }
}

fn int_rows(m: &Matrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|s| s.as_int().unwrap().to_i64().unwrap()).collect()).collect()
}

/// Multisets of exponents in `1..=max` with at most `gens` elements.
fn exponent_multisets(gens: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..gens {
        let mut next = Vec::new();
        for v in &frontier {
            let start = v.last().copied().unwrap_or(1);
            for e in start..=max {
                let mut w: Vec<u32> = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    for p in [2, 3] {
        match adic_example(p, 5) {
            Ok(r) if r.pass() => {}
            Ok(r) => failures.push(format!("p = {p}: {:?}", r.mismatches)),
            Err(e) => failures.push(format!("p = {p}: {e}")),
        }
    }
    outcome(failures, 2)
}

fn criterion_2() -> Outcome {
    let backends = [padic(2), padic(3), Backend::power_series(2).unwrap()];
    let mut failures = Vec::new();
    let mut total = 0;
    for b in &backends {
        for ns in exponent_multisets(3, 4) {
            let n = FPModule::from_exponents(b, &ns).unwrap();
            for k in 0..=3 {
                total += 1;
                let mut expect: Vec<u32> = ns.iter().flat_map(|&e| std::iter::repeat(e).take(k)).collect();
                expect.sort_unstable();
                let got = exps(&contratensor(&n, &free_contra(b, k)).unwrap());
                if got != expect {
                    failures.push(format!("{b:?}: N = {ns:?}, |X| = {k}: {got:?} vs {expect:?}"));
                }
            }
        }
        let mut qs: Vec<(String, ContraTower, Box<dyn Fn(u32) -> Vec<u32>>)> = Vec::new();
        for ms in exponent_multisets(2, 4) {
            let m = FPModule::from_exponents(b, &ms).unwrap();
            let ms1 = ms.clone();
            qs.push((format!("{ms:?}"), ContraTower::of_module(&m), Box::new(move |n| ms1.iter().map(|&e| e.min(n)).collect())));
        }
        for k in 0..=3 {
            qs.push((format!("free {k}"), free_contra(b, k), Box::new(move |n| vec![n; k])));
        }
        for (name, q, quotient) in &qs {
            for n in 1..=5 {
                total += 1;
                let mut expect = quotient(n);
                expect.sort_unstable();
                let got = exps(&contratensor(&FPModule::from_exponents(b, &[n]).unwrap(), q).unwrap());
                if got != expect {
                    failures.push(format!("{b:?}: Q = {name}, n = {n}: {got:?} vs {expect:?}"));
                }
            }
        }
    }
    outcome(failures, total)
}

fn criterion_3() -> Outcome {
    let b = padic(2);
    let seeds: Vec<u64> = (0..200).collect();
    let failures: Vec<String> = par::map(&seeds, |&seed| -> Option<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module_complex(&mut rng, &b, 3, 2, 3).ok()?;
        let n = random_module_complex(&mut rng, &b, 3, 2, 3).ok()?;
        let run = || -> procontra::Result<Option<String>> {
            let h = hom_contraderived(&n, &xi(&m)?, 8)?;
            let o = db_coh_hom_oracle(&m, &n)?;
            if !h.agree || !h.path_i.is_isomorphic(&o) || !h.path_ii.is_isomorphic(&o) {
                return Ok(Some(format!(
                    "seed {seed}: (i) {} (ii) {} oracle {} at depth {:?}",
                    h.path_i.describe(),
                    h.path_ii.describe(),
                    o.describe(),
                    h.certified_depth
                )));
            }
            Ok(None)
        };
        run().unwrap_or_else(|e| Some(format!("seed {seed}: {e}")))
    })
    .into_iter()
    .flatten()
    .collect();
    outcome(failures, seeds.len())
}

fn criterion_4() -> Outcome {
    let backends = [padic(2), padic(3), Backend::power_series(2).unwrap()];
    let seeds: Vec<u64> = (0..102).collect();
    let failures: Vec<String> = par::map(&seeds, |&seed| match product_check(&backends[seed as usize % 3], seed, 4) {
        Ok(r) if r.pass() => None,
        Ok(r) => Some(format!("seed {seed}: {r:?}")),
        Err(e) => Some(format!("seed {seed}: {e}")),
    })
    .into_iter()
    .flatten()
    .collect();
    outcome(failures, seeds.len())
}

fn criterion_5() -> Outcome {
    let b = padic(2);
    let seeds: Vec<u64> = (0..100).collect();
    let failures: Vec<String> = par::map(&seeds, |&seed| match coreflector_check(&b, seed, 5) {
        Ok(r) if r.agree => None,
        Ok(r) => Some(format!("seed {seed}: {r:?}")),
        Err(e) => Some(format!("seed {seed}: {e}")),
    })
    .into_iter()
    .flatten()
    .collect();
    outcome(failures, seeds.len())
}

/// Acyclicity and freeness of cocycles of `F/2^k` for `k ≤ 3`, by enumeration.
fn brute_pure(f: &FreeComplex) -> bool {
    (1..=3u32).all(|k| {
        let q = 1u64 << k;
        (f.lo()..=f.hi()).all(|i| {
            let out = common::rows_mod(q, &int_rows(&f.diff(i)));
            let inc = common::rows_mod(q, &int_rows(&f.diff(i - 1)));
            common::cohomology_order(q, f.rank(i), &inc, f.rank(i - 1), &out) == 1 && common::cocycles_free(2, k, f.rank(i), &out)
        })
    })
}

fn criterion_6() -> Outcome {
    let b = padic(2);
    let seeds: Vec<u64> = (0..60).collect();
    let failures: Vec<String> = par::map(&seeds, |&seed| -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cases = [(random_contractible(&mut rng, &b, 4, 3), true), (random_nonacyclic(&mut rng, &b, 4, 3), false)];
        cases
            .into_iter()
            .filter_map(|(f, truth)| {
                let verdict = match pure_acyclicity_test(&ContraComplex(f.clone()), 3, seed) {
                    Ok(v) => v.pass,
                    Err(e) => return Some(format!("seed {seed}: {e}")),
                };
                let brute = brute_pure(&f);
                (verdict != truth || brute != truth).then(|| format!("seed {seed}: truth {truth}, battery {verdict}, enumeration {brute}"))
            })
            .collect()
    })
    .into_iter()
    .flatten()
    .collect();
    outcome(failures, 2 * seeds.len())
}

fn criterion_7() -> Outcome {
    let b = padic(2);
    let seeds: Vec<u64> = (0..100).collect();
    let failures: Vec<String> = par::map(&seeds, |&seed| -> Option<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_contractible(&mut rng, &b, 4, 3);
        let p = random_free_complex(&mut rng, &b, 3, 3);
        let mut run = || -> procontra::Result<Option<String>> {
            let cert = periodicity_check_projective_cocycles(&ContraComplex(c.clone()), 4)?;
            if !cert.certified {
                return Ok(Some(format!("seed {seed}: cocycles not certified projective: {cert:?}")));
            }
            let f = random_chain_map(&mut rng, &p, &c)?;
            if null_homotopy_to_depth(&f, 5)?.is_none() {
                return Ok(Some(format!("seed {seed}: no null-homotopy")));
            }
            Ok(None)
        };
        run().unwrap_or_else(|e| Some(format!("seed {seed}: {e}")))
    })
    .into_iter()
    .flatten()
    .collect();
    outcome(failures, 2 * seeds.len())
}

fn criterion_8() -> Outcome {
    let backends = [padic(2), padic(3)];
    let seeds: Vec<u64> = (0..50).collect();
    let failures: Vec<String> = par::map(&seeds, |&seed| -> Option<String> {
        let b = backends[seed as usize % 2];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut run = || -> procontra::Result<Option<String>> {
            let c = random_module_complex(&mut rng, &b, 3, 2, 3)?;
            let (silly, canonical) = (silly_diagram(&c)?, canonical_diagram(&c)?);
            for (name, t) in [("hocolim", hocolim_telescope(&silly)?), ("holim", holim_telescope(&canonical)?)] {
                if !t.is_degreewise_split() {
                    return Ok(Some(format!("seed {seed}: {name} sequence not split")));
                }
                if t.equivalence()?.is_none() {
                    return Ok(Some(format!("seed {seed}: {name} not homotopy equivalent to the complex")));
                }
            }
            Ok(None)
        };
        run().unwrap_or_else(|e| Some(format!("seed {seed}: {e}")))
    })
    .into_iter()
    .flatten()
    .collect();
    outcome(failures, 2 * seeds.len())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("adic example reproduction", 1, criterion_1),
        ("contratensor identities", 10, criterion_2),
        ("Hom three-way agreement", 120, criterion_3),
        ("product universal property and exactness", 60, criterion_4),
        ("coreflector coherence", 60, criterion_5),
        ("pure-acyclicity criterion", 60, criterion_6),
        ("periodicity certificates and null-homotopies", 120, criterion_7),
        ("truncation telescopes", 60, criterion_8),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Outcome { pass: false, detail: "panicked".into() });
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= Duration::from_secs(*limit);
        all &= pass;
        println!(
            "criterion {}: {} {name} ({:.2}s, limit {limit}s): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            result.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
