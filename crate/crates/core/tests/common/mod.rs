//! Brute-force oracles over ℤ/pⁿ, written with plain machine integers so
//! they share no code with the library's normal forms.
#![allow(dead_code)]

use std::collections::HashSet;

/// All vectors of `(ℤ/q)^g`, `q = pⁿ`.
pub fn all_vectors(q: u64, g: usize) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..g {
        let mut next = Vec::new();
        for v in &out {
            for a in 0..q {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Subgroup of `(ℤ/q)^g` generated by the given vectors.
pub fn span(q: u64, g: usize, gens: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    let mut set: HashSet<Vec<u64>> = HashSet::new();
    set.insert(vec![0; g]);
    let mut frontier = vec![vec![0; g]];
    while let Some(v) = frontier.pop() {
        for w in gens {
            let s: Vec<u64> = v.iter().zip(w).map(|(a, b)| (a + b) % q).collect();
            if set.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    set
}

pub fn scale(q: u64, c: u64, v: &[u64]) -> Vec<u64> {
    v.iter().map(|a| (a * c) % q).collect()
}

pub fn apply(q: u64, map: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
    map.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b % q).sum::<u64>() % q).collect()
}

/// Elementary divisor exponents of `A / S` where `A ⊂ (ℤ/pⁿ)^g` is the set
/// of vectors satisfying `pred` and `S` a subgroup inside it, read off from
/// the counts `|(A/S)[p^k]|`.
pub fn exponents_from_counts(p: u64, n: u32, g: usize, sub: &HashSet<Vec<u64>>, pred: impl Fn(&[u64]) -> bool) -> Vec<u32> {
    let q = p.pow(n);
    let vs = all_vectors(q, g);
    let members: Vec<&Vec<u64>> = vs.iter().filter(|v| pred(v)).collect();
    let mut logs = Vec::new();
    for k in 0..=n {
        let c = members.iter().filter(|v| sub.contains(&scale(q, p.pow(k), v))).count() / sub.len();
        logs.push(log_p(p, c as u64));
    }
    // number of cyclic factors of exponent >= k is logs[k] - logs[k-1]
    let mut exps = Vec::new();
    for k in 1..=n as usize {
        let at_least_k = logs[k] - logs[k - 1];
        let at_least_next = if k < n as usize { logs[k + 1] - logs[k] } else { 0 };
        for _ in 0..(at_least_k - at_least_next) {
            exps.push(k as u32);
        }
    }
    exps.sort_unstable();
    exps
}

pub fn log_p(p: u64, mut c: u64) -> u32 {
    let mut e = 0;
    while c > 1 {
        assert_eq!(c % p, 0, "count is not a power of p");
        c /= p;
        e += 1;
    }
    e
}

/// Exponents of `(ℤ/pⁿ)^g / span(rel_columns)`.
pub fn module_exponents(p: u64, n: u32, g: usize, rel_columns: &[Vec<u64>]) -> Vec<u32> {
    let q = p.pow(n);
    let s = span(q, g, rel_columns);
    exponents_from_counts(p, n, g, &s, |_| true)
}

/// Exponents of the kernel of `F : (ℤ/pⁿ)^a / S_M → (ℤ/pⁿ)^b / S_N`.
pub fn kernel_exponents(p: u64, n: u32, a: usize, rels_m: &[Vec<u64>], b: usize, rels_n: &[Vec<u64>], map: &[Vec<u64>]) -> Vec<u32> {
    let q = p.pow(n);
    let sm = span(q, a, rels_m);
    let sn = span(q, b, rels_n);
    exponents_from_counts(p, n, a, &sm, |v| sn.contains(&apply(q, map, v)))
}

/// Number of homomorphisms `M → N` between modules over ℤ/pⁿ.
pub fn hom_count(p: u64, n: u32, a: usize, rels_m: &[Vec<u64>], b: usize, rels_n: &[Vec<u64>]) -> u64 {
    let q = p.pow(n);
    let sn = span(q, b, rels_n);
    let mut cols_ok = 0u64;
    let mut total = 0u64;
    // count well-defined matrices; columns are images of generators
    for flat in all_vectors(q, a * b) {
        let map: Vec<Vec<u64>> = (0..b).map(|i| (0..a).map(|j| flat[j * b + i]).collect()).collect();
        total += 1;
        if rels_m.iter().all(|r| sn.contains(&apply(q, &map, r))) {
            cols_ok += 1;
        }
    }
    let _ = total;
    cols_ok / (sn.len() as u64).pow(a as u32)
}

/// Rows of an integer matrix reduced mod `q` (entries may be negative).
pub fn rows_mod(q: u64, rows: &[Vec<i64>]) -> Vec<Vec<u64>> {
    rows.iter().map(|r| r.iter().map(|&x| x.rem_euclid(q as i64) as u64).collect()).collect()
}

/// Columns of a `rows × cols` matrix given by rows.
pub fn columns(rows: &[Vec<u64>], cols: usize) -> Vec<Vec<u64>> {
    (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// `|ker(out)| / |im(inc)|` on `(ℤ/q)^g`; `inc` is `g × inc_cols`, `out` has `g` columns.
pub fn cohomology_order(q: u64, g: usize, inc: &[Vec<u64>], inc_cols: usize, out: &[Vec<u64>]) -> u64 {
    let kernel = all_vectors(q, g).into_iter().filter(|v| apply(q, out, v).iter().all(|&x| x == 0)).count() as u64;
    let image = span(q, g, &columns(inc, inc_cols)).len() as u64;
    kernel / image
}

/// Whether `ker(d mod p^k)` on `(ℤ/p^k)^g` is free, by `|Z| = |Z[p]|^k`.
pub fn cocycles_free(p: u64, k: u32, g: usize, d: &[Vec<u64>]) -> bool {
    let q = p.pow(k);
    let z: Vec<Vec<u64>> = all_vectors(q, g).into_iter().filter(|v| apply(q, d, v).iter().all(|&x| x == 0)).collect();
    let torsion = z.iter().filter(|v| v.iter().all(|&x| x * p % q == 0)).count() as u64;
    (z.len() as u64) == torsion.pow(k)
}
