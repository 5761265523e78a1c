//! Smith normal form by pivoting on the entry of least size.
//!
//! Over the chain rings the least-valuation entry divides everything, so the
//! elimination never needs a remainder step. Over ℤ and `𝔽_p[x]` remainders
//! shrink the pivot until it divides its row and column, and a final pass
//! forces the divisibility chain.

use super::matrix::Matrix;
use super::ring::{Ring, Scalar};
use crate::error::{Error, Result};

/// `U·M·V = D` with `D` diagonal; `u_inv` is `U⁻¹`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    /// Nonzero diagonal entries `d₁ | d₂ | …`, each the preferred associate.
    pub diag: Vec<Scalar>,
}

impl NormalForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Valuations of the nonzero diagonal entries (chain rings only).
    pub fn exponents(&self) -> Vec<u32> {
        let r = self.d.ring();
        self.diag.iter().filter_map(|d| r.valuation(d)).collect()
    }
}

struct Work {
    ring: Ring,
    a: Vec<Vec<Scalar>>,
    u: Vec<Vec<Scalar>>,
    u_inv: Vec<Vec<Scalar>>,
    v: Vec<Vec<Scalar>>,
}

fn dense(m: &Matrix) -> Vec<Vec<Scalar>> {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

fn eye(ring: &Ring, n: usize) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect()
}

fn undense(ring: &Ring, rows: usize, cols: usize, a: &[Vec<Scalar>]) -> Matrix {
    Matrix::from_fn(ring, rows, cols, |i, j| a[i][j].clone())
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
    }

    /// `row_i += c·row_j`.
    fn add_row(&mut self, i: usize, j: usize, c: &Scalar) {
        let r = &self.ring;
        if r.is_zero(c) {
            return;
        }
        for k in 0..self.a[0].len() {
            let t = r.mul(c, &self.a[j][k]);
            self.a[i][k] = r.add(&self.a[i][k], &t);
        }
        for k in 0..self.u[0].len() {
            let t = r.mul(c, &self.u[j][k]);
            self.u[i][k] = r.add(&self.u[i][k], &t);
        }
        // U⁻¹ ← U⁻¹·E⁻¹: col_j -= c·col_i
        for row in &mut self.u_inv {
            let t = r.mul(c, &row[i]);
            row[j] = r.sub(&row[j], &t);
        }
    }

    /// `col_i += c·col_j`.
    fn add_col(&mut self, i: usize, j: usize, c: &Scalar) {
        let r = &self.ring;
        if r.is_zero(c) {
            return;
        }
        for row in &mut self.a {
            let t = r.mul(c, &row[j]);
            row[i] = r.add(&row[i], &t);
        }
        for row in &mut self.v {
            let t = r.mul(c, &row[j]);
            row[i] = r.add(&row[i], &t);
        }
    }

    fn scale_row(&mut self, i: usize, unit: &Scalar) {
        let r = &self.ring;
        let inv = r.unit_inverse(unit).expect("scaling by a unit");
        for x in &mut self.a[i] {
            *x = r.mul(unit, x);
        }
        for x in &mut self.u[i] {
            *x = r.mul(unit, x);
        }
        for row in &mut self.u_inv {
            row[i] = r.mul(&row[i], &inv);
        }
    }
}

/// Smith normal form with transforms. Errors only on an empty ring mismatch.
pub fn normal_form(m: &Matrix) -> NormalForm {
    let ring = m.ring().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work { ring: ring.clone(), a: dense(m), u: eye(&ring, rows), u_inv: eye(&ring, rows), v: eye(&ring, cols) };
    let mut diag = Vec::new();
    let pid = !ring.is_chain();
    let mut t = 0;
    while t < rows.min(cols) {
        // least-size pivot in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if ring.is_zero(&w.a[i][j]) {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| ring.compare_size(&w.a[i][j], &w.a[bi][bj]).is_lt()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut restart = false;
            for i in t + 1..rows {
                if ring.is_zero(&w.a[i][t]) {
                    continue;
                }
                let (q, rem) = ring.div_rem(&w.a[i][t], &w.a[t][t]);
                w.add_row(i, t, &ring.neg(&q));
                if !ring.is_zero(&rem) {
                    w.swap_rows(t, i);
                    restart = true;
                    break;
                }
            }
            if restart {
                continue;
            }
            for j in t + 1..cols {
                if ring.is_zero(&w.a[t][j]) {
                    continue;
                }
                let (q, rem) = ring.div_rem(&w.a[t][j], &w.a[t][t]);
                w.add_col(j, t, &ring.neg(&q));
                if !ring.is_zero(&rem) {
                    w.swap_cols(t, j);
                    restart = true;
                    break;
                }
            }
            if restart {
                continue;
            }
            if pid {
                // divisibility chain: fold a non-multiple row into the pivot row
                let bad = (t + 1..rows).find(|&i| {
                    (t + 1..cols).any(|j| ring.exact_div(&w.a[i][j], &w.a[t][t]).is_none())
                });
                if let Some(i) = bad {
                    w.add_row(t, i, &ring.one());
                    continue;
                }
            }
            break;
        }
        let (unit, _) = ring.normalize(&w.a[t][t]);
        w.scale_row(t, &unit);
        diag.push(w.a[t][t].clone());
        t += 1;
    }
    let d = undense(&ring, rows, cols, &w.a);
    NormalForm {
        u: undense(&ring, rows, rows, &w.u),
        u_inv: undense(&ring, rows, rows, &w.u_inv),
        d,
        v: undense(&ring, cols, cols, &w.v),
        diag,
    }
}

/// Decision procedure for `A·x = b`, built once from the normal form of `A`.
#[derive(Clone, Debug)]
pub struct Solver {
    nf: NormalForm,
    rows: usize,
    cols: usize,
}

impl Solver {
    pub fn new(a: &Matrix) -> Solver {
        Solver { nf: normal_form(a), rows: a.rows(), cols: a.cols() }
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn ring(&self) -> &Ring {
        self.nf.d.ring()
    }

    /// Some `x` with `A·x = b`, or `None`.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::ShapeError(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let r = self.ring().clone();
        let b: Vec<Scalar> = b.iter().map(|x| r.canonical(x)).collect();
        let c = self.nf.u.mul_vec(&b)?;
        let rank = self.nf.rank();
        let mut y = vec![r.zero(); self.cols];
        for (i, ci) in c.iter().enumerate() {
            if i < rank {
                match r.exact_div(ci, &self.nf.diag[i]) {
                    Some(q) => y[i] = q,
                    None => return Ok(None),
                }
            } else if !r.is_zero(ci) {
                return Ok(None);
            }
        }
        Ok(Some(self.nf.v.mul_vec(&y)?))
    }

    pub fn contains(&self, b: &[Scalar]) -> Result<bool> {
        Ok(self.solve(b)?.is_some())
    }

    /// Solves `A·X = B` columnwise.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Option<Matrix>> {
        let r = self.ring().clone();
        let mut cols = Vec::with_capacity(b.cols());
        for j in 0..b.cols() {
            match self.solve(&b.column(j))? {
                Some(x) => cols.push(x),
                None => return Ok(None),
            }
        }
        Ok(Some(Matrix::from_fn(&r, self.cols, b.cols(), |i, j| cols[j][i].clone())))
    }

    /// Generators of `{x : A·x = 0}` as columns.
    pub fn kernel(&self) -> Matrix {
        let r = self.ring();
        let rank = self.nf.rank();
        let mut gens: Vec<Vec<Scalar>> = Vec::new();
        let v = &self.nf.v;
        if let Some(n) = r.level() {
            for (i, d) in self.nf.diag.iter().enumerate() {
                let e = r.valuation(d).expect("nonzero pivot");
                if e > 0 {
                    let c = r.pi_pow(n - e);
                    gens.push(v.column(i).iter().map(|x| r.mul(&c, x)).collect());
                }
            }
        }
        for j in rank..self.cols {
            gens.push(v.column(j));
        }
        Matrix::from_fn(r, self.cols, gens.len(), |i, j| gens[j][i].clone())
    }
}

/// Some `x` with `A·x = b`, or `None` when `b` is not in the column span.
pub fn solve_membership(a: &Matrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    Solver::new(a).solve(b)
}
