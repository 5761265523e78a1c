use std::fmt;

use serde::{Deserialize, Serialize};

use super::ring::{Backend, Level, Ring, Scalar};
use crate::error::{Error, Result};

/// Dense row-major matrix over one level ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        Matrix { ring: ring.clone(), rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(ring: &Ring, rows: usize, cols: usize, diag: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(ring, rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, ring.canonical(d));
        }
        m
    }

    pub fn from_fn(ring: &Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(ring.canonical(&f(i, j)));
            }
        }
        Matrix { ring: ring.clone(), rows, cols, data }
    }

    pub fn from_i64(ring: &Ring, rows: &[Vec<i64>]) -> Matrix {
        let cols = rows.first().map_or(0, Vec::len);
        Matrix::from_fn(ring, rows.len(), cols, |i, j| ring.from_i64(rows[i][j]))
    }

    pub fn from_scalar_rows(ring: &Ring, rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeError(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let data = entries.iter().map(|e| ring.parse_scalar(e)).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { ring: ring.clone(), rows, cols, data })
    }

    pub fn column_vector(ring: &Ring, v: &[Scalar]) -> Matrix {
        Matrix::from_fn(ring, v.len(), 1, |i, _| v[i].clone())
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn level(&self) -> Level {
        match self.ring.level() {
            Some(n) => Level::Finite(n),
            None => Level::Infinite,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = self.ring.canonical(&v);
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.ring.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_ring(&self, other: &Matrix) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::BackendMismatch(format!("{} vs {}", self.ring, other.ring)));
        }
        Ok(())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeError(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if r.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = r.mul_add(a, b, &out.data[idx]);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.mul(&Matrix::column_vector(&self.ring, v))?.column(0))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeError(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.ring.add(a, b)).collect();
        Ok(Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|a| self.ring.neg(a)).collect();
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let c = self.ring.canonical(c);
        let data = self.data.iter().map(|a| self.ring.mul(&c, a)).collect();
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.rows != other.rows {
            return Err(Error::ShapeError(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        Ok(Matrix::from_fn(&self.ring, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        if self.cols != other.cols {
            return Err(Error::ShapeError(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        Ok(Matrix::from_fn(&self.ring, self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        }))
    }

    pub fn hstack_all(ring: &Ring, rows: usize, blocks: &[Matrix]) -> Result<Matrix> {
        blocks.iter().try_fold(Matrix::zeros(ring, rows, 0), |acc, b| acc.hstack(b))
    }

    pub fn vstack_all(ring: &Ring, cols: usize, blocks: &[Matrix]) -> Result<Matrix> {
        blocks.iter().try_fold(Matrix::zeros(ring, 0, cols), |acc, b| acc.vstack(b))
    }

    pub fn block_diag(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        Ok(Matrix::from_fn(&self.ring, self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => self.ring.zero(),
            }
        }))
    }

    pub fn block_diag_all(ring: &Ring, blocks: &[Matrix]) -> Result<Matrix> {
        blocks.iter().try_fold(Matrix::zeros(ring, 0, 0), |acc, b| acc.block_diag(b))
    }

    /// Submatrix on row range `r0..r1` and column range `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        Matrix::from_fn(&self.ring, r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(&self.ring, self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(&self.ring, rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kronecker(&self, other: &Matrix) -> Result<Matrix> {
        self.check_ring(other)?;
        let r = &self.ring;
        Ok(Matrix::from_fn(r, self.rows * other.rows, self.cols * other.cols, |i, j| {
            r.mul(self.get(i / other.rows, j / other.cols), other.get(i % other.rows, j % other.cols))
        }))
    }

    /// Reduces entries modulo `I_n`; only descends.
    pub fn reduce(&self, to_level: u32) -> Result<Matrix> {
        match self.ring.level() {
            Some(n) if to_level <= n => Ok(self.coerce(&self.ring.at_level(to_level))),
            Some(n) => Err(Error::LevelError(format!("cannot raise level {n} to {to_level}"))),
            None => Err(Error::LevelError(format!("{} has no finite level to reduce from", self.ring))),
        }
    }

    /// Reinterprets entries in another ring of the same family: reduction
    /// when the target is smaller, canonical lift when it is larger.
    pub fn coerce(&self, ring: &Ring) -> Matrix {
        if *ring == self.ring {
            return self.clone();
        }
        let data = self.data.iter().map(|a| ring.coerce(a, &self.ring)).collect();
        Matrix { ring: ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn to_literal(&self) -> MatrixLiteral {
        MatrixLiteral {
            rows: self.rows,
            cols: self.cols,
            level: self.level(),
            entries: (0..self.rows).map(|i| self.row(i)).collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// JSON form of a matrix: row-major entries plus the level they live at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    #[serde(default)]
    pub rows: usize,
    #[serde(default)]
    pub cols: usize,
    pub level: Level,
    pub entries: Vec<Vec<Scalar>>,
}

impl MatrixLiteral {
    pub fn into_matrix(&self, backend: &Backend) -> Result<Matrix> {
        let ring = backend.level_ring(self.level);
        let rows = if self.entries.is_empty() { self.rows } else { self.entries.len() };
        let cols = self.entries.first().map_or(self.cols, Vec::len);
        if self.entries.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeError("ragged matrix rows".into()));
        }
        Matrix::from_scalar_rows(&ring, rows, cols, self.entries.iter().flatten().cloned().collect())
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_literal().serialize(s)
    }
}
