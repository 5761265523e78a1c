use serde::{Deserialize, Serialize};

/// Monotone unbounded map `ω → ω`: an explicit prefix followed by the
/// affine rule `n ↦ slope·n + offset`.
///
/// Maps are nondecreasing rather than strictly increasing so that a shift
/// by a constant and the constant-then-identity maps arising from constant
/// towers stay representable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Reindex {
    prefix: Vec<usize>,
    slope: usize,
    offset: i64,
}

impl Reindex {
    pub fn identity() -> Reindex {
        Reindex { prefix: Vec::new(), slope: 1, offset: 0 }
    }

    /// `n ↦ n + k`.
    pub fn shift(k: usize) -> Reindex {
        Reindex { prefix: Vec::new(), slope: 1, offset: k as i64 }
    }

    /// `n ↦ max(n, k)`.
    pub fn at_least(k: usize) -> Reindex {
        Reindex { prefix: vec![k; k], slope: 1, offset: 0 }.normalized()
    }

    /// Builds a reindexing; rejects rules that decrease or stay bounded.
    pub fn new(prefix: Vec<usize>, slope: usize, offset: i64) -> Option<Reindex> {
        if slope == 0 {
            return None;
        }
        let r = Reindex { prefix, slope, offset };
        let n0 = r.prefix.len();
        if r.affine(n0) < 0 {
            return None;
        }
        let values: Vec<i64> = (0..=n0).map(|n| r.apply(n) as i64).collect();
        if values.windows(2).any(|w| w[0] > w[1]) {
            return None;
        }
        Some(r.normalized())
    }

    fn affine(&self, n: usize) -> i64 {
        self.slope as i64 * n as i64 + self.offset
    }

    pub fn apply(&self, n: usize) -> usize {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.affine(n) as usize
        }
    }

    pub fn slope(&self) -> usize {
        self.slope
    }

    /// Drops prefix entries that agree with the affine rule.
    fn normalized(mut self) -> Reindex {
        while let Some(&last) = self.prefix.last() {
            let n = self.prefix.len() - 1;
            if self.affine(n) == last as i64 {
                self.prefix.pop();
            } else {
                break;
            }
        }
        self
    }

    /// `n ↦ self(other(n))`.
    pub fn after(&self, other: &Reindex) -> Reindex {
        let slope = self.slope * other.slope;
        let offset = self.slope as i64 * other.offset + self.offset;
        // the affine composite is valid once other(n) has left self's prefix
        let mut n0 = other.prefix.len();
        while other.apply(n0) < self.prefix.len() {
            n0 += 1;
        }
        let prefix = (0..n0).map(|n| self.apply(other.apply(n))).collect();
        Reindex { prefix, slope, offset }.normalized()
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &Reindex) -> Reindex {
        let (hi, lo) = if (self.slope, self.offset) >= (other.slope, other.offset) { (self, other) } else { (other, self) };
        // from n0 on the affine rule of `hi` dominates both maps
        let mut n0 = self.prefix.len().max(other.prefix.len());
        while lo.affine(n0) > hi.affine(n0) {
            n0 += 1;
        }
        let prefix = (0..n0).map(|n| self.apply(n).max(other.apply(n))).collect();
        Reindex { prefix, slope: hi.slope, offset: hi.offset }.normalized()
    }

    /// `n ↦ self(n − k)` for `n ≥ k`, and `self(0)` below.
    pub fn delayed(&self, k: usize) -> Reindex {
        let mut prefix = vec![self.apply(0); k];
        prefix.extend((0..self.prefix.len()).map(|n| self.apply(n)));
        let offset = self.offset - (self.slope * k) as i64;
        Reindex { prefix, slope: self.slope, offset }.normalized()
    }

    /// Least `c` with `self(n + c) ≥ n` for every `n`.
    pub fn lag(&self) -> usize {
        let mut c: i64 = (0..self.prefix.len()).map(|n| n as i64 - self.prefix[n] as i64).max().unwrap_or(0);
        if self.slope == 1 {
            c = c.max(-self.offset);
        } else {
            // with slope ≥ 2 the affine rule overtakes the identity for good
            let mut n = self.prefix.len();
            while self.affine(n) < n as i64 {
                c = c.max(n as i64 - self.affine(n));
                n += 1;
            }
        }
        c.max(0) as usize
    }

    pub fn dominates(&self, other: &Reindex, depth: usize) -> bool {
        (0..=depth).all(|n| self.apply(n) >= other.apply(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_and_max() {
        let a = Reindex::shift(2);
        let b = Reindex::new(vec![0, 0, 5], 2, 0).unwrap();
        let c = a.after(&b);
        for n in 0..20 {
            assert_eq!(c.apply(n), a.apply(b.apply(n)));
            assert_eq!(a.max(&b).apply(n), a.apply(n).max(b.apply(n)));
            assert_eq!(b.delayed(3).apply(n), if n >= 3 { b.apply(n - 3) } else { b.apply(0) });
        }
        assert!(Reindex::new(vec![3, 1], 1, 0).is_none());
        assert_eq!(Reindex::at_least(3).apply(1), 3);
        assert_eq!(Reindex::at_least(3).apply(7), 7);
        let d = Reindex::shift(1).delayed(4);
        let c = d.lag();
        assert!((0..30).all(|n| d.apply(n + c) >= n));
        assert!(c == 0 || (0..30).any(|n| d.apply(n + c - 1) < n));
    }
}
