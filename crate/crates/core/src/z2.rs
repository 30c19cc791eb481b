//! Small dense linear algebra over the residue field Z/2.
//!
//! Used for residue-field reductions: leading-term matrices of cyclic
//! elements, determinant checks of basis changes at `T = 0`, and the linear
//! solves in test-corpus construction.

use std::collections::BTreeSet;

/// A Z/2 vector presented as its support set of generator indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Z2Vec {
    support: BTreeSet<usize>,
}

impl Z2Vec {
    pub fn new() -> Z2Vec {
        Z2Vec::default()
    }

    pub fn singleton(i: usize) -> Z2Vec {
        let mut v = Z2Vec::new();
        v.toggle(i);
        v
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Z2Vec {
        let mut v = Z2Vec::new();
        for i in iter {
            v.toggle(i);
        }
        v
    }

    pub fn toggle(&mut self, i: usize) {
        if !self.support.insert(i) {
            self.support.remove(&i);
        }
    }

    pub fn add_assign(&mut self, other: &Z2Vec) {
        for i in &other.support {
            self.toggle(*i);
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.support.contains(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.iter().copied()
    }
}

impl FromIterator<usize> for Z2Vec {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Z2Vec {
        Z2Vec::from_iter(iter)
    }
}

/// Dense Z/2 matrix, row-major bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z2Matrix {
    rows: usize,
    cols: usize,
    words: Vec<Vec<u64>>,
}

impl Z2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Z2Matrix {
        let w = cols.div_ceil(64);
        Z2Matrix {
            rows,
            cols,
            words: vec![vec![0; w]; rows],
        }
    }

    pub fn identity(n: usize) -> Z2Matrix {
        let mut m = Z2Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.words[r][c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        if v {
            self.words[r][c / 64] |= 1 << (c % 64);
        } else {
            self.words[r][c / 64] &= !(1 << (c % 64));
        }
    }

    pub fn toggle(&mut self, r: usize, c: usize) {
        self.words[r][c / 64] ^= 1 << (c % 64);
    }

    fn xor_row(&mut self, dst: usize, src: usize) {
        if dst == src {
            return;
        }
        let (a, b) = if dst < src {
            let (x, y) = self.words.split_at_mut(src);
            (&mut x[dst], &y[0])
        } else {
            let (x, y) = self.words.split_at_mut(dst);
            (&mut y[0], &x[src])
        };
        for (d, s) in a.iter_mut().zip(b.iter()) {
            *d ^= *s;
        }
    }

    /// Column `c` of `M * v` is XOR of rows... (matrix acts on column
    /// vectors: result_r = XOR_c M[r][c] v[c]).
    pub fn mul_vec(&self, v: &Z2Vec) -> Z2Vec {
        let mut out = Z2Vec::new();
        for r in 0..self.rows {
            let mut bit = false;
            for c in v.iter() {
                if c < self.cols && self.get(r, c) {
                    bit = !bit;
                }
            }
            if bit {
                out.toggle(r);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let pivot = (rank..m.rows).find(|&r| m.get(r, c));
            if let Some(p) = pivot {
                m.words.swap(rank, p);
                for r in 0..m.rows {
                    if r != rank && m.get(r, c) {
                        m.xor_row(r, rank);
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Z2Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Z2Matrix::identity(n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| m.get(r, c))?;
            m.words.swap(c, pivot);
            inv.words.swap(c, pivot);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.xor_row(r, c);
                    inv.xor_row(r, c);
                }
            }
        }
        Some(inv)
    }

    /// One solution of `self * x = rhs`, free variables pinned to zero.
    /// `None` when inconsistent.
    pub fn solve(&self, rhs: &Z2Vec) -> Option<Z2Vec> {
        let mut m = self.clone();
        let mut b: Vec<bool> = (0..m.rows).map(|r| rhs.contains(r)).collect();
        let mut pivot_col: Vec<Option<usize>> = Vec::new();
        let mut row = 0;
        for c in 0..m.cols {
            if let Some(p) = (row..m.rows).find(|&r| m.get(r, c)) {
                m.words.swap(row, p);
                b.swap(row, p);
                for r in 0..m.rows {
                    if r != row && m.get(r, c) {
                        m.xor_row(r, row);
                        b[r] ^= b[row];
                    }
                }
                pivot_col.push(Some(c));
                row += 1;
            }
        }
        for r in row..m.rows {
            if b[r] {
                return None;
            }
        }
        let mut x = Z2Vec::new();
        for (r, pc) in pivot_col.iter().enumerate() {
            if let Some(c) = pc {
                if b[r] {
                    x.toggle(*c);
                }
            }
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_2x2() {
        // Columns: image of e0 = e1, image of e1 = e0 + e1.
        let mut m = Z2Matrix::zero(2, 2);
        m.set(1, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        let inv = m.inverse().unwrap();
        for c in 0..2 {
            let v = m.mul_vec(&Z2Vec::singleton(c));
            assert_eq!(inv.mul_vec(&v), Z2Vec::singleton(c));
        }
    }

    #[test]
    fn singular_has_no_inverse() {
        let mut m = Z2Matrix::zero(2, 2);
        m.set(0, 0, true);
        m.set(0, 1, true);
        assert!(m.inverse().is_none());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let mut m = Z2Matrix::zero(3, 2);
        m.set(0, 0, true);
        m.set(1, 1, true);
        m.set(2, 0, true);
        m.set(2, 1, true);
        let rhs = Z2Vec::from_iter([0, 2]);
        let x = m.solve(&rhs).unwrap();
        assert_eq!(x, Z2Vec::singleton(0));
        let bad = Z2Vec::from_iter([0]);
        assert!(m.solve(&bad).is_none());
    }
}
