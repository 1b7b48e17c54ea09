//! Packed bit vectors and GF(2) linear algebra.
//!
//! Rows are stored little-endian in `u64` words (bit `i` lives in word
//! `i / 64` at position `i % 64`). All elimination routines use the fixed
//! column order `0..cols`, which makes reduced row echelon forms unique
//! and everything downstream deterministic.

use alloc::vec;
use alloc::vec::Vec;

/// Fixed-length bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the AND of two vectors; the workhorse of symplectic products.
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (w, o) in self.words.iter().zip(&other.words) {
            acc ^= w & o;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn and_count(&self, other: &BitVec) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(w, o)| (w & o).count_ones() as usize)
            .sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        for (k, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rem = w;
            core::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    /// Bits `range.start..range.end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        debug_assert!(start <= end && end <= self.len);
        let mut out = BitVec::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    /// Raw word view (little-endian, 64 bits per word).
    #[inline]
    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

/// Row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    cols: usize,
    pub rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        BitMatrix { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix { cols, rows }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| BitVec::from_indices(n, &[i])).collect();
        BitMatrix { cols: n, rows }
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn push(&mut self, row: BitVec) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix {
            cols: self.rows.len(),
            rows: vec![BitVec::zeros(self.rows.len()); self.cols],
        };
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                out.rows[j].set(i, true);
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns `(pivot_col, pivot_row)`
    /// pairs in ascending column order. Zero rows sink to the bottom.
    pub fn rref(&mut self) -> Vec<(usize, usize)> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            let Some(src) = (next_row..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(next_row, src);
            let pivot_row = self.rows[next_row].clone();
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next_row && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push((col, next_row));
            next_row += 1;
            if next_row == self.rows.len() {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Coefficients `c` (over the matrix rows, in their original order) with
    /// `xor_{i in c} row_i == target`, if `target` lies in the row space.
    pub fn solve_combination(&self, target: &BitVec) -> Option<BitVec> {
        debug_assert_eq!(target.len(), self.cols);
        let n = self.rows.len();
        // Augment each row with a unit tag so the elimination remembers
        // which original rows built each reduced row.
        let mut work: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::from_indices(n, &[i])))
            .collect();
        let mut aug = BitMatrix {
            cols: self.cols + n,
            rows: core::mem::take(&mut work),
        };
        // Restrict pivoting to the data columns.
        let pivots = {
            let mut pivots = Vec::new();
            let mut next_row = 0;
            for col in 0..self.cols {
                let Some(src) = (next_row..aug.rows.len()).find(|&r| aug.rows[r].get(col)) else {
                    continue;
                };
                aug.rows.swap(next_row, src);
                let pivot_row = aug.rows[next_row].clone();
                for (r, row) in aug.rows.iter_mut().enumerate() {
                    if r != next_row && row.get(col) {
                        row.xor_assign(&pivot_row);
                    }
                }
                pivots.push((col, next_row));
                next_row += 1;
                if next_row == aug.rows.len() {
                    break;
                }
            }
            pivots
        };
        let mut residue = target.clone();
        let mut combo = BitVec::zeros(n);
        for &(col, row) in &pivots {
            if residue.get(col) {
                residue.xor_assign(&aug.rows[row].slice(0, self.cols));
                combo.xor_assign(&aug.rows[row].slice(self.cols, self.cols + n));
            }
        }
        if residue.is_zero() {
            Some(combo)
        } else {
            None
        }
    }

    /// Any particular solution `v` of `M v = rhs`, if one exists.
    pub fn solve(&self, rhs: &BitVec) -> Option<BitVec> {
        debug_assert_eq!(rhs.len(), self.rows.len());
        let mut work: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::from_indices(self.rows.len(), &[i])))
            .collect();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            let Some(src) = (next_row..work.len()).find(|&r| work[r].get(col)) else {
                continue;
            };
            work.swap(next_row, src);
            let pivot_row = work[next_row].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != next_row && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push((col, next_row));
            next_row += 1;
            if next_row == work.len() {
                break;
            }
        }
        // rhs transformed by the same row operations
        let rhs_of = |row: &BitVec| -> bool {
            row.slice(self.cols, self.cols + self.rows.len()).dot(rhs)
        };
        let mut v = BitVec::zeros(self.cols);
        for &(col, row) in &pivots {
            if rhs_of(&work[row]) {
                v.set(col, true);
            }
        }
        // Zero rows must have zero transformed rhs, else inconsistent.
        for (r, row) in work.iter().enumerate() {
            if pivots.iter().all(|&(_, pr)| pr != r) && row.slice(0, self.cols).is_zero() && rhs_of(row) {
                return None;
            }
        }
        Some(v)
    }

    /// Basis of `{ v : M v = 0 }` where rows of `M` act as linear forms.
    pub fn kernel(&self) -> Vec<BitVec> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(c, _)| c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = BitVec::from_indices(self.cols, &[free]);
            for &(col, row) in &pivots {
                if m.rows[row].get(free) {
                    v.set(col, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.cols;
        if self.rows.len() != n {
            return None;
        }
        let mut work: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::from_indices(n, &[i])))
            .collect();
        for col in 0..n {
            let src = (col..n).find(|&r| work[r].get(col))?;
            work.swap(col, src);
            let pivot_row = work[col].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != col && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
        }
        let rows = work.iter().map(|r| r.slice(n, 2 * n)).collect();
        Some(BitMatrix { cols: n, rows })
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = BitVec::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        debug_assert_eq!(self.cols, other.rows.len());
        let other_t = other.transpose();
        let mut out = BitMatrix {
            cols: other.cols,
            rows: vec![BitVec::zeros(other.cols); self.rows.len()],
        };
        for (i, row) in self.rows.iter().enumerate() {
            for (j, col) in other_t.rows.iter().enumerate() {
                if row.dot(col) {
                    out.rows[i].set(j, true);
                }
            }
        }
        out
    }
}
