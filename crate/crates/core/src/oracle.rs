//! Dense reference implementations used by the test suites.
//!
//! Nothing here shares code with the sparse kernels: products, ranks and
//! pivot pairings are recomputed from scratch with textbook dense algorithms.

use crate::field::{Coeff, Field};
use crate::sparse::{ColumnMatrix, Permutation};

/// Row-major dense matrix over Z/p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Coeff>,
    field: Field,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
            field,
        }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// The matrix `Pi` with `Pi * e_i = e_{P(i)}`.
    pub fn permutation(p: &Permutation, field: Field) -> Self {
        let n = p.len();
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(p.apply(i), i, 1);
        }
        m
    }

    pub fn anti_identity(n: usize, field: Field) -> Self {
        let mut m = Self::zeros(n, n, field);
        for i in 0..n {
            m.set(i, n - 1 - i, 1);
        }
        m
    }

    pub fn from_sparse(a: &ColumnMatrix) -> Self {
        let mut m = Self::zeros(a.nrows(), a.ncols(), a.field());
        for j in 0..a.ncols() {
            for &(i, v) in a.column(j).entries() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Coeff {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Coeff) {
        self.data[i * self.cols + j] = v;
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "dense product dimension mismatch");
        let p = self.field.modulus() as u64;
        let mut out = Self::zeros(self.rows, rhs.cols, self.field);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u64 * rhs.get(k, j) as u64;
                }
                out.set(i, j, (acc % p) as Coeff);
            }
        }
        out
    }

    pub fn slice(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len(), self.field);
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_upper_triangular_invertible(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                self.get(i, i) != 0 && (0..i).all(|j| self.get(i, j) == 0)
            })
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows).find(|&r| m[r * cols + c] != 0) else {
                continue;
            };
            for k in 0..cols {
                m.swap(rank * cols + k, piv * cols + k);
            }
            let inv = f.inv(m[rank * cols + c]).unwrap();
            for r in 0..rows {
                if r != rank && m[r * cols + c] != 0 {
                    let factor = f.mul(m[r * cols + c], inv);
                    for k in 0..cols {
                        let sub = f.mul(factor, m[rank * cols + k]);
                        m[r * cols + k] = f.sub(m[r * cols + k], sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Rank of the lower-left block `rows[from..], cols[..upto]`.
    fn block_rank(&self, from: usize, upto: usize) -> usize {
        if from >= self.rows || upto == 0 {
            return 0;
        }
        self.slice(from..self.rows, 0..upto).rank()
    }

    /// Low pivot of each column of any reduction of `self`, read off from
    /// ranks of lower-left blocks (independent of column elimination order).
    pub fn pivots_by_rank(&self) -> Vec<Option<usize>> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows).find(|&i| {
                    let r = |a: usize, b: usize| self.block_rank(a, b) as isize;
                    r(i, j + 1) - r(i + 1, j + 1) - r(i, j) + r(i + 1, j) == 1
                })
            })
            .collect()
    }
}
