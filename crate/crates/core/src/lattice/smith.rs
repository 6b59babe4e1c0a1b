//! Smith normal form over the integers.
//!
//! For an `m x n` matrix `M` we find unimodular `L` (`m x m`) and `R` (`n x n`)
//! with `L * M * R = diag(d_1, ..., d_r, 0, ...)`, `d_i > 0` and `d_i | d_{i+1}`.
//!
//! Pivoting always takes the nonzero entry of smallest absolute value in the
//! active submatrix, ties broken by lowest row and then lowest column, so the
//! decomposition is a deterministic function of the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub left: IntMatrix,
    /// Elementary divisors, `min(rows, cols)` entries, zero-padded after `rank`.
    pub diag: Vec<BigInt>,
    pub right: IntMatrix,
    pub rank: usize,
}

impl SmithDecomposition {
    /// Product of the nonzero elementary divisors.
    pub fn divisor_product(&self) -> BigInt {
        self.diag[..self.rank].iter().product()
    }

    /// The `rows x cols` diagonal matrix `left * M * right`.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.right.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

struct Reducer {
    a: IntMatrix,
    left: Option<IntMatrix>,
    right: Option<IntMatrix>,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(l) = self.left.as_mut() {
            l.swap_rows(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(r) = self.right.as_mut() {
            r.swap_cols(i, j);
        }
    }

    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        self.a.add_row_multiple(target, source, factor);
        if let Some(l) = self.left.as_mut() {
            l.add_row_multiple(target, source, factor);
        }
    }

    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        self.a.add_col_multiple(target, source, factor);
        if let Some(r) = self.right.as_mut() {
            r.add_col_multiple(target, source, factor);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(l) = self.left.as_mut() {
            l.negate_row(i);
        }
    }

    fn smallest_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    best = Some((i, j, ax));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    /// Clears row and column `t` outside the pivot; returns false if a
    /// nonzero remainder was left behind.
    fn eliminate(&mut self, t: usize) -> bool {
        let mut clean = true;
        let p = self.a.get(t, t).clone();
        for i in t + 1..self.a.rows() {
            let x = self.a.get(i, t);
            if x.is_zero() {
                continue;
            }
            let q = -(x / &p);
            self.add_row(i, t, &q);
            if !self.a.get(i, t).is_zero() {
                clean = false;
            }
        }
        for j in t + 1..self.a.cols() {
            let x = self.a.get(t, j);
            if x.is_zero() {
                continue;
            }
            let q = -(x / &p);
            self.add_col(j, t, &q);
            if !self.a.get(t, j).is_zero() {
                clean = false;
            }
        }
        clean
    }

    fn run(mut self) -> (IntMatrix, Option<IntMatrix>, Option<IntMatrix>, usize) {
        let m = self.a.rows();
        let n = self.a.cols();
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.smallest_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            if !self.eliminate(t) {
                continue;
            }
            // pivot must divide the rest of the active block
            let p = self.a.get(t, t).clone();
            let offender =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !self.a.get(i, j).is_multiple_of(&p)));
            if let Some(i) = offender {
                self.add_row(t, i, &BigInt::one());
                continue;
            }
            if p.is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        (self.a, self.left, self.right, t)
    }
}

fn decompose(
    m: &IntMatrix,
    transforms: bool,
) -> (Vec<BigInt>, Option<IntMatrix>, Option<IntMatrix>, usize) {
    let reducer = Reducer {
        a: m.clone(),
        left: transforms.then(|| IntMatrix::identity(m.rows())),
        right: transforms.then(|| IntMatrix::identity(m.cols())),
    };
    let (a, left, right, rank) = reducer.run();
    let diag = (0..m.rows().min(m.cols()))
        .map(|i| a.get(i, i).clone())
        .collect();
    (diag, left, right, rank)
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (diag, left, right, rank) = decompose(m, true);
    SmithDecomposition {
        left: left.expect("transforms tracked"),
        diag,
        right: right.expect("transforms tracked"),
        rank,
    }
}

/// Elementary divisors only, without tracking the transforms.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let (diag, _, _, rank) = decompose(m, false);
    diag.into_iter().take(rank).collect()
}

/// Lattice basis of `span_Q(vectors) ∩ Z^n`.
///
/// The input lattice sits inside the returned one with index equal to the
/// product of the elementary divisors of the input (as columns).
pub fn saturation_basis(n: usize, vectors: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Argument(format!("expected vectors of length {n}")));
    }
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let m = IntMatrix::from_big_columns(n, vectors);
    let snf = smith_normal_form(&m);
    if snf.rank < vectors.len() {
        return Err(Error::Rank {
            rank: snf.rank,
            expected: vectors.len(),
        });
    }
    // M = L^-1 D R^-1, so the first r columns of L^-1 span the saturation.
    let linv = snf.left.unimodular_inverse()?;
    Ok((0..vectors.len()).map(|j| linv.column(j)).collect())
}
