//! Compressed-row sparse matrices and a residual-checked linear solve.
//!
//! Factorization is delegated to faer's sparse LU. Whatever the backend does,
//! [`solve`] recomputes `||b - K x|| / max(||b||, eps)` from the stored CSR
//! data and only reports success when that number meets the tolerance.

use std::io::{self, Write};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use thiserror::Error;

/// Default relative tolerance for linear solves.
pub const DEFAULT_LINEAR_TOL: f64 = 1e-10;

const MAX_REFINEMENT_STEPS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparseError {
    #[error("entry ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({n_rows}x{n_cols})")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("linear solve failed: matrix is singular or factorization broke down (best relative residual {residual:e})")]
    Singular { residual: f64 },
    #[error("linear solve did not reach tolerance {tol:e} (best relative residual {residual:e})")]
    NotConverged { residual: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Assembles a CSR matrix from `(row, col, value)` triplets.
    ///
    /// Duplicates are summed in input order; entries that sum to exactly
    /// zero are dropped.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SparseError> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(row, col, _) in triplets {
            if row >= n_rows || col >= n_cols {
                return Err(SparseError::IndexOutOfRange {
                    row,
                    col,
                    n_rows,
                    n_cols,
                });
            }
            counts[row + 1] += 1;
        }
        for r in 0..n_rows {
            counts[r + 1] += counts[r];
        }
        // bucket by row, stable so duplicate summation follows input order
        let mut next = counts.clone();
        let mut bucket = vec![(0usize, 0.0f64); triplets.len()];
        for &(row, col, value) in triplets {
            bucket[next[row]] = (col, value);
            next[row] += 1;
        }

        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        for r in 0..n_rows {
            let row = &mut bucket[counts[r]..counts[r + 1]];
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut sum = 0.0;
                while k < row.len() && row[k].0 == col {
                    sum += row[k].1;
                    k += 1;
                }
                if sum != 0.0 {
                    col_indices.push(col);
                    values.push(sum);
                }
            }
            row_offsets.push(col_indices.len());
        }

        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values stored in `row`.
    pub fn row(&self, row: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[row]..self.row_offsets[row + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Stored value at `(row, col)`, zero when not stored.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (cols, vals) = self.row(row);
        cols.binary_search(&col).map_or(0.0, |k| vals[k])
    }

    /// Iterates over stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.n_cols {
            return Err(SparseError::DimensionMismatch {
                expected: self.n_cols,
                found: x.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect())
    }

    /// Computes `self^T x` without forming the transpose.
    pub fn matvec_transpose(&self, x: &[f64]) -> Result<Vec<f64>, SparseError> {
        if x.len() != self.n_rows {
            return Err(SparseError::DimensionMismatch {
                expected: self.n_rows,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.n_cols];
        for (r, &xr) in x.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += v * xr;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        SparseMatrix::from_triplets(self.n_cols, self.n_rows, &t)
            .expect("transposed indices are in range")
    }

    /// Keeps the rows and columns listed in `rows` and `cols`, renumbered
    /// by their position in those lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut t = Vec::new();
        for (new_r, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                if col_map[c] != usize::MAX {
                    t.push((new_r, col_map[c], v));
                }
            }
        }
        SparseMatrix::from_triplets(rows.len(), cols.len(), &t)
            .expect("submatrix indices are in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Largest absolute entrywise asymmetry relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
            / scale
    }

    /// Writes the matrix in MatrixMarket coordinate format (1-based).
    pub fn write_matrix_market<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolveResult {
    pub solution: Vec<f64>,
    pub relative_residual: f64,
    /// `||b - K x||_2 / (||K||_F ||x||_2 + ||b||_2)`
    pub backward_error: f64,
    /// Refinement sweeps after the initial direct solve.
    pub iterations: usize,
}

/// `||b - K x||_2 / max(||b||_2, eps)`.
pub fn relative_residual(k: &SparseMatrix, b: &[f64], x: &[f64]) -> Result<f64, SparseError> {
    let kx = k.matvec(x)?;
    let r = norm2(b.iter().zip(&kx).map(|(bi, ki)| bi - ki));
    Ok(r / norm2(b.iter().copied()).max(f64::EPSILON))
}

/// Normwise backward error `||b - K x||_2 / (||K||_F ||x||_2 + ||b||_2)`.
pub fn backward_error(k: &SparseMatrix, b: &[f64], x: &[f64]) -> Result<f64, SparseError> {
    let kx = k.matvec(x)?;
    let r = norm2(b.iter().zip(&kx).map(|(bi, ki)| bi - ki));
    let scale =
        norm2(k.values().iter().copied()) * norm2(x.iter().copied()) + norm2(b.iter().copied());
    Ok(r / scale.max(f64::MIN_POSITIVE))
}

fn norm2(it: impl Iterator<Item = f64>) -> f64 {
    it.map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves `K x = b` by sparse LU with iterative refinement.
///
/// The solve is accepted when either the relative residual or the normwise
/// backward error is at most `tol`.
pub fn solve(k: &SparseMatrix, b: &[f64], tol: f64) -> Result<LinearSolveResult, SparseError> {
    if k.n_rows != k.n_cols {
        return Err(SparseError::NotSquare {
            n_rows: k.n_rows,
            n_cols: k.n_cols,
        });
    }
    if b.len() != k.n_rows {
        return Err(SparseError::DimensionMismatch {
            expected: k.n_rows,
            found: b.len(),
        });
    }
    let n = k.n_rows;
    if n == 0 {
        return Ok(LinearSolveResult {
            solution: Vec::new(),
            relative_residual: 0.0,
            backward_error: 0.0,
            iterations: 0,
        });
    }
    let b_norm = norm2(b.iter().copied());
    if b_norm == 0.0 {
        return Ok(LinearSolveResult {
            solution: vec![0.0; n],
            relative_residual: 0.0,
            backward_error: 0.0,
            iterations: 0,
        });
    }

    let triplets: Vec<_> = k
        .triplets()
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let singular = || SparseError::Singular {
        residual: f64::INFINITY,
    };
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|_| singular())?;
    let lu = mat.sp_lu().map_err(|_| singular())?;

    let apply = |rhs: &[f64]| -> Vec<f64> {
        let col = Col::<f64>::from_fn(n, |i| rhs[i]);
        let sol = lu.solve(&col);
        (0..n).map(|i| sol[i]).collect()
    };

    let mut x = apply(b);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    let mut res = relative_residual(k, b, &x)?;
    let mut best = (res, x.clone());
    let mut sweeps = 0;
    while res > tol * 1e-3 && sweeps < MAX_REFINEMENT_STEPS {
        let kx = k.matvec(&x)?;
        let r: Vec<f64> = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
        let dx = apply(&r);
        if dx.iter().any(|v| !v.is_finite()) {
            break;
        }
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
        let cand_res = relative_residual(k, b, &candidate)?;
        sweeps += 1;
        if !(cand_res < res) {
            break;
        }
        x = candidate;
        res = cand_res;
        if res < best.0 {
            best = (res, x.clone());
        }
    }

    let (residual, solution) = best;
    if !residual.is_finite() {
        return Err(SparseError::Singular { residual });
    }
    let backward = backward_error(k, b, &solution)?;
    if residual > tol && (backward > tol || residual > 1e-2) {
        // a wildly wrong answer means the factorization hit a zero pivot
        if residual > 1e-2 {
            return Err(SparseError::Singular { residual });
        }
        return Err(SparseError::NotConverged { residual, tol });
    }
    Ok(LinearSolveResult {
        solution,
        relative_residual: residual,
        backward_error: backward,
        iterations: sweeps,
    })
}
