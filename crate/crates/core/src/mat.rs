//! Minimal dense row-major matrix used on the training hot path.
//!
//! The layouts and kernels here are deliberately simple: contiguous `Vec<f64>`
//! storage, and three GEMM variants written as streaming AXPY/dot loops that
//! LLVM autovectorizes. No BLAS dependency, no threads, and no FMA
//! contraction, so results are bit-identical across builds of this crate.
//! (Spectral decompositions use `nalgebra` in [`crate::forensics`]; this type
//! converts losslessly.)

use alloc::vec;
use alloc::vec::Vec;

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Build from a row-major data vector. Panics if the length mismatches.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "Mat::from_vec: {rows}x{cols} needs {} entries, got {}",
            rows * cols,
            data.len()
        );
        Mat { rows, cols, data }
    }

    /// Build entry-by-entry from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Number of rows.
    #[inline(always)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    #[inline(always)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `true` when the matrix is square.
    #[inline(always)]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry accessor.
    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    /// Mutable entry accessor.
    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    /// Row `i` as a contiguous slice.
    #[inline(always)]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row `i` as a mutable contiguous slice.
    #[inline(always)]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// All entries, row-major.
    #[inline(always)]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// All entries, row-major, mutable.
    #[inline(always)]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Consume into the row-major data vector.
    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Set every entry to zero (reuses the allocation).
    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|v| *v = 0.0);
    }

    /// `true` if every entry is finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Transposed copy.
    pub fn transposed(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Frobenius norm squared, accumulated in fixed pairwise order.
    pub fn frob_sq(&self) -> f64 {
        pairwise_map_sum(&self.data, |v| v * v)
    }

    /// `self += alpha * other` (same shape).
    pub fn axpy(&mut self, alpha: f64, other: &Mat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * *b;
        }
    }

    /// Multiply every entry by `alpha`.
    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }
}

/// `c += a · b` with `a: m×k`, `b: k×n`, `c: m×n`.
///
/// AXPY ordering (m, k, n): the inner loop streams one row of `b` into one
/// row of `c`, which autovectorizes and is cache-friendly for the wide
/// activation blocks used in training.
pub fn gemm_nn(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.cols, b.rows, "gemm_nn: inner dimensions differ");
    assert_eq!((c.rows, c.cols), (a.rows, b.cols), "gemm_nn: output shape");
    let n = b.cols;
    for m in 0..a.rows {
        let arow = a.row(m);
        let crow = &mut c.data[m * n..(m + 1) * n];
        for (k, &aval) in arow.iter().enumerate() {
            let brow = &b.data[k * n..(k + 1) * n];
            for (cv, &bv) in crow.iter_mut().zip(brow) {
                *cv += aval * bv;
            }
        }
    }
}

/// `c += a · bᵀ` with `a: m×k`, `b: n×k`, `c: m×n`.
///
/// Both operands are traversed along contiguous rows (dot-product kernel);
/// used for parameter-gradient accumulation `gW += G · Zᵀ`.
pub fn gemm_nt(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.cols, b.cols, "gemm_nt: inner dimensions differ");
    assert_eq!((c.rows, c.cols), (a.rows, b.rows), "gemm_nt: output shape");
    for m in 0..a.rows {
        let arow = a.row(m);
        let crow = &mut c.data[m * b.rows..(m + 1) * b.rows];
        for (cv, nrow) in crow.iter_mut().zip(0..b.rows) {
            *cv += dot(arow, b.row(nrow));
        }
    }
}

/// `c += aᵀ · b` with `a: k×m`, `b: k×n`, `c: m×n`.
///
/// Streams rows of `a` and `b` together; used for the backward pass
/// `G_prev = Wᵀ · G`.
pub fn gemm_tn(c: &mut Mat, a: &Mat, b: &Mat) {
    assert_eq!(a.rows, b.rows, "gemm_tn: inner dimensions differ");
    assert_eq!((c.rows, c.cols), (a.cols, b.cols), "gemm_tn: output shape");
    let n = b.cols;
    for k in 0..a.rows {
        let arow = a.row(k);
        let brow = b.row(k);
        for (m, &aval) in arow.iter().enumerate() {
            let crow = &mut c.data[m * n..(m + 1) * n];
            for (cv, &bv) in crow.iter_mut().zip(brow) {
                *cv += aval * bv;
            }
        }
    }
}

/// Plain dot product of equal-length slices (sequential order).
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Fixed-order pairwise summation: deterministic and far more accurate than
/// naive left-to-right accumulation on long vectors.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    pairwise_map_sum(v, |x| x)
}

/// Pairwise summation of `f(v[i])` without materializing the mapped vector.
pub fn pairwise_map_sum(v: &[f64], f: impl Fn(f64) -> f64 + Copy) -> f64 {
    const BASE: usize = 32;
    fn rec(v: &[f64], f: impl Fn(f64) -> f64 + Copy) -> f64 {
        if v.len() <= BASE {
            let mut acc = 0.0;
            for &x in v {
                acc += f(x);
            }
            acc
        } else {
            let mid = v.len() / 2;
            rec(&v[..mid], f) + rec(&v[mid..], f)
        }
    }
    rec(v, f)
}

/// Mean with pairwise accumulation. Returns 0 for an empty slice.
pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        pairwise_sum(v) / v.len() as f64
    }
}
