//! Dense order-`d` complex tensors and the mu-mode/Tucker kernels.
//!
//! Everything in this crate moves through two types: [`Tensor`], a dense
//! column-major (first index fastest) array of `Complex64`, and
//! [`DenseMatrix`], a small dense column-major matrix. A mu-mode product
//! contracts a matrix against one tensor index and costs a single GEMM per
//! contiguous slab; a Tucker operator chains one mu-mode product per mode.

use crate::error::{Error, Result};
use num_complex::Complex64;

const PAR_FLOP_THRESHOLD: usize = 1 << 18;

/// Dense column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i + i * n] = Complex64::ONE;
        }
        m
    }

    /// Build from a closure over (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[r + c * rows] = f(r, c);
            }
        }
        m
    }

    /// Column-major construction; `data.len()` must equal `rows * cols`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r + c * self.rows]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r + c * self.rows] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, alpha: Complex64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self + alpha * I`.
    pub fn add_scaled_identity(&self, alpha: Complex64) -> DenseMatrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i + i * self.rows] += alpha;
        }
        out
    }

    /// Matrix-matrix product via GEMM.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        gemm_colmajor(
            self.rows,
            self.cols,
            other.cols,
            &self.data,
            self.rows,
            &other.data,
            other.rows,
            &mut out.data,
            self.rows,
        );
        out
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len());
        let mut y = vec![Complex64::ZERO; self.rows];
        for c in 0..self.cols {
            let xc = x[c];
            if xc == Complex64::ZERO {
                continue;
            }
            let col = &self.data[c * self.rows..(c + 1) * self.rows];
            for (yi, aij) in y.iter_mut().zip(col) {
                *yi += aij * xc;
            }
        }
        y
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|c| {
                self.data[c * self.rows..(c + 1) * self.rows]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0f64; self.rows];
        for c in 0..self.cols {
            for (r, s) in sums.iter_mut().enumerate() {
                *s += self.data[r + c * self.rows].norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Dense order-`d` complex tensor, column-major (first index fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn zeros(dims: &[usize]) -> Self {
        assert!(!dims.is_empty() && dims.iter().all(|&n| n > 0));
        let n: usize = dims.iter().product();
        Self {
            dims: dims.to_vec(),
            data: vec![Complex64::ZERO; n],
        }
    }

    /// `unvec`: reinterpret a column-stacked vector as a tensor.
    pub fn from_vec(data: Vec<Complex64>, dims: &[usize]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: data.len(),
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
            data,
        })
    }

    pub fn from_fn(dims: &[usize], mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let mut t = Tensor::zeros(dims);
        let mut idx = vec![0usize; dims.len()];
        for lin in 0..t.data.len() {
            t.data[lin] = f(&idx);
            for (axis, i) in idx.iter_mut().enumerate() {
                *i += 1;
                if *i < dims[axis] {
                    break;
                }
                *i = 0;
            }
        }
        t
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `vec`: the column-stacked entries, first index fastest.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut lin = 0;
        let mut stride = 1;
        for (i, &n) in idx.iter().zip(&self.dims) {
            debug_assert!(*i < n);
            lin += i * stride;
            stride *= n;
        }
        lin
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Complex64) {
        let lin = self.linear_index(idx);
        self.data[lin] = v;
    }

    pub fn scale(&self, alpha: Complex64) -> Tensor {
        Tensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn scale_mut(&mut self, alpha: Complex64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.dims, other.dims);
        Tensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.dims, other.dims);
        Tensor {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: Complex64, other: &Tensor) {
        assert_eq!(self.dims, other.dims);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// Maximum entry modulus.
    pub fn inf_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of `vec(self)`.
    pub fn two_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Contract `m` against mode `mode` (0-based): the result satisfies
    /// `out[i_0,..,j,..,i_{d-1}] = sum_k m[j,k] * self[i_0,..,k,..,i_{d-1}]`.
    pub fn mu_mode_product(&self, m: &DenseMatrix, mode: usize) -> Result<Tensor> {
        if mode >= self.dims.len() {
            return Err(Error::DimensionMismatch {
                axis: mode,
                expected: self.dims.len(),
                found: mode + 1,
            });
        }
        if m.cols() != self.dims[mode] {
            return Err(Error::DimensionMismatch {
                axis: mode,
                expected: self.dims[mode],
                found: m.cols(),
            });
        }
        let n_mu = self.dims[mode];
        let r = m.rows();
        let p: usize = self.dims[..mode].iter().product();
        let q: usize = self.dims[mode + 1..].iter().product();

        let mut out_dims = self.dims.clone();
        out_dims[mode] = r;
        let mut out = vec![Complex64::ZERO; p * r * q];

        if mode == 0 {
            // One contiguous GEMM: M (r x n_mu) times the n_mu x q unfolding.
            gemm_colmajor(r, n_mu, q, m.data(), r, &self.data, n_mu, &mut out, r);
        } else {
            // Per slab: S (p x n_mu, col-major) times M^T.
            let in_slab = p * n_mu;
            let out_slab = p * r;
            let work = p * n_mu * r * q;
            let run = |(dst, src): (&mut [Complex64], &[Complex64])| {
                gemm_b_transposed(p, n_mu, r, src, p, m.data(), m.rows(), dst, p);
            };
            if q >= 2 && work > PAR_FLOP_THRESHOLD {
                use rayon::prelude::*;
                out.par_chunks_mut(out_slab)
                    .zip(self.data.par_chunks(in_slab))
                    .for_each(run);
            } else {
                out.chunks_mut(out_slab)
                    .zip(self.data.chunks(in_slab))
                    .for_each(run);
            }
        }
        Tensor::from_vec(out, &out_dims)
    }

    /// Tucker operator: apply `mats[mu]` along mode `mu` for every mode.
    /// Equivalent to `unvec((mats[d-1] kron .. kron mats[0]) * vec(self))`.
    pub fn tucker(&self, mats: &[DenseMatrix]) -> Result<Tensor> {
        if mats.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                axis: 0,
                expected: self.dims.len(),
                found: mats.len(),
            });
        }
        let mut cur = self.clone();
        for (mu, m) in mats.iter().enumerate() {
            cur = cur.mu_mode_product(m, mu)?;
        }
        Ok(cur)
    }
}

#[inline]
fn as_cgemm(p: &[Complex64]) -> *const [f64; 2] {
    p.as_ptr() as *const [f64; 2]
}

#[inline]
fn as_cgemm_mut(p: &mut [Complex64]) -> *mut [f64; 2] {
    p.as_mut_ptr() as *mut [f64; 2]
}

/// C (m x n) = A (m x k) * B (k x n), all column-major with the given
/// leading dimensions.
fn gemm_colmajor(
    m: usize,
    k: usize,
    n: usize,
    a: &[Complex64],
    lda: usize,
    b: &[Complex64],
    ldb: usize,
    c: &mut [Complex64],
    ldc: usize,
) {
    use matrixmultiply::{zgemm, CGemmOption};
    debug_assert!(a.len() >= lda * k.max(1));
    debug_assert!(b.len() >= ldb * n.max(1));
    debug_assert!(c.len() >= ldc * n.max(1));
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            as_cgemm(a),
            1,
            lda as isize,
            as_cgemm(b),
            1,
            ldb as isize,
            [0.0, 0.0],
            as_cgemm_mut(c),
            1,
            ldc as isize,
        );
    }
}

/// C (m x n) = A (m x k) * B^T where B is n x k column-major.
fn gemm_b_transposed(
    m: usize,
    k: usize,
    n: usize,
    a: &[Complex64],
    lda: usize,
    b: &[Complex64],
    ldb: usize,
    c: &mut [Complex64],
    ldc: usize,
) {
    use matrixmultiply::{zgemm, CGemmOption};
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            as_cgemm(a),
            1,
            lda as isize,
            // B^T[t, j] = B[j, t] sits at j + t*ldb: row stride ldb, col stride 1.
            as_cgemm(b),
            ldb as isize,
            1,
            [0.0, 0.0],
            as_cgemm_mut(c),
            1,
            ldc as isize,
        );
    }
}

/// Kronecker product, used by tests and the dense reference path.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ca in 0..a.cols() {
        for ra in 0..a.rows() {
            let v = a.get(ra, ca);
            for cb in 0..b.cols() {
                for rb in 0..b.rows() {
                    out.set(ra * b.rows() + rb, ca * b.cols() + cb, v * b.get(rb, cb));
                }
            }
        }
    }
    out
}
