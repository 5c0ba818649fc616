//! Dense square complex matrices and the Hermitian eigensolver.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::C64;

/// Largest matrix dimension handled by the dense paths (12 qubits).
pub const MAX_DENSE_DIM: usize = 4096;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let dim = values.len();
        let mut m = Self::zeros(dim);
        for (i, v) in values.iter().enumerate() {
            m.data[i * dim + i] = *v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    pub fn add_to(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] += value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, row: usize) -> &[C64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, col)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&mut self, factor: C64) {
        for x in &mut self.data {
            *x *= factor;
        }
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            });
        }
        let prod = self.to_faer() * rhs.to_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// `out = self · v`.
    pub fn matvec_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim);
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v) {
                acc += a * b;
            }
            *o = acc;
        }
    }

    /// `out = self† · v`.
    pub fn adjoint_matvec_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim);
        out.fill(C64::new(0.0, 0.0));
        for (row, vi) in self.data.chunks_exact(self.dim).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * vi;
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_error(&self) -> f64 {
        let a = self.to_faer();
        let g = a.adjoint() * &a;
        let mut s = 0.0;
        for j in 0..self.dim {
            for i in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                s += (g[(i, j)] - C64::new(target, 0.0)).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// ‖H − H†‖_F.
    pub fn hermiticity_error(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = self.get(i, j) - self.get(j, i).conj();
                s += if i == j { d.norm_sqr() } else { 2.0 * d.norm_sqr() };
            }
        }
        s.sqrt()
    }

    pub fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn from_faer(m: MatRef<'_, C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrix expected");
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

/// Eigenpairs of a Hermitian matrix: ascending eigenvalues and the matching
/// orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl HermitianEigen {
    /// `V · diag(f(λ)) · V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> DenseMatrix {
        let n = self.vectors.dim();
        let v = self.vectors.to_faer();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let scaled = Mat::from_fn(n, n, |i, j| v[(i, j)] * fv[j]);
        let out = scaled * v.adjoint();
        DenseMatrix::from_faer(out.as_ref())
    }

    /// `V · diag(f(λ)) · V† · x` without forming the matrix.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> C64, x: &[C64]) -> Vec<C64> {
        let n = self.vectors.dim();
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        self.vectors.adjoint_matvec_into(x, &mut coeffs);
        for (c, &l) in coeffs.iter_mut().zip(&self.values) {
            *c *= f(l);
        }
        let mut out = vec![C64::new(0.0, 0.0); n];
        self.vectors.matvec_into(&coeffs, &mut out);
        out
    }
}

/// Eigendecomposition of a Hermitian matrix of dimension ≤ 4096.
pub fn hermitian_eigen(h: &DenseMatrix) -> Result<HermitianEigen> {
    if h.dim() > MAX_DENSE_DIM {
        return Err(Error::Capacity {
            what: "dense eigendecomposition dimension",
            got: h.dim(),
            limit: MAX_DENSE_DIM,
        });
    }
    let asym = h.hermiticity_error();
    if asym > 1e-10 * h.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian(asym));
    }
    let evd = h
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = DenseMatrix::from_fn(n, |i, j| u[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}
