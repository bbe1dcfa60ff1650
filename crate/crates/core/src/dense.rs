//! Dense complex matrices and real antisymmetric matrices.
//!
//! Storage is row-major. Dimensions in this crate stay at or below 128, so
//! every product is a plain triple loop in i-k-j order.

use std::ops::{Index, IndexMut, Mul, Neg};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDense {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexDense {
    /// Builds a matrix from row-major entries, rejecting bad shapes and non-finite values.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub(crate) fn from_vec_unchecked(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_vec_unchecked(dim, vec![ZERO; dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Embeds a real row-major matrix.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::new(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_vec_unchecked(self.dim, self.data.iter().map(|&z| f(z)).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_dims(self, rhs)?;
        Ok(self.matmul_unchecked(rhs))
    }

    pub(crate) fn matmul_unchecked(&self, rhs: &Self) -> Self {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self::from_vec_unchecked(n, out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        check_dims(self, rhs)?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        check_dims(self, rhs)?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self::from_vec_unchecked(
            self.dim,
            self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    /// diag(d) * self, i.e. row i scaled by d[i].
    pub fn scale_rows(&self, d: &[C64]) -> Self {
        assert_eq!(d.len(), self.dim, "diagonal length must match dimension");
        let n = self.dim;
        let mut out = self.clone();
        for (i, &di) in d.iter().enumerate() {
            for z in &mut out.data[i * n..(i + 1) * n] {
                *z = di * *z;
            }
        }
        out
    }

    /// self * diag(d), i.e. column j scaled by d[j].
    pub fn scale_cols(&self, d: &[C64]) -> Self {
        assert_eq!(d.len(), self.dim, "diagonal length must match dimension");
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for (z, &dj) in out.data[i * n..(i + 1) * n].iter_mut().zip(d) {
                *z *= dj;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// ||U^dagger U - I||_F
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().matmul_unchecked(self);
        let id = Self::identity(self.dim);
        g.zip_with(&id, |a, b| a - b).frobenius_norm()
    }

    /// ||H - H^dagger||_F
    pub fn hermitian_defect(&self) -> f64 {
        self.zip_with(&self.adjoint(), |a, b| a - b).frobenius_norm()
    }

    /// ||A + A^dagger||_F
    pub fn anti_hermitian_defect(&self) -> f64 {
        self.zip_with(&self.adjoint(), |a, b| a + b).frobenius_norm()
    }
}

fn check_dims(a: &ComplexDense, b: &ComplexDense) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    Ok(())
}

impl Index<(usize, usize)> for ComplexDense {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexDense {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexDense {
    type Output = ComplexDense;

    /// Panics on dimension mismatch; use [`ComplexDense::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexDense) -> ComplexDense {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl Neg for &ComplexDense {
    type Output = ComplexDense;

    fn neg(self) -> ComplexDense {
        self.map(|z| -z)
    }
}

/// Frobenius distance sqrt(sum |x_ij - y_ij|^2).
pub fn frobenius_distance(x: &ComplexDense, y: &ComplexDense) -> Result<f64> {
    check_dims(x, y)?;
    Ok(x.data
        .iter()
        .zip(&y.data)
        .map(|(&a, &b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Real matrix with zero diagonal and `a[j][i] == -a[i][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl AntisymMatrix {
    /// Validates the invariants exactly.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        for i in 0..dim {
            for j in i..dim {
                let upper = data[i * dim + j];
                let lower = data[j * dim + i];
                if upper != -lower {
                    return Err(Error::NotAntisymmetric {
                        row: i,
                        col: j,
                        upper,
                        lower,
                    });
                }
            }
        }
        // -0.0 on the diagonal passes the check above; normalize it
        let mut data = data;
        for i in 0..dim {
            data[i * dim + i] = 0.0;
        }
        Ok(Self { dim, data })
    }

    /// Builds from a generator of strictly-upper entries, called in row-major order.
    pub fn from_upper(dim: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let v = upper(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = -v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_complex(&self) -> ComplexDense {
        ComplexDense::from_vec_unchecked(
            self.dim,
            self.data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn negated(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl Index<(usize, usize)> for AntisymMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}
