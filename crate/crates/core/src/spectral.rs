//! The canonical uniform antisymmetric matrix G and its closed-form
//! eigendecomposition.
//!
//! G has `g` on the diagonal, `+1` strictly above and `-1` strictly below.
//! Its eigenvectors are the columns of `V = D F` where
//! `D = diag(e^{i j pi / N})` and `F` is the unitary DFT matrix with
//! `F[j][k] = e^{i 2 pi j k / N} / sqrt(N)`. Column `k` of `V` pairs with
//! `g + i cot((2k + 1) pi / (2N))`.

use std::f64::consts::PI;

use crate::dense::{ComplexDense, C64};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 7;

pub(crate) fn check_qubits(n_qubits: usize, max: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > max {
        return Err(Error::QubitRange {
            n: n_qubits,
            min: 1,
            max,
        });
    }
    Ok(1 << n_qubits)
}

/// Inverse of `1 << n` for the dimensions this crate supports.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() || dim > 1 << MAX_QUBITS {
        return Err(Error::NotPowerOfTwo { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

pub fn build_g(n_qubits: usize, diag_shift: f64) -> Result<ComplexDense> {
    let n = check_qubits(n_qubits, MAX_QUBITS)?;
    Ok(ComplexDense::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => C64::new(1.0, 0.0),
        std::cmp::Ordering::Equal => C64::new(diag_shift, 0.0),
        std::cmp::Ordering::Greater => C64::new(-1.0, 0.0),
    }))
}

/// `cot((2k + 1) pi / (2N))` for k = 0..N-1.
pub fn canonical_cotangents(dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|k| 1.0 / ((2 * k + 1) as f64 * PI / (2 * dim) as f64).tan())
        .collect()
}

/// Unitary DFT matrix with `omega = e^{+i 2 pi / N}`.
pub fn dft_matrix(dim: usize) -> ComplexDense {
    let norm = 1.0 / (dim as f64).sqrt();
    ComplexDense::from_fn(dim, |j, k| {
        // reduce the exponent mod N before converting to an angle
        let e = (j * k) % dim;
        C64::from_polar(norm, 2.0 * PI * e as f64 / dim as f64)
    })
}

/// Diagonal `D[j][j] = e^{i j pi / N}`.
pub fn phase_diagonal(dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|j| C64::from_polar(1.0, j as f64 * PI / dim as f64))
        .collect()
}

#[derive(Debug, Clone)]
pub struct GSpectrum {
    pub dim: usize,
    pub diag_shift: f64,
    /// Column order, not sorted.
    pub eigenvalues: Vec<C64>,
    pub phase_matrix: ComplexDense,
    pub fourier_matrix: ComplexDense,
    pub eigenvector_matrix: ComplexDense,
}

pub fn g_spectrum(n_qubits: usize, diag_shift: f64) -> Result<GSpectrum> {
    let dim = check_qubits(n_qubits, MAX_QUBITS)?;
    let phases = phase_diagonal(dim);
    let fourier = dft_matrix(dim);
    let eigenvector_matrix = fourier.scale_rows(&phases);
    let eigenvalues = canonical_cotangents(dim)
        .into_iter()
        .map(|c| C64::new(diag_shift, c))
        .collect();
    Ok(GSpectrum {
        dim,
        diag_shift,
        eigenvalues,
        phase_matrix: ComplexDense::from_diag(&phases),
        fourier_matrix: fourier,
        eigenvector_matrix,
    })
}

impl GSpectrum {
    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    /// `V diag(e^{lambda_k}) V^dagger`.
    pub fn exp_reconstruction(&self) -> ComplexDense {
        let expd: Vec<C64> = self.eigenvalues.iter().map(|z| z.exp()).collect();
        let v = &self.eigenvector_matrix;
        &v.scale_cols(&expd) * &v.adjoint()
    }
}

/// Largest `||G v_k - lambda_k v_k||_inf` over all columns.
pub fn verify_spectrum(spec: &GSpectrum) -> Result<f64> {
    let g = build_g(qubits_for_dim(spec.dim)?, spec.diag_shift)?;
    let gv = &g * &spec.eigenvector_matrix;
    let lv = spec.eigenvector_matrix.scale_cols(&spec.eigenvalues);
    Ok(gv
        .as_slice()
        .iter()
        .zip(lv.as_slice())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}
