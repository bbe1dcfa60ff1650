//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `h[p][q]` with a
//! diagonal unitary, then applies the real symmetric Jacobi rotation that
//! annihilates it. The accumulated product of these plane transforms is the
//! eigenvector matrix.

use crate::dense::{ComplexDense, C64, ZERO};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexDense,
}

fn off_diagonal_norm(a: &ComplexDense) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_eig(h: &ComplexDense) -> Result<HermitianEig> {
    let n = h.dim();
    let scale = h.frobenius_norm();
    let deviation = h.hermitian_defect();
    if deviation > HERMITIAN_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }

    let mut a = h.clone();
    // symmetrize so that rounding in the input cannot stall convergence
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let mut v = ComplexDense::identity(n);
    let target = OFF_DIAGONAL_TOL * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexDense::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexDense, v: &mut ComplexDense, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = [[c, s], [-s conj(phase), c conj(phase)]] in the (p, q) plane
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c + aiq * jqp;
        a[(i, q)] = aip * s + aiq * jqq;

        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c + viq * jqp;
        v[(i, q)] = vip * s + viq * jqq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + aqj * jqp.conj();
        a[(q, j)] = apj * s + aqj * jqq.conj();
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Unitary polar factor `U (U^dagger U)^{-1/2}`, the unitary nearest to `u` in Frobenius norm.
///
/// Fails with `NotUnitary` when `u` is numerically singular.
pub fn nearest_unitary(u: &ComplexDense) -> Result<ComplexDense> {
    let gram = u.adjoint().matmul(u)?;
    let eig = hermitian_eig(&gram)?;
    let smallest = eig.eigenvalues.first().copied().unwrap_or(1.0);
    let largest = eig.eigenvalues.last().copied().unwrap_or(1.0).max(1.0);
    if smallest.is_nan() || smallest <= 1e-12 * largest {
        return Err(Error::NotUnitary {
            deviation: u.unitarity_defect(),
        });
    }
    let inv_sqrt: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| C64::new(1.0 / l.sqrt(), 0.0))
        .collect();
    let v = &eig.eigenvectors;
    let root = v.scale_cols(&inv_sqrt).matmul(&v.adjoint())?;
    u.matmul(&root)
}
