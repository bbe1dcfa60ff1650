//! The parameterized circuit `U = P^† D^† F^† Λ F D P` as dense matrices.
//!
//! With `W = F D P` the circuit is `W^† Λ W`, an eigendecomposition whose
//! eigenvalues are the diagonal of the Λ block. Every Λ entry is
//! `e^{i psi_j}` with `psi_j = sum_b s_b(j) cot(theta_lambda[b]) / 2`, where
//! `s_b(j)` is `+1` when bit `b` of `j` is set and `-1` otherwise, so the
//! circuit has the analytic logarithm `W^† diag(i psi) W`.

pub mod gates;
pub mod params;
mod warm;

use crate::dense::{ComplexDense, C64};
use crate::error::{Error, Result};
use crate::spectral::{check_qubits, MAX_QUBITS};

pub use gates::{p_block_ops, qft_ops, standard_qft_angles, GateKind, GateOp};
pub use params::{p_count, qft_count, total_count, ParamVector, SINGULARITY_GUARD};
pub use warm::{lambda_least_squares, warm_start};

/// Largest gate angle the Λ block will feed to an RZ: `cot(SINGULARITY_GUARD)`.
pub fn max_lambda_angle() -> f64 {
    1.0 / SINGULARITY_GUARD.tan()
}

fn cot_clamped(t: f64) -> f64 {
    let limit = max_lambda_angle();
    (t.cos() / t.sin()).clamp(-limit, limit)
}

pub fn build_p_block(theta_p: &[f64], n_qubits: usize) -> Result<ComplexDense> {
    check_qubits(n_qubits, MAX_QUBITS)?;
    if theta_p.len() != p_count(n_qubits) {
        return Err(Error::Layout {
            block: "theta_p",
            expected: p_count(n_qubits),
            got: theta_p.len(),
        });
    }
    Ok(gates::ops_unitary(n_qubits, &p_block_ops(n_qubits), theta_p))
}

/// Diagonal of `RZ(a_0) ⊗ ... ⊗ RZ(a_{n-1})`, `a_0` on the most significant bit.
pub fn kron_rz_phases(angles: &[f64]) -> Vec<f64> {
    let n = angles.len();
    (0..1usize << n)
        .map(|j| {
            angles
                .iter()
                .enumerate()
                .map(|(b, &a)| if (j >> (n - 1 - b)) & 1 == 1 { a / 2.0 } else { -a / 2.0 })
                .sum()
        })
        .collect()
}

fn phases_to_unit(phases: &[f64]) -> Vec<C64> {
    phases.iter().map(|&p| C64::from_polar(1.0, p)).collect()
}

pub fn build_kron_rz(angles: &[f64]) -> ComplexDense {
    ComplexDense::from_diag(&phases_to_unit(&kron_rz_phases(angles)))
}

pub fn build_d_block(theta_d: &[f64]) -> ComplexDense {
    build_kron_rz(theta_d)
}

/// RZ angles of the Λ block: clamped `cot(theta)`.
pub fn lambda_gate_angles(theta_lambda: &[f64]) -> Result<Vec<f64>> {
    params::check_guard(theta_lambda)?;
    Ok(theta_lambda.iter().map(|&t| cot_clamped(t)).collect())
}

pub fn build_lambda_block(theta_lambda: &[f64]) -> Result<ComplexDense> {
    Ok(build_kron_rz(&lambda_gate_angles(theta_lambda)?))
}

pub fn build_param_qft(theta_f: &[f64], n_qubits: usize) -> Result<ComplexDense> {
    check_qubits(n_qubits, MAX_QUBITS)?;
    if theta_f.len() != qft_count(n_qubits) {
        return Err(Error::Layout {
            block: "theta_f",
            expected: qft_count(n_qubits),
            got: theta_f.len(),
        });
    }
    Ok(gates::ops_unitary(n_qubits, &qft_ops(n_qubits), theta_f))
}

/// `W = F(theta_F) D(theta_D) P(theta_P)`, built by applying D as a row scaling and
/// the QFT gates in place on top of P.
pub fn eigenbasis(params: &ParamVector) -> ComplexDense {
    let n = params.n_qubits();
    let p = gates::ops_unitary(n, &p_block_ops(n), &params.theta_p);
    let d = phases_to_unit(&kron_rz_phases(&params.theta_d));
    let mut w = p.scale_rows(&d);
    gates::apply_ops(&mut w, n, &qft_ops(n), &params.theta_f);
    w
}

/// Unwrapped phases `psi_j` of the Λ block diagonal.
pub fn lambda_phases(params: &ParamVector) -> Vec<f64> {
    let angles: Vec<f64> = params.theta_lambda.iter().map(|&t| cot_clamped(t)).collect();
    kron_rz_phases(&angles)
}

/// `P^† D^† F^† Λ F D P`.
pub fn assemble_u(params: &ParamVector) -> ComplexDense {
    let w = eigenbasis(params);
    let lam = phases_to_unit(&lambda_phases(params));
    w.adjoint().matmul_unchecked(&w.scale_rows(&lam))
}

/// The logarithm `W^† diag(i psi) W` of [`assemble_u`].
pub fn reconstruct_generator(params: &ParamVector) -> ComplexDense {
    let w = eigenbasis(params);
    let log_diag: Vec<C64> = lambda_phases(params)
        .into_iter()
        .map(|p| C64::new(0.0, p))
        .collect();
    w.adjoint().matmul_unchecked(&w.scale_rows(&log_diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::frobenius_distance;
    use crate::expm::expm_pade;
    use crate::rng::Rng;
    use crate::spectral::{build_g, dft_matrix};
    use std::f64::consts::PI;

    fn diag_phase(m: &ComplexDense, j: usize) -> f64 {
        m[(j, j)].arg()
    }

    #[test]
    fn p_block_identity_and_single_qubit() {
        let p = build_p_block(&vec![0.0; p_count(3)], 3).unwrap();
        assert_eq!(p, ComplexDense::identity(8));
        // RY(pi) then RY(0)
        let p = build_p_block(&[PI, 0.0], 1).unwrap();
        let want = ComplexDense::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(frobenius_distance(&p, &want).unwrap() < 1e-15);
    }

    #[test]
    fn p_block_is_real_orthogonal() {
        let mut rng = Rng::new(3);
        for n in 1..=4 {
            let theta: Vec<f64> = (0..p_count(n)).map(|_| rng.uniform(-PI, PI)).collect();
            let p = build_p_block(&theta, n).unwrap();
            assert_eq!(p.max_abs_imag(), 0.0);
            let ptp = &p.transpose() * &p;
            assert!(frobenius_distance(&ptp, &ComplexDense::identity(1 << n)).unwrap() <= 1e-12);
        }
        assert!(matches!(
            build_p_block(&[0.0; 3], 2),
            Err(Error::Layout { block: "theta_p", .. })
        ));
    }

    #[test]
    fn kron_rz_examples() {
        let phi = 0.83;
        let m = build_kron_rz(&[phi]);
        assert!((m[(0, 0)] - C64::from_polar(1.0, -phi / 2.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - C64::from_polar(1.0, phi / 2.0)).norm() < 1e-15);
        assert_eq!(build_kron_rz(&[0.0, 0.0]), ComplexDense::identity(4));
        let (a, b) = (0.4, 1.3);
        let m = build_kron_rz(&[a, b]);
        let want = [-(a + b) / 2.0, (-a + b) / 2.0, (a - b) / 2.0, (a + b) / 2.0];
        for (j, w) in want.iter().enumerate() {
            assert!((diag_phase(&m, j) - w).abs() < 1e-15);
        }
        assert_eq!(build_d_block(&[a, b]), m);
    }

    #[test]
    fn kron_rz_matches_explicit_tensor_product() {
        let angles = [0.3, -1.2, 2.2];
        let rz = |phi: f64| ComplexDense::from_diag(&[C64::from_polar(1.0, -phi / 2.0), C64::from_polar(1.0, phi / 2.0)]);
        let mut acc = ComplexDense::identity(1);
        for &a in &angles {
            let r = rz(a);
            let n = acc.dim();
            acc = ComplexDense::from_fn(2 * n, |i, j| acc[(i / 2, j / 2)] * r[(i % 2, j % 2)]);
        }
        assert!(frobenius_distance(&acc, &build_kron_rz(&angles)).unwrap() < 1e-15);
    }

    #[test]
    fn lambda_block_examples() {
        let m = build_lambda_block(&[PI / 2.0]).unwrap();
        assert!(frobenius_distance(&m, &ComplexDense::identity(2)).unwrap() < 1e-15);
        let m = build_lambda_block(&[PI / 4.0]).unwrap();
        assert!((m[(0, 0)] - C64::from_polar(1.0, -0.5)).norm() < 1e-15);
        assert!((m[(1, 1)] - C64::from_polar(1.0, 0.5)).norm() < 1e-15);
        let m = build_lambda_block(&[PI / 4.0, 3.0 * PI / 4.0]).unwrap();
        // gate angles (1, -1) through the two-qubit expansion
        for (j, w) in [0.0, -1.0, 1.0, 0.0].iter().enumerate() {
            assert!((diag_phase(&m, j) - w).abs() < 1e-14);
        }
        assert!(matches!(
            build_lambda_block(&[1.0, 0.0]),
            Err(Error::Singularity { index: 1, .. })
        ));
    }

    #[test]
    fn qft_examples() {
        let h = build_param_qft(&[], 1).unwrap();
        assert!(frobenius_distance(&h, &dft_matrix(2)).unwrap() < 1e-15);
        let f = build_param_qft(&[PI / 2.0], 2).unwrap();
        assert!(frobenius_distance(&f, &dft_matrix(4)).unwrap() <= 1e-12);
        let fc = build_param_qft(&[-PI / 2.0], 2).unwrap();
        assert!(frobenius_distance(&fc, &dft_matrix(4).conj()).unwrap() <= 1e-12);
        assert!(frobenius_distance(&fc, &dft_matrix(4).adjoint()).unwrap() <= 1e-12);
        for n in 1..=6 {
            let f = build_param_qft(&standard_qft_angles(n), n).unwrap();
            assert!(frobenius_distance(&f, &dft_matrix(1 << n)).unwrap() <= 1e-12, "n={n}");
        }
    }

    #[test]
    fn block_identity_circuit() {
        for n in 1..=3 {
            let p = ParamVector::block_identity(n).unwrap();
            let u = assemble_u(&p);
            assert!(frobenius_distance(&u, &ComplexDense::identity(1 << n)).unwrap() <= 1e-12);
            assert!(reconstruct_generator(&p).frobenius_norm() <= 1e-15);
        }
    }

    #[test]
    fn diagonal_block_as_row_scaling_is_exact() {
        let p = ParamVector::random_init(3, 4).unwrap();
        let pb = build_p_block(p.theta_p(), 3).unwrap();
        let d = build_d_block(p.theta_d());
        assert_eq!(pb.scale_rows(&d.diagonal()), &d * &pb);
        let lam = build_lambda_block(p.theta_lambda()).unwrap();
        assert_eq!(pb.scale_cols(&lam.diagonal()), &pb * &lam);
    }

    #[test]
    fn eigenbasis_matches_block_product() {
        let p = ParamVector::random_init(3, 9).unwrap();
        let f = build_param_qft(p.theta_f(), 3).unwrap();
        let d = build_d_block(p.theta_d());
        let pb = build_p_block(p.theta_p(), 3).unwrap();
        let want = &(&f * &d) * &pb;
        assert!(frobenius_distance(&eigenbasis(&p), &want).unwrap() <= 1e-13);
        // literal ordering P^† D^† F^† Λ F D P
        let lam = build_lambda_block(p.theta_lambda()).unwrap();
        let u = &(&(&(&(&(&pb.adjoint() * &d.adjoint()) * &f.adjoint()) * &lam) * &f) * &d) * &pb;
        assert!(frobenius_distance(&assemble_u(&p), &u).unwrap() <= 1e-12);
    }

    #[test]
    fn structural_invariants_on_random_points() {
        let mut rng = Rng::new(77);
        for n in 1..=4 {
            for _ in 0..10 {
                let p = ParamVector::random(n, &mut rng).unwrap();
                let u = assemble_u(&p);
                assert!(u.unitarity_defect() <= 1e-12);
                let a = reconstruct_generator(&p);
                assert!(a.anti_hermitian_defect() <= 1e-12);
                assert!(a.trace().norm() <= 1e-12);
                let e = expm_pade(&a).unwrap();
                assert!(frobenius_distance(&e, &u).unwrap() <= 1e-9);
            }
        }
    }

    #[test]
    fn warm_start_reproduces_g_for_one_and_two_qubits() {
        for n in 1..=2 {
            let p = warm_start(n).unwrap();
            let g = build_g(n, 0.0).unwrap();
            assert!(frobenius_distance(&reconstruct_generator(&p), &g).unwrap() <= 1e-6);
            let eg = expm_pade(&g).unwrap();
            assert!(frobenius_distance(&assemble_u(&p), &eg).unwrap() <= 1e-6);
        }
    }
}
