use std::f64::consts::PI;

use super::gates::standard_qft_angles;
use super::params::{p_count, ParamVector};
use crate::error::Result;
use crate::spectral::{canonical_cotangents, check_qubits, MAX_QUBITS};

/// Least-squares RZ angles `x_b` for a Kronecker-RZ diagonal whose phases
/// `sum_b s_b(k) x_b / 2` best match `targets`.
///
/// The sign patterns `s_b` are mutually orthogonal with squared norm `N`,
/// so the normal equations are diagonal: `x_b = 2 <s_b, targets> / N`.
pub fn lambda_least_squares(targets: &[f64]) -> Vec<f64> {
    let dim = targets.len();
    let n = dim.trailing_zeros() as usize;
    (0..n)
        .map(|b| {
            let dot: f64 = targets
                .iter()
                .enumerate()
                .map(|(k, &t)| if (k >> (n - 1 - b)) & 1 == 1 { t } else { -t })
                .sum();
            2.0 * dot / dim as f64
        })
        .collect()
}

/// Parameters that make the circuit reproduce `e^G` (exactly for n <= 2, by a
/// least-squares fit of the Λ block for larger n).
///
/// P is the identity, D realizes `diag(e^{-i j pi / N})` up to a global phase,
/// and F runs the QFT at negated standard angles, which yields `F^†`. Then
/// `D^† F^† Λ F D = (D_e F_e) Λ (D_e F_e)^†` where `D_e F_e` is the closed-form
/// eigenvector matrix of G.
pub fn warm_start(n_qubits: usize) -> Result<ParamVector> {
    let dim = check_qubits(n_qubits, MAX_QUBITS)?;
    let theta_p = vec![0.0; p_count(n_qubits)];
    let theta_d = (0..n_qubits)
        .map(|b| -((1usize << (n_qubits - 1 - b)) as f64) * PI / dim as f64)
        .collect();
    let theta_f = standard_qft_angles(n_qubits).into_iter().map(|a| -a).collect();
    let theta_lambda = lambda_least_squares(&canonical_cotangents(dim))
        .into_iter()
        // arccot onto (0, pi)
        .map(|x| 1f64.atan2(x))
        .collect();
    ParamVector::new(n_qubits, theta_p, theta_d, theta_f, theta_lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::kron_rz_phases;

    #[test]
    fn exact_fit_for_one_and_two_qubits() {
        for n in 1..=2 {
            let t = canonical_cotangents(1 << n);
            let phases = kron_rz_phases(&lambda_least_squares(&t));
            for (p, t) in phases.iter().zip(&t) {
                assert!((p - t).abs() < 1e-14);
            }
        }
        assert!((lambda_least_squares(&[1.0, -1.0])[0] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn fit_residual_is_orthogonal_to_every_pattern() {
        let t = canonical_cotangents(16);
        let x = lambda_least_squares(&t);
        let phases = kron_rz_phases(&x);
        for b in 0..4 {
            let dot: f64 = (0..16)
                .map(|k| {
                    let s = if (k >> (3 - b)) & 1 == 1 { 1.0 } else { -1.0 };
                    s * (t[k] - phases[k])
                })
                .sum();
            assert!(dot.abs() < 1e-12);
        }
    }

    #[test]
    fn arccot_branch() {
        for n in 1..=7 {
            let p = warm_start(n).unwrap();
            assert!(p.theta_lambda().iter().all(|&t| t > 0.0 && t < PI));
        }
    }
}
