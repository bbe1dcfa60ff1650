use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::spectral::{check_qubits, MAX_QUBITS};

/// Smallest allowed `|sin(theta_lambda)|`.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Lower edge of the random draw for `theta_lambda`; the upper edge is `pi - LAMBDA_MARGIN`.
pub const LAMBDA_MARGIN: f64 = 0.15;

/// Gates in the P block: RY layer, CRY on (0,1),(2,3).., RY layer, CRY on (1,2),(3,4)..
pub fn p_count(n_qubits: usize) -> usize {
    2 * n_qubits + n_qubits / 2 + n_qubits.saturating_sub(1) / 2
}

pub fn qft_count(n_qubits: usize) -> usize {
    n_qubits * n_qubits.saturating_sub(1) / 2
}

pub fn total_count(n_qubits: usize) -> usize {
    p_count(n_qubits) + n_qubits + qft_count(n_qubits) + n_qubits
}

/// Full parameter set of the circuit, split by block.
///
/// `theta_lambda` holds raw values; the Λ block feeds `cot(value)` to its RZ gates.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    n_qubits: usize,
    pub(crate) theta_p: Vec<f64>,
    pub(crate) theta_d: Vec<f64>,
    pub(crate) theta_f: Vec<f64>,
    pub(crate) theta_lambda: Vec<f64>,
}

fn check_len(block: &'static str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Layout {
            block,
            expected,
            got,
        });
    }
    Ok(())
}

pub(crate) fn check_guard(theta_lambda: &[f64]) -> Result<()> {
    for (index, &value) in theta_lambda.iter().enumerate() {
        if !value.is_finite() || value.sin().abs() < SINGULARITY_GUARD {
            return Err(Error::Singularity { index, value });
        }
    }
    Ok(())
}

/// Moves `t` just outside the guard band around the nearest multiple of pi, keeping its side.
pub fn clamp_to_guard(t: f64) -> f64 {
    if t.sin().abs() >= SINGULARITY_GUARD {
        return t;
    }
    let k = (t / PI).round();
    let edge = SINGULARITY_GUARD * (1.0 + 1e-6);
    if t - k * PI < 0.0 {
        k * PI - edge
    } else {
        k * PI + edge
    }
}

impl ParamVector {
    pub fn new(
        n_qubits: usize,
        theta_p: Vec<f64>,
        theta_d: Vec<f64>,
        theta_f: Vec<f64>,
        theta_lambda: Vec<f64>,
    ) -> Result<Self> {
        check_qubits(n_qubits, MAX_QUBITS)?;
        check_len("theta_p", theta_p.len(), p_count(n_qubits))?;
        check_len("theta_d", theta_d.len(), n_qubits)?;
        check_len("theta_f", theta_f.len(), qft_count(n_qubits))?;
        check_len("theta_lambda", theta_lambda.len(), n_qubits)?;
        check_guard(&theta_lambda)?;
        Ok(Self {
            n_qubits,
            theta_p,
            theta_d,
            theta_f,
            theta_lambda,
        })
    }

    /// Splits a flat vector laid out as P, D, F, Λ. Rejects guard violations.
    pub fn from_flat(n_qubits: usize, flat: &[f64]) -> Result<Self> {
        check_qubits(n_qubits, MAX_QUBITS)?;
        check_len("flat", flat.len(), total_count(n_qubits))?;
        let (p, rest) = flat.split_at(p_count(n_qubits));
        let (d, rest) = rest.split_at(n_qubits);
        let (f, l) = rest.split_at(qft_count(n_qubits));
        Self::new(n_qubits, p.to_vec(), d.to_vec(), f.to_vec(), l.to_vec())
    }

    /// Like [`from_flat`](Self::from_flat) but clamps `theta_lambda` into the guarded
    /// region instead of failing. This is the path the optimizer takes.
    pub fn from_flat_clamped(n_qubits: usize, flat: &[f64]) -> Result<Self> {
        check_qubits(n_qubits, MAX_QUBITS)?;
        check_len("flat", flat.len(), total_count(n_qubits))?;
        let mut flat = flat.to_vec();
        let start = total_count(n_qubits) - n_qubits;
        for t in &mut flat[start..] {
            *t = clamp_to_guard(*t);
        }
        Self::from_flat(n_qubits, &flat)
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.theta_p);
        out.extend_from_slice(&self.theta_d);
        out.extend_from_slice(&self.theta_f);
        out.extend_from_slice(&self.theta_lambda);
        out
    }

    /// Zeros for P, D and F and `pi/2` (cot = 0) for Λ: the circuit is the identity.
    pub fn block_identity(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits, MAX_QUBITS)?;
        Self::new(
            n_qubits,
            vec![0.0; p_count(n_qubits)],
            vec![0.0; n_qubits],
            vec![0.0; qft_count(n_qubits)],
            vec![PI / 2.0; n_qubits],
        )
    }

    /// P, D and F uniform in [-pi, pi); Λ uniform in [0.15, pi - 0.15). Drawn in that order.
    pub fn random(n_qubits: usize, rng: &mut Rng) -> Result<Self> {
        check_qubits(n_qubits, MAX_QUBITS)?;
        let mut angles =
            |k: usize, lo: f64, hi: f64| (0..k).map(|_| rng.uniform(lo, hi)).collect::<Vec<_>>();
        let p = angles(p_count(n_qubits), -PI, PI);
        let d = angles(n_qubits, -PI, PI);
        let f = angles(qft_count(n_qubits), -PI, PI);
        let l = angles(n_qubits, LAMBDA_MARGIN, PI - LAMBDA_MARGIN);
        Self::new(n_qubits, p, d, f, l)
    }

    /// First random draw from a stream seeded with `seed`.
    pub fn random_init(n_qubits: usize, seed: u64) -> Result<Self> {
        Self::random(n_qubits, &mut Rng::new(seed))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        total_count(self.n_qubits)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn theta_p(&self) -> &[f64] {
        &self.theta_p
    }

    pub fn theta_d(&self) -> &[f64] {
        &self.theta_d
    }

    pub fn theta_f(&self) -> &[f64] {
        &self.theta_f
    }

    pub fn theta_lambda(&self) -> &[f64] {
        &self.theta_lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(p_count(6), 17);
        assert_eq!(p_count(3), 8);
        assert_eq!(p_count(1), 2);
        assert_eq!(total_count(3), 17);
        assert_eq!(total_count(2), 10);
        assert_eq!(total_count(1), 4);
    }

    #[test]
    fn flat_round_trip() {
        let p = ParamVector::random_init(3, 11).unwrap();
        let q = ParamVector::from_flat(3, &p.flatten()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn layout_errors() {
        let err = ParamVector::new(2, vec![0.0; 4], vec![0.0; 2], vec![0.0], vec![1.0; 2]);
        assert!(matches!(
            err,
            Err(Error::Layout {
                block: "theta_p",
                expected: 5,
                got: 4
            })
        ));
        assert!(ParamVector::from_flat(2, &[0.5; 9]).is_err());
    }

    #[test]
    fn guard_rejects_and_clamps() {
        let mut flat = ParamVector::block_identity(2).unwrap().flatten();
        let last = flat.len() - 1;
        flat[last] = PI;
        assert!(matches!(
            ParamVector::from_flat(2, &flat),
            Err(Error::Singularity { index: 1, .. })
        ));
        let p = ParamVector::from_flat_clamped(2, &flat).unwrap();
        assert!(p.theta_lambda()[1].sin().abs() >= SINGULARITY_GUARD);
        for t in [0.0, -0.0, 1e-9, -1e-9, PI - 1e-9, 2.0 * PI, -3.0 * PI + 1e-8] {
            let c = clamp_to_guard(t);
            assert!(c.sin().abs() >= SINGULARITY_GUARD, "{t} -> {c}");
            assert!((c - t).abs() < 2e-6);
        }
    }

    #[test]
    fn random_ranges() {
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let p = ParamVector::random(4, &mut rng).unwrap();
            assert!(p.theta_p().iter().all(|t| (-PI..PI).contains(t)));
            assert!(p
                .theta_lambda()
                .iter()
                .all(|t| (LAMBDA_MARGIN..PI - LAMBDA_MARGIN).contains(t)));
        }
    }
}
