//! Gate lists for the P block and the parameterized QFT, and in-place
//! application of gates to a dense matrix.
//!
//! Qubit 0 is the most significant bit of a row index.

use std::f64::consts::PI;

use crate::dense::{ComplexDense, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Hadamard,
    Ry,
    Cry,
    Rz,
    Cphase,
    /// Fixed swap used by the bit-reversal network. `control` holds the partner qubit.
    BitrevSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    /// Index into the owning block's parameter slice.
    pub param_slot: Option<usize>,
}

impl GateOp {
    fn single(kind: GateKind, target: usize, slot: Option<usize>) -> Self {
        Self {
            kind,
            target,
            control: None,
            param_slot: slot,
        }
    }

    fn controlled(kind: GateKind, control: usize, target: usize, slot: Option<usize>) -> Self {
        Self {
            kind,
            target,
            control: Some(control),
            param_slot: slot,
        }
    }
}

/// RY layer, CRY on (0,1),(2,3).., RY layer, CRY on (1,2),(3,4)..; control is the lower index.
pub fn p_block_ops(n_qubits: usize) -> Vec<GateOp> {
    let mut ops = Vec::new();
    let mut slot = 0;
    let mut next = || {
        slot += 1;
        Some(slot - 1)
    };
    for q in 0..n_qubits {
        ops.push(GateOp::single(GateKind::Ry, q, next()));
    }
    for q in (0..n_qubits.saturating_sub(1)).step_by(2) {
        ops.push(GateOp::controlled(GateKind::Cry, q, q + 1, next()));
    }
    for q in 0..n_qubits {
        ops.push(GateOp::single(GateKind::Ry, q, next()));
    }
    for q in (1..n_qubits.saturating_sub(1)).step_by(2) {
        ops.push(GateOp::controlled(GateKind::Cry, q, q + 1, next()));
    }
    ops
}

/// Textbook QFT: H on qubit q, then CPHASE from every later qubit, then bit reversal.
pub fn qft_ops(n_qubits: usize) -> Vec<GateOp> {
    let mut ops = Vec::new();
    let mut slot = 0;
    for q in 0..n_qubits {
        ops.push(GateOp::single(GateKind::Hadamard, q, None));
        for r in q + 1..n_qubits {
            ops.push(GateOp::controlled(GateKind::Cphase, r, q, Some(slot)));
            slot += 1;
        }
    }
    for q in 0..n_qubits / 2 {
        ops.push(GateOp::controlled(
            GateKind::BitrevSwap,
            n_qubits - 1 - q,
            q,
            None,
        ));
    }
    ops
}

/// `pi / 2^(r - q)` for every CPHASE in [`qft_ops`] order; these reproduce the DFT matrix.
pub fn standard_qft_angles(n_qubits: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for q in 0..n_qubits {
        for r in q + 1..n_qubits {
            out.push(PI / (1u64 << (r - q)) as f64);
        }
    }
    out
}

#[inline]
fn bit(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Left-multiplies `m` by a 2x2 gate on `target`, optionally conditioned on `control` being 1.
fn apply_2x2(m: &mut ComplexDense, n_qubits: usize, target: usize, control: Option<usize>, g: [[C64; 2]; 2]) {
    let dim = m.dim();
    let tb = bit(n_qubits, target);
    let cb = control.map(|c| bit(n_qubits, c));
    let data = m.as_mut_slice();
    for i0 in 0..dim {
        if i0 & tb != 0 || cb.is_some_and(|cb| i0 & cb == 0) {
            continue;
        }
        let i1 = i0 | tb;
        for j in 0..dim {
            let a = data[i0 * dim + j];
            let b = data[i1 * dim + j];
            data[i0 * dim + j] = g[0][0] * a + g[0][1] * b;
            data[i1 * dim + j] = g[1][0] * a + g[1][1] * b;
        }
    }
}

pub(crate) fn ry_matrix(phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (phi / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// Left-multiplies `m` by `op`. `params` is the parameter slice of the block owning `op`.
pub fn apply_gate(m: &mut ComplexDense, n_qubits: usize, op: &GateOp, params: &[f64]) {
    let angle = || params[op.param_slot.expect("parameterized gate without a slot")];
    match op.kind {
        GateKind::Hadamard => {
            let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_2x2(m, n_qubits, op.target, None, [[h, h], [h, -h]]);
        }
        GateKind::Ry => apply_2x2(m, n_qubits, op.target, None, ry_matrix(angle())),
        GateKind::Cry => apply_2x2(m, n_qubits, op.target, op.control, ry_matrix(angle())),
        GateKind::Rz => {
            let phi = angle();
            let z = C64::new(0.0, 0.0);
            let g = [
                [C64::from_polar(1.0, -phi / 2.0), z],
                [z, C64::from_polar(1.0, phi / 2.0)],
            ];
            apply_2x2(m, n_qubits, op.target, op.control, g);
        }
        GateKind::Cphase => {
            let phase = C64::from_polar(1.0, angle());
            let mask = bit(n_qubits, op.target) | bit(n_qubits, op.control.expect("CPHASE needs a control"));
            let dim = m.dim();
            let data = m.as_mut_slice();
            for i in 0..dim {
                if i & mask == mask {
                    for z in &mut data[i * dim..(i + 1) * dim] {
                        *z *= phase;
                    }
                }
            }
        }
        GateKind::BitrevSwap => {
            let a = bit(n_qubits, op.target);
            let b = bit(n_qubits, op.control.expect("swap needs a partner"));
            let dim = m.dim();
            let data = m.as_mut_slice();
            for i in 0..dim {
                // visit each pair once, from the side with the target bit set
                if i & a != 0 && i & b == 0 {
                    let k = (i & !a) | b;
                    for j in 0..dim {
                        data.swap(i * dim + j, k * dim + j);
                    }
                }
            }
        }
    }
}

/// Product of `ops` in circuit order (first op applied first) acting on the identity.
pub fn ops_unitary(n_qubits: usize, ops: &[GateOp], params: &[f64]) -> ComplexDense {
    let mut m = ComplexDense::identity(1 << n_qubits);
    apply_ops(&mut m, n_qubits, ops, params);
    m
}

pub fn apply_ops(m: &mut ComplexDense, n_qubits: usize, ops: &[GateOp], params: &[f64]) {
    for op in ops {
        apply_gate(m, n_qubits, op, params);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::params::{p_count, qft_count};

    /// Embeds a 2x2 gate as a full matrix via explicit tensor products, for cross-checking.
    fn kron_embed(n: usize, target: usize, g: [[C64; 2]; 2]) -> ComplexDense {
        let dim = 1 << n;
        ComplexDense::from_fn(dim, |i, j| {
            let mut v = C64::new(1.0, 0.0);
            for q in 0..n {
                let bi = (i >> (n - 1 - q)) & 1;
                let bj = (j >> (n - 1 - q)) & 1;
                v *= if q == target {
                    g[bi][bj]
                } else if bi == bj {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
            }
            v
        })
    }

    #[test]
    fn op_lists_match_counts() {
        for n in 1..=7 {
            let p = p_block_ops(n);
            assert_eq!(p.len(), p_count(n));
            let slots: Vec<usize> = p.iter().map(|o| o.param_slot.unwrap()).collect();
            assert_eq!(slots, (0..p_count(n)).collect::<Vec<_>>());
            let f = qft_ops(n);
            let params = f.iter().filter(|o| o.param_slot.is_some()).count();
            assert_eq!(params, qft_count(n));
            assert_eq!(standard_qft_angles(n).len(), qft_count(n));
            for op in p.iter().chain(&f) {
                assert!(op.target < n);
                if let Some(c) = op.control {
                    assert!(c < n && c != op.target);
                }
                let needs = matches!(op.kind, GateKind::Ry | GateKind::Cry | GateKind::Rz | GateKind::Cphase);
                assert_eq!(needs, op.param_slot.is_some());
            }
        }
    }

    #[test]
    fn six_qubit_p_layout_is_6_3_6_2() {
        let ops = p_block_ops(6);
        let kinds: Vec<GateKind> = ops.iter().map(|o| o.kind).collect();
        assert_eq!(kinds.iter().filter(|k| **k == GateKind::Ry).count(), 12);
        assert_eq!(kinds[6..9], [GateKind::Cry; 3]);
        assert_eq!(kinds[15..17], [GateKind::Cry; 2]);
        assert_eq!(ops[15].control, Some(1));
        assert_eq!(ops[16].control, Some(3));
    }

    #[test]
    fn single_qubit_gate_matches_kron() {
        let n = 3;
        for target in 0..n {
            let g = ry_matrix(0.7);
            let op = GateOp::single(GateKind::Ry, target, Some(0));
            let m = ops_unitary(n, &[op], &[0.7]);
            assert_eq!(m, kron_embed(n, target, g));
        }
    }

    #[test]
    fn controlled_ry_acts_only_on_control_one() {
        let n = 2;
        let op = GateOp::controlled(GateKind::Cry, 0, 1, Some(0));
        let m = ops_unitary(n, &[op], &[1.1]);
        let g = ry_matrix(1.1);
        // rows/cols 0,1 (control 0) identity; 2,3 the RY block
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(m[(1, 1)], C64::new(1.0, 0.0));
        assert_eq!(m[(0, 2)], C64::new(0.0, 0.0));
        assert_eq!(m[(2, 2)], g[0][0]);
        assert_eq!(m[(2, 3)], g[0][1]);
        assert_eq!(m[(3, 2)], g[1][0]);
    }

    #[test]
    fn swap_reverses_bits() {
        let n = 3;
        let ops: Vec<GateOp> = qft_ops(n)
            .into_iter()
            .filter(|o| o.kind == GateKind::BitrevSwap)
            .collect();
        let m = ops_unitary(n, &ops, &[]);
        for j in 0..8usize {
            let rev = j.reverse_bits() >> (usize::BITS - 3);
            assert_eq!(m[(rev, j)], C64::new(1.0, 0.0));
        }
    }
}
