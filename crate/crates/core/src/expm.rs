//! Matrix exponential by scaling and squaring with a degree-13 diagonal Padé
//! approximant.

use crate::dense::{ComplexDense, C64, ZERO};
use crate::error::{Error, Result};

// Numerator coefficients of the [13/13] Padé approximant to exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Scaled 1-norm never exceeds this before the approximant is evaluated.
pub const SCALING_THRESHOLD: f64 = 0.5;

/// Returns `e^m`.
pub fn expm_pade(m: &ComplexDense) -> Result<ComplexDense> {
    let n = m.dim();
    let norm = m.one_norm();
    let squarings = if norm > SCALING_THRESHOLD {
        (norm / SCALING_THRESHOLD).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale(C64::new(2f64.powi(-squarings), 0.0));

    let id = ComplexDense::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let lin = |terms: &[(f64, &ComplexDense)]| {
        let mut out = ComplexDense::zeros(n);
        for &(c, mat) in terms {
            for (o, &x) in out.as_mut_slice().iter_mut().zip(mat.as_slice()) {
                *o += x * c;
            }
        }
        out
    };

    let u_inner = lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_tail = lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)]);
    let u = &a * &(&a6 * &u_inner).add(&u_tail)?;

    let v_inner = lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v_tail = lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)]);
    let v = (&a6 * &v_inner).add(&v_tail)?;

    let numer = v.add(&u)?;
    let denom = v.sub(&u)?;
    let mut r = lu_solve(&denom, &numer).ok_or(Error::NumericOverflow {
        context: "singular Padé denominator",
    })?;

    for _ in 0..squarings {
        r = &r * &r;
        if !r.is_finite() {
            return Err(Error::NumericOverflow {
                context: "squaring phase of expm",
            });
        }
    }
    if !r.is_finite() {
        return Err(Error::NumericOverflow { context: "expm" });
    }
    Ok(r)
}

/// Solves `a x = b` by LU with partial pivoting. `None` if `a` is numerically singular.
fn lu_solve(a: &ComplexDense, b: &ComplexDense) -> Option<ComplexDense> {
    let n = a.dim();
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[(i, col)].norm().total_cmp(&lu[(j, col)].norm()))
            .unwrap();
        if lu[(pivot, col)].norm() == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                let t = lu[(col, j)];
                lu[(col, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = t;
                let t = x[(col, j)];
                x[(col, j)] = x[(pivot, j)];
                x[(pivot, j)] = t;
            }
        }
        let inv = lu[(col, col)].inv();
        for i in col + 1..n {
            let f = lu[(i, col)] * inv;
            if f == ZERO {
                continue;
            }
            lu[(i, col)] = f;
            for j in col + 1..n {
                let t = lu[(col, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..n {
                let t = x[(col, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = lu[(col, col)].inv();
        for j in 0..n {
            x[(col, j)] *= inv;
        }
        for i in 0..col {
            let f = lu[(i, col)];
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let t = x[(col, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    Some(x)
}
