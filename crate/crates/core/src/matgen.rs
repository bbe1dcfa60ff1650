//! Random antisymmetric test matrices, sign patterns, and signed-permutation
//! canonicalization onto the uniform matrix G.

use std::fmt;
use std::str::FromStr;

use crate::dense::AntisymMatrix;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::spectral::{check_qubits, MAX_QUBITS};

/// Largest dimension accepted by [`find_canonical_perm`].
pub const MAX_SEARCH_DIM: usize = 8;

pub const DEFAULT_SPARSITY: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFamily {
    /// Off-diagonal entries from {-1, +1}, equally likely.
    Pm1Dense,
    /// Zero with probability `sparsity`, otherwise -1 or +1 equally likely.
    Pm1Sparse { sparsity: f64 },
    /// Uniform in [-1, 1).
    UniformReal,
}

impl MatrixFamily {
    pub fn pm1_sparse(sparsity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sparsity) {
            return Err(Error::Config(format!("sparsity {sparsity} outside [0, 1]")));
        }
        Ok(Self::Pm1Sparse { sparsity })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Pm1Dense => "PM1_DENSE",
            Self::Pm1Sparse { .. } => "PM1_SPARSE",
            Self::UniformReal => "UNIFORM_REAL",
        }
    }

    /// Maps one uniform draw in [0, 1) to an entry.
    fn entry(&self, u: f64) -> f64 {
        match *self {
            Self::UniformReal => 2.0 * u - 1.0,
            Self::Pm1Dense => {
                if u < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            Self::Pm1Sparse { sparsity } => {
                if u < sparsity {
                    0.0
                } else if (u - sparsity) / (1.0 - sparsity) < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
        }
    }
}

impl fmt::Display for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MatrixFamily {
    type Err = Error;

    /// Accepts the tags case-insensitively, with `-` or `_`. Sparse uses the default sparsity.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "PM1_DENSE" => Ok(Self::Pm1Dense),
            "PM1_SPARSE" => Ok(Self::Pm1Sparse {
                sparsity: DEFAULT_SPARSITY,
            }),
            "UNIFORM_REAL" => Ok(Self::UniformReal),
            _ => Err(Error::Config(format!("unknown matrix family '{s}'"))),
        }
    }
}

/// Draws the upper triangle row by row, one [`Rng::next_f64`] per entry.
pub fn random_antisym(n_qubits: usize, family: MatrixFamily, seed: u64) -> Result<AntisymMatrix> {
    let dim = check_qubits(n_qubits, MAX_QUBITS)?;
    let mut rng = Rng::new(seed);
    Ok(AntisymMatrix::from_upper(dim, |_, _| family.entry(rng.next_f64())))
}

pub fn sign_matrix(a: &AntisymMatrix) -> AntisymMatrix {
    AntisymMatrix::from_upper(a.dim(), |i, j| {
        let v = a.get(i, j);
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    })
}

/// `P` with column `j` equal to `signs[j]` times the unit vector `e_{perm[j]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let dim = perm.len();
        if signs.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: signs.len(),
            });
        }
        let mut seen = vec![false; dim];
        for &p in &perm {
            if p >= dim || seen[p] {
                return Err(Error::Config(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Config("signs must be +1 or -1".into()));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            perm: (0..dim).collect(),
            signs: vec![1; dim],
        }
    }

    /// Reads a dense matrix with exactly one ±1 per row and column.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut perm = vec![usize::MAX; dim];
        let mut signs = vec![0i8; dim];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                if v.abs() != 1.0 || perm[j] != usize::MAX {
                    return Err(Error::NotSignPattern {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                perm[j] = i;
                signs[j] = v as i8;
            }
        }
        if perm.contains(&usize::MAX) {
            return Err(Error::Config("column without a nonzero entry".into()));
        }
        Self::new(perm, signs)
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![vec![0.0; n]; n];
        for (j, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            out[p][j] = s as f64;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for (j, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            perm[p] = j;
            signs[p] = s;
        }
        Self { perm, signs }
    }
}

/// `P^T B P`, whose `(i, j)` entry is `s_i s_j B[perm_i][perm_j]`.
pub fn apply_signed_perm(b: &AntisymMatrix, p: &SignedPermutation) -> Result<AntisymMatrix> {
    if b.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            left: b.dim(),
            right: p.dim(),
        });
    }
    Ok(AntisymMatrix::from_upper(b.dim(), |i, j| {
        (p.signs[i] * p.signs[j]) as f64 * b.get(p.perm[i], p.perm[j])
    }))
}

fn check_sign_pattern(b: &AntisymMatrix) -> Result<()> {
    for i in 0..b.dim() {
        for j in i + 1..b.dim() {
            let v = b.get(i, j);
            if !(v == 1.0 || v == -1.0 || v == 0.0) {
                return Err(Error::NotSignPattern {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

/// Whether the directed graph with an edge `i -> j` for each `b_ij = +1` is acyclic,
/// i.e. some relabeling puts every nonzero upper entry at +1.
pub fn is_transitive(b: &AntisymMatrix) -> Result<bool> {
    check_sign_pattern(b)?;
    let n = b.dim();
    let mut indegree: Vec<usize> = (0..n)
        .map(|j| (0..n).filter(|&i| b.get(i, j) == 1.0).count())
        .collect();
    let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut visited = 0;
    while let Some(v) = ready.pop() {
        visited += 1;
        for (w, deg) in indegree.iter_mut().enumerate() {
            if b.get(v, w) == 1.0 {
                *deg -= 1;
                if *deg == 0 {
                    ready.push(w);
                }
            }
        }
    }
    Ok(visited == n)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&x| x > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Exhaustive search for `P` with `P^T B P = G`.
///
/// Permutations are visited in lexicographic order. For each, the signs are
/// forced by the first row (`s_0 = +1`, `s_j = B[perm_0][perm_j]`), so the
/// result is the first permutation admitting a witness, with `s_0 = +1`.
/// `-P` is always an equivalent witness.
///
/// Returns `Ok(None)` when no signed permutation exists. Sign patterns with
/// zeros off the diagonal never match G and also give `None`.
pub fn find_canonical_perm(b: &AntisymMatrix) -> Result<Option<SignedPermutation>> {
    let n = b.dim();
    if n > MAX_SEARCH_DIM {
        return Err(Error::SearchTooLarge {
            dim: n,
            max: MAX_SEARCH_DIM,
        });
    }
    check_sign_pattern(b)?;
    if n == 0 {
        return Ok(Some(SignedPermutation::identity(0)));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut signs = vec![0.0; n];
    loop {
        signs[0] = 1.0;
        for j in 1..n {
            signs[j] = b.get(perm[0], perm[j]);
        }
        let ok = (1..n).all(|i| (i + 1..n).all(|j| signs[i] * signs[j] * b.get(perm[i], perm[j]) == 1.0));
        if ok && signs.iter().all(|s| *s != 0.0) {
            let signs = signs.iter().map(|&s| s as i8).collect();
            return Ok(Some(SignedPermutation { perm, signs }));
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}
