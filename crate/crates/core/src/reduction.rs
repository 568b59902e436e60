//! Elementary-similarity reduction of a grouped cell matrix.
//!
//! For `x` made of `k` groups (group `s` holds value `x_s` repeated `l_s >= 2`
//! times) the cell matrix `D(x)` is similar to a block upper-triangular matrix
//! whose leading `k x k` block is the core `D^(k)` and whose trailing diagonal
//! is `-2 x_s` repeated `l_s - 1` times for each group. The reduction here
//! performs the row-sum and swap similarities explicitly on the full matrix,
//! with absolute indices, and records every operation.

use serde::{Deserialize, Serialize};

use crate::cellmat::{
    construct_cell_matrix, group_vector_with_permutation, GroupedVector, PositiveVector, Spectrum,
    DEFAULT_GROUP_TOL,
};
use crate::eigen::{eig_small_general, DEFAULT_COMPLEX_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Entries forced to zero by the reduction must be at most this large.
pub const ZERO_PATTERN_TOL: f64 = 1e-12;

/// An elementary matrix `E`, applied as the similarity `E M E^-1`.
///
/// Indices are 0-based in memory and 1-based on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OpJson", into = "OpJson")]
pub enum ElementaryOp {
    /// `W_ij`: exchange rows `i`, `j` (and therefore columns `i`, `j`).
    Swap { i: usize, j: usize },
    /// `S_ij(lambda)`: `R_i <- R_i + lambda R_j`, then `C_j <- C_j - lambda C_i`.
    RowSum { i: usize, j: usize, lambda: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpJson {
    pub kind: String,
    pub i: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl TryFrom<OpJson> for ElementaryOp {
    type Error = Error;

    fn try_from(op: OpJson) -> Result<Self> {
        let (i, j) = match (op.i.checked_sub(1), op.j.checked_sub(1)) {
            (Some(i), Some(j)) if i != j => (i, j),
            _ => {
                return Err(Error::InvalidPermutation(format!(
                    "operation indices must be distinct and 1-based, got ({}, {})",
                    op.i, op.j
                )))
            }
        };
        match (op.kind.as_str(), op.lambda) {
            ("swap", _) => Ok(ElementaryOp::Swap { i, j }),
            ("row_sum", Some(lambda)) if lambda.is_finite() => Ok(ElementaryOp::RowSum { i, j, lambda }),
            (kind, _) => Err(Error::InvalidPermutation(format!("unknown or incomplete operation {kind:?}"))),
        }
    }
}

impl From<ElementaryOp> for OpJson {
    fn from(op: ElementaryOp) -> Self {
        match op {
            ElementaryOp::Swap { i, j } => OpJson {
                kind: "swap".into(),
                i: i + 1,
                j: j + 1,
                lambda: None,
            },
            ElementaryOp::RowSum { i, j, lambda } => OpJson {
                kind: "row_sum".into(),
                i: i + 1,
                j: j + 1,
                lambda: Some(lambda),
            },
        }
    }
}

impl ElementaryOp {
    fn indices(&self) -> (usize, usize) {
        match *self {
            ElementaryOp::Swap { i, j } | ElementaryOp::RowSum { i, j, .. } => (i, j),
        }
    }
}

/// Returns `E M E^-1` for the elementary matrix of `op`.
pub fn apply_similarity(m: &Matrix, op: ElementaryOp) -> Result<Matrix> {
    let mut out = m.clone();
    apply_in_place(&mut out, op)?;
    Ok(out)
}

fn apply_in_place(m: &mut Matrix, op: ElementaryOp) -> Result<()> {
    let n = m.order()?;
    let (i, j) = op.indices();
    for index in [i, j] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
    }
    if i == j {
        return Err(Error::InvalidPermutation(format!("operation on a single index {i}")));
    }
    match op {
        ElementaryOp::Swap { i, j } => {
            m.swap_rows(i, j);
            m.swap_cols(i, j);
        }
        ElementaryOp::RowSum { i, j, lambda } => {
            for c in 0..n {
                let delta = lambda * m[(j, c)];
                m[(i, c)] += delta;
            }
            for r in 0..n {
                let delta = lambda * m[(r, i)];
                m[(r, j)] -= delta;
            }
        }
    }
    Ok(())
}

/// Applies `ops` in order to `m`.
pub fn replay(m: &Matrix, ops: &[ElementaryOp]) -> Result<Matrix> {
    let mut out = m.clone();
    for &op in ops {
        apply_in_place(&mut out, op)?;
    }
    Ok(out)
}

/// The `k x k` core of a grouped cell matrix.
///
/// Row and column `i` (0-based) belong to group `k - 1 - i`, so the last
/// group comes first. With `g(i) = k - 1 - i`:
/// diagonal `(l_g(j) - 1) * 2 x_g(j)`, off-diagonal `l_g(j) * (x_g(j) + x_g(i))`.
pub fn build_dk(g: &GroupedVector) -> Matrix {
    let k = g.k();
    let x = g.values();
    let l = g.multiplicities();
    let group = |i: usize| k - 1 - i;
    Matrix::from_fn(k, k, |i, j| {
        let (gi, gj) = (group(i), group(j));
        if i == j {
            (l[gj] - 1) as f64 * (2.0 * x[gj])
        } else {
            l[gj] as f64 * (x[gj] + x[gi])
        }
    })
}

/// A trailing diagonal block `value * I_count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownBlock {
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    /// Leading `k x k` block of the reduced matrix.
    pub core: Vec<Vec<f64>>,
    /// Trailing diagonal blocks in matrix order (group 1 first).
    pub known_blocks: Vec<KnownBlock>,
    /// Every similarity applied to `D(x)`, in order. The leading swaps sort
    /// `x` into contiguous groups.
    pub ops: Vec<ElementaryOp>,
    /// 1-based source positions: the grouped vector is `(x_p1, x_p2, ...)`.
    pub permutation: Vec<usize>,
}

impl ReductionResult {
    pub fn core_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.core).expect("core is square and finite")
    }

    pub fn k(&self) -> usize {
        self.core.len()
    }

    /// Eigenvalues carried by the trailing blocks, with multiplicity.
    pub fn known_values(&self) -> Vec<f64> {
        self.known_blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.value, b.count))
            .collect()
    }
}

/// Reduces `D(x)` by elementary similarities to the block form described in
/// the module docs.
///
/// `x` is first brought into contiguous groups by swaps (recorded in the op
/// trace and as `permutation`). Then for `s = k, ..., 1`: the block of
/// representatives of groups `k, ..., s + 1` is swapped to the front of group
/// `s`'s range, and every other member row `r` of group `s` is eliminated
/// with `S_{r, rep}(-1)` against the group's representative row `rep`. The
/// final matrix is checked against the forced zero pattern.
pub fn reduce_grouped(x: &PositiveVector) -> Result<ReductionResult> {
    let (g, perm) = group_vector_with_permutation(x, DEFAULT_GROUP_TOL)?;
    let n = x.len();
    let k = g.k();
    let l = g.multiplicities();

    let mut ops = sorting_swaps(&perm);

    let mut starts = Vec::with_capacity(k + 1);
    let mut acc = 0;
    for &len in l {
        starts.push(acc);
        acc += len;
    }
    starts.push(n);

    for s in (0..k).rev() {
        let band = k - 1 - s;
        // Band of representatives sits at [starts[s + 1], starts[s + 1] + band).
        for t in 0..band {
            ops.push(ElementaryOp::Swap {
                i: starts[s] + t,
                j: starts[s + 1] + t,
            });
        }
        let rep = starts[s] + band;
        let last = starts[s + 1] + band - 1;
        for r in (rep + 1..=last).rev() {
            ops.push(ElementaryOp::RowSum {
                i: r,
                j: rep,
                lambda: -1.0,
            });
        }
    }

    let reduced = replay(construct_cell_matrix(x).matrix(), &ops)?;
    let known_blocks: Vec<KnownBlock> = g
        .values()
        .iter()
        .zip(l)
        .map(|(&v, &len)| KnownBlock {
            value: -2.0 * v,
            count: len - 1,
        })
        .collect();
    check_zero_pattern(&reduced, k, &known_blocks)?;

    Ok(ReductionResult {
        core: reduced.leading(k).to_rows(),
        known_blocks,
        ops,
        permutation: perm.iter().map(|p| p + 1).collect(),
    })
}

/// Swaps that turn `x` into `(x[perm[0]], x[perm[1]], ...)`; each swap on the
/// vector is mirrored by the same row/column swap on `D(x)`.
fn sorting_swaps(perm: &[usize]) -> Vec<ElementaryOp> {
    let n = perm.len();
    // holder[p] = original index currently at position p
    let mut holder: Vec<usize> = (0..n).collect();
    let mut position: Vec<usize> = (0..n).collect();
    let mut ops = Vec::new();
    for (i, &want) in perm.iter().enumerate() {
        let p = position[want];
        if p != i {
            ops.push(ElementaryOp::Swap { i, j: p });
            let displaced = holder[i];
            holder.swap(i, p);
            position[want] = i;
            position[displaced] = p;
        }
    }
    ops
}

/// Rows `k..n` of the reduced matrix must be `value * e_r` for the block each
/// row belongs to.
fn check_zero_pattern(m: &Matrix, k: usize, blocks: &[KnownBlock]) -> Result<()> {
    let n = m.nrows();
    let mut r = k;
    for b in blocks {
        for _ in 0..b.count {
            for c in 0..n {
                let expected = if c == r { b.value } else { 0.0 };
                if (m[(r, c)] - expected).abs() > ZERO_PATTERN_TOL * expected.abs().max(1.0) {
                    return Err(Error::VerificationFailed(format!(
                        "reduced entry ({}, {}) is {} instead of {}",
                        r + 1,
                        c + 1,
                        m[(r, c)],
                        expected
                    )));
                }
            }
            r += 1;
        }
    }
    Ok(())
}

/// Spectrum of `D(x)` assembled from the reduction: eigenvalues of the core
/// together with the known diagonal blocks.
pub fn spectrum_via_reduction(x: &PositiveVector, tol: f64) -> Result<Spectrum> {
    let red = reduce_grouped(x)?;
    let head = eig_small_general(&red.core_matrix(), DEFAULT_COMPLEX_TOL)?;
    let mut values = head.values().to_vec();
    values.extend(red.known_values());
    Ok(Spectrum::with_tolerance(values, tol))
}
