//! Cell matrices and the value types shared by the rest of the crate.
//!
//! A cell matrix `D(x)` is the hollow symmetric matrix with off-diagonal
//! entries `x_i + x_j` for a strictly positive generating vector `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Default absolute tolerance for deciding that two entries of a generating
/// vector belong to the same group.
pub const DEFAULT_GROUP_TOL: f64 = 1e-12;

/// Default relative radius for multiset comparison of spectra.
pub const DEFAULT_SPECTRUM_TOL: f64 = 1e-8;

/// Relative tolerance used when checking every entry of a candidate cell
/// matrix against the reconstructed generating vector.
pub const RECOGNIZE_TOL: f64 = 1e-9;

/// A generating vector with every entry finite and strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct PositiveVector(Vec<f64>);

/// Wire form: `{"x": [real, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorJson {
    pub x: Vec<f64>,
}

impl TryFrom<VectorJson> for PositiveVector {
    type Error = Error;

    fn try_from(value: VectorJson) -> Result<Self> {
        PositiveVector::new(value.x)
    }
}

impl From<PositiveVector> for VectorJson {
    fn from(v: PositiveVector) -> Self {
        VectorJson { x: v.0 }
    }
}

impl PositiveVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveEntry { index, value });
        }
        Ok(PositiveVector(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A matrix known to be of the form `D(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMatrix {
    generator: PositiveVector,
    matrix: Matrix,
}

impl CellMatrix {
    /// Validates `m` with [`recognize_cell`] and keeps the recovered generator.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        let generator = recognize_cell(&m)?;
        Ok(CellMatrix { generator, matrix: m })
    }

    pub fn order(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &PositiveVector {
        &self.generator
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

pub fn construct_cell_matrix(x: &PositiveVector) -> CellMatrix {
    let v = x.entries();
    let n = v.len();
    let matrix = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { v[i] + v[j] });
    CellMatrix {
        generator: x.clone(),
        matrix,
    }
}

/// Recovers the generating vector of a cell matrix.
///
/// For `n >= 3` the vector is unique: `x_1 = (m_12 + m_13 - m_23) / 2` and
/// `x_j = m_1j - x_1`, after which every entry is checked against `x_i + x_j`.
/// For `n = 2` only `x_1 + x_2` is known and the symmetric split is returned.
pub fn recognize_cell(m: &Matrix) -> Result<PositiveVector> {
    let n = m.order()?;
    if n == 0 {
        return Err(Error::EmptyVector);
    }
    if let Some((i, j)) = m.first_asymmetry(1e-12) {
        return Err(Error::NotSymmetric { i, j });
    }
    for i in 0..n {
        if m[(i, i)] != 0.0 {
            return Err(Error::NonzeroDiagonal {
                index: i,
                value: m[(i, i)],
            });
        }
    }
    let x = match n {
        1 => return Err(Error::Underdetermined),
        2 => vec![m[(0, 1)] / 2.0; 2],
        _ => {
            let x0 = (m[(0, 1)] + m[(0, 2)] - m[(1, 2)]) / 2.0;
            let mut x = Vec::with_capacity(n);
            x.push(x0);
            x.extend((1..n).map(|j| m[(0, j)] - x0));
            for i in 0..n {
                for j in i + 1..n {
                    let expected = x[i] + x[j];
                    let got = m[(i, j)];
                    if (expected - got).abs() > RECOGNIZE_TOL * got.abs().max(expected.abs()).max(1.0) {
                        return Err(Error::InconsistentEntries { i, j });
                    }
                }
            }
            x
        }
    };
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NonPositiveSolution { index, value });
    }
    PositiveVector::new(x)
}

/// Closed-form determinant of the leading `i x i` principal submatrix of `D(x)`
/// (1-based `i`), evaluated literally:
///
/// ```text
/// (-1)^(i-1) 2^(i-2) (4(i-1) + sum_{j<=i} sum_{l<j} (x_j - x_l)^2 / (x_j x_l)) prod_{k<=i} x_k
/// ```
pub fn principal_subdeterminant(x: &PositiveVector, i: usize) -> Result<f64> {
    let n = x.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let v = &x.entries()[..i];
    let mut spread = 0.0;
    for j in 0..i {
        for l in 0..j {
            let d = v[j] - v[l];
            spread += d * d / (v[j] * v[l]);
        }
    }
    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
    let product: f64 = v.iter().product();
    Ok(sign * 2f64.powi(i as i32 - 2) * (4.0 * (i - 1) as f64 + spread) * product)
}

/// Determinant by Gaussian elimination with partial (row) pivoting.
pub fn numeric_determinant(m: &Matrix) -> Result<f64> {
    let n = m.order()?;
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[(p, col)].abs().total_cmp(&a[(q, col)].abs()))
            .unwrap_or(col);
        if a[(pivot, col)] == 0.0 {
            return Ok(0.0);
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for r in col + 1..n {
            let factor = a[(r, col)] / p;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                let delta = factor * a[(col, c)];
                a[(r, c)] -= delta;
            }
        }
    }
    Ok(det)
}

/// Multiset of real eigenvalues, stored in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SpectrumJson", into = "SpectrumJson")]
pub struct Spectrum {
    values: Vec<f64>,
    tolerance: f64,
}

/// Wire form: `{"eigenvalues": [real, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub eigenvalues: Vec<f64>,
}

impl From<SpectrumJson> for Spectrum {
    fn from(s: SpectrumJson) -> Self {
        Spectrum::new(s.eigenvalues)
    }
}

impl From<Spectrum> for SpectrumJson {
    fn from(s: Spectrum) -> Self {
        SpectrumJson { eigenvalues: s.values }
    }
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Self {
        Self::with_tolerance(values, DEFAULT_SPECTRUM_TOL)
    }

    pub fn with_tolerance(mut values: Vec<f64>, tolerance: f64) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum { values, tolerance }
    }

    /// Eigenvalues, largest first.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Multiset equality under the larger of the two matching radii.
    pub fn matches(&self, other: &Spectrum) -> bool {
        multiset_eq(&self.values, &other.values, self.tolerance.max(other.tolerance))
    }

    pub fn matches_within(&self, other: &Spectrum, tol: f64) -> bool {
        multiset_eq(&self.values, &other.values, tol)
    }

    /// Union of two multisets.
    pub fn union(&self, other: &Spectrum) -> Spectrum {
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Spectrum::with_tolerance(values, self.tolerance.max(other.tolerance))
    }
}

/// Sorts both lists and requires `|a_i - b_i| <= tol * max(1, max |value|)`
/// elementwise.
pub fn multiset_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let scale = a
        .iter()
        .chain(b.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

/// A generating vector made of `k` distinct values, value `i` repeated
/// `multiplicities[i] >= 2` times.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedVector {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl GroupedVector {
    pub fn new(values: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrouping("no groups".into()));
        }
        if values.len() != multiplicities.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: multiplicities.len(),
            });
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveEntry { index, value });
        }
        for (i, a) in values.iter().enumerate() {
            if values[..i].contains(a) {
                return Err(Error::InvalidGrouping(format!("value {a} appears in two groups")));
            }
        }
        if let Some(i) = multiplicities.iter().position(|&l| l < 2) {
            return Err(Error::SingletonGroup { value: values[i] });
        }
        Ok(GroupedVector {
            values,
            multiplicities,
        })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Canonical vector: group 1 repeated `l_1` times, then group 2, and so on.
    pub fn expand(&self) -> PositiveVector {
        let x = self
            .values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &l)| std::iter::repeat_n(v, l))
            .collect();
        PositiveVector(x)
    }
}

/// Groups equal entries of `x`. See [`group_vector_with_permutation`].
pub fn group_vector(x: &PositiveVector, tol: f64) -> Result<GroupedVector> {
    group_vector_with_permutation(x, tol).map(|(g, _)| g)
}

/// Partitions `x` into maximal runs of values equal within `tol` (absolute).
///
/// Groups are ordered by the first position at which they occur in `x`, and
/// each group takes the value of that first occurrence. The returned
/// permutation `p` (0-based) lists the source positions of the canonical
/// vector: `g.expand()[i] == x[p[i]]` up to `tol`.
pub fn group_vector_with_permutation(
    x: &PositiveVector,
    tol: f64,
) -> Result<(GroupedVector, Vec<usize>)> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let v = x.entries();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut anchor = f64::NAN;
    for &idx in &order {
        match clusters.last_mut() {
            Some(c) if v[idx] - anchor <= tol => c.push(idx),
            _ => {
                anchor = v[idx];
                clusters.push(vec![idx]);
            }
        }
    }
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort_by_key(|c| c[0]);

    if let Some(c) = clusters.iter().find(|c| c.len() < 2) {
        return Err(Error::SingletonGroup { value: v[c[0]] });
    }
    let values = clusters.iter().map(|c| v[c[0]]).collect();
    let multiplicities = clusters.iter().map(Vec::len).collect();
    let permutation = clusters.concat();
    Ok((GroupedVector::new(values, multiplicities)?, permutation))
}
