//! Permutations of generating vectors and the invariance of the cell-matrix
//! spectrum under them.
//!
//! A permutation acts on a vector by `pi(x) = (x_pi(1), ..., x_pi(n))`.
//! Indices are 1-based on every external surface and 0-based in memory.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cellmat::{construct_cell_matrix, PositiveVector};
use crate::eigen::{eig_symmetric, DEFAULT_JACOBI_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PermutationJson", into = "PermutationJson")]
pub struct Permutation {
    /// `mapping[i]` is the image of `i`.
    mapping: Vec<usize>,
}

/// Wire form: `{"mapping": [int, ...]}` (1-based) or `{"cycles": "(1 4)(2 5)"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PermutationJson {
    Mapping { mapping: Vec<usize> },
    Cycles { cycles: String, n: Option<usize> },
}

impl TryFrom<PermutationJson> for Permutation {
    type Error = Error;

    fn try_from(v: PermutationJson) -> Result<Self> {
        match v {
            PermutationJson::Mapping { mapping } => Permutation::from_one_based(&mapping),
            PermutationJson::Cycles { cycles, n } => {
                let n = match n {
                    Some(n) => n,
                    None => largest_index(&cycles)?,
                };
                Permutation::from_cycles(&cycles, n)
            }
        }
    }
}

impl From<Permutation> for PermutationJson {
    fn from(p: Permutation) -> Self {
        PermutationJson::Mapping {
            mapping: p.one_based(),
        }
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    /// The transposition exchanging 0-based positions `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        for index in [a, b] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
        }
        if a == b {
            return Err(Error::InvalidPermutation(format!("transposition ({} {}) is not proper", a + 1, b + 1)));
        }
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(a, b);
        Ok(Permutation { mapping })
    }

    pub fn from_zero_based(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not a bijection on 1..{}",
                    mapping.iter().map(|v| v + 1).collect::<Vec<_>>(),
                    n
                )));
            }
            seen[m] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn from_one_based(mapping: &[usize]) -> Result<Self> {
        let zero = mapping
            .iter()
            .map(|&m| {
                m.checked_sub(1)
                    .ok_or_else(|| Error::InvalidPermutation("indices are 1-based".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_zero_based(zero)
    }

    /// Parses cycle notation such as `"(1 4)(2 5)(3 7 6)"` on `{1..n}`.
    /// Fixed points may be omitted; `"()"` and `""` give the identity.
    pub fn from_cycles(s: &str, n: usize) -> Result<Self> {
        let mut mapping: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in parse_cycles(s)? {
            for &c in &cycle {
                if c == 0 || c > n {
                    return Err(Error::InvalidPermutation(format!("element {c} outside 1..{n}")));
                }
                if used[c - 1] {
                    return Err(Error::InvalidPermutation(format!("element {c} appears twice")));
                }
                used[c - 1] = true;
            }
            for w in 0..cycle.len() {
                let from = cycle[w] - 1;
                let to = cycle[(w + 1) % cycle.len()] - 1;
                mapping[from] = to;
            }
        }
        Ok(Permutation { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.mapping.iter().map(|m| m + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }

    /// Function composition `(self o other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Permutation {
            mapping: other.mapping.iter().map(|&i| self.mapping[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Permutation { mapping: inv }
    }

    /// Disjoint cycles of length at least two, each starting at its smallest
    /// element, ordered by that element. 0-based.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.mapping[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.mapping[next];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Transpositions `t_1, ..., t_m` (0-based pairs) with
    /// `self = t_m o ... o t_1`. Each cycle `(c1 c2 ... cm)` contributes
    /// `(c1 c2), (c1 c3), ..., (c1 cm)` in that order.
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        self.cycles()
            .iter()
            .flat_map(|c| c[1..].iter().map(move |&d| (c[0], d)))
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let items: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "({})", items.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Cycle notation on `{1..n}` with `n` the largest element mentioned.
    fn from_str(s: &str) -> Result<Self> {
        Permutation::from_cycles(s, largest_index(s)?)
    }
}

fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::InvalidPermutation(format!("expected '(' in {s:?}")))?;
        let close = body
            .find(')')
            .ok_or_else(|| Error::InvalidPermutation(format!("unclosed cycle in {s:?}")))?;
        let cycle = body[..close]
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidPermutation(format!("bad cycle element {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if cycle.len() > 1 {
            cycles.push(cycle);
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn largest_index(s: &str) -> Result<usize> {
    Ok(parse_cycles(s)?.iter().flatten().copied().max().unwrap_or(0))
}

/// `(x_pi(1), ..., x_pi(n))`.
pub fn permute_vector(x: &PositiveVector, pi: &Permutation) -> Result<PositiveVector> {
    if x.len() != pi.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: pi.len(),
        });
    }
    let v = x.entries();
    PositiveVector::new(pi.mapping.iter().map(|&i| v[i]).collect())
}

/// Permutation matrix `P` of a transposition; `P = P^T = P^-1`.
pub fn transposition_matrix(n: usize, a: usize, b: usize) -> Matrix {
    let mut p = Matrix::identity(n);
    p.swap_rows(a, b);
    p
}

/// Checks `P D(pi1(x)) P = D(x)` entrywise and exactly, where `pi1` is the
/// transposition of the 1-based positions `l` and `k`.
pub fn transposition_similarity_check(x: &PositiveVector, l: usize, k: usize) -> Result<bool> {
    let n = x.len();
    let (a, b) = match (l.checked_sub(1), k.checked_sub(1)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidPermutation("indices are 1-based".into())),
    };
    let pi1 = Permutation::transposition(n, a, b)?;
    let p = transposition_matrix(n, a, b);
    let swapped = construct_cell_matrix(&permute_vector(x, &pi1)?).into_matrix();
    let conjugated = p.mul(&swapped)?.mul(&p)?;
    Ok(conjugated == *construct_cell_matrix(x).matrix())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranspositionStep {
    /// 1-based positions exchanged.
    pub l: usize,
    pub k: usize,
    pub similar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub holds: bool,
    pub steps: Vec<TranspositionStep>,
    /// Every step satisfied `P D(pi_i(x_{i-1})) P = D(x_{i-1})`.
    pub all_steps_similar: bool,
    /// Applying the steps reproduced `pi(x)`.
    pub chain_reaches_target: bool,
    /// The Jacobi spectra of `D(x)` and `D(pi(x))` agree.
    pub spectra_match: bool,
    pub permuted: Vec<f64>,
    pub spectrum: Vec<f64>,
    pub permuted_spectrum: Vec<f64>,
}

/// Walks `x` to `pi(x)` one transposition at a time, checking each step with
/// [`transposition_similarity_check`], and separately compares the Jacobi
/// spectra of `D(x)` and `D(pi(x))` within `tol`.
pub fn spectrum_invariance_check(x: &PositiveVector, pi: &Permutation, tol: f64) -> Result<InvarianceReport> {
    let target = permute_vector(x, pi)?;
    let n = x.len();

    // pi = t_m o ... o t_1 acts on vectors contravariantly, so the chain
    // applies t_m first.
    let mut current = x.clone();
    let mut steps = Vec::new();
    for &(a, b) in pi.transpositions().iter().rev() {
        let similar = transposition_similarity_check(&current, a + 1, b + 1)?;
        steps.push(TranspositionStep {
            l: a + 1,
            k: b + 1,
            similar,
        });
        current = permute_vector(&current, &Permutation::transposition(n, a, b)?)?;
    }
    let all_steps_similar = steps.iter().all(|s| s.similar);
    let chain_reaches_target = current == target;

    let s0 = eig_symmetric(construct_cell_matrix(x).matrix(), DEFAULT_JACOBI_TOL)?;
    let s1 = eig_symmetric(construct_cell_matrix(&target).matrix(), DEFAULT_JACOBI_TOL)?;
    let spectra_match = s0.matches_within(&s1, tol);

    Ok(InvarianceReport {
        holds: all_steps_similar && chain_reaches_target && spectra_match,
        steps,
        all_steps_similar,
        chain_reaches_target,
        spectra_match,
        permuted: target.into_inner(),
        spectrum: s0.values().to_vec(),
        permuted_spectrum: s1.values().to_vec(),
    })
}
