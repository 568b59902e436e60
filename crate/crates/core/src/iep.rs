//! Inverse eigenvalue solvers: given a target spectrum from one of the
//! characterized families, produce a positive generating vector `x` whose
//! cell matrix `D(x)` has that spectrum.

use serde::{Deserialize, Serialize};

use crate::cellmat::{
    construct_cell_matrix, multiset_eq, GroupedVector, PositiveVector, Spectrum, DEFAULT_SPECTRUM_TOL,
};
use crate::eigen::{eig_small_general, eig_symmetric, DEFAULT_COMPLEX_TOL, DEFAULT_JACOBI_TOL};
use crate::error::{Error, Result};
use crate::reduction::build_dk;

/// Values within this distance of zero (relative to the spectrum scale) are
/// treated as having no reliable sign.
pub const SIGN_DEAD_ZONE: f64 = 1e-10;
/// Tolerance for `lambda1 + lambda2 + lambda3 = 0` in the 3x3 problem.
pub const CUBIC_TRACE_TOL: f64 = 1e-12;
/// The 3x3 construction must reproduce its target within this radius.
pub const CUBIC_CHECK_TOL: f64 = 1e-9;
/// Closed-form and numeric two-group head values must agree this closely.
pub const TWO_GROUP_CHECK_TOL: f64 = 1e-9;

/// Target spectrum of the 3x3 problem, normalized so that
/// `lambda1 > 0 > lambda3 >= lambda2` and the values sum to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSpectrumTarget {
    lambda1: f64,
    lambda2: f64,
    lambda3: f64,
}

impl CubicSpectrumTarget {
    /// Accepts the three values in any order.
    pub fn new(values: [f64; 3]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("values must be finite".into()));
        }
        let mut v = values;
        v.sort_by(|a, b| b.total_cmp(a));
        let [lambda1, lambda3, lambda2] = v;
        let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if (lambda1 + lambda2 + lambda3).abs() > CUBIC_TRACE_TOL * scale {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalues of a hollow matrix sum to zero, got {}",
                lambda1 + lambda2 + lambda3
            )));
        }
        if lambda1 == 0.0 && lambda2 == 0.0 && lambda3 == 0.0 {
            return Err(Error::InvalidSpectrum(
                "the zero spectrum forces x = 0, which is not a positive vector".into(),
            ));
        }
        if lambda3 >= 0.0 {
            return Err(Error::SignCondition(
                "exactly one eigenvalue may be nonnegative".into(),
            ));
        }
        if lambda1 <= 0.0 {
            return Err(Error::SignCondition("largest eigenvalue must be positive".into()));
        }
        Ok(CubicSpectrumTarget {
            lambda1,
            lambda2,
            lambda3,
        })
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn lambda3(&self) -> f64 {
        self.lambda3
    }
}

/// `k` strictly negative, pairwise distinct tail values with multiplicities
/// `l_i >= 2`; the tail value `lambda_{k+i}` appears `l_i - 1` times in the
/// target spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupedSpecJson", into = "GroupedSpecJson")]
pub struct GroupedSpec {
    tails: Vec<f64>,
    multiplicities: Vec<usize>,
}

/// Wire form: `{"tails": [real, ...], "multiplicities": [int, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupedSpecJson {
    pub tails: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl TryFrom<GroupedSpecJson> for GroupedSpec {
    type Error = Error;

    fn try_from(v: GroupedSpecJson) -> Result<Self> {
        GroupedSpec::new(v.tails, v.multiplicities)
    }
}

impl From<GroupedSpec> for GroupedSpecJson {
    fn from(g: GroupedSpec) -> Self {
        GroupedSpecJson {
            tails: g.tails,
            multiplicities: g.multiplicities,
        }
    }
}

impl GroupedSpec {
    pub fn new(tails: Vec<f64>, multiplicities: Vec<usize>) -> Result<Self> {
        if let Some(t) = tails.iter().find(|t| !(t.is_finite() && **t < 0.0)) {
            return Err(Error::InvalidSpectrum(format!("tail value {t} is not negative")));
        }
        // Delegates distinctness, arity and multiplicity checks.
        GroupedVector::new(tails.iter().map(|t| -t / 2.0).collect(), multiplicities.clone())?;
        Ok(GroupedSpec {
            tails,
            multiplicities,
        })
    }

    pub fn tails(&self) -> &[f64] {
        &self.tails
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn k(&self) -> usize {
        self.tails.len()
    }

    pub fn n(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Group values `x_i = -lambda_{k+i} / 2`.
    pub fn grouped_vector(&self) -> GroupedVector {
        GroupedVector::new(
            self.tails.iter().map(|t| -t / 2.0).collect(),
            self.multiplicities.clone(),
        )
        .expect("validated at construction")
    }

    /// Tail eigenvalues expanded with multiplicities `l_i - 1`.
    pub fn tail_spectrum(&self) -> Vec<f64> {
        self.tails
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&t, &l)| std::iter::repeat_n(t, l - 1))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IEPSolution {
    pub x: PositiveVector,
    /// Eigenvalues not fixed by the tails, largest first.
    pub head: Vec<f64>,
    pub spectrum: Spectrum,
}

/// Flat JSON view of a solution: `{"x": [...], "head": [...], "spectrum": [...]}`.
#[derive(Serialize)]
pub struct IEPSolutionJson<'a> {
    x: &'a [f64],
    head: &'a [f64],
    spectrum: &'a [f64],
}

impl IEPSolution {
    pub fn to_json(&self) -> IEPSolutionJson<'_> {
        IEPSolutionJson {
            x: self.x.entries(),
            head: &self.head,
            spectrum: self.spectrum.values(),
        }
    }
}

/// The 3x3 problem: `x = (sqrt(|l1 l2| / 2) - |l3| / 2, |l3| / 2, |l3| / 2)`.
///
/// The result is checked against the Jacobi eigenvalues of `D(x)`.
pub fn solve_cubic_iep(t: &CubicSpectrumTarget) -> Result<IEPSolution> {
    let half3 = t.lambda3.abs() / 2.0;
    let a1 = ((t.lambda1 * t.lambda2).abs() / 2.0).sqrt() - half3;
    let x = PositiveVector::new(vec![a1, half3, half3])?;
    let target = vec![t.lambda1, t.lambda2, t.lambda3];
    let spectrum = Spectrum::with_tolerance(target.clone(), DEFAULT_SPECTRUM_TOL);
    let numeric = eig_symmetric(construct_cell_matrix(&x).matrix(), DEFAULT_JACOBI_TOL)?;
    if !multiset_eq(numeric.values(), &target, CUBIC_CHECK_TOL) {
        return Err(Error::VerificationFailed(format!(
            "D(x) has spectrum {:?}, expected {:?}",
            numeric.values(),
            target
        )));
    }
    Ok(IEPSolution {
        x,
        head: spectrum.values().to_vec(),
        spectrum,
    })
}

/// `x = (lambda/2, ..., lambda/2)` with spectrum `{(n-1) lambda, -lambda x (n-1)}`.
pub fn solve_uniform(n: usize, lambda: f64) -> Result<IEPSolution> {
    if n < 2 {
        return Err(Error::InvalidGrouping(format!("order must be at least 2, got {n}")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidSpectrum(format!("lambda must be positive, got {lambda}")));
    }
    let x = PositiveVector::new(vec![lambda / 2.0; n])?;
    let top = (n - 1) as f64 * (2.0 * (lambda / 2.0));
    let mut values = vec![top];
    values.extend(std::iter::repeat_n(-lambda, n - 1));
    Ok(IEPSolution {
        x,
        head: vec![top],
        spectrum: Spectrum::with_tolerance(values, DEFAULT_SPECTRUM_TOL),
    })
}

/// Closed-form head values `(lambda1, lambda2)` for two groups.
///
/// With `n = l1 + l2`, `c = (l1 - 1)(-l3/2) + (l2 - 1)(-l4/2)` and
/// `r = (l1(n-2)+1)(-l3/2)^2 + (n-1) l3 l4 / 2 + (n^2 - n(l1+2) + 2 l1 + 1)(-l4/2)^2`,
/// the pair is `c +/- sqrt(r)`.
pub fn two_group_head(lambda3: f64, lambda4: f64, l1: usize, l2: usize) -> Result<(f64, f64)> {
    let n = (l1 + l2) as f64;
    let l1f = l1 as f64;
    let l2f = l2 as f64;
    let h3 = -lambda3 / 2.0;
    let h4 = -lambda4 / 2.0;
    let center = (l1f - 1.0) * h3 + (l2f - 1.0) * h4;
    let radicand = (l1f * (n - 2.0) + 1.0) * h3 * h3
        + 0.5 * (n - 1.0) * lambda3 * lambda4
        + (n * n - n * (l1f + 2.0) + 2.0 * l1f + 1.0) * h4 * h4;
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand(radicand));
    }
    let root = radicand.sqrt();
    Ok((center + root, center - root))
}

/// Two-group problem: tails `lambda3` (multiplicity `l1 - 1`) and `lambda4`
/// (multiplicity `l2 - 1`). Head values come from the closed form and are
/// cross-checked against the eigenvalues of the 2x2 core.
pub fn solve_two_group(lambda3: f64, lambda4: f64, l1: usize, l2: usize) -> Result<IEPSolution> {
    for v in [lambda3, lambda4] {
        if !(v.is_finite() && v < 0.0) {
            return Err(Error::InvalidSpectrum(format!("tail value {v} is not negative")));
        }
    }
    if lambda3 == lambda4 {
        return Err(Error::InvalidGrouping(
            "equal tail values form a single group; use solve_uniform".into(),
        ));
    }
    let spec = GroupedSpec::new(vec![lambda3, lambda4], vec![l1, l2])?;
    let (lambda1, lambda2) = two_group_head(lambda3, lambda4, l1, l2)?;

    let core = build_dk(&spec.grouped_vector());
    let numeric = eig_small_general(&core, DEFAULT_COMPLEX_TOL)?;
    if !multiset_eq(numeric.values(), &[lambda1, lambda2], TWO_GROUP_CHECK_TOL) {
        return Err(Error::VerificationFailed(format!(
            "closed-form head ({lambda1}, {lambda2}) disagrees with core eigenvalues {:?}",
            numeric.values()
        )));
    }
    let x = spec.grouped_vector().expand();
    let mut values = vec![lambda1, lambda2];
    values.extend(spec.tail_spectrum());
    Ok(IEPSolution {
        x,
        head: vec![lambda1, lambda2],
        spectrum: Spectrum::with_tolerance(values, DEFAULT_SPECTRUM_TOL),
    })
}

/// General grouped construction. `x_i = -lambda_{k+i} / 2`; the head values
/// are the eigenvalues of the core `D^(k)`. Fails if the head is not real or
/// the sign pattern (one positive, all others negative) does not hold.
pub fn solve_grouped(g: &GroupedSpec) -> Result<IEPSolution> {
    let gv = g.grouped_vector();
    let core = build_dk(&gv);
    let head = eig_small_general(&core, DEFAULT_COMPLEX_TOL)?;

    let mut values = head.values().to_vec();
    values.extend(g.tail_spectrum());
    let spectrum = Spectrum::with_tolerance(values, DEFAULT_SPECTRUM_TOL);
    check_sign_pattern(spectrum.values())?;

    Ok(IEPSolution {
        x: gv.expand(),
        head: head.values().to_vec(),
        spectrum,
    })
}

/// Exactly one strictly positive value, all others strictly negative, and
/// nothing inside the dead zone around zero.
pub fn check_sign_pattern(values: &[f64]) -> Result<()> {
    let zone = SIGN_DEAD_ZONE * values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if let Some(v) = values.iter().find(|v| v.abs() <= zone) {
        return Err(Error::SignCondition(format!("eigenvalue {v} is too close to zero")));
    }
    let positives = values.iter().filter(|v| **v > 0.0).count();
    if positives != 1 {
        return Err(Error::SignCondition(format!(
            "expected exactly one positive eigenvalue, found {positives}"
        )));
    }
    Ok(())
}

/// `lambda1 > |lambda2| + ... + |lambda_k|` for a head sorted largest first.
pub fn head_dominance(head: &[f64]) -> bool {
    match head.split_first() {
        Some((first, rest)) => *first > rest.iter().map(|v| v.abs()).sum::<f64>(),
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub accepted: bool,
    /// Size of `S` equals `l_1 + ... + l_k`.
    pub size_matches: bool,
    /// One positive value, the rest negative.
    pub condition1: bool,
    /// Every tail value occurs in `S` with multiplicity at least `l_i - 1`.
    pub tails_present: bool,
    /// The values of `S` left after removing the tails are the eigenvalues of `D^(k)`.
    pub condition2: bool,
    pub expected_head: Vec<f64>,
    pub failures: Vec<String>,
}

/// Decides whether `s` is the spectrum that the grouped construction produces
/// for `g`, reporting which conditions fail.
pub fn verify_membership(s: &Spectrum, g: &GroupedSpec, tol: f64) -> MembershipReport {
    let mut failures = Vec::new();
    let values = s.values();

    let size_matches = values.len() == g.n();
    if !size_matches {
        failures.push(format!("spectrum has {} values, expected {}", values.len(), g.n()));
    }

    let condition1 = match check_sign_pattern(values) {
        Ok(()) => true,
        Err(e) => {
            failures.push(format!("condition 1: {e}"));
            false
        }
    };

    let scale = values
        .iter()
        .chain(g.tails())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let mut remaining = values.to_vec();
    let mut tails_present = true;
    for t in g.tail_spectrum() {
        let nearest = remaining
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - t).abs().total_cmp(&(*b - t).abs()));
        match nearest {
            Some((i, v)) if (v - t).abs() <= tol * scale => {
                remaining.swap_remove(i);
            }
            _ => {
                tails_present = false;
                failures.push(format!("tail value {t} missing or short in multiplicity"));
                break;
            }
        }
    }

    let (expected_head, condition2) = match solve_grouped(g) {
        Ok(sol) => {
            let ok = tails_present && multiset_eq(&remaining, &sol.head, tol);
            if !ok {
                failures.push(format!(
                    "condition 2: remaining values {:?} are not the core eigenvalues {:?}",
                    Spectrum::new(remaining.clone()).values(),
                    sol.head
                ));
            }
            (sol.head, ok)
        }
        Err(e) => {
            failures.push(format!("condition 2: core spectrum unavailable ({e})"));
            (Vec::new(), false)
        }
    };

    MembershipReport {
        accepted: size_matches && condition1 && tails_present && condition2,
        size_matches,
        condition1,
        tails_present,
        condition2,
        expected_head,
        failures,
    }
}
