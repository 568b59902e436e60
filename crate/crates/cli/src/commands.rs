use std::fmt::Write as _;

use cellmat::cellmat::DEFAULT_SPECTRUM_TOL;
use cellmat::eigen::DEFAULT_JACOBI_TOL;
use cellmat::iep::IEPSolutionJson;
use cellmat::{
    construct_cell_matrix, eig_symmetric, group_vector, numeric_determinant, principal_subdeterminant,
    recognize_cell, reduce_grouped, solve_cubic_iep, solve_grouped, solve_two_group, solve_uniform,
    spectrum_invariance_check, spectrum_via_reduction, verify_membership, CubicSpectrumTarget, Error,
    GroupedSpec, IEPSolution, Matrix, PositiveVector, Spectrum,
};
use serde::Serialize;

use crate::failure::Failure;
use crate::input;
use crate::{Command, GroupedArgs, SpectrumArgs};

/// Serialized result plus the text summary for standard error.
pub struct Output {
    pub json: String,
    pub summary: String,
}

impl Output {
    fn new<T: Serialize>(value: &T, summary: String) -> Result<Self, Failure> {
        let mut json = serde_json::to_string_pretty(value).map_err(|e| Failure::Output(e.to_string()))?;
        json.push('\n');
        Ok(Output { json, summary })
    }
}

pub fn dispatch(command: &Command, tol: Option<f64>) -> Result<Output, Failure> {
    let tol = tol.unwrap_or(DEFAULT_SPECTRUM_TOL);
    match command {
        Command::Construct { vector } => construct(&input::vector(vector)?),
        Command::Spectrum(args) => spectrum(args, tol),
        Command::Reduce { vector } => reduce(&input::vector(vector)?),
        Command::Solve3 { spectrum } => {
            let values = input::spectrum(spectrum)?;
            let values: [f64; 3] = values.as_slice().try_into().map_err(|_| Error::DimensionMismatch {
                expected: 3,
                found: values.len(),
            })?;
            let target = CubicSpectrumTarget::new(values)?;
            solved(&solve_cubic_iep(&target)?, tol)
        }
        Command::SolveUniform { n, lambda } => {
            input::check_order(*n)?;
            solved(&solve_uniform(*n, *lambda)?, tol)
        }
        Command::SolveTwoGroup(args) => {
            let (tails, mult) = grouped_input(args)?;
            match (tails.as_slice(), mult.as_slice()) {
                ([l3, l4], [l1, l2]) => solved(&solve_two_group(*l3, *l4, *l1, *l2)?, tol),
                ([_, _], m) => Err(Error::DimensionMismatch { expected: 2, found: m.len() }.into()),
                (t, _) => Err(Error::DimensionMismatch { expected: 2, found: t.len() }.into()),
            }
        }
        Command::SolveGrouped(args) => {
            let (tails, mult) = grouped_input(args)?;
            solved(&solve_grouped(&GroupedSpec::new(tails, mult)?)?, tol)
        }
        Command::VerifyPerm { vector, perm } => {
            let x = input::vector(vector)?;
            let pi = input::permutation(perm, x.len())?;
            let report = spectrum_invariance_check(&x, &pi, tol)?;
            let mut summary = String::new();
            let _ = writeln!(summary, "permutation {pi} on n = {}", x.len());
            let _ = writeln!(summary, "pi(x) = {}", list(&report.permuted));
            for s in &report.steps {
                let _ = writeln!(summary, "  transposition ({} {}): {}", s.l, s.k, verdict(s.similar));
            }
            let _ = writeln!(summary, "spectra match: {}", verdict(report.spectra_match));
            let _ = writeln!(summary, "invariance: {}", verdict(report.holds));
            Output::new(&report, summary)
        }
        Command::VerifyMembership { spectrum, grouped } => {
            let values = input::spectrum(spectrum)?;
            let (tails, mult) = grouped_input(grouped)?;
            let spec = GroupedSpec::new(tails, mult)?;
            let report = verify_membership(&Spectrum::new(values), &spec, tol);
            let mut summary = String::new();
            let _ = writeln!(summary, "spectrum size matches: {}", verdict(report.size_matches));
            let _ = writeln!(summary, "one positive, rest negative: {}", verdict(report.condition1));
            let _ = writeln!(summary, "tail values present: {}", verdict(report.tails_present));
            let _ = writeln!(summary, "head equals core eigenvalues: {}", verdict(report.condition2));
            let _ = writeln!(summary, "expected head: {}", list(&report.expected_head));
            for f in &report.failures {
                let _ = writeln!(summary, "  {f}");
            }
            let _ = writeln!(summary, "membership: {}", verdict(report.accepted));
            Output::new(&report, summary)
        }
        Command::Detcheck { vector } => detcheck(&input::vector(vector)?, tol),
    }
}

fn grouped_input(args: &GroupedArgs) -> Result<(Vec<f64>, Vec<usize>), Failure> {
    input::grouped(&args.tails, args.mult.as_deref())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn construct(x: &PositiveVector) -> Result<Output, Failure> {
    let d = construct_cell_matrix(x).into_matrix();
    let summary = format!("cell matrix of order {}\n{d}", x.len());
    Output::new(&d, summary)
}

#[derive(Serialize)]
struct SpectrumReport {
    eigenvalues: Vec<f64>,
    /// `null` when the matrix is not a cell matrix with a grouped generator.
    reduction_eigenvalues: Option<Vec<f64>>,
    agreement: Option<bool>,
    positive_count: usize,
}

fn spectrum(args: &SpectrumArgs, tol: f64) -> Result<Output, Failure> {
    let (m, generator) = match (&args.vector, &args.matrix) {
        (Some(v), _) => {
            let x = input::vector(v)?;
            (construct_cell_matrix(&x).into_matrix(), Some(x))
        }
        (None, Some(m)) => {
            let m = input::matrix(m)?;
            let x = recognize_cell(&m).ok();
            (m, x)
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let oracle = eig_symmetric(&m, DEFAULT_JACOBI_TOL)?;
    let reduction = match generator {
        Some(x) if group_vector(&x, cellmat::cellmat::DEFAULT_GROUP_TOL).is_ok() => {
            Some(spectrum_via_reduction(&x, tol)?)
        }
        _ => None,
    };
    let agreement = reduction.as_ref().map(|r| r.matches_within(&oracle, tol));
    let report = SpectrumReport {
        eigenvalues: oracle.values().to_vec(),
        reduction_eigenvalues: reduction.map(|r| r.values().to_vec()),
        agreement,
        positive_count: oracle.values().iter().filter(|v| **v > 0.0).count(),
    };

    let mut summary = String::new();
    let _ = writeln!(summary, "eigenvalues (Jacobi): {}", list(&report.eigenvalues));
    match (&report.reduction_eigenvalues, report.agreement) {
        (Some(r), Some(a)) => {
            let _ = writeln!(summary, "eigenvalues (reduction): {}", list(r));
            let _ = writeln!(summary, "agreement within {tol:e}: {}", verdict(a));
        }
        _ => {
            let _ = writeln!(summary, "reduction: not applicable");
        }
    }
    Output::new(&report, summary)
}

fn reduce(x: &PositiveVector) -> Result<Output, Failure> {
    let red = reduce_grouped(x)?;
    let mut summary = String::new();
    let _ = writeln!(summary, "core of order {}:", red.k());
    let _ = write!(summary, "{}", red.core_matrix());
    for b in &red.known_blocks {
        let _ = writeln!(summary, "known eigenvalue {} x{}", b.value, b.count);
    }
    let _ = writeln!(summary, "{} elementary operations", red.ops.len());
    Output::new(&red, summary)
}

#[derive(Serialize)]
struct SolveReport<'a> {
    #[serde(flatten)]
    solution: IEPSolutionJson<'a>,
    matrix: Matrix,
    verified: bool,
}

/// Reports a solution together with `D(x)` and whether its Jacobi spectrum
/// matches the predicted one within `tol`.
fn solved(sol: &IEPSolution, tol: f64) -> Result<Output, Failure> {
    let matrix = construct_cell_matrix(&sol.x).into_matrix();
    let oracle = eig_symmetric(&matrix, DEFAULT_JACOBI_TOL)?;
    let verified = oracle.matches_within(&sol.spectrum, tol);
    let mut summary = String::new();
    let _ = writeln!(summary, "x = {}", list(sol.x.entries()));
    let _ = writeln!(summary, "head eigenvalues: {}", list(&sol.head));
    let _ = writeln!(summary, "spectrum: {}", list(sol.spectrum.values()));
    let _ = writeln!(summary, "Jacobi check within {tol:e}: {}", verdict(verified));
    let report = SolveReport {
        solution: sol.to_json(),
        matrix,
        verified,
    };
    Output::new(&report, summary)
}

#[derive(Serialize)]
struct MinorCheck {
    order: usize,
    formula: f64,
    numeric: f64,
    agree: bool,
}

#[derive(Serialize)]
struct DetReport {
    minors: Vec<MinorCheck>,
    all_agree: bool,
}

fn detcheck(x: &PositiveVector, tol: f64) -> Result<Output, Failure> {
    let d = construct_cell_matrix(x).into_matrix();
    let mut minors = Vec::with_capacity(x.len());
    for i in 1..=x.len() {
        let formula = principal_subdeterminant(x, i)?;
        let numeric = numeric_determinant(&d.leading(i))?;
        let agree = (formula - numeric).abs() <= tol * formula.abs().max(numeric.abs()).max(1.0);
        minors.push(MinorCheck {
            order: i,
            formula,
            numeric,
            agree,
        });
    }
    let all_agree = minors.iter().all(|m| m.agree);
    let mut summary = String::new();
    for m in &minors {
        let _ = writeln!(
            summary,
            "order {:>3}: formula {:e}  numeric {:e}  {}",
            m.order,
            m.formula,
            m.numeric,
            verdict(m.agree)
        );
    }
    let _ = writeln!(summary, "all orders agree: {}", verdict(all_agree));
    Output::new(&DetReport { minors, all_agree }, summary)
}
