//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cellmat::cellmat::DEFAULT_GROUP_TOL;
use cellmat::eigen::DEFAULT_JACOBI_TOL;
use cellmat::reduction::{replay, ZERO_PATTERN_TOL};
use cellmat::{
    build_dk, construct_cell_matrix, eig_symmetric, group_vector, multiset_eq, numeric_determinant,
    principal_subdeterminant, reduce_grouped, solve_cubic_iep, solve_grouped, solve_two_group, solve_uniform,
    spectrum_invariance_check, spectrum_via_reduction, transposition_similarity_check, CubicSpectrumTarget,
    GroupedSpec, Matrix, PositiveVector,
};
use common::rel_close;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_ms: u128) -> Result<(), String> {
    ensure(elapsed.as_millis() < limit_ms, || {
        format!("took {elapsed:?}, limit {limit_ms} ms")
    })
}

fn pv(x: Vec<f64>) -> PositiveVector {
    PositiveVector::new(x).unwrap()
}

fn ac1_cubic_regression() -> Outcome {
    let start = Instant::now();
    let t = CubicSpectrumTarget::new([3.0, -2.0, -1.0]).map_err(|e| e.to_string())?;
    let sol = solve_cubic_iep(&t).map_err(|e| e.to_string())?;
    let s = eig_symmetric(construct_cell_matrix(&sol.x).matrix(), DEFAULT_JACOBI_TOL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let x = sol.x.entries();
    let closed = [3f64.sqrt() - 0.5, 0.5, 0.5];
    ensure(x.iter().zip(closed).all(|(a, b)| (a - b).abs() <= 1e-12), || {
        format!("x = {x:?}, expected {closed:?}")
    })?;
    ensure(multiset_eq(s.values(), &[3.0, -2.0, -1.0], 1e-9), || {
        format!("spectrum {:?}", s.values())
    })?;
    within(elapsed, 10)?;
    Ok(format!("x = {x:?} in {elapsed:?}"))
}

fn eleven_by_eleven_display() -> Matrix {
    Matrix::from_fn(11, 11, |i, j| match (i == j, i < 5, j < 5) {
        (true, _, _) => 0.0,
        (false, true, true) => 2.0,
        (false, false, false) => 4.0,
        _ => 3.0,
    })
}

fn ac2_two_group_regression() -> Outcome {
    let start = Instant::now();
    let sol = solve_two_group(-2.0, -4.0, 5, 6).map_err(|e| e.to_string())?;
    let d = construct_cell_matrix(&sol.x).into_matrix();
    let oracle = eig_symmetric(&d, DEFAULT_JACOBI_TOL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let r = 306f64.sqrt();
    ensure((sol.head[0] - (14.0 + r)).abs() <= 1e-10, || format!("lambda1 = {}", sol.head[0]))?;
    ensure((sol.head[1] - (14.0 - r)).abs() <= 1e-10, || format!("lambda2 = {}", sol.head[1]))?;
    let mut expected = vec![14.0 + r, 14.0 - r];
    expected.extend([-2.0; 4]);
    expected.extend([-4.0; 5]);
    ensure(multiset_eq(sol.spectrum.values(), &expected, 1e-8), || {
        format!("returned spectrum {:?}", sol.spectrum.values())
    })?;
    ensure(multiset_eq(oracle.values(), &expected, 1e-8), || {
        format!("Jacobi spectrum {:?}", oracle.values())
    })?;
    ensure(d == eleven_by_eleven_display(), || "constructed matrix differs from the displayed one".into())?;
    within(elapsed, 100)?;
    Ok(format!("lambda1,2 = 14 +/- sqrt(306) in {elapsed:?}"))
}

fn thirteen_by_thirteen_display() -> Matrix {
    // x = (1 x4, 3/2 x4, 5/2 x5)
    let group = |i: usize| match i {
        0..=3 => 0,
        4..=7 => 1,
        _ => 2,
    };
    let table = [[2.0, 2.5, 3.5], [2.5, 3.0, 4.0], [3.5, 4.0, 5.0]];
    Matrix::from_fn(13, 13, |i, j| if i == j { 0.0 } else { table[group(i)][group(j)] })
}

fn ac3_grouped_regression() -> Outcome {
    let start = Instant::now();
    let g = GroupedSpec::new(vec![-2.0, -3.0, -5.0], vec![4, 4, 5]).map_err(|e| e.to_string())?;
    let sol = solve_grouped(&g).map_err(|e| e.to_string())?;
    let d = construct_cell_matrix(&sol.x).into_matrix();
    let elapsed = start.elapsed();

    let r = 511f64.sqrt();
    let head = [20.0 + r, 20.0 - r, -5.0];
    ensure(sol.head.iter().zip(head).all(|(a, b)| (a - b).abs() <= 1e-9), || {
        format!("head {:?}", sol.head)
    })?;
    ensure(d == thirteen_by_thirteen_display(), || "constructed matrix differs from the displayed one".into())?;
    within(elapsed, 100)?;
    Ok(format!("head = {:?} in {elapsed:?}", sol.head))
}

fn ac4_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    for trial in 0..200 {
        let g = common::grouped(&mut rng, 5, 50, 0.1, 10.0);
        let mut x = g.expand();
        if trial % 2 == 1 {
            x = common::shuffled(&mut rng, &x);
        }
        let via = spectrum_via_reduction(&x, 1e-8).map_err(|e| format!("trial {trial}: {e}"))?;
        let oracle = eig_symmetric(construct_cell_matrix(&x).matrix(), DEFAULT_JACOBI_TOL)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(multiset_eq(via.values(), oracle.values(), 1e-8), || {
            format!("trial {trial}: x = {:?}\n  reduction {:?}\n  jacobi    {:?}", x.entries(), via.values(), oracle.values())
        })?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 30_000)?;
    Ok(format!("200 grouped vectors in {elapsed:?}"))
}

fn ac5_structural_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..200 {
        let x = common::positive_vector(&mut rng, 2, 50, 0.01, 10.0);
        let d = construct_cell_matrix(&x).into_matrix();
        let s = eig_symmetric(&d, DEFAULT_JACOBI_TOL).map_err(|e| e.to_string())?;
        let n = x.len() as f64;
        let positives = s.values().iter().filter(|v| **v > 0.0).count();
        let negatives = s.values().iter().filter(|v| **v < 0.0).count();
        ensure(positives == 1 && negatives == x.len() - 1, || {
            format!("trial {trial}: sign pattern {:?}", s.values())
        })?;
        ensure(s.sum().abs() <= 1e-10 * n * s.max_abs(), || {
            format!("trial {trial}: trace sum {}", s.sum())
        })?;
        let fro2 = d.frobenius_norm().powi(2);
        ensure(rel_close(s.sum_of_squares(), fro2, 1e-8), || {
            format!("trial {trial}: sum of squares {} vs {fro2}", s.sum_of_squares())
        })?;
    }
    Ok("200 random positive vectors".into())
}

fn ac6_determinant_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for trial in 0..100 {
        let x = common::positive_vector(&mut rng, 1, 10, 0.1, 10.0);
        let d = construct_cell_matrix(&x).into_matrix();
        for i in 1..=x.len() {
            let closed = principal_subdeterminant(&x, i).map_err(|e| e.to_string())?;
            let numeric = numeric_determinant(&d.leading(i)).map_err(|e| e.to_string())?;
            ensure(rel_close(closed, numeric, 1e-8), || {
                format!("trial {trial}, order {i}: formula {closed} vs elimination {numeric}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} principal minors"))
}

fn ac7_reduction_audit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..50 {
        let g = common::grouped(&mut rng, 5, 50, 0.1, 10.0);
        let mut x = g.expand();
        if trial % 2 == 1 {
            x = common::shuffled(&mut rng, &x);
        }
        let red = reduce_grouped(&x).map_err(|e| format!("trial {trial}: {e}"))?;
        let m = replay(construct_cell_matrix(&x).matrix(), &red.ops).map_err(|e| e.to_string())?;
        let k = red.k();
        let n = x.len();
        for r in k..n {
            for c in 0..n {
                if c != r {
                    ensure(m[(r, c)].abs() <= ZERO_PATTERN_TOL, || {
                        format!("trial {trial}: entry ({}, {}) = {}", r + 1, c + 1, m[(r, c)])
                    })?;
                }
            }
        }
        let known = red.known_values();
        ensure((k..n).all(|i| m[(i, i)] == known[i - k]), || format!("trial {trial}: trailing diagonal"))?;
        let dk = build_dk(&group_vector(&x, DEFAULT_GROUP_TOL).map_err(|e| e.to_string())?);
        for i in 0..k {
            for j in 0..k {
                ensure((m[(i, j)] - dk[(i, j)]).abs() <= 1e-12, || {
                    format!("trial {trial}: core ({i}, {j}) = {} vs {}", m[(i, j)], dk[(i, j)])
                })?;
            }
        }
    }
    Ok("50 grouped vectors replayed".into())
}

fn seven_displays() -> (Matrix, Matrix) {
    let d = Matrix::from_rows(&[
        [0., 3., 4., 5., 6., 7., 8.],
        [3., 0., 5., 6., 7., 8., 9.],
        [4., 5., 0., 7., 8., 9., 10.],
        [5., 6., 7., 0., 9., 10., 11.],
        [6., 7., 8., 9., 0., 11., 12.],
        [7., 8., 9., 10., 11., 0., 13.],
        [8., 9., 10., 11., 12., 13., 0.],
    ])
    .unwrap();
    let dp = Matrix::from_rows(&[
        [0., 9., 11., 5., 6., 7., 10.],
        [9., 0., 12., 6., 7., 8., 11.],
        [11., 12., 0., 8., 9., 10., 13.],
        [5., 6., 8., 0., 3., 4., 7.],
        [6., 7., 9., 3., 0., 5., 8.],
        [7., 8., 10., 4., 5., 0., 9.],
        [10., 11., 13., 7., 8., 9., 0.],
    ])
    .unwrap();
    (d, dp)
}

fn ac8_permutation_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = 0;
    for trial in 0..20 {
        let x = common::positive_vector(&mut rng, 2, 8, 0.1, 10.0);
        for l in 1..=x.len() {
            for k in 1..=x.len() {
                if l == k {
                    continue;
                }
                let ok = transposition_similarity_check(&x, l, k).map_err(|e| e.to_string())?;
                ensure(ok, || format!("trial {trial}: transposition ({l} {k}) not exact"))?;
                pairs += 1;
            }
        }
    }
    for trial in 0..100 {
        let x = common::positive_vector(&mut rng, 1, 20, 0.1, 10.0);
        let pi = common::permutation(&mut rng, x.len());
        let report = spectrum_invariance_check(&x, &pi, 1e-8).map_err(|e| e.to_string())?;
        ensure(report.holds, || format!("trial {trial}: {report:?}"))?;
    }
    let x = pv((1..=7).map(f64::from).collect());
    let pi = cellmat::Permutation::from_cycles("(1 4)(2 5)(3 7 6)", 7).map_err(|e| e.to_string())?;
    let report = spectrum_invariance_check(&x, &pi, 1e-8).map_err(|e| e.to_string())?;
    let (d, dp) = seven_displays();
    ensure(report.holds, || format!("7x7 example: {report:?}"))?;
    ensure(report.permuted == vec![4.0, 5.0, 7.0, 1.0, 2.0, 3.0, 6.0], || format!("pi(x) = {:?}", report.permuted))?;
    ensure(*construct_cell_matrix(&x).matrix() == d, || "D(x) differs from the displayed matrix".into())?;
    ensure(construct_cell_matrix(&pv(report.permuted.clone())).into_matrix() == dp, || {
        "D(pi(x)) differs from the displayed matrix".into()
    })?;
    Ok(format!("{pairs} exact transpositions, 100 random permutations, 7x7 example"))
}

fn ac9_solver_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..50 {
        let n = rng.gen_range(2..=40);
        let lambda = rng.gen_range(0.1..=20.0);
        let u = solve_uniform(n, lambda).map_err(|e| e.to_string())?;
        let g = solve_grouped(&GroupedSpec::new(vec![-lambda], vec![n]).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(u == g, || format!("trial {trial}: uniform {u:?} vs grouped {g:?}"))?;
    }
    for trial in 0..50 {
        let l3: f64 = -rng.gen_range(0.2..=20.0);
        let mut l4 = l3;
        while (l4 - l3).abs() < 1e-3 {
            l4 = -rng.gen_range(0.2..=20.0);
        }
        let (l1, l2) = (rng.gen_range(2..=25), rng.gen_range(2..=25));
        let two = solve_two_group(l3, l4, l1, l2).map_err(|e| format!("trial {trial}: {e}"))?;
        let gen = solve_grouped(&GroupedSpec::new(vec![l3, l4], vec![l1, l2]).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(two.x == gen.x, || format!("trial {trial}: vectors differ"))?;
        ensure(multiset_eq(two.spectrum.values(), gen.spectrum.values(), 1e-10), || {
            format!("trial {trial}: {:?} vs {:?}", two.spectrum.values(), gen.spectrum.values())
        })?;
    }
    Ok("50 uniform and 50 two-group cases".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 3x3 regression", ac1_cubic_regression),
        ("AC2 11x11 regression", ac2_two_group_regression),
        ("AC3 13x13 regression", ac3_grouped_regression),
        ("AC4 oracle equivalence", ac4_oracle_equivalence),
        ("AC5 structural spectrum properties", ac5_structural_properties),
        ("AC6 determinant formula", ac6_determinant_formula),
        ("AC7 reduction audit", ac7_reduction_audit),
        ("AC8 permutation invariance", ac8_permutation_invariance),
        ("AC9 solver cross-consistency", ac9_solver_consistency),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
