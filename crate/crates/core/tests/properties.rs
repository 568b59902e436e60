use cellmat::cellmat::DEFAULT_GROUP_TOL;
use cellmat::eigen::{DEFAULT_JACOBI_TOL, DEFAULT_ROOT_TOL};
use cellmat::iep::{check_sign_pattern, head_dominance};
use cellmat::reduction::{replay, ZERO_PATTERN_TOL};
use cellmat::{
    apply_similarity, build_dk, char_poly, construct_cell_matrix, eig_symmetric, group_vector, multiset_eq,
    numeric_determinant, permute_vector, poly_roots, principal_subdeterminant, recognize_cell, reduce_grouped,
    solve_cubic_iep, solve_grouped, CubicSpectrumTarget, ElementaryOp, GroupedSpec, GroupedVector, Matrix,
    Permutation, PositiveVector,
};
use proptest::prelude::*;

fn positive_vector(min: usize, max: usize) -> impl Strategy<Value = PositiveVector> {
    prop::collection::vec(0.05f64..20.0, min..=max).prop_map(|v| PositiveVector::new(v).unwrap())
}

fn symmetric(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
            Matrix::from_fn(n, n, |i, j| if i <= j { v[i * n + j] } else { v[j * n + i] })
        })
    })
}

/// Distinct values with multiplicities in 2..=6, up to five groups.
fn grouped() -> impl Strategy<Value = GroupedVector> {
    prop::collection::vec((0.1f64..10.0, 2usize..=6), 1..=5).prop_filter_map("values too close", |groups| {
        let values: Vec<f64> = groups.iter().map(|g| g.0).collect();
        for (i, a) in values.iter().enumerate() {
            if values[..i].iter().any(|b| (a - b).abs() < 1e-3) {
                return None;
            }
        }
        GroupedVector::new(values, groups.iter().map(|g| g.1).collect()).ok()
    })
}

fn op(n: usize) -> impl Strategy<Value = ElementaryOp> {
    (0..n, 0..n, -2.0f64..2.0, any::<bool>())
        .prop_filter("distinct indices", |(i, j, _, _)| i != j)
        .prop_map(|(i, j, lambda, swap)| {
            if swap {
                ElementaryOp::Swap { i, j }
            } else {
                ElementaryOp::RowSum { i, j, lambda }
            }
        })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cell_matrix_structure(x in positive_vector(1, 30)) {
        let d = construct_cell_matrix(&x).into_matrix();
        let n = x.len();
        for i in 0..n {
            prop_assert_eq!(d[(i, i)], 0.0);
            for j in 0..n {
                prop_assert_eq!(d[(i, j)], d[(j, i)]);
                if i != j {
                    prop_assert!(d[(i, j)] > 0.0);
                }
            }
        }
    }

    #[test]
    fn recognition_round_trip(x in positive_vector(3, 30)) {
        let back = recognize_cell(construct_cell_matrix(&x).matrix()).unwrap();
        for (a, b) in back.entries().iter().zip(x.entries()) {
            prop_assert!(rel(*a, *b) <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn determinant_formula_and_sign(x in positive_vector(1, 10)) {
        let d = construct_cell_matrix(&x).into_matrix();
        for i in 1..=x.len() {
            let closed = principal_subdeterminant(&x, i).unwrap();
            let numeric = numeric_determinant(&d.leading(i)).unwrap();
            prop_assert!((closed - numeric).abs() <= 1e-8 * closed.abs().max(1.0), "order {i}: {closed} vs {numeric}");
            if i >= 2 {
                let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
                prop_assert_eq!(closed.signum(), sign);
            }
        }
    }

    #[test]
    fn jacobi_trace_and_frobenius(m in symmetric(12)) {
        let s = eig_symmetric(&m, DEFAULT_JACOBI_TOL).unwrap();
        prop_assert_eq!(s.len(), m.nrows());
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!((s.sum() - m.trace()).abs() <= 1e-10 * scale, "{} vs {}", s.sum(), m.trace());
        prop_assert!(rel(s.sum_of_squares(), m.frobenius_norm().powi(2)) <= 1e-8);
    }

    #[test]
    fn cell_spectrum_has_one_positive(x in positive_vector(2, 40)) {
        let s = eig_symmetric(construct_cell_matrix(&x).matrix(), DEFAULT_JACOBI_TOL).unwrap();
        prop_assert!(check_sign_pattern(s.values()).is_ok(), "{:?}", s.values());
    }

    #[test]
    fn char_poly_vanishes_at_eigenvalues(m in symmetric(10)) {
        let p = char_poly(&m).unwrap();
        let s = eig_symmetric(&m, DEFAULT_JACOBI_TOL).unwrap();
        let scale = p.max_abs_coefficient();
        for &lambda in s.values() {
            prop_assert!(p.eval(lambda).abs() <= 1e-6 * scale, "p({lambda}) = {}", p.eval(lambda));
        }
    }

    #[test]
    fn roots_of_char_poly_match_jacobi(m in symmetric(12)) {
        let roots = poly_roots(&char_poly(&m).unwrap(), DEFAULT_ROOT_TOL).unwrap();
        prop_assert_eq!(roots.len(), m.nrows());
        let re: Vec<f64> = roots.iter().map(|z| z.re).collect();
        let s = eig_symmetric(&m, DEFAULT_JACOBI_TOL).unwrap();
        prop_assert!(multiset_eq(&re, s.values(), 1e-7), "{re:?} vs {:?}", s.values());
    }

    #[test]
    fn similarity_preserves_char_poly(
        (m, ops) in symmetric(10).prop_flat_map(|m| {
            let n = m.nrows();
            let ops = if n < 2 {
                Just(Vec::new()).boxed()
            } else {
                prop::collection::vec(op(n), 0..=20).boxed()
            };
            (Just(m), ops)
        })
    ) {
        let mut t = m.clone();
        for o in &ops {
            t = apply_similarity(&t, *o).unwrap();
        }
        let p = char_poly(&m).unwrap();
        let q = char_poly(&t).unwrap();
        let scale = p.max_abs_coefficient().max(1.0);
        for (a, b) in p.coefficients().iter().zip(q.coefficients()) {
            prop_assert!((a - b).abs() <= 1e-8 * scale, "{p} vs {q}");
        }
    }

    #[test]
    fn reduction_core_and_zero_pattern(g in grouped(), seed in any::<u64>()) {
        let mut x = g.expand().into_inner();
        // Deterministic shuffle so the grouping permutation is exercised.
        let n = x.len();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            x.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let x = PositiveVector::new(x).unwrap();
        let red = reduce_grouped(&x).unwrap();
        let m = replay(construct_cell_matrix(&x).matrix(), &red.ops).unwrap();
        let k = red.k();
        prop_assert_eq!(k + red.known_blocks.iter().map(|b| b.count).sum::<usize>(), n);
        for r in k..n {
            for c in 0..n {
                if c != r {
                    prop_assert!(m[(r, c)].abs() <= ZERO_PATTERN_TOL);
                }
            }
        }
        let dk = build_dk(&group_vector(&x, DEFAULT_GROUP_TOL).unwrap());
        for i in 0..k {
            for j in 0..k {
                prop_assert!((red.core[i][j] - dk[(i, j)]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn grouped_solutions_are_sound(g in grouped()) {
        let tails: Vec<f64> = g.values().iter().map(|v| -2.0 * v).collect();
        let spec = GroupedSpec::new(tails, g.multiplicities().to_vec()).unwrap();
        let sol = solve_grouped(&spec).unwrap();
        let n = spec.n() as f64;
        let s = &sol.spectrum;
        prop_assert!(s.sum().abs() <= 1e-10 * n * s.max_abs());
        prop_assert_eq!(s.values().iter().filter(|v| **v > 0.0).count(), 1);
        prop_assert!(head_dominance(&sol.head), "{:?}", sol.head);
        let oracle = eig_symmetric(construct_cell_matrix(&sol.x).matrix(), DEFAULT_JACOBI_TOL).unwrap();
        prop_assert!(oracle.matches_within(s, 1e-8), "{:?} vs {:?}", oracle.values(), s.values());
    }

    #[test]
    fn cubic_solutions(l3 in 0.01f64..10.0, extra in 0.0f64..10.0) {
        // lambda2 <= lambda3 < 0 < lambda1 with zero sum.
        let lambda3 = -l3;
        let lambda2 = -(l3 + extra);
        let lambda1 = -(lambda2 + lambda3);
        let t = CubicSpectrumTarget::new([lambda1, lambda2, lambda3]).unwrap();
        let sol = solve_cubic_iep(&t).unwrap();
        let x = sol.x.entries();
        prop_assert_eq!(x[1], x[2]);
        prop_assert!(x.iter().all(|v| *v > 0.0));
        let oracle = eig_symmetric(construct_cell_matrix(&sol.x).matrix(), DEFAULT_JACOBI_TOL).unwrap();
        prop_assert!(oracle.matches_within(&sol.spectrum, 1e-8));
    }

    #[test]
    fn permutation_decomposition_and_invariance(
        (x, mapping) in positive_vector(1, 15).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let pi = Permutation::from_zero_based(mapping).unwrap();
        let n = pi.len();
        let mut acc = Permutation::identity(n);
        for (a, b) in pi.transpositions() {
            acc = Permutation::transposition(n, a, b).unwrap().compose(&acc).unwrap();
        }
        prop_assert_eq!(&acc, &pi);

        let y = permute_vector(&x, &pi).unwrap();
        let s0 = eig_symmetric(construct_cell_matrix(&x).matrix(), DEFAULT_JACOBI_TOL).unwrap();
        let s1 = eig_symmetric(construct_cell_matrix(&y).matrix(), DEFAULT_JACOBI_TOL).unwrap();
        prop_assert!(s0.matches_within(&s1, 1e-8));
    }
}
