use hstoric::analysis::{
    degeneracy_at, degeneracy_at_pattern, fiber_cardinality, freeness_check, AnalysisOptions,
};
use hstoric::cli::{emit_config, parse_config};
use hstoric::cone::{classify_point, combinatorial_interior_sample, is_bounded_polyhedron, Point};
use hstoric::exact::rat;
use hstoric::lattice::{group_structure, ComplexRational, QuotientSpec};
use hstoric::level_set::{brute_force_fiber, lift, moment_image, moment_residual, q_solvability};
use hstoric::Tolerances;
use num_complex::Complex;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = QuotientSpec> {
    (1usize..=2)
        .prop_flat_map(|n| (Just(n), n..=(n + 2).min(4)))
        .prop_flat_map(|(n, d)| {
            (
                Just(n),
                prop::collection::vec(prop::collection::vec(-2i64..=2, n), d),
                prop::collection::vec((-4i64..=4, 1i64..=3), d),
                prop::collection::vec((-3i64..=3, -3i64..=3, 1i64..=2), d),
            )
        })
        .prop_filter_map("u must span", |(n, u, l1, lc)| {
            let l1 = l1.into_iter().map(|(p, q)| rat(p, q)).collect();
            let lc: Vec<ComplexRational> = lc.into_iter().map(|(x, y, q)| Complex::new(rat(x, q), rat(y, q))).collect();
            QuotientSpec::new(n, u, l1, lc).ok()
        })
}

fn unimodular(seed: u64) -> Vec<Vec<i64>> {
    // product of elementary shears and a swap
    let mut g = vec![vec![1i64, 0], vec![0, 1]];
    let mut s = seed;
    for _ in 0..3 {
        let c = (s % 5) as i64 - 2;
        s /= 5;
        let (i, j) = if s % 2 == 0 { (0, 1) } else { (1, 0) };
        s /= 2;
        for col in 0..2 {
            g[i][col] += c * g[j][col];
        }
    }
    if s % 2 == 1 {
        g.swap(0, 1);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn convex_combinations_stay_in_k(spec in spec_strategy(), seed in 0u64..1000, t in 0.0f64..1.0) {
        let tol = Tolerances::default();
        if let Ok(pts) = combinatorial_interior_sample(&spec, 6, seed, &tol) {
            for w in pts.windows(2) {
                let m = classify_point(&spec, w[0].point.lerp(&w[1].point, t), &tol);
                prop_assert!(m.violation() <= 1e-9);
            }
        }
    }

    #[test]
    fn lifts_solve_the_moment_equations(spec in spec_strategy(), seed in 0u64..1000, signs in any::<u8>()) {
        let tol = Tolerances::default();
        if let Ok(pts) = combinatorial_interior_sample(&spec, 4, seed, &tol) {
            for m in &pts {
                let sheet: Vec<i8> = (0..spec.d()).map(|k| if signs >> k & 1 == 1 { -1 } else { 1 }).collect();
                let p = lift(&spec, m, &sheet, Some(seed)).unwrap();
                let (ri, rc) = moment_residual(&spec, &p);
                let scale = 1.0 + m.point.to_vec().iter().fold(0.0f64, |a, x| a.max(x.abs()));
                prop_assert!(ri <= 1e-10 * scale && rc <= 1e-10 * scale, "{ri} {rc}");
                let back = moment_image(&spec, &p).to_vec();
                for (x, y) in back.iter().zip(m.point.to_vec()) {
                    prop_assert!((x - y).abs() <= 1e-9 * scale);
                }
                prop_assert_eq!(p.sheet, sheet);
            }
        }
    }

    #[test]
    fn fiber_count_matches_brute_force(spec in spec_strategy(), seed in 0u64..1000) {
        let tol = Tolerances::default();
        if let Ok(pts) = combinatorial_interior_sample(&spec, 3, seed, &tol) {
            for m in &pts {
                prop_assert_eq!(fiber_cardinality(&spec, m, &tol), brute_force_fiber(&spec, m, 64, &tol));
            }
        }
    }

    #[test]
    fn oracle_agrees_per_lift(spec in spec_strategy(), seed in 0u64..1000, signs in any::<u8>()) {
        let tol = Tolerances::default();
        if let Ok(pts) = combinatorial_interior_sample(&spec, 3, seed, &tol) {
            for m in &pts {
                let sheet: Vec<i8> = (0..spec.d()).map(|k| if signs >> k & 1 == 1 { -1 } else { 1 }).collect();
                let p = lift(&spec, m, &sheet, None).unwrap();
                let eps: Vec<i8> = sheet.iter().map(|x| -x).collect();
                let direct = degeneracy_at_pattern(&spec, m, &eps, &tol).unwrap().is_some();
                prop_assert_eq!(q_solvability(&spec, &p, &tol).degenerate, direct);
                if direct {
                    prop_assert!(degeneracy_at(&spec, m, &tol).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn gl_n_z_change_preserves_invariants(spec in spec_strategy(), seed in 0u64..10_000) {
        let g = if spec.n() == 1 { vec![vec![-1]] } else { unimodular(seed) };
        let moved = spec.change_basis(&g).unwrap();
        let tol = Tolerances::default();
        prop_assert_eq!(is_bounded_polyhedron(&moved), is_bounded_polyhedron(&spec));
        prop_assert_eq!(group_structure(&moved), group_structure(&spec));
        let (f0, f1) = (freeness_check(&spec, &tol), freeness_check(&moved, &tol));
        prop_assert_eq!(f0.verdict, f1.verdict);
        prop_assert_eq!(f0.feasible_sets, f1.feasible_sets);
        if let Ok(pts) = combinatorial_interior_sample(&spec, 3, seed, &tol) {
            // a' = g^{-T} a keeps every <a, u_k> fixed, so the f_k agree
            for m in &pts {
                let a: Vec<f64> = m.ak.clone();
                let n = spec.n();
                let inv_t = |x: &[f64]| -> Vec<f64> {
                    if n == 1 {
                        vec![-x[0]]
                    } else {
                        let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]) as f64;
                        // (g^{-1})^T = adj(g)^T / det
                        vec![
                            (g[1][1] as f64 * x[0] - g[1][0] as f64 * x[1]) / det,
                            (-(g[0][1] as f64) * x[0] + g[0][0] as f64 * x[1]) / det,
                        ]
                    }
                };
                let na = inv_t(&m.point.a);
                let nre = inv_t(&m.point.b.iter().map(|z| z.re).collect::<Vec<_>>());
                let nim = inv_t(&m.point.b.iter().map(|z| z.im).collect::<Vec<_>>());
                let q = Point::new(na, nre.iter().zip(&nim).map(|(&r, &i)| Complex::new(r, i)).collect());
                let mm = classify_point(&moved, q, &tol);
                for (x, y) in mm.ak.iter().zip(&a) {
                    prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
                }
                prop_assert_eq!(fiber_cardinality(&moved, &mm, &tol), fiber_cardinality(&spec, m, &tol));
            }
        }
    }

    #[test]
    fn permutation_preserves_verdicts(spec in spec_strategy()) {
        let d = spec.d();
        let perm: Vec<usize> = (0..d).rev().collect();
        let moved = spec.permute(&perm).unwrap();
        let tol = Tolerances::default();
        prop_assert_eq!(is_bounded_polyhedron(&moved), is_bounded_polyhedron(&spec));
        prop_assert_eq!(freeness_check(&moved, &tol).verdict, freeness_check(&spec, &tol).verdict);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn config_round_trip(spec in spec_strategy()) {
        let text = emit_config(&spec).unwrap();
        prop_assert_eq!(parse_config(&text).unwrap(), spec);
    }
}

#[test]
fn analysis_is_deterministic_in_the_seed() {
    let spec = QuotientSpec::new(
        1,
        vec![vec![2], vec![-1]],
        vec![rat(0, 1), rat(-1, 1)],
        vec![Complex::new(rat(0, 1), rat(0, 1)), Complex::new(rat(1, 2), rat(0, 1))],
    )
    .unwrap();
    let opts = AnalysisOptions { seed: 11, ..Default::default() };
    let a = hstoric::analysis::analyze(&spec, &opts).unwrap().to_json();
    let b = hstoric::analysis::analyze(&spec, &opts).unwrap().to_json();
    assert_eq!(a, b);
}
