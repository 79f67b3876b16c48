//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line; tolerances and time limits are pinned here.

use std::time::{Duration, Instant};

use hstoric::analysis::{
    analyze, degeneracy_at, degeneracy_at_pattern, degeneracy_scan, fiber_cardinality, AnalysisOptions,
    DegeneracyVerdict, Freeness, SmoothVerdict,
};
use hstoric::cone::{classify_point, combinatorial_interior_sample, is_bounded_polyhedron, Point, ProbeBudget};
use hstoric::exact::{rat, rat_int};
use hstoric::lattice::QuotientSpec;
use hstoric::level_set::{
    brute_force_fiber, d2_surface_metric, gaussian_curvature_fd, involution_apply, involution_fixed_probe,
    killing_norm, lift, q_solvability, surface_curvature_d2, KillingVector, LevelSetPoint,
};
use hstoric::scenarios::{
    d2_table, diagonal_null_point, diagonal_scenario, diagonal_scenario_pq,
    shifted_diagonal_scenario, triangle_certificate_check,
};
use hstoric::{MomentImagePoint, Tolerances};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CURVATURE_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-10;
const KILLING_TOL: f64 = 1e-12;
const DEG_TOL: f64 = 1e-8;
const PULLBACK_TOL: f64 = 1e-8;
const CONVEX_TOL: f64 = 1e-9;

fn report(id: u32, ok: bool, elapsed: Duration, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id}: {tag} ({:.2}s) {detail}", elapsed.as_secs_f64());
    assert!(ok, "criterion {id} failed: {detail}");
}

fn zc(d: usize) -> Vec<hstoric::lattice::ComplexRational> {
    vec![Complex::new(rat(0, 1), rat(0, 1)); d]
}

fn simplex(n: usize) -> QuotientSpec {
    let mut u: Vec<Vec<i64>> = (0..n).map(|k| (0..n).map(|i| i64::from(i == k)).collect()).collect();
    u.push(vec![-1; n]);
    let mut l1 = vec![rat(0, 1); n + 1];
    l1[n] = rat(-1, 1);
    QuotientSpec::new(n, u, l1, zc(n + 1)).unwrap()
}

fn d2(u1: i64, u2: i64, v2: (i64, i64, i64)) -> QuotientSpec {
    QuotientSpec::new(
        1,
        vec![vec![u1], vec![u2]],
        vec![rat(0, 1), rat_int(u2 * v2.0)],
        vec![Complex::new(rat(0, 1), rat(0, 1)), Complex::new(rat_int(u2 * v2.1), rat_int(u2 * v2.2))],
    )
    .unwrap()
}

/// Specs with `d <= 4` used for sampling criteria.
fn sample_specs() -> Vec<QuotientSpec> {
    let three = QuotientSpec::new(
        1,
        vec![vec![1], vec![1], vec![2]],
        vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        vec![Complex::new(rat(0, 1), rat(0, 1)), Complex::new(rat(1, 2), rat(0, 1)), Complex::new(rat(0, 1), rat(1, 1))],
    )
    .unwrap();
    let mixed = QuotientSpec::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![-1, -2]],
        vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(-3, 1)],
        zc(4),
    )
    .unwrap();
    vec![simplex(1), simplex(2), d2(1, 1, (1, 0, 0)), d2(2, 1, (1, 0, 0)), d2(1, -1, (1, 0, 0)), d2(3, 2, (0, 0, 1)), three, mixed]
}

/// Last point of the ray `p + t v` in `K` with zero slack, by bisection on `t`.
fn ray_to_boundary(spec: &QuotientSpec, p: &Point<f64>, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Option<MomentImagePoint> {
    let strict = Tolerances { mem: 0.0, ..*tol };
    let v: Vec<f64> = (0..3 * spec.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let base = p.to_vec();
    let at = |t: f64| Point::from_vec(&base.iter().zip(&v).map(|(x, y)| x + t * y).collect::<Vec<_>>());
    let (mut lo, mut hi) = (0.0, 1.0);
    while classify_point(spec, at(hi), &strict).in_image {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if classify_point(spec, at(mid), &strict).in_image {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = classify_point(spec, at(lo), tol);
    m.in_image.then_some(m)
}

#[test]
fn criterion_01_d2_classification_table() {
    let t0 = Instant::now();
    // (compact, free, smooth, non-degenerate) per configuration
    let expected = [
        (false, true, true, true),
        (false, true, true, false),
        (true, true, true, false),
        (false, true, true, false),
        (false, true, false, false),
        (true, false, false, false),
    ];
    let mut bad = Vec::new();
    for (s, want) in d2_table().iter().zip(expected) {
        let r = analyze(&s.spec, &s.options(&AnalysisOptions::default())).unwrap();
        let got = (
            r.compact,
            r.freeness.verdict == Freeness::Free,
            r.smooth.verdict == SmoothVerdict::Smooth,
            r.degeneracy.verdict == DegeneracyVerdict::NonDegenerate,
        );
        if got != want {
            bad.push(format!("{}: got {got:?}, want {want:?}", s.name));
        }
    }
    let el = t0.elapsed();
    report(1, bad.is_empty() && el < Duration::from_secs(10), el, &format!("6 configurations, mismatches {bad:?}"));
}

#[test]
fn criterion_02_surface_curvature() {
    let t0 = Instant::now();
    let (e, g) = d2_surface_metric(1.0);
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for r in [0.0, 0.5, 1.0, 2.0] {
        let fd = gaussian_curvature_fd(&e, &g, r, 1e-4, CURVATURE_TOL).unwrap();
        let quoted = surface_curvature_d2(1.0, r);
        worst = worst.max((fd - quoted).abs());
        rows.push(format!("r={r}: fd={fd:.9} quoted={quoted:.9}"));
    }
    let el = t0.elapsed();
    report(2, worst <= CURVATURE_TOL && el < Duration::from_secs(1), el, &format!("max |fd - quoted| = {worst:.3e}; {}", rows.join(", ")));
}

#[test]
fn criterion_03_fiber_counts() {
    let t0 = Instant::now();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = sample_specs();
    let (mut points, mut bad, mut walls) = (0, Vec::new(), 0);
    for (si, s) in specs.iter().enumerate() {
        let interior = combinatorial_interior_sample(s, 8, si as u64, &tol).unwrap();
        let mut pts: Vec<MomentImagePoint> = interior[..6].to_vec();
        for p in &interior[6..] {
            for _ in 0..5 {
                if let Some(m) = ray_to_boundary(s, &p.point, &mut rng, &tol) {
                    pts.push(m);
                }
            }
        }
        for m in pts.iter().take(13) {
            let fc = fiber_cardinality(s, m, &tol);
            let bf = brute_force_fiber(s, m, 64, &tol);
            let pow = 1u64 << m.strict_count();
            walls += usize::from(!m.stratum.wall.is_empty());
            points += 1;
            if fc != bf || fc != pow {
                bad.push(format!("spec {si}: fc={fc} bf={bf} 2^m={pow}"));
            }
        }
    }
    let el = t0.elapsed();
    report(
        3,
        points >= 100 && bad.is_empty() && el < Duration::from_secs(30),
        el,
        &format!("{points} points ({walls} on walls), mismatches {bad:?}"),
    );
}

#[test]
fn criterion_04_compactness() {
    let t0 = Instant::now();
    let parallel = d2(1, 1, (1, 0, 0));
    let got = (is_bounded_polyhedron(&simplex(2)), is_bounded_polyhedron(&parallel), is_bounded_polyhedron(&d2(1, -1, (1, 0, 0))));
    report(4, got == (true, false, true), t0.elapsed(), &format!("simplex, parallel, (1,-1) -> {got:?}"));
}

#[test]
fn criterion_05_degeneracy_oracle_equivalence() {
    let t0 = Instant::now();
    let tol = Tolerances { deg: DEG_TOL, ..Tolerances::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let specs = [simplex(1), simplex(2), d2(1, 1, (1, 0, 0)), d2(2, 1, (1, 0, 0)), d2(1, -1, (1, 0, 0)), d2(3, 2, (0, 0, 1))];
    let (mut lifts, mut degenerate_lifts, mut bad) = (0usize, 0usize, Vec::new());
    for (si, s) in specs.iter().enumerate() {
        let mut pts: Vec<MomentImagePoint> = combinatorial_interior_sample(s, 12, si as u64, &tol).unwrap();
        let scan = degeneracy_scan(s, 32, si as u64, ProbeBudget::default(), &[], &tol);
        pts.extend(scan.witnesses.iter().map(|w| classify_point(s, Point::from_vec(&w.point), &tol)));
        for m in pts.iter().filter(|m| m.in_image) {
            let strict: Vec<usize> = (0..s.d()).filter(|k| !m.stratum.wall.contains(k)).collect();
            let mut any = false;
            for mask in 0u32..(1 << strict.len()) {
                let mut sheet = vec![0i8; s.d()];
                for (bit, &k) in strict.iter().enumerate() {
                    sheet[k] = if mask >> bit & 1 == 1 { -1 } else { 1 };
                }
                let p = lift(s, m, &sheet, Some(rng.gen())).unwrap();
                let oracle = q_solvability(s, &p, &tol).degenerate;
                let eps: Vec<i8> = sheet.iter().map(|x| -x).collect();
                let direct = degeneracy_at_pattern(s, m, &eps, &tol).unwrap().is_some();
                lifts += 1;
                degenerate_lifts += usize::from(oracle);
                any |= oracle;
                if oracle != direct {
                    bad.push(format!("spec {si} point {:?} sheet {sheet:?}: oracle {oracle} direct {direct}", m.point.to_vec()));
                }
            }
            if degeneracy_at(s, m, &tol).unwrap().is_some() != any {
                bad.push(format!("spec {si} point {:?}: some-lift mismatch", m.point.to_vec()));
            }
        }
    }
    let el = t0.elapsed();
    report(
        5,
        lifts >= 200 && bad.is_empty() && el < Duration::from_secs(60),
        el,
        &format!("{lifts} lifts over {} specs ({degenerate_lifts} degenerate), disagreements {}: {:?}", specs.len(), bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    );
}

#[test]
fn criterion_06_diagonal_family() {
    let t0 = Instant::now();
    let s = diagonal_scenario(1, vec![rat(-1, 2), rat(-1, 2)], zc(2)).unwrap();
    let scalars = s.derived.clone().unwrap();
    let (z, w) = diagonal_null_point(&scalars, 1).unwrap();
    let p: hstoric::LevelSetPoint = LevelSetPoint::from_coords(&s.spec, z, w);
    let v = KillingVector::new(&s.spec, vec![1.0, 1.0]).unwrap();
    let norm = killing_norm(&p, &v).abs();
    let opts = AnalysisOptions::default();
    let generic = analyze(&s.spec, &opts).unwrap().smooth.verdict;
    let edge = diagonal_scenario_pq(1, rat_int(2), Complex::new(rat_int(1), rat_int(0))).unwrap();
    let edge_v = analyze(&edge.spec, &opts).unwrap().smooth.verdict;
    let ok = scalars.p == rat_int(2)
        && p.residual_i <= RESIDUAL_TOL
        && p.residual_c <= RESIDUAL_TOL
        && norm <= KILLING_TOL
        && generic == SmoothVerdict::Smooth
        && edge_v == SmoothVerdict::Singular;
    report(
        6,
        ok,
        t0.elapsed(),
        &format!(
            "residuals ({:.1e}, {:.1e}), |killing norm| {norm:.1e}, P=2 Q=0 {generic:?}, |Q|=P/2 {edge_v:?}",
            p.residual_i, p.residual_c
        ),
    );
}

#[test]
fn criterion_07_shifted_diagonal() {
    let t0 = Instant::now();
    let tol = Tolerances::default();
    let s = shifted_diagonal_scenario(2, rat_int(1)).unwrap();
    let r = analyze(&s.spec, &s.options(&AnalysisOptions::default())).unwrap();
    let main = r.freeness.verdict == Freeness::Free
        && r.smooth.verdict == SmoothVerdict::Smooth
        && r.degeneracy.verdict == DegeneracyVerdict::NonDegenerate
        && r.degeneracy.certified;
    let cone = shifted_diagonal_scenario(2, rat_int(0)).unwrap();
    let rc = analyze(&cone.spec, &AnalysisOptions::default()).unwrap();
    let vertex = rc.smooth.verdict == SmoothVerdict::Singular
        && rc.smooth.witness.as_ref().is_some_and(|w| w.point.iter().all(|x| x.abs() < 1e-9));
    let tri = triangle_certificate_check(2, 1.0, 10_000, 7);
    // the same draws as points of K: no degeneracy witness anywhere
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut witnesses = 0;
    for _ in 0..10_000 {
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let b: Vec<Complex<f64>> = (0..2).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale).collect();
        let a: Vec<f64> = b.iter().map(|bk| (bk.norm_sqr() + (rng.gen_range(-1.0..1.0f64) * scale).powi(2)).sqrt()).collect();
        let m = classify_point(&s.spec, Point::new(a, b), &tol);
        if m.in_image && degeneracy_at(&s.spec, &m, &tol).unwrap().is_some() {
            witnesses += 1;
        }
    }
    let ok = main && rc.scaling_cone && vertex && tri.violations == 0 && witnesses == 0;
    report(
        7,
        ok,
        t0.elapsed(),
        &format!(
            "lambda=1 F/S/D certified {main}; lambda=0 scaling cone {} vertex singular {vertex}; triangle violations {} of {}, witnesses {witnesses}",
            rc.scaling_cone, tri.violations, tri.samples
        ),
    );
}

#[test]
fn criterion_08_convexity() {
    let t0 = Instant::now();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let specs = sample_specs();
    let mut pools: Vec<Vec<Point<f64>>> = Vec::new();
    for (si, s) in specs.iter().enumerate() {
        let interior = combinatorial_interior_sample(s, 20, 100 + si as u64, &tol).unwrap();
        let mut pool: Vec<Point<f64>> = interior.iter().map(|m| m.point.clone()).collect();
        for m in &interior[..10] {
            if let Some(b) = ray_to_boundary(s, &m.point, &mut rng, &tol) {
                pool.push(b.point);
            }
        }
        pools.push(pool);
    }
    let (mut pairs, mut tested, mut violations) = (0, 0, 0);
    while pairs < 1000 {
        let si = pairs % specs.len();
        let pool = &pools[si];
        let (p, q) = (&pool[rng.gen_range(0..pool.len())], &pool[rng.gen_range(0..pool.len())]);
        for i in 1..10 {
            let m = classify_point(&specs[si], p.lerp(q, i as f64 / 10.0), &tol);
            tested += 1;
            if m.violation() > CONVEX_TOL {
                violations += 1;
            }
        }
        pairs += 1;
    }
    report(8, violations == 0, t0.elapsed(), &format!("{pairs} pairs, {tested} combinations, {violations} violations"));
}

#[test]
fn criterion_09_involution() {
    let t0 = Instant::now();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let specs = sample_specs();
    let mut worst = 0.0f64;
    let mut count = 0;
    for (si, s) in specs.iter().enumerate() {
        for m in combinatorial_interior_sample(s, 13, 200 + si as u64, &tol).unwrap() {
            let sheet: Vec<i8> = (0..s.d()).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let p = lift(s, &m, &sheet, Some(rng.gen())).unwrap();
            let back = involution_apply(s, &involution_apply(s, &p));
            let diff = p.z.iter().zip(&back.z).chain(p.w.iter().zip(&back.w)).fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
            worst = worst.max(diff);
            count += 1;
        }
    }
    let diag = diagonal_scenario(1, vec![rat(-1, 2), rat(-1, 2)], zc(2)).unwrap();
    let gamma = analyze(&diag.spec, &AnalysisOptions::default()).unwrap().gamma;
    let table = d2_table();
    let fixed_a = involution_fixed_probe(&table[0].spec, 1, ProbeBudget::default(), &tol);
    let fixed_c = involution_fixed_probe(&table[2].spec, 1, ProbeBudget::default(), &tol);
    let pullback = fixed_c.as_ref().map_or(f64::INFINITY, |w| w.form_residual);
    let ok = count >= 100 && worst == 0.0 && gamma == "2" && fixed_a.is_none() && fixed_c.is_some() && pullback <= PULLBACK_TOL;
    report(
        9,
        ok,
        t0.elapsed(),
        &format!(
            "sigma^2 on {count} points max diff {worst:e}; |Gamma| = {gamma}; fixed orbits (a) {} (c) {}; pullback {pullback:.1e}",
            fixed_a.is_some(),
            fixed_c.is_some()
        ),
    );
}

#[test]
fn criterion_10_compact_implies_degenerate() {
    let t0 = Instant::now();
    let tol = Tolerances::default();
    let specs = [("simplex n=1", simplex(1)), ("simplex n=2", simplex(2)), ("(1,-1)", d2(1, -1, (1, 0, 0)))];
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, s) in &specs {
        assert!(is_bounded_polyhedron(s));
        let scan = degeneracy_scan(s, 64, 10, ProbeBudget::default(), &[], &tol);
        ok &= !scan.witnesses.is_empty();
        rows.push(format!("{name}: {} witnesses", scan.witnesses.len()));
    }
    report(10, ok, t0.elapsed(), &rows.join(", "));
}
