//! Search for points of `K` lying on a prescribed set of walls.
//!
//! For `n = 1` every slice `{a fixed}` of `K_k` is a disc in `C`, and the
//! combinatorics of the disc arrangement only change at finitely many
//! levels. Sampling those levels and the gaps between them decides
//! `∩_A W_k ∩ K = ∅` exactly (up to rounding). For `n >= 2` we fall back on
//! a multistart penalty search, which can only ever report "not found".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::feasibility::{vflat_feasible, ConeProjector};
use super::point::{coordinates, Point};
use crate::lattice::QuotientSpec;
use crate::linalg::Matrix;
use crate::scalar::{cx, Cx, Real};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome<T> {
    Found(Point<T>),
    /// Search exhausted without a witness; not a proof of emptiness.
    NotFound { starts: usize },
    /// Certified empty (`n = 1` sweep).
    Empty,
}

impl<T> ProbeOutcome<T> {
    pub fn witness(&self) -> Option<&Point<T>> {
        match self {
            ProbeOutcome::Found(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, ProbeOutcome::Found(_))
    }

    pub fn is_certified_empty(&self) -> bool {
        matches!(self, ProbeOutcome::Empty)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeBudget {
    pub starts: usize,
    pub evals_per_start: usize,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        Self { starts: 64, evals_per_start: 20_000 }
    }
}

/// `max_{k in A} |a_k - |b_k||` together with `max_{k not in A} (|b_k| - a_k)_+`.
pub fn wall_residual<T: Real>(spec: &QuotientSpec, set: &[usize], p: &Point<T>) -> T {
    let (a, b) = coordinates(spec, p);
    (0..spec.d()).fold(T::zero(), |m, k| {
        let g = a[k] - b[k].norm();
        m.max(if set.contains(&k) { g.abs() } else { (-g).max(T::zero()) })
    })
}

fn penalty<T: Real>(spec: &QuotientSpec, set: &[usize], p: &Point<T>) -> T {
    let (a, b) = coordinates(spec, p);
    (0..spec.d()).fold(T::zero(), |acc, k| {
        let g = a[k] - b[k].norm();
        let v = if set.contains(&k) { g } else { (-g).max(T::zero()) };
        acc + v * v
    })
}

/// Search for a point of `∩_{k in set} W_k ∩ K`.
pub fn wstratum_probe<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    seed: u64,
    budget: ProbeBudget,
    tol: &Tolerances<T>,
) -> ProbeOutcome<T> {
    if spec.n() == 1 {
        let sweep = sweep_n1(spec, set, tol, true);
        return match sweep.into_iter().next() {
            Some(p) => ProbeOutcome::Found(p),
            None => ProbeOutcome::Empty,
        };
    }
    if let Some(p) = vflat_feasible(spec, set, tol) {
        if wall_residual(spec, set, &p) <= tol.feas {
            return ProbeOutcome::Found(p);
        }
    }
    multistart(spec, set, seed, budget, tol)
}

/// Every witness produced by the `n = 1` sweep: one or more points per
/// sampled level, covering each wall stratum met along the way.
pub fn wstratum_witnesses_n1<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    tol: &Tolerances<T>,
) -> Vec<Point<T>> {
    assert_eq!(spec.n(), 1, "slice sweep needs n = 1");
    sweep_n1(spec, set, tol, false)
}

// ---------------------------------------------------------------- n = 1

/// Normalized slice data of one cone: disc of centre `c` and radius
/// `sigma (a - alpha)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SliceCone<T> {
    pub k: usize,
    pub sigma: T,
    pub alpha: T,
    pub c: Cx<T>,
}

impl<T: Real> SliceCone<T> {
    pub(crate) fn radius(&self, a: T) -> T {
        self.sigma * (a - self.alpha)
    }

    fn same_as(&self, o: &Self) -> bool {
        self.sigma == o.sigma && self.alpha == o.alpha && self.c == o.c
    }
}

/// Cones with `u_k != 0`; `None` if some `u_k = 0` constraint rules out `set`.
pub(crate) fn slice_cones<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    tol: &Tolerances<T>,
) -> Option<Vec<SliceCone<T>>> {
    let l1 = spec.lambda1_as::<T>();
    let lc = spec.lambda_c_as::<T>();
    let mut out = Vec::new();
    for k in 0..spec.d() {
        let u = spec.u(k)[0];
        if u == 0 {
            let g = -l1[k] - lc[k].norm();
            let ok = if set.contains(&k) { g.abs() <= tol.feas } else { g >= -tol.feas };
            if !ok {
                return None;
            }
            continue;
        }
        let uf = T::lit(u as f64);
        out.push(SliceCone {
            k,
            sigma: uf.signum(),
            alpha: l1[k] / uf,
            c: lc[k] / uf,
        });
    }
    Some(out)
}

/// Levels `a` at which the disc arrangement can change combinatorially.
pub(crate) fn critical_levels<T: Real>(cones: &[SliceCone<T>]) -> Vec<T> {
    let two = T::lit(2.0);
    let mut lv: Vec<T> = cones.iter().map(|c| c.alpha).collect();
    // pairwise tangencies: sigma_j (a - alpha_j) + s sigma_k (a - alpha_k) = +-D
    for (j, cj) in cones.iter().enumerate() {
        for ck in &cones[j + 1..] {
            let dist = (cj.c - ck.c).norm();
            for s in [T::one(), -T::one()] {
                let coef = cj.sigma + s * ck.sigma;
                if coef == T::zero() {
                    continue;
                }
                let cst = -cj.sigma * cj.alpha - s * ck.sigma * ck.alpha;
                for rhs in [dist, -dist] {
                    lv.push((rhs - cst) / coef);
                }
            }
        }
    }
    // triple points: two radical-axis equations, linear in (b, a), then one circle
    for i in 0..cones.len() {
        for j in i + 1..cones.len() {
            for k in j + 1..cones.len() {
                let (ci, cj, ck) = (&cones[i], &cones[j], &cones[k]);
                let row = |o: &SliceCone<T>| {
                    let dc = o.c - ci.c;
                    (
                        vec![two * dc.re, two * dc.im, -two * (o.alpha - ci.alpha)],
                        o.c.norm_sqr() - ci.c.norm_sqr() + ci.alpha * ci.alpha - o.alpha * o.alpha,
                    )
                };
                let (r1, h1) = row(cj);
                let (r2, h2) = row(ck);
                let v = [
                    r1[1] * r2[2] - r1[2] * r2[1],
                    r1[2] * r2[0] - r1[0] * r2[2],
                    r1[0] * r2[1] - r1[1] * r2[0],
                ];
                let n1 = r1.iter().fold(T::zero(), |m, x| m + *x * *x).sqrt();
                let n2 = r2.iter().fold(T::zero(), |m, x| m + *x * *x).sqrt();
                let vn = v.iter().fold(T::zero(), |m, x| m + *x * *x).sqrt();
                if vn <= T::lit(1e-12) * n1 * n2 {
                    continue;
                }
                let p = Matrix::from_rows(&[r1, r2]).lstsq(&[h1, h2]);
                let (dx, dy, da) = (p[0] - ci.c.re, p[1] - ci.c.im, p[2] - ci.alpha);
                let qa = v[0] * v[0] + v[1] * v[1] - v[2] * v[2];
                let qb = two * (dx * v[0] + dy * v[1] - da * v[2]);
                let qc = dx * dx + dy * dy - da * da;
                for t in quadratic_roots(qa, qb, qc) {
                    lv.push(p[2] + t * v[2]);
                }
            }
        }
    }
    lv.retain(|x| x.is_finite());
    lv.sort_by(|x, y| x.partial_cmp(y).unwrap());
    lv.dedup_by(|x, y| (*x - *y).abs() <= T::lit(1e-14) * (T::one() + y.abs()));
    lv
}

fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == T::zero() {
        return vec![];
    }
    if a.abs() <= T::lit(1e-14) * scale {
        return if b == T::zero() { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < -T::lit(1e-12) * b * b.max(T::one()) {
        return vec![];
    }
    let sq = disc.max(T::zero()).sqrt();
    // numerically stable pair
    let q = -(b + b.signum() * sq) / T::lit(2.0);
    if q == T::zero() {
        return vec![T::zero()];
    }
    vec![q / a, c / q]
}

/// Levels to test: every critical level, every gap midpoint and one level
/// beyond each end.
pub(crate) fn sample_levels<T: Real>(critical: &[T]) -> Vec<T> {
    if critical.is_empty() {
        return vec![T::zero()];
    }
    let lo = critical[0];
    let hi = critical[critical.len() - 1];
    let pad = T::one() + (hi - lo);
    let mut out = vec![lo - pad];
    for (i, &x) in critical.iter().enumerate() {
        if i > 0 {
            out.push((critical[i - 1] + x) / T::lit(2.0));
        }
        out.push(x);
    }
    out.push(hi + pad);
    out
}

pub(crate) fn circle_intersections<T: Real>(c1: Cx<T>, r1: T, c2: Cx<T>, r2: T) -> Vec<Cx<T>> {
    let dv = c2 - c1;
    let d = dv.norm();
    let scale = r1.max(r2).max(d).max(T::min_positive_value());
    if d <= T::lit(1e-14) * scale {
        return vec![];
    }
    let x = (d * d + r1 * r1 - r2 * r2) / (T::lit(2.0) * d);
    let h2 = r1 * r1 - x * x;
    if h2 < -T::lit(1e-10) * scale * scale {
        return vec![];
    }
    let h = h2.max(T::zero()).sqrt();
    let e = dv / d;
    let base = c1 + e * x;
    let perp = cx(-e.im, e.re);
    if h == T::zero() {
        vec![base]
    } else {
        vec![base + perp * h, base - perp * h]
    }
}

fn sweep_n1<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    tol: &Tolerances<T>,
    first_only: bool,
) -> Vec<Point<T>> {
    let Some(cones) = slice_cones(spec, set, tol) else {
        return vec![];
    };
    let levels = sample_levels(&critical_levels(&cones));
    let mut out = Vec::new();
    for &a in &levels {
        for b in slice_candidates(&cones, set, a) {
            let p = Point::new(vec![a], vec![b]);
            if wall_residual(spec, set, &p) <= tol.feas {
                out.push(p);
                if first_only {
                    return out;
                }
            }
        }
    }
    out
}

/// Candidate points of the slice at level `a`; any point of
/// `∩_A circle ∩ ∩ disc` is represented whenever the set is nonempty.
fn slice_candidates<T: Real>(cones: &[SliceCone<T>], set: &[usize], a: T) -> Vec<Cx<T>> {
    let eps = T::lit(1e-12) * (T::one() + a.abs());
    let radius = |c: &SliceCone<T>| {
        let r = c.radius(a);
        if r.abs() <= eps {
            T::zero()
        } else {
            r
        }
    };
    if cones.iter().any(|c| radius(c) < T::zero()) {
        return vec![];
    }
    let anchor = cones.iter().position(|c| set.contains(&c.k));
    let mut cand = Vec::new();
    match anchor {
        None => {
            for (i, ci) in cones.iter().enumerate() {
                let ri = radius(ci);
                cand.push(ci.c - cx(ri, T::zero()));
                for cj in &cones[i + 1..] {
                    cand.extend(circle_intersections(ci.c, ri, cj.c, radius(cj)));
                }
            }
        }
        Some(i0) => {
            let c0 = cones[i0];
            let r0 = radius(&c0);
            if r0 == T::zero() {
                return vec![c0.c];
            }
            let mut angles: Vec<T> = Vec::new();
            for (j, cj) in cones.iter().enumerate() {
                if j == i0 || cj.same_as(&c0) {
                    continue;
                }
                for p in circle_intersections(c0.c, r0, cj.c, radius(cj)) {
                    cand.push(p);
                    angles.push((p - c0.c).arg());
                }
            }
            let tau = T::lit(std::f64::consts::TAU);
            angles.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let mids: Vec<T> = if angles.is_empty() {
                vec![T::lit(std::f64::consts::PI), T::zero()]
            } else {
                (0..angles.len())
                    .map(|i| {
                        let next = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + tau };
                        (angles[i] + next) / T::lit(2.0)
                    })
                    .collect()
            };
            for t in mids {
                cand.push(c0.c + cx(t.cos(), t.sin()) * r0);
            }
        }
    }
    cand
}

// ---------------------------------------------------------------- n >= 2

fn multistart<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    seed: u64,
    budget: ProbeBudget,
    tol: &Tolerances<T>,
) -> ProbeOutcome<T> {
    let n = spec.n();
    let dim = 3 * n;
    let lam = spec
        .lambda1_as::<T>()
        .iter()
        .map(|x| x.abs())
        .chain(spec.lambda_c_as::<T>().iter().map(|z| z.norm()))
        .fold(T::zero(), T::max);
    let radius = T::one() + T::lit(2.0) * lam;
    let projectors: Vec<(usize, ConeProjector<T>)> = (0..spec.d())
        .filter_map(|k| ConeProjector::new(spec, k).map(|c| (k, c)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rf = |rng: &mut ChaCha8Rng| T::lit(rng.gen_range(-1.0..1.0));

    for _ in 0..budget.starts {
        let x0: Vec<T> = (0..dim).map(|_| rf(&mut rng) * radius).collect();
        let x = pattern_search(spec, set, x0, radius, budget.evals_per_start, tol, &mut rng);
        let mut p = Point::from_vec(&x);
        for _ in 0..200 {
            if wall_residual(spec, set, &p) <= tol.feas * T::lit(0.01) {
                break;
            }
            for (k, c) in &projectors {
                if set.contains(k) {
                    c.project_boundary(&mut p);
                } else {
                    c.project(&mut p);
                }
            }
        }
        if wall_residual(spec, set, &p) <= tol.feas {
            return ProbeOutcome::Found(p);
        }
    }
    ProbeOutcome::NotFound { starts: budget.starts }
}

/// Compass search on the penalty, with a fresh random frame every time the
/// step shrinks.
fn pattern_search<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    mut x: Vec<T>,
    radius: T,
    max_evals: usize,
    tol: &Tolerances<T>,
    rng: &mut ChaCha8Rng,
) -> Vec<T> {
    let dim = x.len();
    let f = |v: &[T]| penalty(spec, set, &Point::from_vec(v));
    let target = (tol.feas * T::lit(0.01)).powi(2);
    let mut fx = f(&x);
    let mut step = radius / T::lit(4.0);
    let mut dirs = axis_dirs::<T>(dim);
    let mut evals = 1;
    while evals < max_evals && fx > target && step > T::lit(1e-14) * radius {
        let mut improved = false;
        for d in &dirs {
            let y: Vec<T> = x.iter().zip(d).map(|(&xi, &di)| xi + step * di).collect();
            let fy = f(&y);
            evals += 1;
            if fy < fx {
                x = y;
                fx = fy;
                improved = true;
                break;
            }
        }
        if !improved {
            step = step * T::lit(0.5);
            dirs = axis_dirs(dim);
            dirs.extend(random_dirs(dim, dim, rng));
        }
    }
    x
}

fn axis_dirs<T: Real>(dim: usize) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        for s in [T::one(), -T::one()] {
            let mut e = vec![T::zero(); dim];
            e[i] = s;
            out.push(e);
        }
    }
    out
}

fn random_dirs<T: Real>(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let v: Vec<T> = v.iter().map(|x| T::lit(x / n)).collect();
        out.push(v.iter().map(|&x| -x).collect());
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, Rational};
    use num_complex::Complex;

    /// n = 1, d = 2 from the normalized vertices `(alpha_k, c_k)`.
    fn d2(u1: i64, u2: i64, v1: (i64, i64), v2: (i64, i64)) -> QuotientSpec {
        let lam = |u: i64, v: (i64, i64)| (rat(u * v.0, 1), Complex::new(rat(u * v.1, 1), rat(0, 1)));
        let (a1, c1) = lam(u1, v1);
        let (a2, c2) = lam(u2, v2);
        QuotientSpec::new(1, vec![vec![u1], vec![u2]], vec![a1, a2], vec![c1, c2]).unwrap()
    }

    fn probe(spec: &QuotientSpec, set: &[usize]) -> ProbeOutcome<f64> {
        wstratum_probe(spec, set, 7, ProbeBudget::default(), &Tolerances::default())
    }

    #[test]
    fn nested_parallel_cones_have_disjoint_walls() {
        // V_2 = (1, 0) strictly inside K_1
        let s = d2(1, 1, (0, 0), (1, 0));
        assert!(probe(&s, &[0, 1]).is_certified_empty());
        assert!(probe(&s, &[0]).is_certified_empty());
        assert!(probe(&s, &[1]).is_found());
    }

    #[test]
    fn opposite_cones_walls_meet() {
        let s = d2(1, -1, (0, 0), (1, 0));
        let w = probe(&s, &[0, 1]);
        let p = w.witness().expect("walls meet");
        assert!(wall_residual(&s, &[0, 1], p) <= 1e-8);
    }

    #[test]
    fn empty_set_returns_point_of_k() {
        let s = d2(1, 1, (0, 0), (1, 0));
        assert!(probe(&s, &[]).is_found());
    }

    #[test]
    fn vertex_on_wall_gives_persistent_tangency() {
        // V_2 = (1, 1) on W_1: the two walls touch along a ray
        let s = d2(1, 1, (0, 0), (1, 1));
        let w = wstratum_witnesses_n1::<f64>(&s, &[0, 1], &Tolerances::default());
        assert!(w.len() >= 2);
        assert!(w.iter().all(|p| p.a[0] >= 1.0 - 1e-9));
        assert!(w.iter().any(|p| p.a[0] > 1.5));
    }

    #[test]
    fn walls_first_touch_at_tangency_level() {
        // circles of radius a and a - 2 with centres 3 apart first touch at a = 5/2
        let s = d2(1, 1, (0, 0), (2, 3));
        let w = wstratum_witnesses_n1::<f64>(&s, &[0, 1], &Tolerances::default());
        assert!(w.iter().all(|p| p.a[0] >= 2.5 - 1e-9));
        assert!(w.iter().any(|p| (p.a[0] - 2.5).abs() < 1e-12 && (p.b[0].re - 2.5).abs() < 1e-9));
    }

    #[test]
    fn three_cones_triple_point() {
        // three cones with distinct vertices; the three walls are concurrent at some level
        let u = vec![vec![1], vec![1], vec![-1]];
        let l1 = vec![rat(0, 1), rat(0, 1), rat(-3, 1)];
        let lc = vec![
            Complex::new(rat(0, 1), rat(0, 1)),
            Complex::new(rat(1, 1), rat(0, 1)),
            Complex::new(rat(0, 1), rat(-1, 1)),
        ];
        let s = QuotientSpec::new(1, u, l1, lc).unwrap();
        let w = probe(&s, &[0, 1, 2]);
        assert!(w.is_found());
    }

    #[test]
    fn zero_vector_constraint() {
        let u = vec![vec![1], vec![0]];
        let lc = vec![Complex::new(Rational::from_integer(0.into()), rat(0, 1)); 2];
        let ok = QuotientSpec::new(1, u.clone(), vec![rat(0, 1), rat(-1, 1)], lc.clone()).unwrap();
        assert!(probe(&ok, &[]).is_found());
        assert!(probe(&ok, &[1]).is_certified_empty());
        let bad = QuotientSpec::new(1, u, vec![rat(0, 1), rat(1, 1)], lc).unwrap();
        assert!(probe(&bad, &[]).is_certified_empty());
    }

    #[test]
    fn two_dimensional_probe() {
        // simplex with lambda = -1/3 each: all three walls meet at the barycentre-like point
        let s = QuotientSpec::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![rat(-1, 3), rat(-1, 3), rat(-1, 3)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 3],
        )
        .unwrap();
        for set in [vec![0], vec![0, 1], vec![0, 1, 2]] {
            let w = probe(&s, &set);
            let p = w.witness().expect("walls meet");
            assert!(wall_residual(&s, &set, p) <= 1e-8);
        }
    }

    #[test]
    fn two_dimensional_probe_misses() {
        // shifted configuration: the third wall never meets K
        let s = QuotientSpec::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 3],
        )
        .unwrap();
        let budget = ProbeBudget { starts: 8, evals_per_start: 4000 };
        let w = wstratum_probe::<f64>(&s, &[2], 1, budget, &Tolerances::default());
        assert_eq!(w, ProbeOutcome::NotFound { starts: 8 });
    }

    #[test]
    fn quadratic_roots_stable() {
        let r = quadratic_roots(1.0f64, -3.0, 2.0);
        let mut r = r.clone();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
        assert_eq!(quadratic_roots(0.0, 2.0, -4.0), vec![2.0]);
        assert!(quadratic_roots(1.0, 0.0, 1.0).is_empty());
    }
}
