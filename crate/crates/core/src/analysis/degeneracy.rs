use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{circuits, AnalyticCertificate};
use crate::cone::sample::interior_center;
use crate::cone::{
    classify_point, combinatorial_interior_sample, wstratum_probe, wstratum_witnesses_n1,
    MomentImagePoint, Point, ProbeBudget, ProbeOutcome,
};
use crate::error::{Error, Result};
use crate::exact::rat_to_f64;
use crate::lattice::{dependencies_on, QuotientSpec};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Largest `d - |L|` for which sign patterns are enumerated.
pub const MAX_PATTERN_INDICES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyWitness {
    /// `(a, Re b, Im b)` of the point.
    pub point: Vec<f64>,
    /// Normalized so that `max |zeta_k| = 1`.
    pub zeta: Vec<f64>,
    pub s: Vec<f64>,
    /// `+1`/`-1` off the walls, `0` on them.
    pub sign_pattern: Vec<i8>,
    pub residual: f64,
}

impl DegeneracyWitness {
    pub fn s_is_zero(&self) -> bool {
        self.s.iter().all(|&x| x == 0.0)
    }
}

fn ufloat<T: Real>(spec: &QuotientSpec) -> Vec<Vec<T>> {
    (0..spec.d()).map(|k| spec.u_as::<T>(k)).collect()
}

fn dotv<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// `max(|sum zeta_k u_k|_inf, max_k |4 zeta_k^2 f_k - <s,u_k>^2|)`, with
/// `f_k` taken as zero on the walls.
fn residual<T: Real>(spec: &QuotientSpec, m: &MomentImagePoint<T>, zeta: &[T], s: &[T]) -> T {
    let u = ufloat::<T>(spec);
    let n = spec.n();
    let mut lin = vec![T::zero(); n];
    for (k, uk) in u.iter().enumerate() {
        for i in 0..n {
            lin[i] = lin[i] + zeta[k] * uk[i];
        }
    }
    let mut r = lin.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    for k in 0..spec.d() {
        let f = if m.stratum.wall.contains(&k) { T::zero() } else { m.fk[k] };
        let su = dotv(s, &u[k]);
        r = r.max((T::lit(4.0) * zeta[k] * zeta[k] * f - su * su).abs());
    }
    r
}

fn make_witness<T: Real>(
    spec: &QuotientSpec,
    m: &MomentImagePoint<T>,
    mut zeta: Vec<T>,
    mut s: Vec<T>,
    pattern: Vec<i8>,
    tol: &Tolerances<T>,
) -> Option<DegeneracyWitness> {
    let z = zeta.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if !(z > T::zero()) || !z.is_finite() {
        return None;
    }
    for x in zeta.iter_mut().chain(s.iter_mut()) {
        *x = *x / z;
    }
    let r = residual(spec, m, &zeta, &s);
    (r <= tol.deg).then(|| DegeneracyWitness {
        point: m.point.to_vec().iter().map(|x| x.to_f64_lossy()).collect(),
        zeta: zeta.iter().map(|x| x.to_f64_lossy()).collect(),
        s: s.iter().map(|x| x.to_f64_lossy()).collect(),
        sign_pattern: pattern,
        residual: r.to_f64_lossy(),
    })
}

/// `s = 0` branch: `{u_k : k in L}` dependent gives `zeta` supported on `L`.
fn s_zero_branch<T: Real>(
    spec: &QuotientSpec,
    m: &MomentImagePoint<T>,
    tol: &Tolerances<T>,
) -> Option<DegeneracyWitness> {
    let deps = dependencies_on(spec, &m.stratum.wall);
    let dep = deps.first()?;
    let zeta: Vec<T> = dep.iter().map(|x| T::lit(rat_to_f64(x))).collect();
    let pattern = vec![0i8; spec.d()];
    make_witness(spec, m, zeta, vec![T::zero(); spec.n()], pattern, tol)
}

/// `s != 0` branch for one sign pattern `eps` (entries on `L` ignored).
fn s_nonzero_branch<T: Real>(
    spec: &QuotientSpec,
    m: &MomentImagePoint<T>,
    eps: &[i8],
    tol: &Tolerances<T>,
) -> Option<DegeneracyWitness> {
    let n = spec.n();
    let u = ufloat::<T>(spec);
    let wall = &m.stratum.wall;
    let strict: Vec<usize> = (0..spec.d()).filter(|k| !wall.contains(k)).collect();
    // s ranges over the orthogonal complement of span{u_k : k in L}
    let basis = if wall.is_empty() {
        Matrix::identity(n)
    } else {
        Matrix::from_rows(&wall.iter().map(|&k| u[k].clone()).collect::<Vec<_>>()).nullspace(tol.rank)
    };
    let r = basis.cols();
    if r == 0 || strict.is_empty() {
        return None;
    }
    let two = T::lit(2.0);
    let weight = |k: usize| T::lit(eps[k] as f64) / (two * m.fk[k].sqrt());
    let mut h = Matrix::<T>::zeros(n, n);
    for &k in &strict {
        let w = weight(k);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = h[(i, j)] + w * u[k][i] * u[k][j];
            }
        }
    }
    let small = basis.transpose().mul(&h).mul(&basis);
    let eig = small.symmetric_eigen();
    let idx = (0..r)
        .min_by(|&a, &b| eig.values[a].abs().partial_cmp(&eig.values[b].abs()).unwrap())
        .unwrap();
    let y = eig.vectors.column(idx);
    let s = basis.mul_vec(&y);
    let mut zeta = vec![T::zero(); spec.d()];
    let mut rhs = vec![T::zero(); n];
    for &k in &strict {
        zeta[k] = weight(k) * dotv(&s, &u[k]);
        for i in 0..n {
            rhs[i] = rhs[i] - zeta[k] * u[k][i];
        }
    }
    if !wall.is_empty() {
        let cols: Vec<Vec<T>> = wall.iter().map(|&k| u[k].clone()).collect();
        let zl = Matrix::from_columns(n, &cols).lstsq(&rhs);
        for (i, &k) in wall.iter().enumerate() {
            zeta[k] = zl[i];
        }
    }
    let pattern: Vec<i8> = (0..spec.d()).map(|k| if wall.contains(&k) { 0 } else { eps[k] }).collect();
    make_witness(spec, m, zeta, s, pattern, tol)
}

/// Decide whether condition (D) fails over `point` for one sign pattern
/// (the pattern attached to one particular lift), including the `s = 0` branch.
pub fn degeneracy_at_pattern<T: Real>(
    spec: &QuotientSpec,
    point: &MomentImagePoint<T>,
    eps: &[i8],
    tol: &Tolerances<T>,
) -> Result<Option<DegeneracyWitness>> {
    if !point.in_image {
        return Err(Error::PointOutsideK { violation: point.violation().to_f64_lossy() });
    }
    if let Some(w) = s_zero_branch(spec, point, tol) {
        return Ok(Some(w));
    }
    Ok(s_nonzero_branch(spec, point, eps, tol))
}

/// Decide whether condition (D) fails at some lift of `point`.
pub fn degeneracy_at<T: Real>(
    spec: &QuotientSpec,
    point: &MomentImagePoint<T>,
    tol: &Tolerances<T>,
) -> Result<Option<DegeneracyWitness>> {
    if !point.in_image {
        return Err(Error::PointOutsideK { violation: point.violation().to_f64_lossy() });
    }
    if let Some(w) = s_zero_branch(spec, point, tol) {
        return Ok(Some(w));
    }
    let strict: Vec<usize> = (0..spec.d()).filter(|k| !point.stratum.wall.contains(k)).collect();
    if strict.len() > MAX_PATTERN_INDICES {
        return Err(Error::Dimension(format!(
            "sign-pattern enumeration is capped at {MAX_PATTERN_INDICES} strict indices"
        )));
    }
    if strict.is_empty() {
        return Ok(None);
    }
    // the overall sign of eps is irrelevant: fix it on the first strict index
    let free = strict.len() - 1;
    for mask in 0u64..(1u64 << free) {
        let mut eps = vec![0i8; spec.d()];
        eps[strict[0]] = 1;
        for (bit, &k) in strict[1..].iter().enumerate() {
            eps[k] = if mask >> bit & 1 == 1 { -1 } else { 1 };
        }
        if let Some(w) = s_nonzero_branch(spec, point, &eps, tol) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyVerdict {
    NonDegenerate,
    DegenerateAt,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub verdict: DegeneracyVerdict,
    pub certified: bool,
    /// How the verdict was reached.
    pub basis: String,
    pub points_tested: usize,
    /// At most [`MAX_REPORTED_WITNESSES`], in discovery order.
    pub witnesses: Vec<DegeneracyWitness>,
}

pub const MAX_REPORTED_WITNESSES: usize = 16;

/// Deterministic scan of `K` for degenerate points.
///
/// Walls meeting in a circuit give `s = 0` witnesses; interior samples
/// exercise the `s != 0` branch. For `n = 1` the interior branch reduces to
/// sign changes of `F_eps = sum_k eps_k u_k^2 / sqrt(f_k)` on the convex
/// set `CInt K`, which is searched directly and bisected when a sign change
/// is seen.
pub fn degeneracy_scan<T: Real>(
    spec: &QuotientSpec,
    samples: usize,
    seed: u64,
    budget: ProbeBudget,
    certificates: &[AnalyticCertificate],
    tol: &Tolerances<T>,
) -> DegeneracyReport {
    let mut witnesses: Vec<DegeneracyWitness> = Vec::new();
    let mut tested = 0usize;
    let mut unknown = false;
    let push = |w: DegeneracyWitness, ws: &mut Vec<DegeneracyWitness>| {
        if ws.len() < MAX_REPORTED_WITNESSES {
            ws.push(w);
        }
    };
    let missed: Vec<usize> = certificates.iter().flat_map(|c| c.missed_walls.iter().copied()).collect();

    let Some(_) = interior_center(spec, tol) else {
        return DegeneracyReport {
            verdict: DegeneracyVerdict::NonDegenerate,
            certified: true,
            basis: "K is empty".into(),
            points_tested: 0,
            witnesses,
        };
    };

    // s = 0 branch: wall circuits meeting K
    let mut open_circuits = false;
    for (ci, c) in circuits(spec).into_iter().enumerate() {
        if c.iter().any(|k| missed.contains(k)) {
            continue;
        }
        let pts: Vec<Point<T>> = if spec.n() == 1 {
            wstratum_witnesses_n1(spec, &c, tol).into_iter().take(4).collect()
        } else {
            match wstratum_probe(spec, &c, seed.wrapping_add(ci as u64), budget, tol) {
                ProbeOutcome::Found(p) => vec![p],
                ProbeOutcome::Empty => vec![],
                ProbeOutcome::NotFound { .. } => {
                    open_circuits = true;
                    vec![]
                }
            }
        };
        for p in pts {
            let m = classify_point(spec, p, tol);
            tested += 1;
            match degeneracy_at(spec, &m, tol) {
                Ok(Some(w)) => push(w, &mut witnesses),
                Ok(None) => {}
                Err(_) => unknown = true,
            }
        }
    }

    // interior samples
    if let Ok(pts) = combinatorial_interior_sample(spec, samples, seed, tol) {
        for m in pts {
            tested += 1;
            match degeneracy_at(spec, &m, tol) {
                Ok(Some(w)) => push(w, &mut witnesses),
                Ok(None) => {}
                Err(_) => unknown = true,
            }
        }
    }

    if spec.n() == 1 {
        let (w, evaluated) = n1_sign_search(spec, samples.max(200), seed, tol);
        tested += evaluated;
        for x in w {
            push(x, &mut witnesses);
        }
    }

    if !witnesses.is_empty() {
        return DegeneracyReport {
            verdict: DegeneracyVerdict::DegenerateAt,
            certified: true,
            basis: "explicit solutions of the degeneracy system".into(),
            points_tested: tested,
            witnesses,
        };
    }
    if let Some(c) = certificates.iter().find(|c| c.non_degenerate) {
        return DegeneracyReport {
            verdict: DegeneracyVerdict::NonDegenerate,
            certified: true,
            basis: format!("analytic certificate: {}", c.label),
            points_tested: tested,
            witnesses,
        };
    }
    if spec.n() == 1 && !unknown && !open_circuits {
        return DegeneracyReport {
            verdict: DegeneracyVerdict::NonDegenerate,
            certified: true,
            basis: "n = 1: wall circuits ruled out by the slice sweep; no sign change of F_eps \
                    found on CInt K by sampling and local search"
                .into(),
            points_tested: tested,
            witnesses,
        };
    }
    DegeneracyReport {
        verdict: DegeneracyVerdict::Unknown,
        certified: false,
        basis: "sampling found no degenerate point; no certificate applies".into(),
        points_tested: tested,
        witnesses,
    }
}

/// `F_eps = sum_k eps_k u_k^2 / sqrt(f_k)` over indices with `u_k != 0`;
/// `None` outside `CInt K`.
fn f_eps<T: Real>(spec: &QuotientSpec, idx: &[usize], eps: &[T], p: &Point<T>, tol: &Tolerances<T>) -> Option<T> {
    let m = classify_point(spec, p.clone(), tol);
    if !m.in_image || m.fk.iter().any(|&f| f <= T::zero()) || !m.stratum.wall.is_empty() {
        return None;
    }
    let mut s = T::zero();
    for (i, &k) in idx.iter().enumerate() {
        let u = T::lit(spec.u(k)[0] as f64);
        s = s + eps[i] * u * u / m.fk[k].sqrt();
    }
    Some(s)
}

/// Pool of points of `CInt K` for the sign search: seeded interior samples
/// at several radii, points just inside each wall, and far points.
fn sign_pool<T: Real>(spec: &QuotientSpec, count: usize, seed: u64, tol: &Tolerances<T>) -> Vec<Point<T>> {
    let Some((centre, _)) = interior_center(spec, tol) else { return vec![] };
    let inside = |p: &Point<T>| {
        let m = classify_point(spec, p.clone(), tol);
        m.in_image && m.fk.iter().all(|&f| f > T::zero()) && m.stratum.wall.is_empty()
    };
    let mut pool = Vec::new();
    if inside(&centre) {
        pool.push(centre.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd15c);
    let c = centre.to_vec();
    let scale = spec
        .lambda1_as::<T>()
        .iter()
        .map(|x| x.abs())
        .chain(spec.lambda_c_as::<T>().iter().map(|z| z.norm()))
        .fold(T::one(), T::max);
    for r in [0.5, 2.0, 10.0, 100.0, 1e4] {
        let mut got = 0;
        for _ in 0..count * 4 {
            if got >= count / 4 + 1 {
                break;
            }
            let v: Vec<T> = c.iter().map(|&x| x + scale * T::lit(r * rng.gen_range(-1.0..1.0))).collect();
            let p = Point::from_vec(&v);
            if inside(&p) {
                pool.push(p);
                got += 1;
            }
        }
        for dir in [1.0, -1.0] {
            let mut v = c.clone();
            v[0] = v[0] + scale * T::lit(dir * r);
            let p = Point::from_vec(&v);
            if inside(&p) {
                pool.push(p);
            }
        }
    }
    // near each wall that meets K
    for k in 0..spec.d() {
        for w in wstratum_witnesses_n1(spec, &[k], tol).into_iter().take(12) {
            for t in [1e-8, 1e-5, 1e-3, 0.05, 0.3] {
                let p = w.lerp(&centre, T::lit(t));
                if inside(&p) {
                    pool.push(p);
                }
            }
        }
    }
    pool
}

/// Sign search for `n = 1`: returns witnesses found and the number of
/// evaluated pool points.
fn n1_sign_search<T: Real>(
    spec: &QuotientSpec,
    count: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> (Vec<DegeneracyWitness>, usize) {
    let idx: Vec<usize> = (0..spec.d()).filter(|&k| spec.u(k)[0] != 0).collect();
    if idx.len() < 2 || idx.len() > MAX_PATTERN_INDICES {
        return (vec![], 0);
    }
    let pool = sign_pool(spec, count, seed, tol);
    let mut out = Vec::new();
    let free = idx.len() - 1;
    // constant patterns never vanish; masks 1.. have mixed signs
    for mask in 1u64..(1u64 << free) {
        let mut eps = vec![T::one(); idx.len()];
        for b in 0..free {
            if mask >> b & 1 == 1 {
                eps[b + 1] = -T::one();
            }
        }
        let vals: Vec<(usize, T)> = pool
            .iter()
            .enumerate()
            .filter_map(|(i, p)| f_eps(spec, &idx, &eps, p, tol).map(|v| (i, v)))
            .collect();
        let pos = vals.iter().find(|(_, v)| *v > T::zero());
        let neg = vals.iter().find(|(_, v)| *v < T::zero());
        let pair = match (pos, neg) {
            (Some(&(i, _)), Some(&(j, _))) => Some((pool[i].clone(), pool[j].clone())),
            (Some(_), None) | (None, Some(_)) => {
                let sign = if pos.is_some() { T::one() } else { -T::one() };
                push_to_other_sign(spec, &idx, &eps, &pool, &vals, sign, tol)
            }
            (None, None) => None,
        };
        if let Some((p, q)) = pair {
            if let Some(w) = bisect_zero(spec, &idx, &eps, p, q, tol) {
                out.push(w);
            }
        }
    }
    (out, pool.len())
}

/// Local compass search driving `sign * F_eps` below zero inside `CInt K`.
fn push_to_other_sign<T: Real>(
    spec: &QuotientSpec,
    idx: &[usize],
    eps: &[T],
    pool: &[Point<T>],
    vals: &[(usize, T)],
    sign: T,
    tol: &Tolerances<T>,
) -> Option<(Point<T>, Point<T>)> {
    let mut order: Vec<&(usize, T)> = vals.iter().collect();
    order.sort_by(|a, b| (sign * a.1).partial_cmp(&(sign * b.1)).unwrap());
    for &&(i, f0) in order.iter().take(6) {
        let mut x = pool[i].to_vec();
        let mut fx = sign * f0;
        let mut step = T::lit(0.25) * (T::one() + x.iter().fold(T::zero(), |m, v| m.max(v.abs())));
        let mut evals = 0;
        while evals < 4000 && step > T::lit(1e-12) {
            let mut improved = false;
            for d in 0..x.len() {
                for s in [T::one(), -T::one()] {
                    let mut y = x.clone();
                    y[d] = y[d] + s * step;
                    evals += 1;
                    if let Some(v) = f_eps(spec, idx, eps, &Point::from_vec(&y), tol) {
                        if sign * v < fx {
                            x = y;
                            fx = sign * v;
                            improved = true;
                        }
                    }
                }
            }
            if fx < T::zero() {
                return Some((pool[i].clone(), Point::from_vec(&x)));
            }
            if improved {
                step = step * T::lit(1.5);
            } else {
                step = step * T::lit(0.5);
            }
        }
    }
    None
}

fn bisect_zero<T: Real>(
    spec: &QuotientSpec,
    idx: &[usize],
    eps: &[T],
    p: Point<T>,
    q: Point<T>,
    tol: &Tolerances<T>,
) -> Option<DegeneracyWitness> {
    let fp = f_eps(spec, idx, eps, &p, tol)?;
    let (mut lo, mut hi) = (T::zero(), T::one());
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        let v = f_eps(spec, idx, eps, &p.lerp(&q, mid), tol)?;
        if (v > T::zero()) == (fp > T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = classify_point(spec, p.lerp(&q, (lo + hi) / T::lit(2.0)), tol);
    let mut pattern = vec![0i8; spec.d()];
    for (i, &k) in idx.iter().enumerate() {
        pattern[k] = if eps[i] > T::zero() { 1 } else { -1 };
    }
    // indices with u_k = 0 carry zeta_k = 0 whatever their sign
    for k in 0..spec.d() {
        if pattern[k] == 0 {
            pattern[k] = 1;
        }
    }
    s_nonzero_branch(spec, &m, &pattern, tol)
}
