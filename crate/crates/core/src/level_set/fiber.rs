use crate::cone::MomentImagePoint;
use crate::lattice::QuotientSpec;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Roots `x = |w_k|^2` of `x (2a - x) = |b|^2` on `[0, 2a]`, by a grid
/// scan of `resolution` cells followed by bisection. A double root shows up
/// as a grid maximum within `tol` of zero.
fn moduli_roots<T: Real>(a: T, bb: T, resolution: usize, tol: T) -> Vec<T> {
    let h = |x: T| x * (T::lit(2.0) * a - x) - bb;
    if a <= tol {
        return vec![T::zero()];
    }
    let top = T::lit(2.0) * a;
    let grid: Vec<T> = (0..=resolution).map(|i| top * T::lit(i as f64 / resolution as f64)).collect();
    let mut roots: Vec<T> = Vec::new();
    let push = |x: T, roots: &mut Vec<T>| {
        if !roots.iter().any(|&r| (r - x).abs() <= T::lit(1e-7) * (T::one() + a)) {
            roots.push(x);
        }
    };
    for win in grid.windows(2) {
        let (x0, x1) = (win[0], win[1]);
        let (h0, h1) = (h(x0), h(x1));
        if h0.abs() <= tol * (T::one() + a * a) {
            push(x0, &mut roots);
        }
        if h1.abs() <= tol * (T::one() + a * a) {
            push(x1, &mut roots);
        }
        if (h0 < T::zero()) != (h1 < T::zero()) {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..200 {
                let mid = (lo + hi) / T::lit(2.0);
                if (h(mid) < T::zero()) == (h0 < T::zero()) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            push((lo + hi) / T::lit(2.0), &mut roots);
        }
    }
    // tangency between grid points: golden-section on the maximum
    let best = grid.iter().copied().fold(T::zero(), |m, x| if h(x) > h(m) { x } else { m });
    let (mut lo, mut hi) = ((best - top / T::lit(resolution as f64)).max(T::zero()), (best + top / T::lit(resolution as f64)).min(top));
    let phi = T::lit(0.618_033_988_749_895);
    for _ in 0..200 {
        let (m1, m2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        if h(m1) < h(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let xm = (lo + hi) / T::lit(2.0);
    if h(xm).abs() <= tol * (T::one() + a * a) {
        push(xm, &mut roots);
    }
    roots
}

/// Counts the points of `M` over `point` by solving the moduli equations
/// of each index independently and enumerating all combinations. Phases
/// are fixed by `z_k w_k-bar = -i b_k` up to the torus, so combinations are
/// compared through the gauge-invariant moduli `|w_k|^2`.
pub fn brute_force_fiber<T: Real>(
    spec: &QuotientSpec,
    point: &MomentImagePoint<T>,
    resolution: usize,
    tol: &Tolerances<T>,
) -> u64 {
    if !point.in_image {
        return 0;
    }
    let d = spec.d();
    let per: Vec<Vec<T>> = (0..d)
        .map(|k| moduli_roots(point.ak[k].max(T::zero()), point.bk[k].norm_sqr(), resolution, tol.mem))
        .collect();
    let total: usize = per.iter().map(Vec::len).product();
    let mut seen: Vec<Vec<T>> = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut key = Vec::with_capacity(d);
        for roots in &per {
            key.push(roots[rest % roots.len()]);
            rest /= roots.len();
        }
        let dup = seen
            .iter()
            .any(|s| s.iter().zip(&key).all(|(&p, &q)| (p - q).abs() <= T::lit(1e-7) * (T::one() + p.abs())));
        if !dup {
            seen.push(key);
        }
    }
    seen.len() as u64
}
