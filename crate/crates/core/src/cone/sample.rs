//! Seeded sampling of the combinatorial interior and the connectedness test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::feasibility::vflat_feasible;
use super::point::{classify_point, coordinates, MomentImagePoint, Point};
use super::walls::{wstratum_probe, ProbeBudget, ProbeOutcome};
use crate::error::{Error, Result};
use crate::lattice::QuotientSpec;
use crate::linalg::norm;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Smallest normalized slack `(a_k - |b_k|) / |u_k|`, capped at `cap`.
fn min_slack<T: Real>(spec: &QuotientSpec, p: &Point<T>, cap: T) -> T {
    let (a, b) = coordinates(spec, p);
    (0..spec.d()).fold(cap, |m, k| {
        let len = norm(&spec.u_as::<T>(k));
        let g = a[k] - b[k].norm();
        m.min(if len > T::zero() { g / len } else { g })
    })
}

fn scale_of<T: Real>(spec: &QuotientSpec) -> T {
    spec.lambda1_as::<T>()
        .iter()
        .map(|x| x.abs())
        .chain(spec.lambda_c_as::<T>().iter().map(|z| z.norm()))
        .fold(T::one(), T::max)
}

/// A point of `K` approximately maximizing the smallest slack (capped).
pub fn interior_center<T: Real>(
    spec: &QuotientSpec,
    tol: &Tolerances<T>,
) -> Option<(Point<T>, T)> {
    let start = vflat_feasible(spec, &[], tol)?;
    let cap = scale_of::<T>(spec);
    let mut x = start.to_vec();
    let f = |v: &[T]| min_slack(spec, &Point::from_vec(v), cap);
    let mut fx = f(&x);
    let mut step = cap / T::lit(4.0);
    let dim = x.len();
    let mut evals = 0;
    while step > T::lit(1e-10) * cap && evals < 50_000 && fx < cap {
        let mut improved = false;
        'dirs: for i in 0..dim {
            for s in [T::one(), -T::one()] {
                let mut y = x.clone();
                y[i] = y[i] + s * step;
                evals += 1;
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break 'dirs;
                }
            }
        }
        if !improved {
            // the min of affine-minus-norm terms has kinks along diagonals
            let mut best: Option<(Vec<T>, T)> = None;
            for i in 0..dim {
                for j in i + 1..dim {
                    for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let mut y = x.clone();
                        y[i] = y[i] + T::lit(si) * step;
                        y[j] = y[j] + T::lit(sj) * step;
                        evals += 1;
                        let fy = f(&y);
                        if fy > best.as_ref().map_or(fx, |b| b.1) {
                            best = Some((y, fy));
                        }
                    }
                }
            }
            match best {
                Some((y, fy)) => {
                    x = y;
                    fx = fy;
                }
                None => step = step * T::lit(0.5),
            }
        }
    }
    Some((Point::from_vec(&x), fx))
}

/// `count` points of `K` with `f_k > tol.int` for all `k`, deterministic in `seed`.
pub fn combinatorial_interior_sample<T: Real>(
    spec: &QuotientSpec,
    count: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<Vec<MomentImagePoint<T>>> {
    let (centre, slack) = interior_center(spec, tol).ok_or(Error::EmptyInterior)?;
    let first = classify_point(spec, centre.clone(), tol);
    if slack <= T::zero() || !first.fk.iter().all(|&f| f > tol.int) {
        return Err(Error::EmptyInterior);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = centre.to_vec();
    let floor = slack * T::lit(0.5);
    let mut radius = T::lit(4.0) * slack.max(T::one());
    let mut out = Vec::with_capacity(count);
    let mut misses = 0usize;
    while out.len() < count {
        let x: Vec<T> = x0
            .iter()
            .map(|&c| c + radius * T::lit(rng.gen_range(-1.0..1.0)))
            .collect();
        let m = classify_point(spec, Point::from_vec(&x), tol);
        if m.in_image && m.fk.iter().all(|&f| f > tol.int) {
            out.push(m);
            misses = 0;
        } else {
            misses += 1;
            if misses >= 64 {
                misses = 0;
                radius = (radius * T::lit(0.5)).max(floor);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WallContact {
    Met,
    /// Certified not to meet `K`.
    Missed,
    /// Not found by the probe; emptiness not certified.
    NotFound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectednessReport {
    /// One entry per `k`; index order.
    pub walls: Vec<WallContact>,
    /// `Some(true)` only if every wall is met; `Some(false)` once any miss is certified.
    pub connected: Option<bool>,
    /// `2^{#missed walls}` when every wall verdict is decided.
    pub components: Option<u64>,
    pub probe_based: bool,
}

pub fn connectedness_report<T: Real>(
    spec: &QuotientSpec,
    seed: u64,
    budget: ProbeBudget,
    tol: &Tolerances<T>,
) -> ConnectednessReport {
    let walls: Vec<WallContact> = (0..spec.d())
        .map(|k| match wstratum_probe(spec, &[k], seed.wrapping_add(k as u64), budget, tol) {
            ProbeOutcome::Found(_) => WallContact::Met,
            ProbeOutcome::Empty => WallContact::Missed,
            ProbeOutcome::NotFound { .. } => WallContact::NotFound,
        })
        .collect();
    ConnectednessReport::from_walls(walls, spec.n() > 1)
}

impl ConnectednessReport {
    pub fn from_walls(walls: Vec<WallContact>, probe_based: bool) -> Self {
        let missed = walls.iter().filter(|w| **w == WallContact::Missed).count();
        let open = walls.iter().any(|w| *w == WallContact::NotFound);
        let connected = if missed > 0 {
            Some(false)
        } else if open {
            None
        } else {
            Some(true)
        };
        ConnectednessReport {
            components: (!open).then(|| 1u64 << missed),
            walls,
            connected,
            probe_based,
        }
    }

    /// Marks walls known by other means not to meet `K`.
    pub fn with_missed(mut self, missed: &[usize]) -> Self {
        for &k in missed {
            if let Some(w) = self.walls.get_mut(k) {
                *w = WallContact::Missed;
            }
        }
        Self::from_walls(self.walls, self.probe_based)
    }
}
