//! Convex feasibility: boundedness of the polyhedron and nonemptiness of
//! vertex-flat intersections with `K`.

use num_complex::Complex;
use num_traits::{Signed, Zero};

use super::point::Point;
use crate::exact::{rat_int, rat_to_f64, RatMatrix, Rational};
use crate::lattice::{ComplexRational, QuotientSpec};
use crate::linalg::{dot, norm, Matrix};
use crate::lp::feasible_nonneg;
use crate::scalar::{cx, Cx, Real};
use crate::tolerance::Tolerances;

/// Whether `{s : <s, u_k> >= lambda_k}` is bounded, i.e. the recession cone
/// `{s : <s, u_k> >= 0 for all k}` is trivial.
///
/// Equivalent (given that the `u_k` span) to the existence of `c > 0` with
/// `sum c_k u_k = 0`, decided by an exact LP on `c = 1 + y`, `y >= 0`.
pub fn is_bounded_polyhedron(spec: &QuotientSpec) -> bool {
    let u = RatMatrix::from_int_columns(spec.n(), spec.u_columns());
    let ones = vec![rat_int(1); spec.d()];
    let rhs: Vec<Rational> = u.mul_vec(&ones).into_iter().map(|x| -x).collect();
    feasible_nonneg(&u, &rhs).is_some()
}

/// A point with exact rational coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPoint {
    pub a: Vec<Rational>,
    pub b: Vec<ComplexRational>,
}

impl ExactPoint {
    pub fn to_point<T: Real>(&self) -> Point<T> {
        Point::new(
            self.a.iter().map(|x| T::lit(rat_to_f64(x))).collect(),
            self.b
                .iter()
                .map(|z| cx(T::lit(rat_to_f64(&z.re)), T::lit(rat_to_f64(&z.im))))
                .collect(),
        )
    }

    pub fn coordinates(&self, spec: &QuotientSpec) -> (Vec<Rational>, Vec<ComplexRational>) {
        (0..spec.d())
            .map(|k| {
                let u = spec.u(k);
                let mut a = -spec.lambda1()[k].clone();
                let mut b = -spec.lambda_c()[k].clone();
                for i in 0..spec.n() {
                    a += &self.a[i] * rat_int(u[i]);
                    b = b + self.b[i].clone() * rat_int(u[i]);
                }
                (a, b)
            })
            .unzip()
    }

    /// Exact membership `a_k >= |b_k|` for all k.
    pub fn in_image(&self, spec: &QuotientSpec) -> bool {
        let (a, b) = self.coordinates(spec);
        a.iter().zip(&b).all(|(ak, bk)| {
            !ak.is_negative() && ak * ak >= &bk.re * &bk.re + &bk.im * &bk.im
        })
    }
}

/// Exact solution structure of the affine system `a_k = 0 = b_k`, `k in set`.
#[derive(Clone, Debug)]
pub enum FlatSolution {
    Inconsistent,
    Unique(ExactPoint),
    /// Positive-dimensional flat through `particular`.
    Family(ExactPoint),
}

pub fn solve_vertex_flat(spec: &QuotientSpec, set: &[usize]) -> FlatSolution {
    let n = spec.n();
    if set.is_empty() {
        return FlatSolution::Family(ExactPoint {
            a: vec![Rational::zero(); n],
            b: vec![Complex::new(Rational::zero(), Rational::zero()); n],
        });
    }
    // rows are u_k^T for k in set
    let m = RatMatrix::from_fn(set.len(), n, |i, j| rat_int(spec.u(set[i])[j]));
    let pick = |f: &dyn Fn(usize) -> Rational| -> Vec<Rational> { set.iter().map(|&k| f(k)).collect() };
    let a = m.solve(&pick(&|k| spec.lambda1()[k].clone()));
    let re = m.solve(&pick(&|k| spec.lambda_c()[k].re.clone()));
    let im = m.solve(&pick(&|k| spec.lambda_c()[k].im.clone()));
    let (Some(a), Some(re), Some(im)) = (a, re, im) else {
        return FlatSolution::Inconsistent;
    };
    let p = ExactPoint {
        a,
        b: re.into_iter().zip(im).map(|(r, i)| Complex::new(r, i)).collect(),
    };
    if m.rank() == n {
        FlatSolution::Unique(p)
    } else {
        FlatSolution::Family(p)
    }
}

/// Witness of `K ∩ (∩_{k in set} V_k)`, or `None` when it is empty.
///
/// Exact whenever the flat is a point or inconsistent; otherwise decided by
/// Dykstra's alternating projections within `max_iter` sweeps.
pub fn vflat_feasible<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    tol: &Tolerances<T>,
) -> Option<Point<T>> {
    vflat_feasible_with_budget(spec, set, tol, 10_000)
}

pub fn vflat_feasible_with_budget<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    tol: &Tolerances<T>,
    max_iter: usize,
) -> Option<Point<T>> {
    match solve_vertex_flat(spec, set) {
        FlatSolution::Inconsistent => None,
        FlatSolution::Unique(p) => p.in_image(spec).then(|| p.to_point()),
        FlatSolution::Family(p) => dykstra(spec, set, &p.to_point(), tol, max_iter),
    }
}

/// Constant constraint for `u_k = 0`: `-lambda_k >= |lambda_k^(c)|`.
pub(crate) fn zero_vector_constraint_holds(spec: &QuotientSpec, k: usize) -> bool {
    let a = -spec.lambda1()[k].clone();
    let b = &spec.lambda_c()[k];
    !a.is_negative() && &a * &a >= &b.re * &b.re + &b.im * &b.im
}

/// Projection onto the preimage of the solid cone `a_k >= |b_k|`.
pub(crate) struct ConeProjector<T> {
    unit: Vec<T>,
    len: T,
    lambda: T,
    lambda_c: Cx<T>,
}

impl<T: Real> ConeProjector<T> {
    pub(crate) fn new(spec: &QuotientSpec, k: usize) -> Option<Self> {
        Self::from_parts(spec.u_as::<T>(k), spec.lambda1_as::<T>()[k], spec.lambda_c_as::<T>()[k])
    }

    fn from_parts(u: Vec<T>, lambda: T, lambda_c: Cx<T>) -> Option<Self> {
        let len = norm(&u);
        if len == T::zero() {
            return None;
        }
        Some(Self {
            unit: u.iter().map(|&x| x / len).collect(),
            len,
            lambda,
            lambda_c,
        })
    }

    pub(crate) fn project(&self, p: &mut Point<T>) {
        self.project_onto(p, false)
    }

    /// Nearest point of the wall `a_k = |b_k|`.
    pub(crate) fn project_boundary(&self, p: &mut Point<T>) {
        self.project_onto(p, true)
    }

    fn project_onto(&self, p: &mut Point<T>, boundary: bool) {
        // in the orthonormal coordinate along u/|u| the cone is
        // alpha - lambda/|u| >= |beta - lambda_c/|u||
        let alpha = dot(&self.unit, &p.a);
        let beta = p
            .b
            .iter()
            .zip(&self.unit)
            .fold(cx(T::zero(), T::zero()), |acc, (&z, &w)| acc + z * w);
        let t = alpha - self.lambda / self.len;
        let v = beta - self.lambda_c / self.len;
        let r = v.norm();
        let (t2, v2) = if r <= t && !boundary {
            return;
        } else if r <= -t {
            (T::zero(), cx(T::zero(), T::zero()))
        } else {
            let s = (t + r) / T::lit(2.0);
            let dir = if r > T::zero() { v / r } else { cx(T::one(), T::zero()) };
            (s, dir * s)
        };
        let da = t2 - t;
        let db = v2 - v;
        for (x, &w) in p.a.iter_mut().zip(&self.unit) {
            *x = *x + da * w;
        }
        for (z, &w) in p.b.iter_mut().zip(&self.unit) {
            *z = *z + db * w;
        }
    }
}

/// Projection onto `{y : M y = c}` for `M` with rows `u_k^T`, applied to
/// each of `a`, `Re b`, `Im b`.
struct FlatProjector<T> {
    m: Matrix<T>,
    ca: Vec<T>,
    cre: Vec<T>,
    cim: Vec<T>,
}

impl<T: Real> FlatProjector<T> {
    fn new(spec: &QuotientSpec, set: &[usize], u: &[Vec<T>]) -> Self {
        let l1 = spec.lambda1_as::<T>();
        let lc = spec.lambda_c_as::<T>();
        Self {
            m: Matrix::from_rows(&set.iter().map(|&k| u[k].clone()).collect::<Vec<_>>()),
            ca: set.iter().map(|&k| l1[k]).collect(),
            cre: set.iter().map(|&k| lc[k].re).collect(),
            cim: set.iter().map(|&k| lc[k].im).collect(),
        }
    }

    fn project_part(&self, y: &[T], c: &[T]) -> Vec<T> {
        if self.m.rows() == 0 {
            return y.to_vec();
        }
        let r: Vec<T> = self.m.mul_vec(y).iter().zip(c).map(|(&x, &c)| x - c).collect();
        let corr = self.m.lstsq(&r);
        y.iter().zip(corr).map(|(&x, c)| x - c).collect()
    }

    fn project(&self, p: &mut Point<T>) {
        p.a = self.project_part(&p.a, &self.ca);
        let re: Vec<T> = p.b.iter().map(|z| z.re).collect();
        let im: Vec<T> = p.b.iter().map(|z| z.im).collect();
        let re = self.project_part(&re, &self.cre);
        let im = self.project_part(&im, &self.cim);
        p.b = re.into_iter().zip(im).map(|(r, i)| cx(r, i)).collect();
    }
}

pub(crate) fn violation<T: Real>(cones: &[ConeProjector<T>], p: &Point<T>) -> T {
    cones.iter().fold(T::zero(), |m, c| {
        let alpha = dot(&c.unit, &p.a) * c.len - c.lambda;
        let beta = p
            .b
            .iter()
            .zip(&c.unit)
            .fold(cx(T::zero(), T::zero()), |acc, (&z, &w)| acc + z * (w * c.len))
            - c.lambda_c;
        m.max(beta.norm() - alpha)
    })
}

fn dykstra<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    start: &Point<T>,
    tol: &Tolerances<T>,
    max_iter: usize,
) -> Option<Point<T>> {
    // Whitening: with S = sum u_k u_k^T and W = S^{-1/2}, work in y = W^{-1} x
    // where the vectors become W u_k. The values <x, u_k> are unchanged, and
    // thin sheared cones become well conditioned.
    let n = spec.n();
    let raw: Vec<Vec<T>> = (0..spec.d()).map(|k| spec.u_as::<T>(k)).collect();
    let gram = Matrix::from_fn(n, n, |i, j| raw.iter().fold(T::zero(), |s, u| s + u[i] * u[j]));
    let eig = gram.symmetric_eigen();
    let root = |p: T| {
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(T::zero(), |s, m| s + eig.vectors[(i, m)] * eig.values[m].max(T::zero()).powf(p) * eig.vectors[(j, m)])
        })
    };
    let (w, w_inv) = (root(T::lit(-0.5)), root(T::lit(0.5)));
    let u: Vec<Vec<T>> = raw.iter().map(|x| w.mul_vec(x)).collect();
    let (l1, lc) = (spec.lambda1_as::<T>(), spec.lambda_c_as::<T>());
    let mut cones = Vec::new();
    for k in (0..spec.d()).filter(|k| !set.contains(k)) {
        match ConeProjector::from_parts(u[k].clone(), l1[k], lc[k]) {
            Some(c) => cones.push(c),
            None if zero_vector_constraint_holds(spec, k) => {}
            None => return None,
        }
    }
    let flat = FlatProjector::new(spec, set, &u);
    let mut x = map_point(&w_inv, start);
    flat.project(&mut x);
    if violation(&cones, &x) <= tol.feas {
        return Some(map_point(&w, &x));
    }
    let zero = || Point::new(vec![T::zero(); n], vec![cx(T::zero(), T::zero()); n]);
    let mut incr: Vec<Point<T>> = (0..=cones.len()).map(|_| zero()).collect();
    for _ in 0..max_iter {
        for i in 0..=cones.len() {
            let mut y = add(&x, &incr[i]);
            let before = y.clone();
            if i < cones.len() {
                cones[i].project(&mut y);
            } else {
                flat.project(&mut y);
            }
            incr[i] = sub(&before, &y);
            x = y;
        }
        // x now lies on the flat
        if violation(&cones, &x) <= tol.feas {
            return Some(map_point(&w, &x));
        }
    }
    None
}

/// Applies `m` to `a`, `Re b` and `Im b` separately.
fn map_point<T: Real>(m: &Matrix<T>, p: &Point<T>) -> Point<T> {
    let re: Vec<T> = p.b.iter().map(|z| z.re).collect();
    let im: Vec<T> = p.b.iter().map(|z| z.im).collect();
    let (re, im) = (m.mul_vec(&re), m.mul_vec(&im));
    Point::new(m.mul_vec(&p.a), re.into_iter().zip(im).map(|(r, i)| cx(r, i)).collect())
}

fn add<T: Real>(p: &Point<T>, q: &Point<T>) -> Point<T> {
    Point::new(
        p.a.iter().zip(&q.a).map(|(&x, &y)| x + y).collect(),
        p.b.iter().zip(&q.b).map(|(&x, &y)| x + y).collect(),
    )
}

fn sub<T: Real>(p: &Point<T>, q: &Point<T>) -> Point<T> {
    Point::new(
        p.a.iter().zip(&q.a).map(|(&x, &y)| x - y).collect(),
        p.b.iter().zip(&q.b).map(|(&x, &y)| x - y).collect(),
    )
}
