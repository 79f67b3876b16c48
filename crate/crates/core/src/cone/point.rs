use serde::Serialize;

use crate::lattice::QuotientSpec;
use crate::scalar::{cx, Cx, Real};
use crate::tolerance::Tolerances;

/// A raw point `(a, b)` of `R^n x C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T> {
    pub a: Vec<T>,
    pub b: Vec<Cx<T>>,
}

impl<T: Real> Point<T> {
    pub fn new(a: Vec<T>, b: Vec<Cx<T>>) -> Self {
        assert_eq!(a.len(), b.len(), "a and b must both have length n");
        Self { a, b }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Flatten to `(a, Re b, Im b)` in `R^{3n}`.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = self.a.clone();
        v.extend(self.b.iter().map(|z| z.re));
        v.extend(self.b.iter().map(|z| z.im));
        v
    }

    pub fn from_vec(v: &[T]) -> Self {
        let n = v.len() / 3;
        Self {
            a: v[..n].to_vec(),
            b: (0..n).map(|i| cx(v[n + i], v[2 * n + i])).collect(),
        }
    }

    /// Convex combination `(1 - t) self + t other`.
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        let s = T::one() - t;
        Self {
            a: self.a.iter().zip(&other.a).map(|(&x, &y)| s * x + t * y).collect(),
            b: self.b.iter().zip(&other.b).map(|(&x, &y)| x * s + y * t).collect(),
        }
    }
}

/// Per-coordinate quantities `a_k`, `b_k` at a point.
pub fn coordinates<T: Real>(spec: &QuotientSpec, p: &Point<T>) -> (Vec<T>, Vec<Cx<T>>) {
    let l1 = spec.lambda1_as::<T>();
    let lc = spec.lambda_c_as::<T>();
    (0..spec.d())
        .map(|k| {
            let u = spec.u_as::<T>(k);
            let a = u.iter().zip(&p.a).fold(T::zero(), |acc, (&x, &y)| acc + x * y) - l1[k];
            let b = u.iter().zip(&p.b).fold(cx(T::zero(), T::zero()), |acc, (&x, &y)| acc + y * x)
                - lc[k];
            (a, b)
        })
        .unzip()
}

/// Index sets `J = {k : p in V_k}` and `L = {l : p in W_l}` (zero-based).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Stratum {
    pub vertex: Vec<usize>,
    pub wall: Vec<usize>,
}

impl Stratum {
    /// Indices in `L \ J`.
    pub fn wall_only(&self) -> Vec<usize> {
        self.wall.iter().copied().filter(|k| !self.vertex.contains(k)).collect()
    }
}

/// A classified point of `R^n x C^n` with its stratum data.
#[derive(Clone, Debug)]
pub struct MomentImagePoint<T> {
    pub point: Point<T>,
    pub ak: Vec<T>,
    pub bk: Vec<Cx<T>>,
    /// `f_k = a_k^2 - |b_k|^2`.
    pub fk: Vec<T>,
    pub in_cone: Vec<bool>,
    pub stratum: Stratum,
    pub in_image: bool,
}

impl<T: Real> MomentImagePoint<T> {
    pub fn d(&self) -> usize {
        self.ak.len()
    }

    /// Largest violation `max(|b_k| - a_k, 0)`.
    pub fn violation(&self) -> T {
        self.ak
            .iter()
            .zip(&self.bk)
            .fold(T::zero(), |m, (&a, b)| m.max(b.norm() - a))
    }

    /// Number of strict inequalities `a_k > |b_k|`.
    pub fn strict_count(&self) -> usize {
        self.d() - self.stratum.wall.len()
    }

    pub fn in_combinatorial_interior(&self) -> bool {
        self.in_image && self.stratum.wall.is_empty()
    }
}

pub fn classify_point<T: Real>(
    spec: &QuotientSpec,
    point: Point<T>,
    tol: &Tolerances<T>,
) -> MomentImagePoint<T> {
    assert_eq!(point.n(), spec.n());
    let (ak, bk) = coordinates(spec, &point);
    let mut fk = Vec::with_capacity(spec.d());
    let mut in_cone = Vec::with_capacity(spec.d());
    let mut stratum = Stratum::default();
    for k in 0..spec.d() {
        let (a, m) = (ak[k], bk[k].norm());
        fk.push((a - m) * (a + m));
        in_cone.push(a - m >= -tol.mem);
        if (a - m).abs() <= tol.mem {
            stratum.wall.push(k);
            if a.abs() <= tol.mem && m <= tol.mem {
                stratum.vertex.push(k);
            }
        }
    }
    let in_image = in_cone.iter().all(|&x| x);
    MomentImagePoint {
        point,
        ak,
        bk,
        fk,
        in_cone,
        stratum,
        in_image,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_spec() -> QuotientSpec {
        QuotientSpec::homogeneous(1, vec![vec![1]]).unwrap()
    }

    fn pt(a: f64, br: f64, bi: f64) -> Point<f64> {
        Point::new(vec![a], vec![cx(br, bi)])
    }

    #[test]
    fn interior_point() {
        let m = classify_point(&unit_spec(), pt(1.0, 0.0, 0.0), &Tolerances::default());
        assert_eq!((m.ak[0], m.bk[0].norm(), m.fk[0]), (1.0, 0.0, 1.0));
        assert!(m.in_image && m.stratum.wall.is_empty());
    }

    #[test]
    fn wall_point() {
        let m = classify_point(&unit_spec(), pt(1.0, 1.0, 0.0), &Tolerances::default());
        assert_eq!(m.fk[0], 0.0);
        assert!(m.in_image);
        assert_eq!(m.stratum.wall, vec![0]);
        assert!(m.stratum.vertex.is_empty());
    }

    #[test]
    fn vertex_point() {
        let m = classify_point(&unit_spec(), pt(0.0, 0.0, 0.0), &Tolerances::default());
        assert_eq!(m.stratum, Stratum { vertex: vec![0], wall: vec![0] });
    }

    #[test]
    fn exterior_point() {
        let m = classify_point(&unit_spec(), pt(0.5, 1.0, 0.0), &Tolerances::default());
        assert!(!m.in_image);
        assert!((m.violation() - 0.5).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn factored_f_agrees(a in -3.0f64..3.0, br in -3.0f64..3.0, bi in -3.0f64..3.0) {
            let spec = QuotientSpec::homogeneous(1, vec![vec![2], vec![-1]]).unwrap();
            let m = classify_point(&spec, pt(a, br, bi), &Tolerances::default());
            for k in 0..2 {
                let direct = m.ak[k] * m.ak[k] - m.bk[k].norm_sqr();
                proptest::prop_assert!((direct - m.fk[k]).abs() <= 1e-12 * (1.0 + direct.abs()));
                if m.in_image {
                    proptest::prop_assert!(m.fk[k] >= -1e-9 * (1.0 + m.ak[k].abs()));
                }
            }
        }
    }
}
