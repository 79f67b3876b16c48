use num_complex::Complex;

use crate::cone::MomentImagePoint;
use crate::error::Result;
use crate::exact::rat;
use crate::lattice::QuotientSpec;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Number of points of `M` over a point of `K`: `2^m`, `m` the number of
/// strict inequalities `a_k > |b_k|`; zero off `K`.
pub fn fiber_cardinality<T: Real>(spec: &QuotientSpec, point: &MomentImagePoint<T>, tol: &Tolerances<T>) -> u64 {
    debug_assert_eq!(point.d(), spec.d());
    if !point.in_image {
        return 0;
    }
    let m = point
        .ak
        .iter()
        .zip(&point.bk)
        .filter(|(&a, b)| a - b.norm() > tol.mem)
        .count();
    1u64 << m
}

/// The `2d` vectors `(u_k, e_k)` and `(0, -e_k)` in `Z^{n+d}` describing
/// the diagonal image of `N` in `T^{2d}`, with all level constants zero.
pub fn toric_embedding(spec: &QuotientSpec) -> Result<QuotientSpec> {
    let (n, d) = (spec.n(), spec.d());
    let mut cols = Vec::with_capacity(2 * d);
    for k in 0..d {
        let mut v = spec.u(k).to_vec();
        v.extend((0..d).map(|j| i64::from(j == k)));
        cols.push(v);
    }
    for k in 0..d {
        let mut v = vec![0i64; n];
        v.extend((0..d).map(|j| -i64::from(j == k)));
        cols.push(v);
    }
    QuotientSpec::new(
        n + d,
        cols,
        vec![rat(0, 1); 2 * d],
        vec![Complex::new(rat(0, 1), rat(0, 1)); 2 * d],
    )
}
