//! Independent degeneracy test on lifted points, through the quadratic form
//! `q = diag(|z_k|^2 - |w_k|^2)` restricted to the Lie algebra of `N`.

use serde::Serialize;

use super::LevelSetPoint;
use crate::lattice::QuotientSpec;
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Gram matrix of `q` on the integer kernel basis.
pub fn q_restricted<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>) -> Matrix<T> {
    let basis = spec.kernel().basis_as::<T>();
    let q = p.q();
    let m = basis.len();
    Matrix::from_fn(m, m, |i, j| (0..spec.d()).fold(T::zero(), |s, k| s + basis[i][k] * q[k] * basis[j][k]))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QOracle<T> {
    pub degenerate: bool,
    /// Smallest `|eigenvalue|` of [`q_restricted`]; infinite for trivial `N`.
    pub min_abs_eigenvalue: T,
    /// Least-squares solution, `max |zeta_k| = 1`.
    pub zeta: Vec<T>,
    pub s: Vec<T>,
    /// `max_k |zeta_k q_k - <s,u_k>|`.
    pub residual: T,
}

/// Solvability of `zeta_k q_k = <s, u_k>` with `0 != zeta` in the Lie algebra
/// of `N`, via the right singular vector of `[diag(q) B | -U^T]`.
pub fn q_solvability<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>, tol: &Tolerances<T>) -> QOracle<T> {
    let (n, d) = (spec.n(), spec.d());
    let basis = spec.kernel().basis_as::<T>();
    let m = basis.len();
    let min_abs_eigenvalue = if m == 0 {
        T::infinity()
    } else {
        q_restricted(spec, p).symmetric_eigen().values.iter().fold(T::infinity(), |a, v| a.min(v.abs()))
    };
    if m == 0 {
        return QOracle { degenerate: false, min_abs_eigenvalue, zeta: vec![T::zero(); d], s: vec![T::zero(); n], residual: T::infinity() };
    }
    let q = p.q();
    let u: Vec<Vec<T>> = (0..d).map(|k| spec.u_as::<T>(k)).collect();
    let g = Matrix::from_fn(d, m + n, |k, j| if j < m { q[k] * basis[j][k] } else { -u[k][j - m] });
    let svd = g.svd();
    let v = svd.v.column(m + n - 1);
    let mut zeta: Vec<T> = (0..d).map(|k| (0..m).fold(T::zero(), |s, j| s + v[j] * basis[j][k])).collect();
    let mut s: Vec<T> = v[m..].to_vec();
    let z = zeta.iter().fold(T::zero(), |a, x| a.max(x.abs()));
    if z > T::zero() {
        for x in zeta.iter_mut().chain(s.iter_mut()) {
            *x = *x / z;
        }
    }
    let residual = if z > T::zero() {
        (0..d).fold(T::zero(), |r, k| {
            let su = u[k].iter().zip(&s).fold(T::zero(), |a, (&x, &y)| a + x * y);
            r.max((zeta[k] * q[k] - su).abs())
        })
    } else {
        T::infinity()
    };
    QOracle { degenerate: residual <= tol.deg, min_abs_eigenvalue, zeta, s, residual }
}
