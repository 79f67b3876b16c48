//! Numerical geometry on the level set `mu^{-1}(0)` in `C^{d,d}`.

pub mod curvature;
pub mod fiber;
pub mod frame;
pub mod locus;
pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::{MomentImagePoint, Point};
use crate::error::{Error, Result};
use crate::lattice::QuotientSpec;
use crate::linalg::Matrix;
use crate::scalar::{cx, Cx, Real};

pub use curvature::{d2_surface_metric, gaussian_curvature_fd, surface_curvature_d2, surface_curvature_d2_metric};
pub use fiber::brute_force_fiber;
pub use frame::{induced_structure, involution_fixed_probe, AlgebraResiduals, FixedOrbitWitness, InducedStructure};
pub use locus::{locus_csv, write_locus_csv};
pub use oracle::{q_restricted, q_solvability, QOracle};

/// A point `(z, w)` of `C^d x C^d` produced by [`lift`].
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSetPoint<T> {
    pub z: Vec<Cx<T>>,
    pub w: Vec<Cx<T>>,
    pub residual_i: T,
    pub residual_c: T,
    /// `+1`/`-1` on strict indices, `0` on walls.
    pub sheet: Vec<i8>,
}

impl<T: Real> LevelSetPoint<T> {
    /// Wraps raw coordinates; residuals are filled in by [`moment_residual`].
    pub fn from_coords(spec: &QuotientSpec, z: Vec<Cx<T>>, w: Vec<Cx<T>>) -> Self {
        let mut p = Self { z, w, residual_i: T::zero(), residual_c: T::zero(), sheet: Vec::new() };
        let (ri, rc) = moment_residual(spec, &p);
        p.residual_i = ri;
        p.residual_c = rc;
        p.sheet = p
            .z
            .iter()
            .zip(&p.w)
            .map(|(z, w)| {
                let q = z.norm_sqr() - w.norm_sqr();
                if q < T::zero() {
                    1
                } else if q > T::zero() {
                    -1
                } else {
                    0
                }
            })
            .collect();
        p
    }

    pub fn d(&self) -> usize {
        self.z.len()
    }

    /// `q_k = |z_k|^2 - |w_k|^2`.
    pub fn q(&self) -> Vec<T> {
        self.z.iter().zip(&self.w).map(|(z, w)| z.norm_sqr() - w.norm_sqr()).collect()
    }

    /// Real coordinates `(Re z_k, Im z_k, Re w_k, Im w_k)` per index.
    pub fn to_real(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(4 * self.d());
        for (z, w) in self.z.iter().zip(&self.w) {
            v.extend([z.re, z.im, w.re, w.im]);
        }
        v
    }
}

/// Lift `point` to `mu^{-1}(0)`.
///
/// `sheet` has length `d`: `+1`/`-1` selects `|w_k|^2 = a_k +- sqrt(f_k)`
/// on strict indices, `0` means `+1` there and is required on walls.
/// With `gauge = Some(seed)` the canonical lift is moved by a random element
/// of `T^d`, which leaves the moment map unchanged.
pub fn lift<T: Real>(
    spec: &QuotientSpec,
    point: &MomentImagePoint<T>,
    sheet: &[i8],
    gauge: Option<u64>,
) -> Result<LevelSetPoint<T>> {
    if !point.in_image {
        return Err(Error::PointOutsideK { violation: point.violation().to_f64_lossy() });
    }
    let d = spec.d();
    if sheet.len() != d {
        return Err(Error::Dimension(format!("sheet has length {}, expected {d}", sheet.len())));
    }
    let mut z = vec![Cx::<T>::new(T::zero(), T::zero()); d];
    let mut w = z.clone();
    let mut used = vec![0i8; d];
    for k in 0..d {
        let (a, b) = (point.ak[k].max(T::zero()), point.bk[k]);
        let on_wall = point.stratum.wall.contains(&k);
        if on_wall && sheet[k] != 0 {
            return Err(Error::InvalidSheet { index: k });
        }
        if point.stratum.vertex.contains(&k) {
            continue;
        }
        let (zz, ww) = if on_wall {
            // equal moduli, so that z w-bar = -i b holds exactly
            (b.norm(), b.norm())
        } else {
            let sigma = if sheet[k] < 0 { -1 } else { 1 };
            used[k] = sigma;
            let big = a + point.fk[k].max(T::zero()).sqrt();
            let small = if big > T::zero() { b.norm_sqr() / big } else { T::zero() };
            if sigma > 0 {
                (small, big)
            } else {
                (big, small)
            }
        };
        if ww > T::zero() {
            let wk = ww.sqrt();
            w[k] = cx(wk, T::zero());
            // z w-bar = -i b
            z[k] = cx(b.im, -b.re) / wk;
        } else {
            z[k] = cx(zz.sqrt(), T::zero());
        }
    }
    if let Some(seed) = gauge {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..d {
            let t = T::lit(rng.gen_range(0.0..std::f64::consts::TAU));
            let ph = cx(t.cos(), t.sin());
            z[k] = z[k] * ph;
            w[k] = w[k] * ph;
        }
    }
    let mut p = LevelSetPoint::from_coords(spec, z, w);
    p.sheet = used;
    Ok(p)
}

/// Norms of the `n*`-components of `mu_I` and `mu_S + i mu_T` at `p`,
/// obtained by pairing the defects with the normalized kernel basis.
pub fn moment_residual<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>) -> (T, T) {
    let l1 = spec.lambda1_as::<T>();
    let lc = spec.lambda_c_as::<T>();
    let half = T::lit(0.5);
    let i = cx(T::zero(), T::one());
    let (mut ri, mut rc) = (T::zero(), T::zero());
    for nu in spec.kernel().basis_as::<T>() {
        let len = nu.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
        let mut di = T::zero();
        let mut dc = cx(T::zero(), T::zero());
        for k in 0..spec.d() {
            di = di + nu[k] * (half * (p.z[k].norm_sqr() + p.w[k].norm_sqr()) + l1[k]);
            dc = dc + (i * p.z[k] * p.w[k].conj() + lc[k]) * nu[k];
        }
        ri = ri + (di / len).powi(2);
        rc = rc + (dc / len).norm_sqr();
    }
    (ri.sqrt(), rc.sqrt())
}

/// The point `(a, b)` of `K` under `p`: least-squares solution of
/// `<a,u_k> = |z_k|^2/2 + |w_k|^2/2 + lambda_k`, `<b,u_k> = i z_k w_k-bar + lambda^c_k`.
pub fn moment_image<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>) -> Point<T> {
    let n = spec.n();
    let ut = Matrix::from_rows(&(0..spec.d()).map(|k| spec.u_as::<T>(k)).collect::<Vec<_>>());
    let l1 = spec.lambda1_as::<T>();
    let lc = spec.lambda_c_as::<T>();
    let half = T::lit(0.5);
    let i = cx(T::zero(), T::one());
    let ra: Vec<T> = (0..spec.d()).map(|k| half * (p.z[k].norm_sqr() + p.w[k].norm_sqr()) + l1[k]).collect();
    let rb: Vec<Cx<T>> = (0..spec.d()).map(|k| i * p.z[k] * p.w[k].conj() + lc[k]).collect();
    let a = ut.lstsq(&ra);
    let br = ut.lstsq(&rb.iter().map(|c| c.re).collect::<Vec<_>>());
    let bi = ut.lstsq(&rb.iter().map(|c| c.im).collect::<Vec<_>>());
    debug_assert_eq!(a.len(), n);
    Point::new(a, br.into_iter().zip(bi).map(|(r, i)| cx(r, i)).collect())
}

/// An element `theta` of the Lie algebra of `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KillingVector<T> {
    pub theta: Vec<T>,
}

impl<T: Real> KillingVector<T> {
    /// Checks `U theta = 0` to relative precision `1e-12`.
    pub fn new(spec: &QuotientSpec, theta: Vec<T>) -> Result<Self> {
        if theta.len() != spec.d() {
            return Err(Error::Dimension(format!("theta has length {}, expected {}", theta.len(), spec.d())));
        }
        let scale = theta.iter().fold(T::one(), |m, x| m.max(x.abs()));
        for i in 0..spec.n() {
            let r = (0..spec.d()).fold(T::zero(), |s, k| s + T::lit(spec.u(k)[i] as f64) * theta[k]);
            if r.abs() > T::lit(1e-12) * scale {
                return Err(Error::Validation("theta is not in the kernel of U".into()));
            }
        }
        Ok(Self { theta })
    }

    /// The `j`-th kernel basis vector.
    pub fn basis(spec: &QuotientSpec, j: usize) -> Self {
        Self { theta: spec.kernel().basis_as::<T>()[j].clone() }
    }
}

/// `g(X, X) = sum_k theta_k^2 (|z_k|^2 - |w_k|^2)` for the Killing field of `v`.
pub fn killing_norm<T: Real>(p: &LevelSetPoint<T>, v: &KillingVector<T>) -> T {
    p.q().iter().zip(&v.theta).fold(T::zero(), |s, (&q, &t)| s + t * t * q)
}

/// The involution `(z, w) -> (conj w, conj z)`.
pub fn involution_apply<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>) -> LevelSetPoint<T> {
    let z = p.w.iter().map(|x| x.conj()).collect();
    let w = p.z.iter().map(|x| x.conj()).collect();
    LevelSetPoint::from_coords(spec, z, w)
}
