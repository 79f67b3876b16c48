//! Gaussian curvature of the surface `w_1 = 0 = w_2` in the two-index example.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The closed form quoted for the surface metric: `-1/(2r^2+1)^3` at `c1 = 1`,
/// extended to other `c1 > 0` by the scaling `r -> r/sqrt(c1)`, `K -> K/c1`.
pub fn surface_curvature_d2<T: Real>(c1: T, r: T) -> T {
    let two = T::lit(2.0);
    -(c1 * c1) / (c1 + two * r * r).powi(3)
}

/// Curvature of `E dr^2 + G dpsi^2` with the coefficients of
/// [`d2_surface_metric`], in closed form: `4 c1^2 / (c1 + 2 r^2)^3`.
pub fn surface_curvature_d2_metric<T: Real>(c1: T, r: T) -> T {
    let two = T::lit(2.0);
    T::lit(4.0) * c1 * c1 / (c1 + two * r * r).powi(3)
}

/// `(E, G)` with `E = (2r^2 + c1)/(r^2 + c1)`, `G = r^2 (r^2 + c1)/(2r^2 + c1)`.
pub fn d2_surface_metric<T: Real>(c1: T) -> (impl Fn(T) -> T, impl Fn(T) -> T) {
    let two = T::lit(2.0);
    let e = move |r: T| (two * r * r + c1) / (r * r + c1);
    let g = move |r: T| r * r * (r * r + c1) / (two * r * r + c1);
    (e, g)
}

/// `K = -1/(2 sqrt(EG)) d/dr (G_r / sqrt(EG))` from central differences of step `h`.
fn curvature_raw<T: Real>(e: &impl Fn(T) -> T, g: &impl Fn(T) -> T, r: T, h: T) -> T {
    let two = T::lit(2.0);
    let (ev, gv) = (e(r), g(r));
    let ep = (e(r + h) - e(r - h)) / (two * h);
    let gp = (g(r + h) - g(r - h)) / (two * h);
    let gpp = (g(r + h) - two * gv + g(r - h)) / (h * h);
    let w = (ev * gv).sqrt();
    let dw = (ep * gv + ev * gp) / (two * w);
    -(gpp * w - gp * dw) / (two * w * w * w)
}

/// Richardson combination of steps `h` and `2h`; the error estimate
/// compares it with the combination of `2h` and `4h`.
fn curvature_at<T: Real>(e: &impl Fn(T) -> T, g: &impl Fn(T) -> T, r: T, h: T) -> (T, T) {
    let two = T::lit(2.0);
    let k: Vec<T> = (0..3).map(|i| curvature_raw(e, g, r, h * two.powi(i))).collect();
    let r1 = k[0] + (k[0] - k[1]) / T::lit(3.0);
    let r2 = k[1] + (k[1] - k[2]) / T::lit(3.0);
    (r1, (r1 - r2).abs() / T::lit(15.0))
}

/// Finite-difference Gaussian curvature of the diagonal metric
/// `E(r) dr^2 + G(r) dpsi^2`, Richardson-extrapolated in the step. At
/// `r = 0`, where polar coordinates are singular, values at
/// `r = 0.1 / 2^i` are extrapolated to zero as a polynomial in `r^2`.
///
/// Fails with `StepTooLarge` when the error estimate exceeds `tol`.
pub fn gaussian_curvature_fd<T: Real>(
    e: impl Fn(T) -> T,
    g: impl Fn(T) -> T,
    r: T,
    step: T,
    tol: T,
) -> Result<T> {
    let two = T::lit(2.0);
    let (value, est) = if r == T::zero() {
        let levels = 5;
        let rho: Vec<T> = (0..levels).map(|i| T::lit(0.1) / two.powi(i as i32)).collect();
        let mut est = T::zero();
        // Neville table in x = r^2, evaluated at x = 0
        let mut p: Vec<T> = rho
            .iter()
            .map(|&x| {
                let (k, e1) = curvature_at(&e, &g, x, step.min(x / T::lit(16.0)));
                est = est.max(e1);
                k
            })
            .collect();
        for m in 1..levels {
            if m == levels - 1 {
                let prev = p[1];
                let (x0, x1) = (rho[0] * rho[0], rho[m] * rho[m]);
                p[0] = (x0 * p[1] - x1 * p[0]) / (x0 - x1);
                est = est.max((p[0] - prev).abs());
                break;
            }
            for i in 0..levels - m {
                let (xi, xj) = (rho[i] * rho[i], rho[i + m] * rho[i + m]);
                p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
            }
        }
        (p[0], est)
    } else {
        curvature_at(&e, &g, r, step.min(r / T::lit(16.0)))
    };
    if !(est <= tol) {
        return Err(Error::StepTooLarge { estimate: est.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    Ok(value)
}
