//! The flat model on `R^{4d}` and the structure induced on a horizontal
//! frame of the quotient.
//!
//! Real coordinates are `(Re z_k, Im z_k, Re w_k, Im w_k)` per index.

use serde::Serialize;

use super::{lift, LevelSetPoint};
use crate::cone::{classify_point, wstratum_probe, ProbeBudget, ProbeOutcome};
use crate::error::{Error, Result};
use crate::lattice::QuotientSpec;
use crate::linalg::Matrix;
use crate::scalar::{cx, Cx, Real};
use crate::tolerance::Tolerances;

/// `I(z, w) = (i z, -i w)`.
pub fn op_i<T: Real>(d: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(4 * d, 4 * d);
    for k in 0..d {
        let o = 4 * k;
        m[(o, o + 1)] = -T::one();
        m[(o + 1, o)] = T::one();
        m[(o + 2, o + 3)] = T::one();
        m[(o + 3, o + 2)] = -T::one();
    }
    m
}

/// `S(z, w) = (w, z)`.
pub fn op_s<T: Real>(d: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(4 * d, 4 * d);
    for k in 0..d {
        let o = 4 * k;
        for j in 0..2 {
            m[(o + j, o + 2 + j)] = T::one();
            m[(o + 2 + j, o + j)] = T::one();
        }
    }
    m
}

pub fn op_t<T: Real>(d: usize) -> Matrix<T> {
    op_i::<T>(d).mul(&op_s(d))
}

/// `g = Re sum (dz dz-bar - dw dw-bar)`.
pub fn metric<T: Real>(d: usize) -> Matrix<T> {
    Matrix::from_fn(4 * d, 4 * d, |i, j| {
        if i != j {
            T::zero()
        } else if i % 4 < 2 {
            T::one()
        } else {
            -T::one()
        }
    })
}

/// `sigma(z, w) = (conj w, conj z)` as a real matrix.
pub fn op_sigma<T: Real>(d: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(4 * d, 4 * d);
    for k in 0..d {
        let o = 4 * k;
        m[(o, o + 2)] = T::one();
        m[(o + 1, o + 3)] = -T::one();
        m[(o + 2, o)] = T::one();
        m[(o + 3, o + 1)] = -T::one();
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    I,
    S,
    T,
}

/// The 2-forms written via `dz_k`, `dw_k`:
/// `omega_I = (1/2i) sum (dz dz-bar + dw dw-bar)`,
/// `omega_S = (1/2) sum (dz dw-bar - dw dz-bar)`,
/// `omega_T = (1/2i) sum (dz dw-bar + dw dz-bar)` (wedges).
pub fn form<T: Real>(d: usize, which: Form) -> Matrix<T> {
    let dz = |k: usize, x: usize| -> Cx<T> {
        match x.checked_sub(4 * k) {
            Some(0) => cx(T::one(), T::zero()),
            Some(1) => cx(T::zero(), T::one()),
            _ => cx(T::zero(), T::zero()),
        }
    };
    let dw = |k: usize, x: usize| -> Cx<T> {
        match x.checked_sub(4 * k) {
            Some(2) => cx(T::one(), T::zero()),
            Some(3) => cx(T::zero(), T::one()),
            _ => cx(T::zero(), T::zero()),
        }
    };
    // (alpha ^ beta)(X, Y) = alpha(X) beta(Y) - alpha(Y) beta(X)
    let wedge = |ax: Cx<T>, ay: Cx<T>, bx: Cx<T>, by: Cx<T>| ax * by - ay * bx;
    let half = T::lit(0.5);
    let inv2i = cx(T::zero(), -half);
    Matrix::from_fn(4 * d, 4 * d, |i, j| {
        let mut s = cx(T::zero(), T::zero());
        for k in 0..d {
            let (zi, zj, wi, wj) = (dz(k, i), dz(k, j), dw(k, i), dw(k, j));
            s = s + match which {
                Form::I => (wedge(zi, zj, zi.conj(), zj.conj()) + wedge(wi, wj, wi.conj(), wj.conj())) * inv2i,
                Form::S => (wedge(zi, zj, wi.conj(), wj.conj()) - wedge(wi, wj, zi.conj(), zj.conj())) * half,
                Form::T => (wedge(zi, zj, wi.conj(), wj.conj()) + wedge(wi, wj, zi.conj(), zj.conj())) * inv2i,
            };
        }
        s.re
    })
}

/// Killing fields `(i theta z, i theta w)` of the kernel basis, as columns.
fn killing_fields<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>) -> Vec<Vec<T>> {
    spec.kernel()
        .basis_as::<T>()
        .iter()
        .map(|nu| {
            let mut v = Vec::with_capacity(4 * spec.d());
            for k in 0..spec.d() {
                let (z, w) = (p.z[k], p.w[k]);
                v.extend([-nu[k] * z.im, nu[k] * z.re, -nu[k] * w.im, nu[k] * w.re]);
            }
            v
        })
        .collect()
}

/// Jacobian of the `n*`-valued moment map, `3(d - n)` rows.
fn moment_jacobian<T: Real>(spec: &QuotientSpec, p: &LevelSetPoint<T>) -> Matrix<T> {
    let basis = spec.kernel().basis_as::<T>();
    let mut rows = Vec::new();
    for nu in &basis {
        let mut ri = Vec::with_capacity(4 * spec.d());
        let mut rs = ri.clone();
        let mut rt = ri.clone();
        for k in 0..spec.d() {
            let (zr, zi, wr, wi) = (p.z[k].re, p.z[k].im, p.w[k].re, p.w[k].im);
            let c = nu[k];
            ri.extend([c * zr, c * zi, c * wr, c * wi]);
            // mu_S = Re(i z w-bar), mu_T = Im(i z w-bar)
            rs.extend([c * wi, -c * wr, -c * zi, c * zr]);
            rt.extend([c * wr, c * wi, c * zr, c * zi]);
        }
        rows.extend([ri, rs, rt]);
    }
    if rows.is_empty() {
        return Matrix::zeros(0, 4 * spec.d());
    }
    Matrix::from_rows(&rows)
}

fn restrict<T: Real>(frame: &Matrix<T>, m: &Matrix<T>) -> Matrix<T> {
    frame.transpose().mul(m).mul(frame)
}

/// Matrix of `A` on the frame, with `g`-orthogonal projection back onto it.
fn restrict_operator<T: Real>(frame: &Matrix<T>, gram: &Matrix<T>, ga: &Matrix<T>) -> Matrix<T> {
    let rhs = restrict(frame, ga);
    let r = frame.cols();
    let cols: Vec<Vec<T>> = (0..r).map(|j| gram.lstsq(&rhs.column(j))).collect();
    Matrix::from_columns(r, &cols)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgebraResiduals {
    pub i_squared: f64,
    pub s_squared: f64,
    pub anticommute: f64,
    pub t_product: f64,
    /// Largest mismatch between the restricted forms and `g` composed with the operators.
    pub forms: f64,
}

impl AlgebraResiduals {
    pub fn max(&self) -> f64 {
        [self.i_squared, self.s_squared, self.anticommute, self.t_product, self.forms]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct InducedStructure<T> {
    /// Orthonormal columns in `R^{4d}` spanning the horizontal space.
    pub frame: Matrix<T>,
    pub g: Matrix<T>,
    pub i_op: Matrix<T>,
    pub s_op: Matrix<T>,
    pub t_op: Matrix<T>,
    pub omega_i: Matrix<T>,
    pub omega_s: Matrix<T>,
    pub omega_t: Matrix<T>,
    /// Numbers of positive and negative eigenvalues of `g`.
    pub signature: (usize, usize),
    pub residuals: AlgebraResiduals,
}

/// Restrict the flat structure to `ker dmu ∩ G^perp` at `p`.
pub fn induced_structure<T: Real>(
    spec: &QuotientSpec,
    p: &LevelSetPoint<T>,
    tol: &Tolerances<T>,
) -> Result<InducedStructure<T>> {
    let (n, d) = (spec.n(), spec.d());
    let m = d - n;
    let jac = moment_jacobian(spec, p);
    let tangent = jac.nullspace(T::lit(1e-10));
    if tangent.cols() != 4 * d - 3 * m {
        return Err(Error::Validation(format!(
            "moment map not submersive here: tangent dimension {} instead of {}",
            tangent.cols(),
            4 * d - 3 * m
        )));
    }
    let g = metric::<T>(d);
    let frame = if m == 0 {
        tangent
    } else {
        let xs = killing_fields(spec, p);
        let xmat = Matrix::from_columns(4 * d, &xs);
        let c = xmat.transpose().mul(&g).mul(&tangent).nullspace(tol.rank);
        tangent.mul(&c)
    };
    if frame.cols() != 4 * n {
        return Err(Error::DegenerateHere);
    }
    let gram = restrict(&frame, &g);
    let svd = gram.svd();
    if svd.sigma_min() <= tol.rank * svd.sigma_max() {
        return Err(Error::DegenerateHere);
    }
    let (ii, ss, tt) = (op_i::<T>(d), op_s::<T>(d), op_t::<T>(d));
    let i_op = restrict_operator(&frame, &gram, &g.mul(&ii));
    let s_op = restrict_operator(&frame, &gram, &g.mul(&ss));
    let t_op = restrict_operator(&frame, &gram, &g.mul(&tt));
    let omega_i = restrict(&frame, &form(d, Form::I));
    let omega_s = restrict(&frame, &form(d, Form::S));
    let omega_t = restrict(&frame, &form(d, Form::T));

    let id = Matrix::<T>::identity(4 * n);
    let f = |m: Matrix<T>| m.max_abs().to_f64_lossy();
    let is = i_op.mul(&s_op);
    // omega_A(X, Y) = g(X, A Y) for A = I, S, T
    let forms = f(omega_i.sub(&gram.mul(&i_op)))
        .max(f(omega_s.sub(&gram.mul(&s_op))))
        .max(f(omega_t.sub(&gram.mul(&t_op))));
    let residuals = AlgebraResiduals {
        i_squared: f(i_op.mul(&i_op).add(&id)),
        s_squared: f(s_op.mul(&s_op).sub(&id)),
        anticommute: f(is.add(&s_op.mul(&i_op))),
        t_product: f(t_op.sub(&is)),
        forms,
    };
    let eig = gram.symmetric_eigen();
    let pos = eig.values.iter().filter(|&&v| v > T::zero()).count();
    Ok(InducedStructure {
        frame,
        signature: (pos, 4 * n - pos),
        g: gram,
        i_op,
        s_op,
        t_op,
        omega_i,
        omega_s,
        omega_t,
        residuals,
    })
}

/// `max` over the three forms of `|(sigma F)^T omega (sigma F) + F^T omega F|`.
pub fn involution_pullback_residual<T: Real>(d: usize, frame: &Matrix<T>) -> T {
    let sf = op_sigma::<T>(d).mul(frame);
    [Form::I, Form::S, Form::T]
        .into_iter()
        .map(|w| {
            let om = form::<T>(d, w);
            restrict(&sf, &om).add(&restrict(frame, &om)).max_abs()
        })
        .fold(T::zero(), T::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedOrbitWitness {
    /// `(a, Re b, Im b)` on every wall.
    pub point: Vec<f64>,
    /// `max_k ||z_k| - |w_k||` of the lift.
    pub modulus_gap: f64,
    /// Dimension of the tangent space of the fixed set inside the level set.
    pub tangent_dim: usize,
    /// Largest entry of the three forms restricted to that tangent space.
    pub form_residual: f64,
}

/// Looks for a point of `K` on every wall; such points lift to orbits fixed
/// by the involution.
pub fn involution_fixed_probe<T: Real>(
    spec: &QuotientSpec,
    seed: u64,
    budget: ProbeBudget,
    tol: &Tolerances<T>,
) -> Option<FixedOrbitWitness> {
    let all: Vec<usize> = (0..spec.d()).collect();
    let ProbeOutcome::Found(pt) = wstratum_probe(spec, &all, seed, budget, tol) else {
        return None;
    };
    let m = classify_point(spec, pt, tol);
    let sheet = vec![0i8; spec.d()];
    let p = lift(spec, &m, &sheet, None).ok()?;
    let gap = p.z.iter().zip(&p.w).fold(T::zero(), |g, (z, w)| g.max((z.norm() - w.norm()).abs()));
    let d = spec.d();
    let fixed = op_sigma::<T>(d).sub(&Matrix::identity(4 * d));
    let tangent = moment_jacobian(spec, &p).vstack(&fixed).nullspace(T::lit(1e-10));
    let form_residual = [Form::I, Form::S, Form::T]
        .into_iter()
        .map(|w| restrict(&tangent, &form::<T>(d, w)).max_abs())
        .fold(T::zero(), T::max);
    Some(FixedOrbitWitness {
        point: m.point.to_vec().iter().map(|x| x.to_f64_lossy()).collect(),
        modulus_gap: gap.to_f64_lossy(),
        tangent_dim: tangent.cols(),
        form_residual: form_residual.to_f64_lossy(),
    })
}
