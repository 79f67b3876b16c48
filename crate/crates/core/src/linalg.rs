//! Small dense floating-point linear algebra.
//!
//! One-sided Jacobi SVD and cyclic Jacobi for symmetric eigenproblems.
//! Both are accurate to working precision on the tiny, often
//! rank-deficient matrices the geometry produces, which is what matters here.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Stack `self` above `other`.
    pub fn vstack(&self, other: &Self) -> Self {
        if self.rows == 0 {
            return other.clone();
        }
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn svd(&self) -> Svd<T> {
        svd(self)
    }

    /// Basis (orthonormal columns) of the right null space, using the
    /// threshold `rel * sigma_max` (absolute `rel` when the matrix is zero).
    pub fn nullspace(&self, rel: T) -> Matrix<T> {
        if self.rows == 0 {
            return Matrix::identity(self.cols);
        }
        let s = self.svd();
        let thresh = rel * s.sigma_max().max(T::one());
        let keep: Vec<usize> = (0..self.cols)
            .filter(|&j| s.sigma.get(j).map_or(true, |&x| x <= thresh))
            .collect();
        Matrix::from_fn(self.cols, keep.len(), |i, j| s.v[(i, keep[j])])
    }

    pub fn rank(&self, rel: T) -> usize {
        self.cols - self.nullspace(rel).cols
    }

    /// Minimum-norm least-squares solution of `self * x = b`.
    pub fn lstsq(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.rows);
        let s = self.svd();
        let eps = T::epsilon() * T::lit(self.rows.max(self.cols) as f64) * s.sigma_max();
        let mut x = vec![T::zero(); self.cols];
        for (j, &sig) in s.sigma.iter().enumerate() {
            if sig <= eps {
                continue;
            }
            let ub: T = (0..self.rows).fold(T::zero(), |acc, i| acc + s.u[(i, j)] * b[i]);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = *xi + s.v[(i, j)] * ub / sig;
            }
        }
        x
    }

    pub fn symmetric_eigen(&self) -> SymEigen<T> {
        symmetric_eigen(self)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin SVD `a = u * diag(sigma) * v^T`, singular values sorted descending.
/// `v` is always a full `cols x cols` orthogonal matrix; columns of `u`
/// beyond the rank are zero.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub sigma: Vec<T>,
    pub v: Matrix<T>,
}

impl<T: Real> Svd<T> {
    pub fn sigma_max(&self) -> T {
        self.sigma.first().copied().unwrap_or(T::zero())
    }

    /// Smallest singular value, counting missing columns (`rows < cols`) as zero.
    pub fn sigma_min(&self) -> T {
        if self.sigma.len() < self.v.cols() {
            T::zero()
        } else {
            self.sigma.last().copied().unwrap_or(T::zero())
        }
    }
}

fn svd<T: Real>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows, a.cols);
    let mut w = a.clone();
    let mut v = Matrix::<T>::identity(n);
    let tol = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    alpha = alpha + w[(i, p)] * w[(i, p)];
                    beta = beta + w[(i, q)] * w[(i, q)];
                    gamma = gamma + w[(i, p)] * w[(i, q)];
                }
                if gamma == T::zero() || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (x, y) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * x - s * y;
                    w[(i, q)] = s * x + c * y;
                }
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * x - s * y;
                    v[(i, q)] = s * x + c * y;
                }
            }
        }
        if off <= tol {
            break;
        }
    }
    let mut norms: Vec<(T, usize)> = (0..n)
        .map(|j| {
            let s = (0..m).fold(T::zero(), |acc, i| acc + w[(i, j)] * w[(i, j)]).sqrt();
            (s, j)
        })
        .collect();
    norms.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    let k = m.min(n);
    let mut u = Matrix::zeros(m, k);
    let mut vs = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(k);
    for (new, &(s, old)) in norms.iter().enumerate() {
        for i in 0..n {
            vs[(i, new)] = v[(i, old)];
        }
        if new < k {
            sigma.push(s);
            if s > T::zero() {
                for i in 0..m {
                    u[(i, new)] = w[(i, old)] / s;
                }
            }
        }
    }
    Svd { u, sigma, v: vs }
}

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending,
/// eigenvectors are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

fn symmetric_eigen<T: Real>(a: &Matrix<T>) -> SymEigen<T> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    let mut v = Matrix::<T>::identity(n);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + m[(i, j)] * m[(i, j)]);
        let scale = m.max_abs().max(T::min_positive_value());
        if off.sqrt() <= T::epsilon() * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[(p, q)] == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * m[(p, q)]);
                let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * x - s * y;
                    m[(k, q)] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * x - s * y;
                    m[(q, k)] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * x - s * y;
                    v[(k, q)] = s * x + c * y;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    SymEigen {
        values: order.iter().map(|&i| m[(i, i)]).collect(),
        vectors: Matrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd<f64>) -> Matrix<f64> {
        let k = s.sigma.len();
        Matrix::from_fn(s.u.rows(), s.v.rows(), |i, j| {
            (0..k).map(|l| s.u[(i, l)] * s.sigma[l] * s.v[(j, l)]).sum()
        })
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let a = Matrix::<f64>::from_rows(&[vec![3.0, 1.0, 2.0], vec![0.0, -1.0, 4.0]]);
        let s = a.svd();
        assert!(s.sigma[0] >= s.sigma[1]);
        assert!(reconstruct(&s).sub(&a).max_abs() < 1e-12);
        let vtv = s.v.transpose().mul(&s.v);
        assert!(vtv.sub(&Matrix::identity(3)).max_abs() < 1e-12);
        assert_eq!(a.nullspace(1e-10).cols(), 1);
    }

    #[test]
    fn rank_deficient_nullspace() {
        let a = Matrix::<f64>::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![1.0, 0.0, 1.0]]);
        let ns = a.nullspace(1e-10);
        assert_eq!(ns.cols(), 1);
        let r = a.mul_vec(&ns.column(0));
        assert!(r.iter().all(|x| x.abs() < 1e-12));
        assert_eq!(a.rank(1e-10), 2);
    }

    #[test]
    fn lstsq_solves_consistent_system() {
        let a = Matrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![1.0, -1.0], vec![2.0, 0.0]]);
        let x = a.lstsq(&[3.0, 1.0, 4.0]);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_eigen_diagonalizes() {
        let a = Matrix::<f64>::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, -1.0]]);
        let e = a.symmetric_eigen();
        let expect = [-1.0, 1.0, 3.0];
        for (x, y) in e.values.iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
        let d = e.vectors.transpose().mul(&a).mul(&e.vectors);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { expect[i] } else { 0.0 };
                assert!((d[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn works_in_single_precision() {
        let a = Matrix::<f32>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(a.rank(1e-5), 1);
    }
}
