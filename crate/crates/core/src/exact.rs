//! Exact integer and rational linear algebra.
//!
//! Everything here is arbitrary precision. Matrices are small (dimensions
//! of a dozen or so), so the algorithms are the textbook ones: Gauss-Jordan
//! elimination over Q and Smith normal form by pivot-on-minimal-entry
//! row/column reduction over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn rat_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dense row-major matrix over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_int_columns(n: usize, cols: &[Vec<i64>]) -> Self {
        Self::from_fn(n, cols.len(), |i, j| rat_int(cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Rational::zero(), |acc, j| acc + &self[(i, j)] * &v[j])
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self[(row, col)].recip();
            for j in col..self.cols {
                let v = &self[(row, j)] * &inv;
                self[(row, j)] = v;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let f = self[(r, col)].clone();
                    for j in col..self.cols {
                        let v = &self[(r, j)] - &f * &self[(row, j)];
                        self[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = rhs`, if the system is consistent.
    pub fn solve(&self, rhs: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                rhs[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// `n x cols.len()` matrix whose j-th column is `cols[j]`.
    pub fn from_int_columns(n: usize, cols: &[Vec<i64>]) -> Self {
        Self::from_fn(n, cols.len(), |i, j| BigInt::from(cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        IntMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(BigInt::zero(), |acc, k| acc + &self[(i, k)] * &other[(k, j)])
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(BigInt::zero(), |acc, j| acc + &self[(i, j)] * &v[j]))
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * f;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * f;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `left * a * right = diag`, with `left`, `right`
/// unimodular and `diag[i] | diag[i + 1]`.
#[derive(Clone, Debug)]
pub struct SmithNormalForm {
    /// Nonzero diagonal entries, all positive; length is the rank.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithNormalForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithNormalForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot on the entry of least absolute value in the trailing block
        let Some((pi, pj)) = min_abs_entry(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        left.swap_rows(t, pi);
        d.swap_cols(t, pj);
        right.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                left.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &q);
                right.add_col(j, t, &q);
                if !d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder exists in row/column t: move it to the pivot
                let (pi, pj) = min_abs_in_cross(&d, t);
                d.swap_rows(t, pi);
                left.swap_rows(t, pi);
                d.swap_cols(t, pj);
                right.swap_cols(t, pj);
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    left.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }
    let diagonal = (0..t).map(|i| d[(i, i)].clone()).collect();
    SmithNormalForm {
        diagonal,
        left,
        right,
    }
}

fn min_abs_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            if d[(i, j)].is_zero() {
                continue;
            }
            if best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_abs_in_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let cells = (t..d.rows).map(|i| (i, t)).chain((t..d.cols).map(|j| (t, j)));
    for (i, j) in cells {
        if d[(i, j)].is_zero() {
            continue;
        }
        if d[best].is_zero() || d[(i, j)].abs() < d[best].abs() {
            best = (i, j);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_cols(n: usize, cols: &[&[i64]]) -> IntMatrix {
        let v: Vec<Vec<i64>> = cols.iter().map(|c| c.to_vec()).collect();
        IntMatrix::from_int_columns(n, &v)
    }

    fn check_snf(a: &IntMatrix) -> SmithNormalForm {
        let snf = smith_normal_form(a);
        let prod = snf.left.mul(a).mul(&snf.right);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let expect = if i == j && i < snf.rank() {
                    snf.diagonal[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(prod[(i, j)], expect, "entry ({i},{j})");
            }
        }
        for w in snf.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        snf
    }

    #[test]
    fn snf_of_row_vector() {
        let snf = check_snf(&int_cols(1, &[&[2], &[4]]));
        assert_eq!(snf.diagonal, vec![BigInt::from(2)]);
    }

    #[test]
    fn snf_classic_example() {
        // diag(2, 6, 12) up to unimodular change of basis
        let a = IntMatrix::from_fn(3, 3, |i, j| {
            BigInt::from([[2, 4, 4], [-6, 6, 12], [10, -4, -16]][i][j])
        });
        let snf = check_snf(&a);
        let diag: Vec<i64> = snf.diagonal.iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(diag, vec![2, 6, 12]);
    }

    #[test]
    fn snf_rank_deficient() {
        let snf = check_snf(&int_cols(2, &[&[1, 1], &[2, 2], &[3, 3]]));
        assert_eq!(snf.rank(), 1);
    }

    #[test]
    fn rational_nullspace_and_solve() {
        let m = RatMatrix::from_int_columns(2, &[vec![1, 0], vec![0, 1], vec![-1, -1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
        assert_eq!(m.rank(), 2);
        let x = m.solve(&[rat(1, 2), rat(3, 1)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![rat(1, 2), rat(3, 1)]);
        let singular = RatMatrix::from_int_columns(2, &[vec![1, 1], vec![2, 2]]);
        assert!(singular.solve(&[rat(1, 1), rat(0, 1)]).is_none());
    }

    proptest::proptest! {
        #[test]
        fn snf_identity_holds(entries in proptest::collection::vec(-6i64..=6, 12)) {
            let a = IntMatrix::from_fn(3, 4, |i, j| BigInt::from(entries[i * 4 + j]));
            let snf = check_snf(&a);
            let r = RatMatrix::from_fn(3, 4, |i, j| rat_int(entries[i * 4 + j])).rank();
            proptest::prop_assert_eq!(snf.rank(), r);
        }
    }
}
