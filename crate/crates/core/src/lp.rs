//! Exact rational feasibility LP (phase-one simplex, Bland's rule).

use num_traits::{Signed, Zero};

use crate::exact::{RatMatrix, Rational};

/// A point `y >= 0` with `a * y = b`, or `None` if the system is infeasible.
pub fn feasible_nonneg(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m);
    // tableau with artificials: [A | I | b], rows sign-normalized so b >= 0
    let width = n + m + 1;
    let mut t = RatMatrix::zeros(m + 1, width);
    for i in 0..m {
        let flip = b[i].is_negative();
        for j in 0..n {
            t[(i, j)] = if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() };
        }
        t[(i, n + i)] = Rational::from_integer(1.into());
        t[(i, width - 1)] = b[i].abs();
    }
    // objective row: minimize the sum of artificials, stored as reduced costs
    for j in 0..width {
        if j >= n && j < n + m {
            continue;
        }
        let s = (0..m).fold(Rational::zero(), |acc, i| acc + &t[(i, j)]);
        t[(m, j)] = -s;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: lowest-index column with negative reduced cost
        let Some(col) = (0..n + m).find(|&j| t[(m, j)].is_negative()) else {
            break;
        };
        let mut pivot: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[(i, col)].is_positive() {
                let ratio = &t[(i, width - 1)] / &t[(i, col)];
                let better = match &pivot {
                    None => true,
                    Some((pi, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*pi]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            // phase-one objective is bounded below by zero
            unreachable!("phase-one LP cannot be unbounded");
        };
        pivot_on(&mut t, row, col);
        basis[row] = col;
    }

    if !t[(m, width - 1)].is_zero() {
        return None;
    }
    let mut y = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            y[bv] = t[(i, width - 1)].clone();
        }
    }
    Some(y)
}

fn pivot_on(t: &mut RatMatrix, row: usize, col: usize) {
    let width = t.cols();
    let inv = t[(row, col)].recip();
    for j in 0..width {
        let v = &t[(row, j)] * &inv;
        t[(row, j)] = v;
    }
    for i in 0..t.rows() {
        if i != row && !t[(i, col)].is_zero() {
            let f = t[(i, col)].clone();
            for j in 0..width {
                let v = &t[(i, j)] - &f * &t[(row, j)];
                t[(i, j)] = v;
            }
        }
    }
}
