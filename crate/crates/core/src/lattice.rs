//! Quotient data and the integer lattice algebra of the exact sequence
//! `0 -> n -> R^d -> R^n -> 0`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{rat_to_f64, smith_normal_form, IntMatrix, RatMatrix, Rational};
use crate::scalar::{Cx, Real};

pub type ComplexRational = Complex<Rational>;

/// Input data of a toric hypersymplectic quotient: the vectors `u_k` and
/// the level constants `lambda^(1)_k`, `lambda^(c)_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientSpec {
    n: usize,
    d: usize,
    /// `u[k]` is the k-th column, of length `n`.
    u: Vec<Vec<i64>>,
    lambda1: Vec<Rational>,
    lambda_c: Vec<ComplexRational>,
    kernel: KernelLattice,
}

impl QuotientSpec {
    pub fn new(
        n: usize,
        u: Vec<Vec<i64>>,
        lambda1: Vec<Rational>,
        lambda_c: Vec<ComplexRational>,
    ) -> Result<Self> {
        let d = u.len();
        if n == 0 {
            return Err(Error::Dimension("n must be at least 1".into()));
        }
        if d < n {
            return Err(Error::Dimension(format!("d = {d} is smaller than n = {n}")));
        }
        if let Some(k) = u.iter().position(|c| c.len() != n) {
            return Err(Error::Dimension(format!(
                "u_{} has {} entries, expected {n}",
                k + 1,
                u[k].len()
            )));
        }
        if lambda1.len() != d || lambda_c.len() != d {
            return Err(Error::Dimension(format!(
                "expected {d} level constants, got {} real and {} complex",
                lambda1.len(),
                lambda_c.len()
            )));
        }
        let kernel = compute_kernel(n, &u)?;
        Ok(Self {
            n,
            d,
            u,
            lambda1,
            lambda_c,
            kernel,
        })
    }

    /// Spec with all level constants zero.
    pub fn homogeneous(n: usize, u: Vec<Vec<i64>>) -> Result<Self> {
        let d = u.len();
        Self::new(
            n,
            u,
            vec![Rational::zero(); d],
            vec![Complex::new(Rational::zero(), Rational::zero()); d],
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn u(&self, k: usize) -> &[i64] {
        &self.u[k]
    }

    pub fn u_columns(&self) -> &[Vec<i64>] {
        &self.u
    }

    pub fn lambda1(&self) -> &[Rational] {
        &self.lambda1
    }

    pub fn lambda_c(&self) -> &[ComplexRational] {
        &self.lambda_c
    }

    pub fn kernel(&self) -> &KernelLattice {
        &self.kernel
    }

    pub fn u_matrix(&self) -> IntMatrix {
        IntMatrix::from_int_columns(self.n, &self.u)
    }

    pub fn u_as<T: Real>(&self, k: usize) -> Vec<T> {
        self.u[k].iter().map(|&x| T::lit(x as f64)).collect()
    }

    pub fn lambda1_as<T: Real>(&self) -> Vec<T> {
        self.lambda1.iter().map(|x| T::lit(rat_to_f64(x))).collect()
    }

    pub fn lambda_c_as<T: Real>(&self) -> Vec<Cx<T>> {
        self.lambda_c
            .iter()
            .map(|z| Complex::new(T::lit(rat_to_f64(&z.re)), T::lit(rat_to_f64(&z.im))))
            .collect()
    }

    /// All level constants vanish (scaling-cone case).
    pub fn all_lambda_zero(&self) -> bool {
        self.lambda1.iter().all(Zero::is_zero) && self.complex_lambda_zero()
    }

    /// `lambda^(c) = 0`: the quotient carries the extra circle action on `w`.
    pub fn complex_lambda_zero(&self) -> bool {
        self.lambda_c.iter().all(|z| z.re.is_zero() && z.im.is_zero())
    }

    /// Same level constants with the u-vectors replaced by `g * u_k`.
    pub fn change_basis(&self, g: &[Vec<i64>]) -> Result<Self> {
        let u = self
            .u
            .iter()
            .map(|c| {
                (0..self.n)
                    .map(|i| (0..self.n).map(|j| g[i][j] * c[j]).sum())
                    .collect()
            })
            .collect();
        Self::new(self.n, u, self.lambda1.clone(), self.lambda_c.clone())
    }

    /// Reorder coordinates: new index `k` takes old index `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        Self::new(
            self.n,
            perm.iter().map(|&p| self.u[p].clone()).collect(),
            perm.iter().map(|&p| self.lambda1[p].clone()).collect(),
            perm.iter().map(|&p| self.lambda_c[p].clone()).collect(),
        )
    }
}

/// Saturated integer basis of `ker(beta) ∩ Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelLattice {
    #[serde(serialize_with = "ser_bigint_rows")]
    pub basis: Vec<Vec<BigInt>>,
}

impl KernelLattice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rational_basis(&self) -> Vec<Vec<Rational>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }

    pub fn basis_as<T: Real>(&self) -> Vec<Vec<T>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(|x| T::lit(x.to_f64().unwrap_or(f64::NAN))).collect())
            .collect()
    }

    /// Integer coordinates of `v` in this basis, if `v` is in the lattice span.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if self.basis.is_empty() {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        let d = v.len();
        let m = RatMatrix::from_fn(d, self.basis.len(), |i, j| {
            Rational::from_integer(self.basis[j][i].clone())
        });
        let rhs: Vec<Rational> = v.iter().map(|x| Rational::from_integer(x.clone())).collect();
        let c = m.solve(&rhs)?;
        c.into_iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect()
    }
}

/// Structure of `N = ker(T^d -> T^n)`: a torus times a finite Abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupStructure {
    pub torus_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    #[serde(serialize_with = "ser_bigint_list")]
    pub invariant_factors: Vec<BigInt>,
    /// Order of the 2-torsion subgroup `Gamma = {h : h^2 = 1}`.
    #[serde(serialize_with = "ser_bigint")]
    pub two_torsion_order: BigInt,
}

// integers are written as decimal strings
fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_bigint_list<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_bigint_rows<S: serde::Serializer>(v: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

fn compute_kernel(n: usize, u: &[Vec<i64>]) -> Result<KernelLattice> {
    let m = IntMatrix::from_int_columns(n, u);
    let snf = smith_normal_form(&m);
    if snf.rank() < n {
        return Err(Error::NonSurjective {
            n,
            rank: snf.rank(),
        });
    }
    // left * U * right = D, so the trailing columns of `right` span ker U over Z.
    let basis = (snf.rank()..u.len())
        .map(|j| normalize_sign(snf.right.column(j)))
        .collect();
    Ok(KernelLattice { basis })
}

fn normalize_sign(mut v: Vec<BigInt>) -> Vec<BigInt> {
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x < &BigInt::zero()) {
        for x in &mut v {
            *x = -x.clone();
        }
    }
    v
}

pub fn kernel_basis(spec: &QuotientSpec) -> KernelLattice {
    spec.kernel.clone()
}

pub fn group_structure(spec: &QuotientSpec) -> GroupStructure {
    let snf = smith_normal_form(&spec.u_matrix());
    let invariant_factors: Vec<BigInt> =
        snf.diagonal.into_iter().filter(|x| !x.is_one()).collect();
    let torus_rank = spec.d - spec.n;
    let even = invariant_factors.iter().filter(|x| x.is_even()).count();
    let two_torsion_order = BigInt::one() << (torus_rank + even);
    GroupStructure {
        torus_rank,
        invariant_factors,
        two_torsion_order,
    }
}

fn sub_columns(spec: &QuotientSpec, set: &[usize]) -> Vec<Vec<i64>> {
    set.iter().map(|&k| spec.u[k].clone()).collect()
}

/// Whether `{u_k : k in set}` extends to a Z-basis of `Z^n`.
pub fn is_zbasis_extendable(spec: &QuotientSpec, set: &[usize]) -> bool {
    if set.is_empty() {
        return true;
    }
    let m = IntMatrix::from_int_columns(spec.n, &sub_columns(spec, set));
    let snf = smith_normal_form(&m);
    snf.rank() == set.len() && snf.diagonal.iter().all(One::is_one)
}

pub fn is_linearly_independent(spec: &QuotientSpec, set: &[usize]) -> bool {
    RatMatrix::from_int_columns(spec.n, &sub_columns(spec, set)).rank() == set.len()
}

/// Exact rank of `{u_k : k in set}`.
pub fn rank_of(spec: &QuotientSpec, set: &[usize]) -> usize {
    if set.is_empty() {
        return 0;
    }
    RatMatrix::from_int_columns(spec.n, &sub_columns(spec, set)).rank()
}

/// Integer null vectors of `{u_k : k in set}`, expanded to length `d`.
pub fn dependencies_on(spec: &QuotientSpec, set: &[usize]) -> Vec<Vec<Rational>> {
    if set.is_empty() {
        return Vec::new();
    }
    let m = RatMatrix::from_int_columns(spec.n, &sub_columns(spec, set));
    m.nullspace()
        .into_iter()
        .map(|v| {
            let mut full = vec![Rational::zero(); spec.d];
            for (i, &k) in set.iter().enumerate() {
                full[k] = v[i].clone();
            }
            full
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;

    fn spec(n: usize, u: &[&[i64]]) -> QuotientSpec {
        QuotientSpec::homogeneous(n, u.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&spec(1, &[&[1], &[1]])).basis, vec![ints(&[1, -1])]);
        let simplex = spec(2, &[&[1, 0], &[0, 1], &[-1, -1]]);
        assert_eq!(kernel_basis(&simplex).basis, vec![ints(&[1, 1, 1])]);
        let shifted = spec(2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(kernel_basis(&shifted).basis, vec![ints(&[1, 1, -1])]);
    }

    #[test]
    fn non_spanning_rejected() {
        let err = QuotientSpec::homogeneous(2, vec![vec![1, 1], vec![2, 2]]).unwrap_err();
        assert!(matches!(err, Error::NonSurjective { n: 2, rank: 1 }));
        assert!(matches!(
            QuotientSpec::homogeneous(2, vec![vec![1, 0]]).unwrap_err(),
            Error::Dimension(_)
        ));
    }

    #[test]
    fn group_structure_examples() {
        let g = group_structure(&spec(1, &[&[1]]));
        assert_eq!((g.torus_rank, g.invariant_factors.len()), (0, 0));
        assert_eq!(g.two_torsion_order, BigInt::from(1));

        // S^1 x Z/2: square roots of identity are (+-1, 0), (+-1, 1)
        let g = group_structure(&spec(1, &[&[2], &[4]]));
        assert_eq!(g.torus_rank, 1);
        assert_eq!(g.invariant_factors, ints(&[2]));
        assert_eq!(g.two_torsion_order, BigInt::from(4));

        let g = group_structure(&spec(2, &[&[1, 0], &[0, 1], &[-1, -1]]));
        assert_eq!(g.torus_rank, 1);
        assert!(g.invariant_factors.is_empty());
        assert_eq!(g.two_torsion_order, BigInt::from(2));
    }

    #[test]
    fn zbasis_and_independence_examples() {
        let std2 = spec(2, &[&[1, 0], &[0, 1]]);
        assert!(is_zbasis_extendable(&std2, &[0, 1]));
        assert!(is_linearly_independent(&std2, &[0, 1]));
        assert!(!is_zbasis_extendable(&spec(1, &[&[2]]), &[0]));
        let skew = spec(2, &[&[1, 1], &[1, -1]]);
        assert!(!is_zbasis_extendable(&skew, &[0, 1]));
        assert!(is_linearly_independent(&skew, &[0, 1]));
        let dup = spec(2, &[&[1, 0], &[1, 0], &[0, 1]]);
        assert!(!is_linearly_independent(&dup, &[0, 1]));
        let three = spec(2, &[&[1, 0], &[0, 1], &[3, 5]]);
        assert!(!is_linearly_independent(&three, &[0, 1, 2]));
        assert!(is_zbasis_extendable(&three, &[]));
    }

    #[test]
    fn dependency_vectors_are_null() {
        let s = spec(1, &[&[2], &[1], &[3]]);
        let deps = dependencies_on(&s, &[0, 2]);
        assert_eq!(deps.len(), 1);
        let v = &deps[0];
        assert!(v[1].is_zero());
        assert!((&v[0] * rat_int(2) + &v[2] * rat_int(3)).is_zero());
    }

    fn unimodular(seed: &[i64]) -> Vec<Vec<i64>> {
        // product of elementary matrices
        let mut g = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        for (step, &c) in seed.iter().enumerate() {
            let (i, j) = [(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)][step % 6];
            for row in g.iter_mut() {
                row[j] += c * row[i];
            }
        }
        g
    }

    proptest::proptest! {
        #[test]
        fn kernel_vectors_are_null_and_saturated(
            cols in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 2), 2..6),
            combo in proptest::collection::vec(-5i64..=5, 4),
        ) {
            let Ok(s) = QuotientSpec::homogeneous(2, cols.clone()) else { return Ok(()) };
            let ker = kernel_basis(&s);
            proptest::prop_assert_eq!(ker.dim(), s.d() - 2);
            let u = s.u_matrix();
            for v in &ker.basis {
                proptest::prop_assert!(u.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            // integral multiples of rational kernel elements lie in the Z-span
            let rational = RatMatrix::from_int_columns(2, &cols).nullspace();
            let mut w = vec![Rational::zero(); s.d()];
            for (i, v) in rational.iter().enumerate() {
                for (k, x) in v.iter().enumerate() {
                    w[k] += x * rat_int(combo[i % combo.len()]);
                }
            }
            let denom = w.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            let wi: Vec<BigInt> = w.iter().map(|x| (x * Rational::from_integer(denom.clone())).to_integer()).collect();
            proptest::prop_assert!(ker.coordinates(&wi).is_some());
        }

        #[test]
        fn invariant_factors_stable_under_gl_n_z(
            cols in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 3), 3..6),
            seed in proptest::collection::vec(-2i64..=2, 6),
        ) {
            let Ok(s) = QuotientSpec::homogeneous(3, cols) else { return Ok(()) };
            let t = s.change_basis(&unimodular(&seed)).unwrap();
            proptest::prop_assert_eq!(group_structure(&s), group_structure(&t));
        }

        #[test]
        fn extendable_implies_independent(
            cols in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 2), 2..6),
            mask in 0u32..64,
        ) {
            let Ok(s) = QuotientSpec::homogeneous(2, cols) else { return Ok(()) };
            let set: Vec<usize> = (0..s.d()).filter(|k| mask & (1 << k) != 0).collect();
            if is_zbasis_extendable(&s, &set) {
                proptest::prop_assert!(is_linearly_independent(&s, &set));
            }
        }
    }
}
