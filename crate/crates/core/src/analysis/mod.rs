//! Decision procedures for freeness, smoothness and non-degeneracy of the
//! quotient, plus fibre counts, the diagonal toric embedding and the
//! aggregate report.

pub mod degeneracy;
pub mod fiber;
pub mod freeness;
pub mod report;
pub mod smooth;

use serde::Serialize;

pub use degeneracy::{
    degeneracy_at, degeneracy_at_pattern, degeneracy_scan, DegeneracyReport, DegeneracyVerdict,
    DegeneracyWitness,
};
pub use fiber::{fiber_cardinality, toric_embedding};
pub use freeness::{freeness_check, Freeness, FreenessReport};
pub use report::{analyze, AnalysisOptions, AnalysisReport};
pub use smooth::{
    smoothness_at, smoothness_at_exact, smoothness_scan, SmoothVerdict, SmoothnessCertificate,
    SmoothnessReport,
};

/// A fact established outside the numerical search (for example by an
/// inequality argument specific to one family), used to upgrade a
/// probe-based verdict to a certified one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AnalyticCertificate {
    pub label: String,
    /// Walls `W_k` known not to meet `K` (zero-based).
    pub missed_walls: Vec<usize>,
    pub smooth: bool,
    pub non_degenerate: bool,
}

/// All `k`-element subsets of `0..d` in lexicographic order.
pub(crate) fn combinations(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            if d - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// Minimal dependent subsets of `{u_k}` (circuits); each has at most `n + 1` elements.
pub(crate) fn circuits(spec: &crate::lattice::QuotientSpec) -> Vec<Vec<usize>> {
    use crate::lattice::is_linearly_independent;
    let mut out: Vec<Vec<usize>> = Vec::new();
    for size in 1..=(spec.n() + 1).min(spec.d()) {
        for set in combinations(spec.d(), size) {
            if out.iter().any(|c| c.iter().all(|k| set.contains(k))) {
                continue;
            }
            if !is_linearly_independent(spec, &set) {
                out.push(set);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::QuotientSpec;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }

    #[test]
    fn circuits_of_simplex_and_repeats() {
        let s = QuotientSpec::homogeneous(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]]).unwrap();
        assert_eq!(circuits(&s), vec![vec![0, 1, 2]]);
        let s = QuotientSpec::homogeneous(1, vec![vec![1], vec![2], vec![0]]).unwrap();
        assert_eq!(circuits(&s), vec![vec![2], vec![0, 1]]);
    }
}
