use serde::Serialize;

use crate::cone::vflat_feasible;
use crate::lattice::{is_linearly_independent, is_zbasis_extendable, QuotientSpec};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Freeness {
    Free,
    /// Finite nontrivial stabilisers only.
    LocallyFree,
    PositiveDimStabilizer,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreenessReport {
    pub verdict: Freeness,
    /// Offending index set (zero-based), absent when free.
    pub witness: Option<Vec<usize>>,
    /// Nonempty sets `A` with `K ∩ ∩_A V_k != ∅`, excluding the empty set.
    pub feasible_sets: Vec<Vec<usize>>,
}

/// Enumerates vertex-flat incidences (supersets of empty intersections
/// are skipped, `|A| <= n + 1`) and tests each `{u_k : k in A}`.
pub fn freeness_check<T: Real>(spec: &QuotientSpec, tol: &Tolerances<T>) -> FreenessReport {
    let cap = (spec.n() + 1).min(spec.d());
    let mut layer: Vec<Vec<usize>> = if vflat_feasible(spec, &[], tol).is_some() {
        vec![vec![]]
    } else {
        vec![]
    };
    let mut feasible = Vec::new();
    for _ in 0..cap {
        let mut next = Vec::new();
        for base in &layer {
            let start = base.last().map_or(0, |&k| k + 1);
            for k in start..spec.d() {
                let mut set = base.clone();
                set.push(k);
                // every subset of a feasible set is feasible
                let subsets_ok = set.iter().all(|drop| {
                    let sub: Vec<usize> = set.iter().copied().filter(|x| x != drop).collect();
                    sub.is_empty() || layer.contains(&sub)
                });
                if subsets_ok && vflat_feasible(spec, &set, tol).is_some() {
                    next.push(set);
                }
            }
        }
        feasible.extend(next.iter().cloned());
        layer = next;
    }

    let dependent = feasible.iter().find(|a| !is_linearly_independent(spec, a));
    let non_basis = feasible.iter().find(|a| !is_zbasis_extendable(spec, a));
    let (verdict, witness) = match (dependent, non_basis) {
        (Some(a), _) => (Freeness::PositiveDimStabilizer, Some(a.clone())),
        (None, Some(a)) => (Freeness::LocallyFree, Some(a.clone())),
        (None, None) => (Freeness::Free, None),
    };
    FreenessReport {
        verdict,
        witness,
        feasible_sets: feasible,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_complex::Complex;

    fn parallel(vertices: &[(i64, i64)], u: i64) -> QuotientSpec {
        let d = vertices.len();
        QuotientSpec::new(
            1,
            vec![vec![u]; d],
            vertices.iter().map(|v| rat(u * v.0, 1)).collect(),
            vertices.iter().map(|v| Complex::new(rat(u * v.1, 1), rat(0, 1))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn distinct_vertices_free() {
        let s = parallel(&[(0, 0), (1, 0), (3, 1)], 1);
        let r = freeness_check(&s, &Tolerances::<f64>::default());
        assert_eq!(r.verdict, Freeness::Free);
        assert!(r.feasible_sets.contains(&vec![2]));
    }

    #[test]
    fn coincident_vertices_positive_dim() {
        let s = parallel(&[(0, 0), (0, 0)], 1);
        let r = freeness_check(&s, &Tolerances::<f64>::default());
        assert_eq!(r.verdict, Freeness::PositiveDimStabilizer);
        assert_eq!(r.witness, Some(vec![0, 1]));
    }

    #[test]
    fn non_primitive_vertex_in_k_only_locally_free() {
        // u_1 = 2 with V_1 in K: stabiliser Z/2
        let s = parallel(&[(0, 0)], 2);
        let r = freeness_check(&s, &Tolerances::<f64>::default());
        assert_eq!(r.verdict, Freeness::LocallyFree);
    }

    #[test]
    fn shifted_configuration_free() {
        let s = QuotientSpec::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 3],
        )
        .unwrap();
        let r = freeness_check(&s, &Tolerances::<f64>::default());
        assert_eq!(r.verdict, Freeness::Free);
        assert!(r.feasible_sets.contains(&vec![0, 1]));
    }
}
