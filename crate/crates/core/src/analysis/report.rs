use serde::Serialize;

use super::{
    degeneracy_scan, freeness_check, smoothness_scan, AnalyticCertificate, DegeneracyReport, FreenessReport,
    SmoothnessReport,
};
use crate::cone::{vflat_feasible, connectedness_report, is_bounded_polyhedron, ConnectednessReport, ProbeBudget};
use crate::error::Result;
use crate::lattice::{group_structure, GroupStructure, QuotientSpec};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub seed: u64,
    /// Interior sample count for the degeneracy scan.
    pub samples: usize,
    pub budget: ProbeBudget,
    pub certificates: Vec<AnalyticCertificate>,
    pub tol: Tolerances<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 256,
            budget: ProbeBudget::default(),
            certificates: Vec::new(),
            tol: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub d: usize,
    /// `K`, equivalently `M`, is nonempty.
    pub nonempty: bool,
    pub group: GroupStructure,
    pub freeness: FreenessReport,
    pub smooth: SmoothnessReport,
    pub degeneracy: DegeneracyReport,
    /// `K` bounded, equivalently `M` compact.
    pub compact: bool,
    pub connected: ConnectednessReport,
    /// `|Gamma|` as a decimal string.
    pub gamma: String,
    /// All level constants vanish: `M` is a cone with vertex over the origin.
    pub scaling_cone: bool,
    /// All complex level constants vanish: the extra circle action exists.
    pub hp_circle: bool,
    pub certificates: Vec<AnalyticCertificate>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn analyze(spec: &QuotientSpec, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let tol = &opts.tol;
    let group = group_structure(spec);
    let gamma = group.two_torsion_order.to_string();
    let missed: Vec<usize> = opts.certificates.iter().flat_map(|c| c.missed_walls.iter().copied()).collect();
    Ok(AnalysisReport {
        n: spec.n(),
        d: spec.d(),
        nonempty: vflat_feasible(spec, &[], tol).is_some(),
        freeness: freeness_check(spec, tol),
        smooth: smoothness_scan(spec, opts.seed, opts.budget, &opts.certificates, tol),
        degeneracy: degeneracy_scan(spec, opts.samples, opts.seed, opts.budget, &opts.certificates, tol),
        compact: is_bounded_polyhedron(spec),
        connected: connectedness_report(spec, opts.seed, opts.budget, tol).with_missed(&missed),
        gamma,
        group,
        scaling_cone: spec.all_lambda_zero(),
        hp_circle: spec.complex_lambda_zero(),
        certificates: opts.certificates.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{DegeneracyVerdict, Freeness, SmoothVerdict};
    use crate::exact::rat;
    use num_complex::Complex;

    #[test]
    fn two_parallel_unit_vectors() {
        // u = (1,1), V_1 = 0, V_2 = (1, 0) inside K_1
        let s = QuotientSpec::new(
            1,
            vec![vec![1], vec![1]],
            vec![rat(0, 1), rat(1, 1)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 2],
        )
        .unwrap();
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert!(!r.compact);
        assert_eq!(r.freeness.verdict, Freeness::Free);
        assert_eq!(r.smooth.verdict, SmoothVerdict::Smooth);
        assert_eq!(r.degeneracy.verdict, DegeneracyVerdict::NonDegenerate);
        assert_eq!(r.connected.components, Some(2));
        assert!(!r.scaling_cone && r.hp_circle);
        assert_eq!(r.gamma, "2");
        assert_eq!(r.to_json(), analyze(&s, &AnalysisOptions::default()).unwrap().to_json());
    }

    #[test]
    fn simplex_compact_and_degenerate() {
        let s = QuotientSpec::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![rat(0, 1), rat(0, 1), rat(-1, 1)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 3],
        )
        .unwrap();
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert!(r.compact);
        assert_eq!(r.degeneracy.verdict, DegeneracyVerdict::DegenerateAt);
        assert!(r.degeneracy.witnesses.iter().any(|w| w.s_is_zero()));
    }

    #[test]
    fn all_zero_levels_flag_scaling_cone() {
        let s = QuotientSpec::homogeneous(1, vec![vec![1], vec![1]]).unwrap();
        let r = analyze(&s, &AnalysisOptions::default()).unwrap();
        assert!(r.scaling_cone && r.hp_circle);
    }
}
