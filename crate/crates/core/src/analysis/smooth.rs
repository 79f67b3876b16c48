use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::freeness::{freeness_check, Freeness};
use super::{circuits, AnalyticCertificate};
use crate::cone::feasibility::ConeProjector;
use crate::cone::{
    classify_point, vflat_feasible, wall_residual, wstratum_probe, wstratum_witnesses_n1,
    ExactPoint, MomentImagePoint, Point, ProbeBudget, ProbeOutcome, Stratum,
};
use crate::error::{Error, Result};
use crate::exact::{rat_to_f64, RatMatrix, Rational};
use crate::lattice::{dependencies_on, QuotientSpec};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessCertificate {
    pub stratum: Stratum,
    /// `dim n_{L,J}`.
    pub n_lj_dim: usize,
    /// Real matrix of `Lambda`, `2|L \ J|` rows by `3 dim n_{L,J}` columns.
    pub lambda_matrix: Vec<Vec<f64>>,
    pub rank: usize,
    pub injective: bool,
}

/// Rational basis of `n_{L,J}`, written on the coordinates `L \ J`.
fn nlj_basis(spec: &QuotientSpec, st: &Stratum) -> Vec<Vec<Rational>> {
    let lj = st.wall_only();
    let deps = dependencies_on(spec, &st.wall);
    if deps.is_empty() || lj.is_empty() {
        return Vec::new();
    }
    let mut m = RatMatrix::from_fn(deps.len(), lj.len(), |i, j| deps[i][lj[j]].clone());
    let piv = m.rref();
    (0..piv.len()).map(|r| (0..lj.len()).map(|j| m[(r, j)].clone()).collect()).collect()
}

/// Columns ordered `(theta1_j, Re thetac_j, Im thetac_j)` per basis vector;
/// rows `(Re, Im)` per index of `L \ J`.
fn lambda_entries<S: Clone + Zero + std::ops::Mul<Output = S>>(
    basis: &[Vec<S>],
    ak: &[S],
    bre: &[S],
    bim: &[S],
) -> Vec<Vec<S>> {
    let rows = ak.len();
    let mut out = vec![vec![S::zero(); 3 * basis.len()]; 2 * rows];
    for (j, e) in basis.iter().enumerate() {
        for i in 0..rows {
            let x = e[i].clone();
            out[2 * i][3 * j] = x.clone() * bre[i].clone();
            out[2 * i][3 * j + 1] = x.clone() * ak[i].clone();
            out[2 * i + 1][3 * j] = x.clone() * bim[i].clone();
            out[2 * i + 1][3 * j + 2] = x * ak[i].clone();
        }
    }
    out
}

/// Injectivity of `Lambda` at a classified point (SVD rank, threshold `tol.rank`).
pub fn smoothness_at<T: Real>(
    spec: &QuotientSpec,
    point: &MomentImagePoint<T>,
    tol: &Tolerances<T>,
) -> Result<SmoothnessCertificate> {
    if !point.in_image {
        return Err(Error::PointOutsideK { violation: point.violation().to_f64_lossy() });
    }
    let st = point.stratum.clone();
    let lj = st.wall_only();
    let basis: Vec<Vec<T>> = nlj_basis(spec, &st)
        .iter()
        .map(|v| v.iter().map(|x| T::lit(rat_to_f64(x))).collect())
        .collect();
    let ak: Vec<T> = lj.iter().map(|&k| point.ak[k]).collect();
    let bre: Vec<T> = lj.iter().map(|&k| point.bk[k].re).collect();
    let bim: Vec<T> = lj.iter().map(|&k| point.bk[k].im).collect();
    let entries = lambda_entries(&basis, &ak, &bre, &bim);
    let cols = 3 * basis.len();
    let rank = if cols == 0 || entries.is_empty() {
        0
    } else {
        Matrix::from_rows(&entries).rank(tol.rank)
    };
    Ok(SmoothnessCertificate {
        n_lj_dim: basis.len(),
        lambda_matrix: entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64_lossy()).collect())
            .collect(),
        rank,
        injective: rank == cols,
        stratum: st,
    })
}

/// Exact version for rational points: strata and rank decided over `Q`.
pub fn smoothness_at_exact(spec: &QuotientSpec, point: &ExactPoint) -> Result<SmoothnessCertificate> {
    let (a, b) = point.coordinates(spec);
    let mut st = Stratum::default();
    for k in 0..spec.d() {
        let b2 = &b[k].re * &b[k].re + &b[k].im * &b[k].im;
        let a2 = &a[k] * &a[k];
        if a[k] < Rational::zero() || a2 < b2 {
            let v = rat_to_f64(&a[k]) - rat_to_f64(&b2).sqrt();
            return Err(Error::PointOutsideK { violation: -v });
        }
        if a2 == b2 {
            st.wall.push(k);
            if a[k].is_zero() {
                st.vertex.push(k);
            }
        }
    }
    let lj = st.wall_only();
    let basis = nlj_basis(spec, &st);
    let pick = |f: &dyn Fn(usize) -> Rational| lj.iter().map(|&k| f(k)).collect::<Vec<_>>();
    let entries = lambda_entries(
        &basis,
        &pick(&|k| a[k].clone()),
        &pick(&|k| b[k].re.clone()),
        &pick(&|k| b[k].im.clone()),
    );
    let cols = 3 * basis.len();
    let rank = if cols == 0 || entries.is_empty() {
        0
    } else {
        RatMatrix::from_fn(entries.len(), cols, |i, j| entries[i][j].clone()).rank()
    };
    Ok(SmoothnessCertificate {
        n_lj_dim: basis.len(),
        lambda_matrix: entries.iter().map(|r| r.iter().map(rat_to_f64).collect()).collect(),
        rank,
        injective: rank == cols,
        stratum: st,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothVerdict {
    Smooth,
    Singular,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularWitness {
    /// `(a, Re b, Im b)`.
    pub point: Vec<f64>,
    pub stratum: Stratum,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub verdict: SmoothVerdict,
    pub certified: bool,
    pub witness: Option<SingularWitness>,
    pub points_tested: usize,
    /// Circuits whose wall intersection was neither found nor ruled out.
    pub unresolved: Vec<Vec<usize>>,
}

/// Perturb within `∩_set W_k ∩ K` by a random step and re-projection.
fn perturb_in_stratum<T: Real>(
    spec: &QuotientSpec,
    set: &[usize],
    p: &Point<T>,
    rng: &mut ChaCha8Rng,
    scale: T,
    tol: &Tolerances<T>,
) -> Option<Point<T>> {
    let proj: Vec<(usize, ConeProjector<T>)> =
        (0..spec.d()).filter_map(|k| ConeProjector::new(spec, k).map(|c| (k, c))).collect();
    let v: Vec<T> = p.to_vec().iter().map(|&x| x + scale * T::lit(rng.gen_range(-1.0..1.0))).collect();
    let mut q = Point::from_vec(&v);
    for _ in 0..500 {
        if wall_residual(spec, set, &q) <= tol.feas * T::lit(0.01) {
            break;
        }
        for (k, c) in &proj {
            if set.contains(k) {
                c.project_boundary(&mut q);
            } else {
                c.project(&mut q);
            }
        }
    }
    (wall_residual(spec, set, &q) <= tol.feas).then_some(q)
}

/// Tests `Lambda` on witnesses of every wall circuit met by `K`.
///
/// Only strata whose `{u_k : k in L}` is dependent can fail, and each such
/// `L` contains a circuit, so circuits are the only sets probed.
pub fn smoothness_scan<T: Real>(
    spec: &QuotientSpec,
    seed: u64,
    budget: ProbeBudget,
    certificates: &[AnalyticCertificate],
    tol: &Tolerances<T>,
) -> SmoothnessReport {
    let fr = freeness_check(spec, tol);
    if fr.verdict == Freeness::PositiveDimStabilizer {
        let set = fr.witness.clone().unwrap_or_default();
        let p = vflat_feasible(spec, &set, tol).expect("feasible set has a witness");
        let m = classify_point(spec, p, tol);
        return SmoothnessReport {
            verdict: SmoothVerdict::Singular,
            certified: true,
            witness: Some(SingularWitness {
                point: m.point.to_vec().iter().map(|x| x.to_f64_lossy()).collect(),
                stratum: m.stratum,
                reason: format!("positive-dimensional stabiliser on the vertex flats {set:?}"),
            }),
            points_tested: 0,
            unresolved: Vec::new(),
        };
    }
    let missed: Vec<usize> = certificates.iter().flat_map(|c| c.missed_walls.iter().copied()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5a0f);
    let mut tested = 0;
    let mut unresolved = Vec::new();
    let mut any_found = false;
    for (ci, circuit) in circuits(spec).into_iter().enumerate() {
        if circuit.iter().any(|k| missed.contains(k)) {
            continue;
        }
        let witnesses: Vec<Point<T>> = if spec.n() == 1 {
            wstratum_witnesses_n1(spec, &circuit, tol)
        } else {
            match wstratum_probe(spec, &circuit, seed.wrapping_add(ci as u64), budget, tol) {
                ProbeOutcome::Found(p) => {
                    let scale = T::lit(0.05) * (T::one() + p.to_vec().iter().fold(T::zero(), |m, x| m.max(x.abs())));
                    let mut w = vec![p.clone()];
                    for _ in 0..8 {
                        w.extend(perturb_in_stratum(spec, &circuit, &p, &mut rng, scale, tol));
                    }
                    w
                }
                ProbeOutcome::Empty => Vec::new(),
                ProbeOutcome::NotFound { .. } => {
                    unresolved.push(circuit.clone());
                    Vec::new()
                }
            }
        };
        any_found |= !witnesses.is_empty();
        for p in witnesses {
            let m = classify_point(spec, p, tol);
            let Ok(cert) = smoothness_at(spec, &m, tol) else { continue };
            tested += 1;
            if !cert.injective {
                return SmoothnessReport {
                    verdict: SmoothVerdict::Singular,
                    certified: true,
                    witness: Some(SingularWitness {
                        point: m.point.to_vec().iter().map(|x| x.to_f64_lossy()).collect(),
                        stratum: cert.stratum,
                        reason: format!(
                            "Lambda has rank {} < {} on n_(L,J) of dimension {}",
                            cert.rank,
                            3 * cert.n_lj_dim,
                            cert.n_lj_dim
                        ),
                    }),
                    points_tested: tested,
                    unresolved,
                };
            }
        }
    }
    let analytic = certificates.iter().any(|c| c.smooth);
    let certified = spec.n() == 1 || analytic || (unresolved.is_empty() && !any_found);
    SmoothnessReport {
        verdict: if certified { SmoothVerdict::Smooth } else { SmoothVerdict::Unknown },
        certified,
        witness: None,
        points_tested: tested,
        unresolved,
    }
}
