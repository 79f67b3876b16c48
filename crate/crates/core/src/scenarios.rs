//! Builders for the worked example families, each paired with the verdicts
//! the analysis is expected to reproduce.
//!
//! Families: the diagonal circle on the simplex, parallel unit cones
//! (multi-instanton type), the shifted diagonal circle with one cone pushed
//! away, and the complete two-index circle classification.

use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    AnalysisOptions, AnalysisReport, AnalyticCertificate, DegeneracyVerdict, Freeness, SmoothVerdict,
};
use crate::cone::ExactPoint;
use crate::error::{Error, Result};
use crate::exact::{rat_int, rat_to_f64, Rational};
use crate::lattice::{ComplexRational, QuotientSpec};

fn czero() -> ComplexRational {
    Complex::new(Rational::zero(), Rational::zero())
}

/// Verdicts a scenario pins down. `None` leaves a field unasserted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedFragment {
    /// `false` when `K` is empty; the remaining fields are then vacuous.
    pub nonempty: bool,
    pub compact: bool,
    pub freeness: Freeness,
    pub smooth: Option<SmoothVerdict>,
    pub degeneracy: Option<DegeneracyVerdict>,
    pub components: Option<u64>,
    pub scaling_cone: bool,
    /// Number of vertices `V_k` lying in `K`.
    pub vertices_in_k: Option<usize>,
}

/// `P = -2 sum lambda^(1)_k` and `Q = -i sum lambda^(c)_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalScalars {
    pub p: Rational,
    pub q: ComplexRational,
}

impl DiagonalScalars {
    /// `|Q| <= P/2`, decided exactly as `P >= 0` and `4|Q|^2 <= P^2`.
    pub fn admits_points(&self) -> bool {
        let q2 = &self.q.re * &self.q.re + &self.q.im * &self.q.im;
        !self.p.is_negative() && rat_int(4) * q2 <= &self.p * &self.p
    }

    pub fn on_boundary(&self) -> bool {
        let q2 = &self.q.re * &self.q.re + &self.q.im * &self.q.im;
        !self.p.is_negative() && rat_int(4) * q2 == &self.p * &self.p
    }
}

/// Where the second vertex sits relative to the first cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexPlacement {
    InteriorK1,
    /// On `W_1` away from `V_1`.
    WallK1,
    Coincident,
    OutsideK1,
}

#[derive(Clone, Debug)]
pub struct ScenarioExpectation {
    pub name: String,
    pub spec: QuotientSpec,
    pub expected: ExpectedFragment,
    pub derived: Option<DiagonalScalars>,
    pub placement: Option<VertexPlacement>,
    pub certificates: Vec<AnalyticCertificate>,
}

impl ScenarioExpectation {
    /// `base` with this scenario's certificates appended.
    pub fn options(&self, base: &AnalysisOptions) -> AnalysisOptions {
        let mut o = base.clone();
        o.certificates.extend(self.certificates.iter().cloned());
        o
    }

    /// Field-by-field disagreements between the expectation and a report.
    pub fn mismatches(&self, r: &AnalysisReport) -> Vec<String> {
        let e = &self.expected;
        let mut out = Vec::new();
        let mut check = |name: &str, ok: bool, want: String, got: String| {
            if !ok {
                out.push(format!("{name}: expected {want}, got {got}"));
            }
        };
        check("nonempty", r.nonempty == e.nonempty, e.nonempty.to_string(), r.nonempty.to_string());
        if !e.nonempty {
            return out;
        }
        check("compact", r.compact == e.compact, e.compact.to_string(), r.compact.to_string());
        check(
            "freeness",
            r.freeness.verdict == e.freeness,
            format!("{:?}", e.freeness),
            format!("{:?}", r.freeness.verdict),
        );
        if let Some(v) = e.smooth {
            check("smooth", r.smooth.verdict == v, format!("{v:?}"), format!("{:?}", r.smooth.verdict));
        }
        if let Some(d) = e.degeneracy {
            check(
                "degeneracy",
                r.degeneracy.verdict == d,
                format!("{d:?}"),
                format!("{:?}", r.degeneracy.verdict),
            );
        }
        if let Some(c) = e.components {
            check(
                "components",
                r.connected.components == Some(c),
                c.to_string(),
                format!("{:?}", r.connected.components),
            );
        }
        check(
            "scaling_cone",
            r.scaling_cone == e.scaling_cone,
            e.scaling_cone.to_string(),
            r.scaling_cone.to_string(),
        );
        if let Some(v) = e.vertices_in_k {
            let got = vertices_in_report(r);
            check("vertices_in_k", got == v, v.to_string(), got.to_string());
        }
        out
    }
}

/// Singleton vertex flats met by `K`, as found by the freeness search.
pub fn vertices_in_report(r: &AnalysisReport) -> usize {
    r.freeness.feasible_sets.iter().filter(|a| a.len() == 1).count()
}

/// The vertex `V_k` as a point of `R^n x C^n`, when it is a single point.
fn vertex_point(spec: &QuotientSpec, k: usize) -> Option<ExactPoint> {
    match crate::cone::solve_vertex_flat(spec, &[k]) {
        crate::cone::FlatSolution::Unique(p) => Some(p),
        _ => None,
    }
}

fn exact_vertices_in_k(spec: &QuotientSpec) -> usize {
    (0..spec.d()).filter(|&k| vertex_point(spec, k).is_some_and(|p| p.in_image(spec))).count()
}

/// Standard simplex `u_k = e_k`, `u_{n+1} = -(e_1 + ... + e_n)`.
pub fn diagonal_scenario(n: usize, lambda1: Vec<Rational>, lambda_c: Vec<ComplexRational>) -> Result<ScenarioExpectation> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|k| (0..n).map(|i| i64::from(i == k)).collect()).collect();
    u.push(vec![-1; n]);
    let spec = QuotientSpec::new(n, u, lambda1, lambda_c)?;
    let p = -rat_int(2) * spec.lambda1().iter().fold(Rational::zero(), |s, x| s + x);
    let sum_c = spec.lambda_c().iter().fold(czero(), |s, x| s + x.clone());
    // -i (x + iy) = y - ix
    let q = Complex::new(sum_c.im.clone(), -sum_c.re.clone());
    let derived = DiagonalScalars { p, q };
    let nonempty = derived.admits_points();
    let point_only = nonempty && derived.p.is_zero();
    let smooth = if derived.on_boundary() { SmoothVerdict::Singular } else { SmoothVerdict::Smooth };
    let expected = ExpectedFragment {
        nonempty,
        compact: true,
        freeness: if point_only { Freeness::PositiveDimStabilizer } else { Freeness::Free },
        smooth: Some(smooth),
        degeneracy: Some(DegeneracyVerdict::DegenerateAt),
        components: None,
        scaling_cone: spec.all_lambda_zero(),
        vertices_in_k: None,
    };
    Ok(ScenarioExpectation {
        name: format!("diagonal n={n}"),
        spec,
        expected,
        derived: Some(derived),
        placement: None,
        certificates: Vec::new(),
    })
}

/// Diagonal scenario with the levels spread evenly: `lambda^(1)_k = -P/(2d)`
/// and `lambda^(c)_k = iQ/d`, reproducing the requested `P` and `Q`.
pub fn diagonal_scenario_pq(n: usize, p: Rational, q: ComplexRational) -> Result<ScenarioExpectation> {
    let d = rat_int(n as i64 + 1);
    let l1 = -&p / (rat_int(2) * &d);
    // i (x + iy) / d = (-y + ix) / d
    let lc = Complex::new(-&q.im / &d, &q.re / &d);
    diagonal_scenario(n, vec![l1; n + 1], vec![lc; n + 1])
}

/// Lifted null point of the diagonal Killing field:
/// `z = (sqrt(P/2), 0, ...)`, `w = (conj(Q)/sqrt(P/2), w_2, 0, ...)` with
/// `|w_2|^2 = P/2 - |Q|^2/(P/2)`. Requires `P > 0` and `|Q| <= P/2`.
pub fn diagonal_null_point(s: &DiagonalScalars, n: usize) -> Option<(Vec<Complex<f64>>, Vec<Complex<f64>>)> {
    let p = rat_to_f64(&s.p);
    let q = Complex::new(rat_to_f64(&s.q.re), rat_to_f64(&s.q.im));
    if p <= 0.0 || !s.admits_points() {
        return None;
    }
    let half = p / 2.0;
    let rest = half - q.norm_sqr() / half;
    let d = n + 1;
    let mut z = vec![Complex::new(0.0, 0.0); d];
    let mut w = vec![Complex::new(0.0, 0.0); d];
    z[0] = Complex::new(half.sqrt(), 0.0);
    w[0] = q.conj() / half.sqrt();
    w[1] = Complex::new(rest.max(0.0).sqrt(), 0.0);
    Some((z, w))
}

/// `n = 1`, `u_k = 1` for every `k`, vertices `(lambda^(1)_k, lambda^(c)_k)`.
pub fn multi_instanton_scenario(vertices: &[(Rational, ComplexRational)]) -> Result<ScenarioExpectation> {
    if vertices.is_empty() {
        return Err(Error::Dimension("at least one vertex is required".into()));
    }
    let d = vertices.len();
    let spec = QuotientSpec::new(
        1,
        vec![vec![1]; d],
        vertices.iter().map(|v| v.0.clone()).collect(),
        vertices.iter().map(|v| v.1.clone()).collect(),
    )?;
    let distinct = (0..d).all(|i| (i + 1..d).all(|j| vertices[i] != vertices[j]));
    let pts: Vec<ExactPoint> = vertices.iter().map(|v| ExactPoint { a: vec![v.0.clone()], b: vec![v.1.clone()] }).collect();
    // a vertex on another wall breaks smoothness; with more than two cones
    // deeper strata are not covered by this rule
    let touching = (0..d).any(|i| {
        (0..d).any(|j| {
            i != j && matches!(placement(&spec, i, &pts[j], &pts[i]), VertexPlacement::WallK1 | VertexPlacement::Coincident)
        })
    });
    let expected = ExpectedFragment {
        nonempty: true,
        compact: false,
        freeness: if distinct { Freeness::Free } else { Freeness::PositiveDimStabilizer },
        smooth: match (touching, d <= 2) {
            (true, _) => Some(SmoothVerdict::Singular),
            (false, true) => Some(SmoothVerdict::Smooth),
            (false, false) => None,
        },
        degeneracy: None,
        components: None,
        scaling_cone: spec.all_lambda_zero(),
        vertices_in_k: Some(exact_vertices_in_k(&spec)),
    };
    Ok(ScenarioExpectation {
        name: format!("multi-instanton d={d}"),
        spec,
        expected,
        derived: None,
        placement: None,
        certificates: Vec::new(),
    })
}

/// `u_k = e_k`, `u_{n+1} = e_1 + ... + e_n`, `lambda^(1)_{n+1} = -lambda`.
///
/// For `lambda > 0` the wall `W_{n+1}` misses `K` and the degeneracy system
/// has no solution by the triangle inequality; both facts are attached as a
/// certificate. `lambda = 0` gives the scaling cone, singular at its vertex.
pub fn shifted_diagonal_scenario(n: usize, lambda: Rational) -> Result<ScenarioExpectation> {
    if lambda.is_negative() {
        return Err(Error::InvalidLambda(format!("lambda = {lambda} must not be negative")));
    }
    let mut u: Vec<Vec<i64>> = (0..n).map(|k| (0..n).map(|i| i64::from(i == k)).collect()).collect();
    u.push(vec![1; n]);
    let mut l1 = vec![Rational::zero(); n + 1];
    l1[n] = -lambda.clone();
    let spec = QuotientSpec::new(n, u, l1, vec![czero(); n + 1])?;
    let positive = lambda.is_positive();
    let certificates = if positive {
        vec![AnalyticCertificate {
            label: "triangle inequality".into(),
            missed_walls: vec![n],
            smooth: true,
            non_degenerate: true,
        }]
    } else {
        Vec::new()
    };
    let expected = if positive {
        ExpectedFragment {
            nonempty: true,
            compact: false,
            freeness: Freeness::Free,
            smooth: Some(SmoothVerdict::Smooth),
            degeneracy: Some(DegeneracyVerdict::NonDegenerate),
            components: Some(2),
            scaling_cone: false,
            vertices_in_k: None,
        }
    } else {
        ExpectedFragment {
            nonempty: true,
            compact: false,
            freeness: Freeness::PositiveDimStabilizer,
            smooth: Some(SmoothVerdict::Singular),
            degeneracy: None,
            components: None,
            scaling_cone: true,
            vertices_in_k: None,
        }
    };
    Ok(ScenarioExpectation {
        name: format!("shifted n={n} lambda={lambda}"),
        spec,
        expected,
        derived: None,
        placement: None,
        certificates,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleCheck {
    pub samples: usize,
    pub violations: usize,
    /// Smallest `(sum a + lambda)^2 - |sum b|^2 - (sum s)^2` seen.
    pub min_margin: f64,
}

/// Draws `b_k`, `s_k` at random, sets `a_k = sqrt(|b_k|^2 + s_k^2)` so the
/// per-index equations hold, and checks the strict inequality for the last one.
pub fn triangle_certificate_check(n: usize, lambda: f64, samples: usize, seed: u64) -> TriangleCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..samples {
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let (mut sa, mut sb, mut ss) = (0.0, Complex::new(0.0, 0.0), 0.0);
        for _ in 0..n {
            let b = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            let s: f64 = rng.gen_range(-1.0..1.0) * scale;
            sa += (b.norm_sqr() + s * s).sqrt();
            sb += b;
            ss += s;
        }
        let margin = (sa + lambda).powi(2) - sb.norm_sqr() - ss * ss;
        min_margin = min_margin.min(margin);
        if !(margin > 0.0) {
            violations += 1;
        }
    }
    TriangleCheck { samples, violations, min_margin }
}

fn normalized_levels(u: i64, v: &(Rational, ComplexRational)) -> (Rational, ComplexRational) {
    let uk = rat_int(u);
    (&v.0 * &uk, Complex::new(&v.1.re * &uk, &v.1.im * &uk))
}

/// Placement of `p` relative to cone `k` of `spec`, exactly.
fn placement(spec: &QuotientSpec, k: usize, p: &ExactPoint, vertex_k: &ExactPoint) -> VertexPlacement {
    if p == vertex_k {
        return VertexPlacement::Coincident;
    }
    let (a, b) = p.coordinates(spec);
    let lhs = &a[k] * &a[k];
    let rhs = &b[k].re * &b[k].re + &b[k].im * &b[k].im;
    if a[k].is_negative() || lhs < rhs {
        VertexPlacement::OutsideK1
    } else if lhs == rhs {
        VertexPlacement::WallK1
    } else {
        VertexPlacement::InteriorK1
    }
}

/// `n = 1`, `d = 2` with vertices given in normalized form
/// `V_k = (lambda^(1)_k/u_k, lambda^(c)_k/u_k)`.
///
/// Expected verdicts: compact iff `u_1 > 0 > u_2`; a coincident vertex pair
/// has a circle stabiliser; a vertex lying in `K` with `|u_k| != 1` gives
/// a finite stabiliser; smoothness fails exactly when one vertex lies on
/// the other cone's wall; non-degenerate only for `u_1 = u_2 = 1` with
/// `V_2` inside `K_1`.
pub fn d2_family(
    u1: i64,
    u2: i64,
    v1: (Rational, ComplexRational),
    v2: (Rational, ComplexRational),
) -> Result<ScenarioExpectation> {
    if u1 <= 0 || u2 == 0 {
        return Err(Error::Validation(format!("need u1 > 0 and u2 != 0, got ({u1}, {u2})")));
    }
    let (l1a, lca) = normalized_levels(u1, &v1);
    let (l1b, lcb) = normalized_levels(u2, &v2);
    let spec = QuotientSpec::new(1, vec![vec![u1], vec![u2]], vec![l1a, l1b], vec![lca, lcb])?;
    let p1 = ExactPoint { a: vec![v1.0.clone()], b: vec![v1.1.clone()] };
    let p2 = ExactPoint { a: vec![v2.0.clone()], b: vec![v2.1.clone()] };
    let place = placement(&spec, 0, &p2, &p1);
    let back = placement(&spec, 1, &p1, &p2);
    let coincident = place == VertexPlacement::Coincident;
    let in_k = [p1.in_image(&spec), p2.in_image(&spec)];
    let freeness = if coincident {
        Freeness::PositiveDimStabilizer
    } else if (in_k[0] && u1.abs() != 1) || (in_k[1] && u2.abs() != 1) {
        Freeness::LocallyFree
    } else {
        Freeness::Free
    };
    let on_other_wall = matches!(place, VertexPlacement::WallK1 | VertexPlacement::Coincident)
        || matches!(back, VertexPlacement::WallK1);
    let smooth = if on_other_wall { SmoothVerdict::Singular } else { SmoothVerdict::Smooth };
    let nondeg = u1 == 1 && u2 == 1 && place == VertexPlacement::InteriorK1;
    let expected = ExpectedFragment {
        nonempty: true,
        compact: u2 < 0,
        freeness,
        smooth: Some(smooth),
        degeneracy: Some(if nondeg { DegeneracyVerdict::NonDegenerate } else { DegeneracyVerdict::DegenerateAt }),
        components: nondeg.then_some(2),
        scaling_cone: spec.all_lambda_zero(),
        vertices_in_k: Some(in_k.iter().filter(|&&x| x).count()),
    };
    Ok(ScenarioExpectation {
        name: format!("d2 u=({u1},{u2}) {place:?}"),
        spec,
        expected,
        derived: None,
        placement: Some(place),
        certificates: Vec::new(),
    })
}

/// The six two-index configurations of the classification table, in order:
/// `(1,1)` inside, `(2,1)` inside, `(1,-1)` inside, `(3,2)` outside,
/// `(1,1)` on the wall, `(1,-1)` coincident.
pub fn d2_table() -> Vec<ScenarioExpectation> {
    let v = |a: i64, re: i64, im: i64| (rat_int(a), Complex::new(rat_int(re), rat_int(im)));
    let o = v(0, 0, 0);
    [
        (1, 1, v(1, 0, 0)),
        (2, 1, v(1, 0, 0)),
        (1, -1, v(1, 0, 0)),
        (3, 2, v(0, 0, 1)),
        (1, 1, v(1, 1, 0)),
        (1, -1, v(0, 0, 0)),
    ]
    .into_iter()
    .map(|(u1, u2, v2)| d2_family(u1, u2, o.clone(), v2).expect("table entries are valid"))
    .collect()
}

fn parse_rational(s: &str, field: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Parse { line: 0, field: field.into(), msg: format!("{s:?}: {e}") })
}

fn parse_int(s: &str, field: &str) -> Result<i64> {
    s.trim().parse::<i64>().map_err(|e| Error::Parse { line: 0, field: field.into(), msg: format!("{s:?}: {e}") })
}

/// `key=value` pairs separated by commas.
fn keyed(args: &str) -> Result<Vec<(String, String)>> {
    args.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse {
                line: 0,
                field: kv.trim().into(),
                msg: "expected key=value".into(),
            })?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

/// Vertex `a;re;im`.
fn parse_vertex(s: &str) -> Result<(Rational, ComplexRational)> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 3 {
        return Err(Error::Parse { line: 0, field: "vertex".into(), msg: format!("{s:?}: expected a;re;im") });
    }
    Ok((
        parse_rational(parts[0], "vertex")?,
        Complex::new(parse_rational(parts[1], "vertex")?, parse_rational(parts[2], "vertex")?),
    ))
}

/// Looks up a scenario by name.
///
/// - `diagonal:n=1,p=2,qre=0,qim=0`
/// - `shifted:n=2,lambda=1`
/// - `instanton:0;0;0,1;0;0` (one `a;re;im` per vertex)
/// - `d2:u1,u2` with `V_1 = 0`, `V_2 = (1, 0)`, or
///   `d2:u1,u2,a1;re1;im1,a2;re2;im2`
/// - `d2-table:i` for the `i`-th classification entry (zero-based)
pub fn scenario_by_name(name: &str) -> Result<ScenarioExpectation> {
    let (family, args) = name.split_once(':').unwrap_or((name, ""));
    match family.trim() {
        "diagonal" | "simplex" => {
            let (mut n, mut p, mut qre, mut qim) = (1usize, rat_int(2), Rational::zero(), Rational::zero());
            for (k, v) in keyed(args)? {
                match k.as_str() {
                    "n" => n = parse_int(&v, "n")?.max(0) as usize,
                    "p" => p = parse_rational(&v, "p")?,
                    "qre" => qre = parse_rational(&v, "qre")?,
                    "qim" => qim = parse_rational(&v, "qim")?,
                    _ => return Err(Error::UnknownScenario(format!("{name}: unknown key {k}"))),
                }
            }
            diagonal_scenario_pq(n, p, Complex::new(qre, qim))
        }
        "shifted" => {
            let (mut n, mut lambda) = (2usize, Rational::one());
            for (k, v) in keyed(args)? {
                match k.as_str() {
                    "n" => n = parse_int(&v, "n")?.max(0) as usize,
                    "lambda" => lambda = parse_rational(&v, "lambda")?,
                    _ => return Err(Error::UnknownScenario(format!("{name}: unknown key {k}"))),
                }
            }
            shifted_diagonal_scenario(n, lambda)
        }
        "instanton" => {
            let vs = args.split(',').map(parse_vertex).collect::<Result<Vec<_>>>()?;
            multi_instanton_scenario(&vs)
        }
        "d2" => {
            let parts: Vec<&str> = args.split(',').collect();
            let (v1, v2) = match parts.len() {
                2 => ((Rational::zero(), czero()), (Rational::one(), czero())),
                4 => (parse_vertex(parts[2])?, parse_vertex(parts[3])?),
                _ => return Err(Error::UnknownScenario(format!("{name}: expected d2:u1,u2[,V1,V2]"))),
            };
            d2_family(parse_int(parts[0], "u1")?, parse_int(parts[1], "u2")?, v1, v2)
        }
        "d2-table" => {
            let i = parse_int(args, "index")?;
            d2_table()
                .into_iter()
                .nth(i.max(0) as usize)
                .filter(|_| i >= 0)
                .ok_or_else(|| Error::UnknownScenario(format!("{name}: index out of range")))
        }
        _ => Err(Error::UnknownScenario(name.to_string())),
    }
}
