use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::{emit_config, parse_document};
use crate::analysis::{analyze, fiber_cardinality, AnalysisOptions, AnalysisReport, DegeneracyVerdict, Freeness, SmoothVerdict};
use crate::cone::{classify_point, combinatorial_interior_sample, interior_center, render_slice_svg, Point, Stratum};
use crate::error::{Error, Result};
use crate::level_set::{d2_surface_metric, gaussian_curvature_fd, locus_csv, surface_curvature_d2, surface_curvature_d2_metric};
use crate::lattice::QuotientSpec;
use crate::scenarios::{scenario_by_name, ScenarioExpectation};
use crate::tolerance::{ToleranceOverrides, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hstoric", version, about = "Toric hypersymplectic quotient analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full freeness/smoothness/degeneracy report as JSON.
    Analyze(Common),
    /// Stratum and fibre count at one point `a_1..a_n,re b_1..re b_n,im b_1..im b_n`.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Locus CSV of interior samples.
    Sample(Common),
    /// Quoted curvature against the finite-difference value of the surface metric.
    Curvature {
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
        r: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// SVG of the slice `a = level` (n = 1 only).
    SliceSvg {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
    },
    /// All artifacts into `--out-dir`.
    Report(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long)]
    tol_mem: Option<f64>,
    #[arg(long)]
    tol_feas: Option<f64>,
    #[arg(long)]
    tol_int: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_deg: Option<f64>,
    #[arg(long)]
    tol_lift: Option<f64>,
    #[arg(long)]
    tol_alg: Option<f64>,
    /// Exit with status 3 when a verdict is `unknown`.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

struct Loaded {
    spec: QuotientSpec,
    scenario: Option<ScenarioExpectation>,
    opts: AnalysisOptions,
}

impl Common {
    fn load(&self) -> Result<Loaded> {
        let (spec, scenario, file_tol, file_seed) = match (&self.config, &self.scenario) {
            (Some(path), None) => {
                let doc = parse_document(&std::fs::read_to_string(path)?)?;
                (doc.to_spec()?, None, doc.tolerances.unwrap_or_default(), doc.seed)
            }
            (None, Some(name)) => {
                let s = scenario_by_name(name)?;
                (s.spec.clone(), Some(s), ToleranceOverrides::default(), None)
            }
            _ => return Err(Error::Validation("exactly one of --config or --scenario is required".into())),
        };
        let cli_tol = ToleranceOverrides {
            mem: self.tol_mem,
            feas: self.tol_feas,
            int: self.tol_int,
            rank: self.tol_rank,
            deg: self.tol_deg,
            lift: self.tol_lift,
            alg: self.tol_alg,
        };
        let mut opts = AnalysisOptions {
            seed: self.seed.or(file_seed).unwrap_or(0),
            samples: self.samples,
            tol: file_tol.merge(cli_tol).apply(Tolerances::default()),
            ..Default::default()
        };
        if let Some(s) = &scenario {
            opts = s.options(&opts);
        }
        Ok(Loaded { spec, scenario, opts })
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Validation(_)
        | Error::NonSurjective { .. }
        | Error::Dimension(_)
        | Error::UnknownScenario(_)
        | Error::InvalidLambda(_)
        | Error::PointOutsideK { .. }
        | Error::UnsupportedDimension { .. } => EXIT_VALIDATION,
        _ => EXIT_FAILURE,
    }
}

fn one_based(set: &[usize]) -> String {
    let v: Vec<String> = set.iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// One line per condition (F), (S), (D).
pub fn condition_summary(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let f = match (&r.freeness.verdict, &r.freeness.witness) {
        (Freeness::Free, _) => "(F) holds: action is free".to_string(),
        (v, w) => format!(
            "(F) fails: {} at vertex set {}",
            serde_json::to_value(v).expect("enum").as_str().unwrap_or(""),
            w.as_deref().map(one_based).unwrap_or_default()
        ),
    };
    let _ = writeln!(s, "{f}");
    let sm = match r.smooth.verdict {
        SmoothVerdict::Smooth => format!("(S) holds{}", if r.smooth.certified { "" } else { " (sampling evidence)" }),
        SmoothVerdict::Singular => format!(
            "(S) fails: {}",
            r.smooth.witness.as_ref().map(|w| w.reason.clone()).unwrap_or_default()
        ),
        SmoothVerdict::Unknown => "(S) unknown: some wall intersections were neither found nor excluded".to_string(),
    };
    let _ = writeln!(s, "{sm}");
    let d = match r.degeneracy.verdict {
        DegeneracyVerdict::NonDegenerate => format!("(D) holds ({})", r.degeneracy.basis),
        DegeneracyVerdict::DegenerateAt => {
            format!("(D) fails: {} degeneracy witness(es) found", r.degeneracy.witnesses.len())
        }
        DegeneracyVerdict::Unknown => format!("(D) unknown: {}", r.degeneracy.basis),
    };
    let _ = writeln!(s, "{d}");
    s
}

fn has_unknown(r: &AnalysisReport) -> bool {
    r.smooth.verdict == SmoothVerdict::Unknown || r.degeneracy.verdict == DegeneracyVerdict::Unknown
}

fn parse_point(spec: &QuotientSpec, text: &str) -> Result<Point<f64>> {
    let v = text
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|e| Error::Parse { line: 0, field: "point".into(), msg: format!("{s:?}: {e}") })
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = spec.n();
    if v.len() != 3 * n {
        return Err(Error::Validation(format!("point needs {} coordinates, got {}", 3 * n, v.len())));
    }
    Ok(Point::from_vec(&v))
}

#[derive(Serialize)]
struct Classification {
    point: Vec<f64>,
    in_image: bool,
    stratum: Stratum,
    f: Vec<f64>,
    fiber: u64,
}

fn curvature_table(rs: &[f64], c1: f64, step: f64, tol: f64) -> Result<String> {
    let (e, g) = d2_surface_metric(c1);
    let mut out = String::from("r,quoted,metric_closed_form,finite_difference,fd_minus_quoted\n");
    for &r in rs {
        let fd = gaussian_curvature_fd(&e, &g, r, step, tol)?;
        let quoted = surface_curvature_d2(c1, r);
        let _ = writeln!(
            out,
            "{r:.16e},{quoted:.16e},{:.16e},{fd:.16e},{:.16e}",
            surface_curvature_d2_metric(c1, r),
            fd - quoted
        );
    }
    Ok(out)
}

/// A level through the interior of `K`, for slices.
fn default_level(spec: &QuotientSpec, tol: &Tolerances<f64>) -> f64 {
    interior_center(spec, tol).map_or(1.0, |(p, _)| p.a[0])
}

fn write_artifact(out_dir: &Option<PathBuf>, name: &str, body: &str, out: &mut dyn Write) -> Result<()> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            writeln!(out, "{}", path.display())?;
        }
        None => out.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Analyze(c) => {
            let l = c.load()?;
            let r = analyze(&l.spec, &l.opts)?;
            write_artifact(&c.out_dir, "analysis.json", &(r.to_json() + "\n"), out)?;
            write!(err, "{}", condition_summary(&r))?;
            if let Some(s) = &l.scenario {
                for m in s.mismatches(&r) {
                    writeln!(err, "scenario {}: {m}", s.name)?;
                }
            }
            Ok(if c.strict && has_unknown(&r) { EXIT_UNCERTIFIED } else { EXIT_OK })
        }
        Command::Classify { common, point } => {
            let l = common.load()?;
            let p = parse_point(&l.spec, &point)?;
            let m = classify_point(&l.spec, p, &l.opts.tol);
            let c = Classification {
                point: m.point.to_vec(),
                in_image: m.in_image,
                stratum: m.stratum.clone(),
                f: m.fk.clone(),
                fiber: fiber_cardinality(&l.spec, &m, &l.opts.tol),
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&c).expect("serializes"))?;
            Ok(EXIT_OK)
        }
        Command::Sample(c) => {
            let l = c.load()?;
            let pts = combinatorial_interior_sample(&l.spec, l.opts.samples, l.opts.seed, &l.opts.tol)?;
            write_artifact(&c.out_dir, "locus.csv", &locus_csv(&l.spec, &pts, &l.opts.tol)?, out)?;
            Ok(EXIT_OK)
        }
        Command::Curvature { r, c1, step, tol } => {
            out.write_all(curvature_table(&r, c1, step, tol)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::SliceSvg { common, a } => {
            let l = common.load()?;
            let level = a.unwrap_or_else(|| default_level(&l.spec, &l.opts.tol));
            write_artifact(&common.out_dir, "slice.svg", &render_slice_svg(&l.spec, level)?, out)?;
            Ok(EXIT_OK)
        }
        Command::Report(c) => {
            let dir = c.out_dir.clone().ok_or_else(|| Error::Validation("report requires --out-dir".into()))?;
            let l = c.load()?;
            let target = Some(dir.clone());
            let r = analyze(&l.spec, &l.opts)?;
            write_artifact(&target, "config.toml", &emit_config(&l.spec)?, out)?;
            write_artifact(&target, "analysis.json", &(r.to_json() + "\n"), out)?;
            write_artifact(&target, "conditions.txt", &condition_summary(&r), out)?;
            if r.nonempty {
                if let Ok(pts) = combinatorial_interior_sample(&l.spec, l.opts.samples, l.opts.seed, &l.opts.tol) {
                    write_artifact(&target, "locus.csv", &locus_csv(&l.spec, &pts, &l.opts.tol)?, out)?;
                }
            }
            if l.spec.n() == 1 {
                let level = default_level(&l.spec, &l.opts.tol);
                write_artifact(&target, "slice.svg", &render_slice_svg(&l.spec, level)?, out)?;
            }
            write_artifact(&target, "curvature.csv", &curvature_table(&[0.0, 0.5, 1.0, 2.0], 1.0, 1e-4, 1e-6)?, out)?;
            Ok(if c.strict && has_unknown(&r) { EXIT_UNCERTIFIED } else { EXIT_OK })
        }
    }
}

/// Runs the command line `argv` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
