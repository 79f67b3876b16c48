//! TOML configuration documents describing a quotient.
//!
//! ```toml
//! n = 1
//! d = 2
//! U = [1, 1]                          # row-major, n rows of d entries
//! lambda1 = [[0, 1], [1, 1]]          # p/q per index
//! lambdaC = [[0, 1, 0, 1], [0, 1, 0, 1]]  # re p/q, im p/q per index
//! seed = 0
//!
//! [tolerances]
//! mem = 1e-9
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::lattice::{ComplexRational, QuotientSpec};
use crate::tolerance::ToleranceOverrides;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConfigDocument {
    pub n: usize,
    pub d: usize,
    /// Row-major `n x d`; column `k` is `u_k`.
    pub u: Vec<i64>,
    pub lambda1: Vec<[i64; 2]>,
    pub lambda_c: Vec<[i64; 4]>,
    pub tolerances: Option<ToleranceOverrides>,
    pub seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    n: Spanned<i64>,
    d: Spanned<i64>,
    #[serde(rename = "U")]
    u: Spanned<Vec<i64>>,
    lambda1: Spanned<Vec<[i64; 2]>>,
    #[serde(rename = "lambdaC")]
    lambda_c: Spanned<Vec<[i64; 4]>>,
    tolerances: Option<ToleranceOverrides>,
    seed: Option<u64>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn at<T>(text: &str, s: &Spanned<T>, field: &str, msg: impl Into<String>) -> Error {
    Error::Parse { line: line_of(text, s.span().start), field: field.into(), msg: msg.into() }
}

fn ratio(text: &str, s: &Spanned<impl Sized>, field: &str, k: usize, p: i64, q: i64) -> Result<Rational> {
    if q == 0 {
        return Err(at(text, s, field, format!("entry {}: zero denominator", k + 1)));
    }
    Ok(Rational::new(BigInt::from(p), BigInt::from(q)))
}

/// Parses a document without building the spec.
pub fn parse_document(text: &str) -> Result<ConfigDocument> {
    let raw: Raw = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(text, s.start));
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .unwrap_or("document")
            .to_string();
        Error::Parse { line, field, msg }
    })?;
    let n = usize::try_from(*raw.n.get_ref()).map_err(|_| at(text, &raw.n, "n", "must be nonnegative"))?;
    let d = usize::try_from(*raw.d.get_ref()).map_err(|_| at(text, &raw.d, "d", "must be nonnegative"))?;
    if raw.u.get_ref().len() != n * d {
        return Err(at(text, &raw.u, "U", format!("expected n*d = {} entries, got {}", n * d, raw.u.get_ref().len())));
    }
    if raw.lambda1.get_ref().len() != d {
        return Err(at(text, &raw.lambda1, "lambda1", format!("expected {d} entries, got {}", raw.lambda1.get_ref().len())));
    }
    if raw.lambda_c.get_ref().len() != d {
        return Err(at(text, &raw.lambda_c, "lambdaC", format!("expected {d} entries, got {}", raw.lambda_c.get_ref().len())));
    }
    for (k, r) in raw.lambda1.get_ref().iter().enumerate() {
        ratio(text, &raw.lambda1, "lambda1", k, r[0], r[1])?;
    }
    for (k, r) in raw.lambda_c.get_ref().iter().enumerate() {
        ratio(text, &raw.lambda_c, "lambdaC", k, r[0], r[1])?;
        ratio(text, &raw.lambda_c, "lambdaC", k, r[2], r[3])?;
    }
    Ok(ConfigDocument {
        n,
        d,
        u: raw.u.into_inner(),
        lambda1: raw.lambda1.into_inner(),
        lambda_c: raw.lambda_c.into_inner(),
        tolerances: raw.tolerances,
        seed: raw.seed,
    })
}

impl ConfigDocument {
    pub fn to_spec(&self) -> Result<QuotientSpec> {
        let cols: Vec<Vec<i64>> = (0..self.d).map(|k| (0..self.n).map(|i| self.u[i * self.d + k]).collect()).collect();
        let r = |p: i64, q: i64| Rational::new(BigInt::from(p), BigInt::from(q));
        let l1 = self.lambda1.iter().map(|x| r(x[0], x[1])).collect();
        let lc: Vec<ComplexRational> = self.lambda_c.iter().map(|x| Complex::new(r(x[0], x[1]), r(x[2], x[3]))).collect();
        let spec = QuotientSpec::new(self.n, cols, l1, lc).map_err(|e| match e {
            Error::Dimension(m) => Error::Validation(m),
            other => other,
        })?;
        Ok(spec)
    }

    pub fn from_spec(spec: &QuotientSpec) -> Result<Self> {
        let (n, d) = (spec.n(), spec.d());
        let small = |x: &Rational| -> Result<[i64; 2]> {
            match (x.numer().to_i64(), x.denom().to_i64()) {
                (Some(p), Some(q)) => Ok([p, q]),
                _ => Err(Error::Validation(format!("level constant {x} does not fit in 64-bit integers"))),
            }
        };
        let mut u = Vec::with_capacity(n * d);
        for i in 0..n {
            for k in 0..d {
                u.push(spec.u(k)[i]);
            }
        }
        let lambda1 = spec.lambda1().iter().map(small).collect::<Result<_>>()?;
        let lambda_c = spec
            .lambda_c()
            .iter()
            .map(|z| {
                let (re, im) = (small(&z.re)?, small(&z.im)?);
                Ok([re[0], re[1], im[0], im[1]])
            })
            .collect::<Result<_>>()?;
        Ok(Self { n, d, u, lambda1, lambda_c, tolerances: None, seed: None })
    }

    pub fn emit(&self) -> String {
        let list = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "d = {}", self.d);
        let _ = writeln!(out, "U = [{}]", list(&self.u));
        let l1: Vec<String> = self.lambda1.iter().map(|x| format!("[{}]", list(x))).collect();
        let _ = writeln!(out, "lambda1 = [{}]", l1.join(", "));
        let lc: Vec<String> = self.lambda_c.iter().map(|x| format!("[{}]", list(x))).collect();
        let _ = writeln!(out, "lambdaC = [{}]", lc.join(", "));
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed = {s}");
        }
        if let Some(t) = &self.tolerances {
            let fields = [
                ("mem", t.mem),
                ("feas", t.feas),
                ("int", t.int),
                ("rank", t.rank),
                ("deg", t.deg),
                ("lift", t.lift),
                ("alg", t.alg),
            ];
            out.push_str("\n[tolerances]\n");
            for (name, v) in fields {
                if let Some(v) = v {
                    let _ = writeln!(out, "{name} = {v:e}");
                }
            }
        }
        out
    }
}

/// Parses and validates a document into a spec.
pub fn parse_config(text: &str) -> Result<QuotientSpec> {
    parse_document(text)?.to_spec()
}

pub fn emit_config(spec: &QuotientSpec) -> Result<String> {
    Ok(ConfigDocument::from_spec(spec)?.emit())
}
