//! CSV dump of sampled points with their degeneracy data.

use std::fmt::Write as _;
use std::path::Path;

use super::{lift, q_solvability};
use crate::analysis::degeneracy_at;
use crate::cone::MomentImagePoint;
use crate::error::Result;
use crate::lattice::QuotientSpec;
use crate::tolerance::Tolerances;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Columns: `a_i`, `re_b_i`, `im_b_i`, `f_k`, `degenerate`, `min_abs_eig`.
/// The eigenvalue column refers to the lift with every sheet `+`.
pub fn locus_csv(spec: &QuotientSpec, points: &[MomentImagePoint<f64>], tol: &Tolerances<f64>) -> Result<String> {
    let (n, d) = (spec.n(), spec.d());
    let mut header: Vec<String> = Vec::new();
    header.extend((1..=n).map(|i| format!("a_{i}")));
    header.extend((1..=n).map(|i| format!("re_b_{i}")));
    header.extend((1..=n).map(|i| format!("im_b_{i}")));
    header.extend((1..=d).map(|k| format!("f_{k}")));
    header.push("degenerate".into());
    header.push("min_abs_eig".into());
    let mut out = header.join(",");
    out.push('\n');
    for m in points {
        let v = m.point.to_vec();
        let mut row: Vec<String> = v.iter().map(|&x| num(x)).collect();
        row.extend(m.fk.iter().map(|&f| num(f)));
        let deg = degeneracy_at(spec, m, tol)?.is_some();
        let sheet: Vec<i8> = (0..d).map(|k| if m.stratum.wall.contains(&k) { 0 } else { 1 }).collect();
        let p = lift(spec, m, &sheet, None)?;
        let eig = q_solvability(spec, &p, tol).min_abs_eigenvalue;
        row.push(u8::from(deg).to_string());
        row.push(num(eig));
        let _ = writeln!(out, "{}", row.join(","));
    }
    Ok(out)
}

pub fn write_locus_csv(
    spec: &QuotientSpec,
    points: &[MomentImagePoint<f64>],
    tol: &Tolerances<f64>,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, locus_csv(spec, points, tol)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::combinatorial_interior_sample;
    use crate::exact::rat;
    use num_complex::Complex;

    #[test]
    fn header_and_rows() {
        let s = QuotientSpec::new(
            1,
            vec![vec![2], vec![1]],
            vec![rat(0, 1), rat(1, 1)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 2],
        )
        .unwrap();
        let tol = Tolerances::default();
        let pts = combinatorial_interior_sample(&s, 5, 3, &tol).unwrap();
        let csv = locus_csv(&s, &pts, &tol).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "a_1,re_b_1,im_b_1,f_1,f_2,degenerate,min_abs_eig");
        assert_eq!(lines.len(), 6);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 7);
        let mantissa = first[0].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17);
    }
}
