//! SVG figure of the slice `{a = const}` of the cones `K_k` for `n = 1`.

use std::fmt::Write as _;
use std::path::Path;

use super::walls::slice_cones;
use crate::error::{Error, Result};
use crate::lattice::QuotientSpec;
use crate::tolerance::Tolerances;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Render the slice at level `a` as an SVG document.
pub fn render_slice_svg(spec: &QuotientSpec, a: f64) -> Result<String> {
    if spec.n() != 1 {
        return Err(Error::UnsupportedDimension { n: spec.n() });
    }
    let tol = Tolerances::<f64>::default();
    let all: Vec<usize> = Vec::new();
    let cones = slice_cones::<f64>(spec, &all, &tol).unwrap_or_default();
    let discs: Vec<(usize, f64, f64, f64)> = cones
        .iter()
        .filter_map(|c| {
            let r = c.radius(a);
            (r >= 0.0).then_some((c.k, c.c.re, c.c.im, r))
        })
        .collect();

    // world window: every centre plus every visible disc
    let (mut x0, mut x1, mut y0, mut y1) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
    for c in &cones {
        x0 = x0.min(c.c.re - 0.5);
        x1 = x1.max(c.c.re + 0.5);
        y0 = y0.min(c.c.im - 0.5);
        y1 = y1.max(c.c.im + 0.5);
    }
    for &(_, x, y, r) in &discs {
        x0 = x0.min(x - r);
        x1 = x1.max(x + r);
        y0 = y0.min(y - r);
        y1 = y1.max(y + r);
    }
    let span = (x1 - x0).max(y1 - y0);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let cxm = (x0 + x1) / 2.0;
    let cym = (y0 + y1) / 2.0;
    let sx = |x: f64| SIZE / 2.0 + (x - cxm) * scale;
    let sy = |y: f64| SIZE / 2.0 - (y - cym) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE:.0}" height="{h:.0}" viewBox="0 0 {SIZE:.0} {h:.0}">"#,
        h = SIZE + 40.0
    );
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    for &(k, x, y, r) in &discs {
        let _ = writeln!(s, r#"  <g id="cone-{}">"#, k + 1);
        let _ = writeln!(
            s,
            r#"    <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="rgb(70,110,200)" fill-opacity="0.15" stroke="rgb(40,70,160)" stroke-width="1.5"/>"#,
            sx(x),
            sy(y),
            r * scale
        );
        let _ = writeln!(
            s,
            r#"    <text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="11">K{}: c=({:.4},{:.4}) r={:.4}</text>"#,
            sx(x) + 4.0,
            sy(y) - 4.0,
            k + 1,
            x,
            y,
            r
        );
        let _ = writeln!(s, "  </g>");
    }
    for c in &cones {
        let (px, py) = (sx(c.c.re), sy(c.c.im));
        let _ = writeln!(s, r#"  <g id="vertex-{}">"#, c.k + 1);
        let _ = writeln!(
            s,
            r#"    <path d="M {:.6} {:.6} L {:.6} {:.6} M {:.6} {:.6} L {:.6} {:.6}" stroke="rgb(180,40,40)" stroke-width="1.5"/>"#,
            px - 4.0,
            py - 4.0,
            px + 4.0,
            py + 4.0,
            px - 4.0,
            py + 4.0,
            px + 4.0,
            py - 4.0
        );
        let _ = writeln!(
            s,
            r#"    <text x="{:.6}" y="{:.6}" font-family="sans-serif" font-size="10" fill="rgb(180,40,40)">V{} (a={:.4})</text>"#,
            px + 5.0,
            py + 12.0,
            c.k + 1,
            c.alpha
        );
        let _ = writeln!(s, "  </g>");
    }
    let _ = writeln!(
        s,
        r#"  <text id="legend" x="{MARGIN:.0}" y="{:.0}" font-family="sans-serif" font-size="13">slice a = {a:.6}; {} of {} discs nonempty</text>"#,
        SIZE + 20.0,
        discs.len(),
        cones.len()
    );
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn cone_slice_svg(spec: &QuotientSpec, a: f64, path: &Path) -> Result<()> {
    let doc = render_slice_svg(spec, a)?;
    std::fs::write(path, doc)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use num_complex::Complex;

    fn nested() -> QuotientSpec {
        QuotientSpec::new(
            1,
            vec![vec![1], vec![1]],
            vec![rat(0, 1), rat(1, 1)],
            vec![Complex::new(rat(0, 1), rat(0, 1)); 2],
        )
        .unwrap()
    }

    #[test]
    fn nested_cones_draw_two_discs() {
        let doc = render_slice_svg(&nested(), 2.0).unwrap();
        assert_eq!(doc.matches("<circle").count(), 2);
        assert!(doc.contains(r#"id="cone-1""#) && doc.contains(r#"id="cone-2""#));
        assert_eq!(doc, render_slice_svg(&nested(), 2.0).unwrap());
    }

    #[test]
    fn single_cone_single_disc() {
        let s = QuotientSpec::homogeneous(1, vec![vec![1]]).unwrap();
        assert_eq!(render_slice_svg(&s, 1.0).unwrap().matches("<circle").count(), 1);
    }

    #[test]
    fn below_vertices_legend_only() {
        let doc = render_slice_svg(&nested(), -1.0).unwrap();
        assert_eq!(doc.matches("<circle").count(), 0);
        assert!(doc.contains("0 of 2 discs"));
    }

    #[test]
    fn higher_rank_rejected() {
        let s = QuotientSpec::homogeneous(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(render_slice_svg(&s, 0.0), Err(Error::UnsupportedDimension { n: 2 })));
    }

    #[test]
    fn writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("slice.svg");
        cone_slice_svg(&nested(), 2.0, &p).unwrap();
        assert!(std::fs::read_to_string(p).unwrap().starts_with("<svg"));
    }
}
