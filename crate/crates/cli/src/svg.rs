//! SVG rendering of a net.

use std::fmt::Write;

use unfolder_core::development::UnfoldingLayout;
use unfolder_core::geom::Point2;

/// `x` with 9 significant digits, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn points(poly: &[Point2]) -> String {
    // SVG's y axis points down.
    poly.iter().map(|q| format!("{},{}", fmt_num(q.x), fmt_num(-q.y))).collect::<Vec<_>>().join(" ")
}

/// One `<polygon>` per face and the cut boundary as a separate closed path.
/// The view box is the bounding box grown by 5% of its larger side.
pub fn render(layout: &UnfoldingLayout) -> String {
    let all = layout.faces.iter().flatten();
    let (mut lo, mut hi) = (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for q in all {
        lo = Point2::new(lo.x.min(q.x), lo.y.min(-q.y));
        hi = Point2::new(hi.x.max(q.x), hi.y.max(-q.y));
    }
    if !lo.x.is_finite() {
        lo = Point2::new(0.0, 0.0);
        hi = lo;
    }
    let size = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
    let m = 0.05 * size;
    let stroke = fmt_num(size / 400.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        fmt_num(lo.x - m),
        fmt_num(lo.y - m),
        fmt_num(hi.x - lo.x + 2.0 * m),
        fmt_num(hi.y - lo.y + 2.0 * m)
    );
    let _ = writeln!(s, r#"<g fill="lightsteelblue" fill-opacity="0.6" stroke="gray" stroke-width="{stroke}">"#);
    for (f, poly) in layout.faces.iter().enumerate() {
        let _ = writeln!(s, r#"<polygon data-face="{f}" points="{}"/>"#, points(poly));
    }
    let _ = writeln!(s, "</g>");
    let b = &layout.boundary.vertices;
    if let Some((first, rest)) = b.split_first() {
        let mut d = format!("M {},{}", fmt_num(first.x), fmt_num(-first.y));
        for q in rest {
            let _ = write!(d, " L {},{}", fmt_num(q.x), fmt_num(-q.y));
        }
        d.push_str(" Z");
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="black" stroke-width="{}"/>"#, fmt_num(2.0 * size / 400.0));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use unfolder_core::cut_tree::build_downhill_tree;
    use unfolder_core::development::layout_faces;
    use unfolder_core::polyhedron::{shapes, Direction};

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.5), "-0.5");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt_num(12345.678912345), "12345.6789");
        assert_eq!(fmt_num(0.000123456789123), "0.000123456789");
        assert_eq!(fmt_num(-1e-20), "-0.00000000000000000001");
        assert_eq!(fmt_num(0.0), "0");
    }

    #[test]
    fn one_polygon_per_face() {
        let p = shapes::rotated(&shapes::cube(), shapes::sample_rotation());
        let t = build_downhill_tree(&p, Direction::up()).unwrap();
        let svg = render(&layout_faces(&p, &t).unwrap());
        assert_eq!(svg.matches("<polygon").count(), 6);
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let p = shapes::rotated(&shapes::octahedron(), shapes::sample_rotation());
        let t = build_downhill_tree(&p, Direction::up()).unwrap();
        let l = layout_faces(&p, &t).unwrap();
        assert_eq!(render(&l), render(&l.clone()));
    }
}
