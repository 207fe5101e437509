//! Simplicity of planar developments, weak monotonicity of arcs, and a
//! brute-force overlap test on face layouts.

use serde::{Deserialize, Serialize};

use crate::cut_tree::CutTree;
use crate::development::{develop_tracing, InitialCondition, PlanarPath, UnfoldingLayout};
use crate::error::{Result, UnfoldError};
use crate::geom::{segment_intersection, signed_area2, Point2, SegmentIntersection, TolerancePolicy};
use crate::polyhedron::Polyhedron;
use crate::tracing::trace_boundary;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Indices of the two offending edges, smaller first.
    pub edges: (usize, usize),
    pub point: Point2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub simple: bool,
    pub first_violation: Option<Violation>,
}

impl SimplicityReport {
    fn from_violation(v: Option<Violation>) -> Self {
        Self { simple: v.is_none(), first_violation: v }
    }
}

/// Pairwise edge test: only consecutive edges may meet, and then only at
/// their common vertex. For closed paths the last and first edges are
/// consecutive.
pub fn is_simple(path: &PlanarPath) -> SimplicityReport {
    is_simple_with(path, &TolerancePolicy::default())
}

pub fn is_simple_with(path: &PlanarPath, tol: &TolerancePolicy) -> SimplicityReport {
    let mut v = path.vertices.clone();
    if path.closed && v.len() > 1 {
        // Snap the closing vertex so the closing edges meet exactly.
        let n = v.len();
        v[n - 1] = v[0];
    }
    let ne = v.len().saturating_sub(1);
    for i in 0..ne {
        for j in i + 1..ne {
            let consecutive = j == i + 1 || (path.closed && i == 0 && j == ne - 1 && ne > 2);
            let hit = segment_intersection((v[i], v[i + 1]), (v[j], v[j + 1]), tol);
            let bad = match hit {
                SegmentIntersection::Disjoint => false,
                SegmentIntersection::Overlap(_) => true,
                SegmentIntersection::ProperCross(_) => true,
                SegmentIntersection::EndpointTouch(w) => {
                    if consecutive {
                        let common = if j == i + 1 { v[j] } else { v[0] };
                        w != common && !touch_is_common(tol, (v[i], v[i + 1]), (v[j], v[j + 1]), common)
                    } else {
                        true
                    }
                }
            };
            if bad {
                let point = hit.witness().expect("non-disjoint intersections carry a witness");
                return SimplicityReport::from_violation(Some(Violation { edges: (i, j), point }));
            }
        }
    }
    SimplicityReport::from_violation(None)
}

// Consecutive edges touching: the only contact must be the shared vertex.
// A reported witness away from it means the far end of one edge lies on the
// other.
fn touch_is_common(tol: &TolerancePolicy, s1: (Point2, Point2), s2: (Point2, Point2), common: Point2) -> bool {
    let far1 = if s1.0 == common { s1.1 } else { s1.0 };
    let far2 = if s2.0 == common { s2.1 } else { s2.0 };
    // Shrink each edge away from the common vertex and test again.
    let cut = |far: Point2| common + (far - common) * 0.5;
    let a = segment_intersection((cut(far1), far1), s2, tol);
    let b = segment_intersection(s1, (cut(far2), far2), tol);
    a.is_disjoint() && b.is_disjoint()
}

/// Simple, and the vertical ray up from the higher end point and the ray
/// down from the lower one meet the path only at their base points.
pub fn is_weakly_monotone(path: &PlanarPath) -> Result<bool> {
    is_weakly_monotone_with(path, &TolerancePolicy::default())
}

pub fn is_weakly_monotone_with(path: &PlanarPath, tol: &TolerancePolicy) -> Result<bool> {
    if path.closed {
        return Err(UnfoldError::Domain("weak monotonicity of a closed path".into()));
    }
    if path.len() < 2 {
        return Err(UnfoldError::Domain("weak monotonicity needs at least one edge".into()));
    }
    let (a, b) = (path.first(), path.last());
    if a.y == b.y {
        return Err(UnfoldError::Domain("end points at equal height".into()));
    }
    if !is_simple_with(path, tol).simple {
        return Ok(false);
    }
    let (lo, hi) = path.bbox();
    let reach = 10.0 * (hi.y - lo.y).max(hi.x - lo.x);
    let ne = path.num_edges();
    let (top, top_idx, bottom, bottom_idx) = if a.y > b.y { (a, 0, b, ne) } else { (b, ne, a, 0) };
    let rays = [
        ((top, top + Point2::new(0.0, reach)), top_idx),
        ((bottom, bottom - Point2::new(0.0, reach)), bottom_idx),
    ];
    for (ray, base_idx) in rays {
        for e in 0..ne {
            let hit = segment_intersection(ray, path.segment(e), tol);
            let incident = e == base_idx || e + 1 == base_idx;
            let ok = match hit {
                SegmentIntersection::Disjoint => true,
                SegmentIntersection::EndpointTouch(w) => incident && w == ray.0,
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Splits a closed boundary at positions `p0` and `p1` and asks whether both
/// arcs are weakly monotone. The boundary must bound an immersed disk; that
/// is the caller's obligation and is not checked here.
pub fn two_arc_embedded(boundary: &PlanarPath, p0: usize, p1: usize) -> Result<bool> {
    if !boundary.closed {
        return Err(UnfoldError::Domain("two-arc test needs a closed boundary".into()));
    }
    let n = boundary.len() - 1;
    if p0 == p1 || p0 >= n || p1 >= n {
        return Err(UnfoldError::Domain(format!("split points {p0}, {p1} must be distinct positions below {n}")));
    }
    let arc = |from: usize, to: usize| {
        let len = (to + n - from) % n;
        PlanarPath::new((0..=len).map(|k| boundary.vertices[(from + k) % n]).collect(), false)
    };
    Ok(is_weakly_monotone(&arc(p0, p1))? && is_weakly_monotone(&arc(p1, p0))?)
}

/// Develops the boundary walk of the cut surface and tests it for
/// simplicity.
pub fn unfolding_is_simple(p: &Polyhedron, t: &CutTree) -> Result<SimplicityReport> {
    let tp = trace_boundary(p, t)?;
    let d = develop_tracing(p, &tp, InitialCondition::default());
    Ok(is_simple_with(&d, &p.tolerance()))
}

/// Area fraction of the smaller face above which two placed faces count as
/// overlapping.
pub const OVERLAP_AREA_FRACTION: f64 = 1e-9;

// Sutherland-Hodgman: clip `subject` against the counterclockwise convex
// polygon `clip`.
fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut out = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % clip.len()]);
        let side = |p: Point2| (b - a).cross(p - a);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let (p, q) = (input[j], input[(j + 1) % input.len()]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push(p + (q - p) * t);
            }
        }
    }
    out
}

/// Area of the intersection of two counterclockwise convex polygons.
pub fn convex_overlap_area(a: &[Point2], b: &[Point2]) -> f64 {
    let c = clip_convex(a, b);
    if c.len() < 3 {
        0.0
    } else {
        0.5 * signed_area2(&c).max(0.0)
    }
}

/// Whether any two placed faces overlap in positive area.
pub fn oracle_layout_overlap(layout: &UnfoldingLayout) -> bool {
    first_layout_overlap(layout).is_some()
}

/// The first pair of faces (in index order) overlapping in positive area.
pub fn first_layout_overlap(layout: &UnfoldingLayout) -> Option<(usize, usize)> {
    let areas: Vec<f64> = layout.faces.iter().map(|f| 0.5 * signed_area2(f)).collect();
    for i in 0..layout.faces.len() {
        for j in i + 1..layout.faces.len() {
            let ov = convex_overlap_area(&layout.faces[i], &layout.faces[j]);
            if ov > OVERLAP_AREA_FRACTION * areas[i].min(areas[j]) {
                return Some((i, j));
            }
        }
    }
    None
}
