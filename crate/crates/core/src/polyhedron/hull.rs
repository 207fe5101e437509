//! Convex hull of a small point set by exhaustive plane enumeration.
//!
//! Cubic in the number of candidate planes times a linear side test; meant
//! for the few dozen points of a test corpus, where exact coplanarity
//! (cube faces, hexagons of a truncated tetrahedron) must be preserved.

use std::collections::BTreeSet;

use robust::{orient3d, Coord3D};

use super::Polyhedron;
use crate::error::{Result, UnfoldError};
use crate::geom::{Point3, TolerancePolicy};

fn c3(p: Point3) -> Coord3D<f64> {
    Coord3D { x: p.x, y: p.y, z: p.z }
}

/// Positive when `d` lies below the plane through `a, b, c` (with `a, b, c`
/// counterclockwise seen from above).
fn side(a: Point3, b: Point3, c: Point3, d: Point3) -> i8 {
    let s = orient3d(c3(a), c3(b), c3(c), c3(d));
    (s > 0.0) as i8 - (s < 0.0) as i8
}

/// Hull facets of `points` as outward polygons; points not on the hull
/// boundary as vertices are dropped and the rest re-indexed.
pub fn convex_hull(points: &[Point3], tol: TolerancePolicy) -> Result<Polyhedron> {
    let n = points.len();
    if n < 4 {
        return Err(UnfoldError::Domain(format!("hull needs at least 4 points, got {n}")));
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (points[i], points[j], points[k]);
                if (b - a).cross(c - a).norm() == 0.0 {
                    continue;
                }
                let mut pos = false;
                let mut neg = false;
                let mut on = vec![i, j, k];
                for (m, &d) in points.iter().enumerate() {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    match side(a, b, c, d) {
                        1 => pos = true,
                        -1 => neg = true,
                        _ => on.push(m),
                    }
                    if pos && neg {
                        break;
                    }
                }
                if pos && neg {
                    continue;
                }
                if !pos && !neg {
                    return Err(UnfoldError::Domain("all points are coplanar".into()));
                }
                on.sort_unstable();
                if !seen.insert(on.clone()) {
                    continue;
                }
                // Outward normal: away from the points strictly on one side.
                let mut normal = (b - a).cross(c - a);
                if neg {
                    normal = -normal;
                }
                facets.push(order_facet(points, on, normal));
            }
        }
    }
    let mut used: Vec<usize> = facets.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut remap = vec![usize::MAX; n];
    for (new, &old) in used.iter().enumerate() {
        remap[old] = new;
    }
    let verts: Vec<Point3> = used.iter().map(|&i| points[i]).collect();
    let faces = facets
        .into_iter()
        .map(|f| f.into_iter().map(|v| remap[v]).collect())
        .collect();
    // Nearly coplanar facets (from rounded coordinates) are merged here.
    super::io::from_raw(verts, faces, tol)
}

/// Counterclockwise (about `normal`) cycle of the extreme points of a
/// planar point set; points interior to the polygon or its sides are dropped.
fn order_facet(points: &[Point3], on: Vec<usize>, normal: Point3) -> Vec<usize> {
    let centre = on.iter().fold(Point3::default(), |a, &i| a + points[i]) * (1.0 / on.len() as f64);
    let x = (points[on[0]] - centre).normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0));
    let y = normal.cross(x).normalized().unwrap_or(Point3::new(0.0, 1.0, 0.0));
    let mut pts: Vec<(usize, f64, f64)> = on
        .iter()
        .map(|&i| {
            let d = points[i] - centre;
            (i, d.dot(x), d.dot(y))
        })
        .collect();
    // Monotone-chain hull in the facet's plane, counterclockwise.
    pts.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)));
    let cross = |o: &(usize, f64, f64), a: &(usize, f64, f64), b: &(usize, f64, f64)| {
        let an = points[a.0] - points[o.0];
        let bn = points[b.0] - points[o.0];
        an.cross(bn).dot(normal)
    };
    let mut hull: Vec<(usize, f64, f64)> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(usize, f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull.into_iter().map(|p| p.0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn cube_points() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64));
        }
        pts.push(Point3::new(0.5, 0.5, 0.5));
        pts.push(Point3::new(0.5, 0.5, 0.0));
        let p = convex_hull(&pts, TolerancePolicy::default()).unwrap();
        assert_eq!((p.num_vertices(), p.num_edges(), p.num_faces()), (8, 12, 6));
        for v in 0..8 {
            assert!((p.total_angle(v) - 0.75 * TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn coplanar_points_rejected() {
        let pts = [
            Point3::new(0., 0., 0.),
            Point3::new(1., 0., 0.),
            Point3::new(0., 1., 0.),
            Point3::new(1., 1., 0.),
        ];
        assert!(convex_hull(&pts, TolerancePolicy::default()).is_err());
    }
}
