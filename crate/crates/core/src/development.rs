//! Planar developments of surface paths and the face layout of an unfolding.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cut_tree::CutTree;
use crate::error::{Result, UnfoldError};
use crate::geom::{Point2, Point3};
use crate::path::SurfacePath;
use crate::polyhedron::Polyhedron;
use crate::tracing::{trace_boundary, TracingPath};

/// Start point and unit direction of the first developed edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub start: Point2,
    pub direction: Point2,
}

impl InitialCondition {
    pub fn new(start: Point2, direction: Point2) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0 && n.is_finite() && start.is_finite()) {
            return Err(UnfoldError::Domain("initial direction must be a finite nonzero vector".into()));
        }
        Ok(Self { start, direction: direction * (1.0 / n) })
    }
}

impl Default for InitialCondition {
    /// Start at the origin heading straight down.
    fn default() -> Self {
        Self { start: Point2::new(0.0, 0.0), direction: Point2::new(0.0, -1.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarPath {
    pub vertices: Vec<Point2>,
    pub closed: bool,
}

impl PlanarPath {
    pub fn new(vertices: Vec<Point2>, closed: bool) -> Self {
        Self { vertices, closed }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn segment(&self, i: usize) -> (Point2, Point2) {
        (self.vertices[i], self.vertices[i + 1])
    }

    pub fn first(&self) -> Point2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2 {
        *self.vertices.last().expect("nonempty planar path")
    }

    pub fn perimeter(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> (Point2, Point2) {
        self.vertices.iter().fold(
            (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
            |(lo, hi), p| (Point2::new(lo.x.min(p.x), lo.y.min(p.y)), Point2::new(hi.x.max(p.x), hi.y.max(p.y))),
        )
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Distance between the last and the first vertex.
    pub fn endpoint_gap(&self) -> f64 {
        self.first().dist(self.last())
    }

    pub fn inverse(&self) -> Self {
        Self { vertices: self.vertices.iter().rev().copied().collect(), closed: self.closed }
    }

    /// `self^-1 . other` with the first `m` back-tracking edges removed,
    /// where `self` and `other` share their first `m + 1` vertices.
    pub fn inverse_compose(&self, other: &Self, m: usize) -> Self {
        let k = self.len() - 1;
        let mut vertices: Vec<Point2> = self.vertices[m..].iter().rev().copied().collect();
        debug_assert_eq!(vertices.len(), k - m + 1);
        vertices.extend(&other.vertices[m + 1..]);
        Self { vertices, closed: false }
    }

    /// Signed turning angle at each interior vertex (and at the start of a
    /// closed path, listed last), in `(-pi, pi]`.
    pub fn turning_angles(&self) -> Vec<f64> {
        let v = &self.vertices;
        let turn = |a: Point2, o: Point2, b: Point2| {
            let (d0, d1) = (o - a, b - o);
            d0.cross(d1).atan2(d0.dot(d1))
        };
        let mut out: Vec<f64> = v.windows(3).map(|w| turn(w[0], w[1], w[2])).collect();
        if self.closed && v.len() > 2 {
            out.push(turn(v[v.len() - 2], v[0], v[1]));
        }
        out
    }
}

/// Develops a polyline with the given edge lengths, turning left by
/// `pi - theta[i]` at interior vertex `i + 1`.
pub fn develop_with_angles(lengths: &[f64], theta: &[f64], init: InitialCondition) -> PlanarPath {
    debug_assert_eq!(theta.len() + 1, lengths.len().max(1));
    let mut vertices = Vec::with_capacity(lengths.len() + 1);
    let mut p = init.start;
    let mut heading = init.direction;
    vertices.push(p);
    for (i, &l) in lengths.iter().enumerate() {
        if i > 0 {
            heading = heading.rotated(PI - theta[i - 1]);
        }
        p = p + heading * l;
        vertices.push(p);
    }
    PlanarPath { vertices, closed: false }
}

/// Left development: lengths and left angles of the surface path.
pub fn develop(p: &Polyhedron, path: &SurfacePath, init: InitialCondition) -> Result<PlanarPath> {
    develop_mixed(p, path, 0, init)
}

/// Right angles at interior points `1..=base`, left angles after.
pub fn develop_mixed(p: &Polyhedron, path: &SurfacePath, base: usize, init: InitialCondition) -> Result<PlanarPath> {
    if base >= path.len().max(1) {
        return Err(UnfoldError::Domain(format!("base {base} outside a path of {} points", path.len())));
    }
    let lengths = path.edge_lengths(p);
    let theta: Vec<f64> = path
        .angles(p)?
        .iter()
        .enumerate()
        .map(|(j, a)| if j < base { 2.0 * PI - a.right } else { a.left })
        .collect();
    let mut out = develop_with_angles(&lengths, &theta, init);
    out.closed = path.is_closed();
    Ok(out)
}

/// Development of the closed boundary walk, using the wedge angles.
pub fn develop_tracing(p: &Polyhedron, tp: &TracingPath, init: InitialCondition) -> PlanarPath {
    let lengths = tp.closed_path().edge_lengths(p);
    let mut out = develop_with_angles(&lengths, &tp.theta[1..], init);
    out.closed = true;
    out
}

/// Largest vertex distance after moving `b` rigidly (rotation and
/// translation, no reflection) so that its first non-degenerate edge lies
/// on the corresponding edge of `a`.
pub fn aligned_deviation(a: &PlanarPath, b: &PlanarPath) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let Some(j) = (0..a.num_edges()).find(|&j| a.vertices[j] != a.vertices[j + 1]) else {
        return a.vertices.iter().zip(&b.vertices).map(|(x, y)| x.dist(*y)).fold(0.0, f64::max);
    };
    let (da, db) = (a.vertices[j + 1] - a.vertices[j], b.vertices[j + 1] - b.vertices[j]);
    let rot = da.cross(db).atan2(da.dot(db));
    let map = |x: Point2| a.vertices[j] + (x - b.vertices[j]).rotated(-rot);
    a.vertices.iter().zip(&b.vertices).map(|(x, y)| x.dist(map(*y))).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CongruenceReport {
    /// Shared prefix length used for the composition.
    pub m: usize,
    pub max_deviation: f64,
    /// `(Gamma bar)^-1 . (Omega bar)`, computed in the plane.
    pub direct: PlanarPath,
    /// Mixed development of the surface composition based at `gamma_m`.
    pub mixed: PlanarPath,
}

/// Compares the planar composition of two developments sharing the first
/// `m + 1` points with the mixed development of the surface composition.
pub fn check_mixed_composition(p: &Polyhedron, gamma: &SurfacePath, omega: &SurfacePath, m: usize) -> Result<CongruenceReport> {
    let k = gamma.len() - 1;
    if m > k || m >= omega.len() || gamma.points[..=m] != omega.points[..=m] {
        return Err(UnfoldError::Domain(format!("paths do not share a prefix of length {m}")));
    }
    if m < k {
        if m == 0 || m + 1 >= omega.len() {
            return Err(UnfoldError::Domain("the split point must be interior to both paths".into()));
        }
        let left = p.strictly_left_of(&omega.points[m + 1], &gamma.points[m - 1], &gamma.points[m], &gamma.points[m + 1])?;
        if !left {
            return Err(UnfoldError::Domain("the second path does not leave to the left of the first".into()));
        }
    }
    let init = InitialCondition::default();
    let g = develop(p, gamma, init)?;
    let o = develop(p, omega, init)?;
    let direct = g.inverse_compose(&o, m);
    let mut points: Vec<_> = gamma.points[m..].iter().rev().cloned().collect();
    points.extend(omega.points[m + 1..].iter().cloned());
    let composite = SurfacePath::new(points);
    let mixed = if composite.len() < 2 {
        PlanarPath::new(direct.vertices.clone(), false)
    } else {
        develop_mixed(p, &composite, k - m, init)?
    };
    let mut mixed = mixed;
    mixed.closed = false;
    let max_deviation = aligned_deviation(&direct, &mixed);
    Ok(CongruenceReport { m, max_deviation, direct, mixed })
}

/// Planar image of every face of the cut surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingLayout {
    /// Per face, its planar polygon in the face's vertex order.
    pub faces: Vec<Vec<Point2>>,
    /// Pairs of faces glued along an uncut edge.
    pub glued: Vec<(usize, usize)>,
    /// Boundary of the cut surface read off the placed faces.
    pub boundary: PlanarPath,
}

// Places face `f` so that its vertex `a` goes to `pa` and the direction of
// its edge toward `b` goes to `dir`.
fn place_face(p: &Polyhedron, f: usize, a: usize, b: usize, pa: Point2, dir: Point2) -> Vec<Point2> {
    let origin = p.vertex(a);
    let e1 = (p.vertex(b) - origin).normalized().expect("edge has positive length");
    let e2 = p.face_normal(f).cross(e1);
    let d = dir * (1.0 / dir.norm());
    let d_perp = Point2::new(-d.y, d.x);
    p.face(f)
        .iter()
        .map(|&v| {
            let r: Point3 = p.vertex(v) - origin;
            pa + d * r.dot(e1) + d_perp * r.dot(e2)
        })
        .collect()
}

/// Lays the faces out breadth first across uncut edges, starting from the
/// face left of the first boundary edge with the top leaf at the origin and
/// its successor straight below.
pub fn layout_faces(p: &Polyhedron, t: &CutTree) -> Result<UnfoldingLayout> {
    let tp = trace_boundary(p, t)?;
    let nf = p.num_faces();
    let mut faces: Vec<Option<Vec<Point2>>> = vec![None; nf];
    let root = tp.left_face(p, 0);
    faces[root] = Some(place_face(p, root, tp.vertices[0], tp.vertices[1], Point2::new(0.0, 0.0), Point2::new(0.0, -1.0)));
    let mut glued = Vec::new();
    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let cycle = p.face(f).to_vec();
        let placed = faces[f].clone().expect("queued faces are placed");
        for i in 0..cycle.len() {
            let j = (i + 1) % cycle.len();
            let (a, b) = (cycle[i], cycle[j]);
            if t.contains_edge(a, b) {
                continue;
            }
            let e = p.edge_between(a, b).expect("face sides are edges");
            let g = p.edge(e).faces.into_iter().find(|&g| g != f).expect("edge has two faces");
            if faces[g].is_none() {
                faces[g] = Some(place_face(p, g, a, b, placed[i], placed[j] - placed[i]));
                glued.push((f.min(g), f.max(g)));
                queue.push_back(g);
            } else if !glued.contains(&(f.min(g), f.max(g))) {
                glued.push((f.min(g), f.max(g)));
            }
        }
    }
    let faces: Vec<Vec<Point2>> = faces
        .into_iter()
        .enumerate()
        .map(|(f, x)| x.ok_or_else(|| UnfoldError::Tree(format!("face {f} is not reachable across uncut edges"))))
        .collect::<Result<_>>()?;
    let n = tp.len();
    let mut boundary: Vec<Point2> = (0..n)
        .map(|q| {
            let f = tp.left_face(p, q);
            let i = p.face(f).iter().position(|&v| v == tp.vertices[q]).expect("corner lies in its face");
            faces[f][i]
        })
        .collect();
    boundary.push(boundary[0]);
    glued.sort_unstable();
    Ok(UnfoldingLayout { faces, glued, boundary: PlanarPath::new(boundary, true) })
}
