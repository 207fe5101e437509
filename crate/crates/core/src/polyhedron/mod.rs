//! Convex polyhedra: construction, intrinsic angles, and affine stretching.

mod hull;
mod io;
pub mod shapes;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Result, UnfoldError};
use crate::geom::{ambient_angle, ccw_angle_about, Point3, TolerancePolicy};

pub use hull::convex_hull;
pub use io::{load_polyhedron, MeshFormat};

/// Height along the vertical axis.
pub fn height(p: Point3) -> f64 {
    p.z
}

/// A unit direction `u`; heights are measured as `<p, u>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction(Point3);

impl Direction {
    pub fn new(v: Point3) -> Result<Self> {
        v.normalized()
            .map(Direction)
            .ok_or_else(|| UnfoldError::Domain(format!("direction must be nonzero and finite: {v:?}")))
    }

    pub fn up() -> Self {
        Direction(Point3::new(0.0, 0.0, 1.0))
    }

    pub fn vector(self) -> Point3 {
        self.0
    }

    pub fn height(self, p: Point3) -> f64 {
        p.dot(self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    pub is_general: bool,
    /// Highest vertex, when unique.
    pub top_vertex: Option<usize>,
    /// Lowest vertex, when unique.
    pub bottom_vertex: Option<usize>,
    /// Smallest height difference across an edge.
    pub min_height_gap: f64,
    pub reasons: Vec<String>,
}

/// An undirected edge `v[0] < v[1]`. `faces[0]` traverses `v[0] -> v[1]`,
/// `faces[1]` traverses `v[1] -> v[0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub v: [usize; 2],
    pub faces: [usize; 2],
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if self.v[0] == v {
            self.v[1]
        } else {
            self.v[0]
        }
    }
}

/// One face corner at a vertex `o`. In the face cycle `... prev, o, next ...`
/// the corner sweeps counterclockwise (about the outward normal) from the ray
/// `o -> next` to the ray `o -> prev`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner {
    pub face: usize,
    pub next: usize,
    pub prev: usize,
    pub angle: f64,
    /// Angle of the ray `o -> next` measured from the first ray of the star.
    pub offset: f64,
}

/// A point of the surface, located combinatorially so that it can be
/// re-embedded on any affine image of the polyhedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SurfacePoint {
    Vertex(usize),
    /// `(1 - t) * lo + t * hi` on the edge with endpoints `lo < hi`.
    Edge { edge: usize, t: f64 },
    /// Convex combination of the face's vertex cycle.
    Face { face: usize, coords: Vec<f64> },
}

impl SurfacePoint {
    pub fn as_vertex(&self) -> Option<usize> {
        match *self {
            SurfacePoint::Vertex(v) => Some(v),
            _ => None,
        }
    }
}

/// Position of a point's ray in the star of a base point.
#[derive(Clone, Copy, Debug)]
struct RayPos {
    pos: f64,
    /// Set when the ray passes through a vertex; two such rays coincide
    /// exactly when the vertices do.
    through: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Polyhedron {
    vertices: Vec<Point3>,
    faces: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<(usize, usize), usize>,
    stars: Vec<Vec<Corner>>,
    totals: Vec<f64>,
    normals: Vec<Point3>,
    tol: TolerancePolicy,
}

fn newell_normal(pts: &[Point3]) -> Point3 {
    let n = pts.len();
    let mut acc = Point3::default();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        acc.x += (a.y - b.y) * (a.z + b.z);
        acc.y += (a.z - b.z) * (a.x + b.x);
        acc.z += (a.x - b.x) * (a.y + b.y);
    }
    acc
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Polyhedron {
    /// Builds a polyhedron from outward-oriented convex faces, checking
    /// closedness, genus, convexity and vertex extremality.
    pub fn from_faces(vertices: Vec<Point3>, faces: Vec<Vec<usize>>, tol: TolerancePolicy) -> Result<Self> {
        if vertices.len() < 4 {
            return Err(UnfoldError::Format(format!("need at least 4 vertices, got {}", vertices.len())));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(UnfoldError::Format(format!("vertex {i} has a non-finite coordinate")));
        }
        let mut used = vec![false; vertices.len()];
        for (fi, f) in faces.iter().enumerate() {
            if f.len() < 3 {
                return Err(UnfoldError::Format(format!("face {fi} has fewer than 3 vertices")));
            }
            for &v in f {
                if v >= vertices.len() {
                    return Err(UnfoldError::Format(format!("face {fi} references missing vertex {v}")));
                }
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&u| !u) {
            return Err(UnfoldError::Convexity { vertex: v, reason: "vertex lies on no face".into() });
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                if a == b {
                    return Err(UnfoldError::Format(format!("face {fi} repeats vertex {a}")));
                }
                if directed.insert((a, b), fi).is_some() {
                    return Err(UnfoldError::Format(format!("directed edge {a}->{b} used twice")));
                }
            }
        }
        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut keys: Vec<_> = directed.keys().copied().filter(|&(a, b)| a < b).collect();
        keys.sort_unstable();
        for (a, b) in keys {
            let f0 = directed[&(a, b)];
            let f1 = *directed
                .get(&(b, a))
                .ok_or_else(|| UnfoldError::Format(format!("edge {a}-{b} has only one incident face")))?;
            edge_lookup.insert((a, b), edges.len());
            edges.push(Edge { v: [a, b], faces: [f0, f1] });
        }
        if directed.len() != 2 * edges.len() {
            return Err(UnfoldError::Format("surface is not closed".into()));
        }
        let (nv, ne, nf) = (vertices.len() as i64, edges.len() as i64, faces.len() as i64);
        if nv - ne + nf != 2 {
            return Err(UnfoldError::Format(format!("Euler characteristic V-E+F = {} (expected 2)", nv - ne + nf)));
        }

        let mut stars = Vec::with_capacity(vertices.len());
        let mut incident: Vec<Vec<Corner>> = vec![Vec::new(); vertices.len()];
        for (fi, f) in faces.iter().enumerate() {
            let m = f.len();
            for i in 0..m {
                incident[f[i]].push(Corner {
                    face: fi,
                    next: f[(i + 1) % m],
                    prev: f[(i + m - 1) % m],
                    angle: 0.0,
                    offset: 0.0,
                });
            }
        }
        for (v, mut pool) in incident.into_iter().enumerate() {
            let mut star = vec![pool.swap_remove(0)];
            while !pool.is_empty() {
                let want = star.last().unwrap().prev;
                let Some(i) = pool.iter().position(|c| c.next == want) else {
                    return Err(UnfoldError::Format(format!("vertex {v} is not a manifold vertex")));
                };
                star.push(pool.swap_remove(i));
            }
            if star.last().unwrap().prev != star[0].next {
                return Err(UnfoldError::Format(format!("star of vertex {v} does not close")));
            }
            stars.push(star);
        }

        let mut p = Polyhedron {
            vertices,
            faces,
            edges,
            edge_lookup,
            stars,
            totals: Vec::new(),
            normals: Vec::new(),
            tol,
        };
        p.refresh_geometry()?;
        p.check_convexity()?;
        Ok(p)
    }

    fn refresh_geometry(&mut self) -> Result<()> {
        self.normals = Vec::with_capacity(self.faces.len());
        for (fi, f) in self.faces.iter().enumerate() {
            let pts: Vec<Point3> = f.iter().map(|&v| self.vertices[v]).collect();
            let n = newell_normal(&pts)
                .normalized()
                .ok_or_else(|| UnfoldError::Format(format!("face {fi} is degenerate")))?;
            self.normals.push(n);
        }
        self.totals = Vec::with_capacity(self.vertices.len());
        for (o, star) in self.stars.iter_mut().enumerate() {
            let po = self.vertices[o];
            let mut acc = 0.0;
            for c in star.iter_mut() {
                c.angle = ambient_angle(self.vertices[c.next] - po, self.vertices[c.prev] - po)
                    .map_err(|_| UnfoldError::Format(format!("zero-length edge at vertex {o}")))?;
                c.offset = acc;
                acc += c.angle;
            }
            self.totals.push(acc);
        }
        Ok(())
    }

    fn check_convexity(&self) -> Result<()> {
        let scale = self.diameter();
        for (fi, f) in self.faces.iter().enumerate() {
            let n = self.normals[fi];
            let m = f.len();
            for i in 0..m {
                let (p, o, q) = (self.vertices[f[(i + m - 1) % m]], self.vertices[f[i]], self.vertices[f[(i + 1) % m]]);
                if (o - p).cross(q - o).dot(n) <= 0.0 {
                    return Err(UnfoldError::Convexity { vertex: f[i], reason: format!("reflex or flat corner in face {fi}") });
                }
            }
            let base = self.vertices[f[0]];
            for (v, &pv) in self.vertices.iter().enumerate() {
                if (pv - base).dot(n) > self.tol.eps_len * scale {
                    return Err(UnfoldError::Convexity { vertex: v, reason: format!("lies above the plane of face {fi}") });
                }
            }
        }
        for (v, &t) in self.totals.iter().enumerate() {
            if t >= TAU - self.tol.eps_ang {
                return Err(UnfoldError::Convexity { vertex: v, reason: format!("total angle {t} is not below 2pi") });
            }
        }
        Ok(())
    }

    /// Same combinatorics with every vertex moved by `f`.
    pub fn map_vertices(&self, f: impl Fn(Point3) -> Point3) -> Result<Self> {
        let mut p = self.clone();
        p.vertices = self.vertices.iter().map(|&v| f(v)).collect();
        p.refresh_geometry()?;
        Ok(p)
    }

    /// The image under `A_lambda(p) = (p + (lambda - 1) <p,u> u) / lambda`.
    pub fn affine_stretch(&self, u: Direction, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 1.0 {
            return Err(UnfoldError::Domain(format!("stretch factor must be finite and >= 1, got {lambda}")));
        }
        if lambda == 1.0 {
            return Ok(self.clone());
        }
        let uv = u.vector();
        self.map_vertices(|p| (p + uv * ((lambda - 1.0) * p.dot(uv))) * (1.0 / lambda))
    }

    pub fn tolerance(&self) -> TolerancePolicy {
        self.tol
    }

    pub fn with_tolerance(mut self, tol: TolerancePolicy) -> Self {
        self.tol = tol;
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point3 {
        self.vertices[v]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn face_normal(&self, f: usize) -> Point3 {
        self.normals[f]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&edge_key(a, b)).copied()
    }

    /// Corners around `o` in counterclockwise order about the outward normal.
    pub fn star(&self, o: usize) -> &[Corner] {
        &self.stars[o]
    }

    /// Edge-graph neighbors of `v` in counterclockwise star order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.stars[v].iter().map(|c| c.next)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.stars[v].len()
    }

    pub fn total_angle(&self, o: usize) -> f64 {
        self.totals[o]
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, &a) in self.vertices.iter().enumerate() {
            for &b in &self.vertices[i + 1..] {
                d = d.max(a.dist(b));
            }
        }
        d
    }

    /// `|sum_v (2pi - total(v)) - 4pi|`.
    pub fn gauss_bonnet_residual(&self) -> f64 {
        let curv: f64 = self.totals.iter().map(|t| TAU - t).sum();
        (curv - 2.0 * TAU).abs()
    }

    pub fn check_general_position(&self, u: Direction) -> GeneralPositionReport {
        let h: Vec<f64> = self.vertices.iter().map(|&p| u.height(p)).collect();
        let thresh = self.tol.eps_len * self.diameter();
        let mut reasons = Vec::new();
        let argext = |better: fn(f64, f64) -> bool| {
            let mut best = 0;
            for v in 1..h.len() {
                if better(h[v], h[best]) {
                    best = v;
                }
            }
            let ties = (0..h.len()).filter(|&v| (h[v] - h[best]).abs() <= thresh).count();
            (best, ties)
        };
        let (top, top_ties) = argext(|a, b| a > b);
        let (bottom, bottom_ties) = argext(|a, b| a < b);
        if top_ties > 1 {
            reasons.push(format!("{top_ties} vertices attain the maximum height"));
        }
        if bottom_ties > 1 {
            reasons.push(format!("{bottom_ties} vertices attain the minimum height"));
        }
        let mut min_gap = f64::INFINITY;
        for e in &self.edges {
            let gap = (h[e.v[0]] - h[e.v[1]]).abs();
            min_gap = min_gap.min(gap);
            if gap <= thresh {
                reasons.push(format!("edge {}-{} is horizontal", e.v[0], e.v[1]));
            }
        }
        GeneralPositionReport {
            is_general: reasons.is_empty(),
            top_vertex: (top_ties == 1).then_some(top),
            bottom_vertex: (bottom_ties == 1).then_some(bottom),
            min_height_gap: min_gap,
            reasons,
        }
    }

    pub fn position(&self, p: &SurfacePoint) -> Point3 {
        match p {
            SurfacePoint::Vertex(v) => self.vertices[*v],
            SurfacePoint::Edge { edge, t } => {
                let e = &self.edges[*edge];
                self.vertices[e.v[0]].lerp(self.vertices[e.v[1]], *t)
            }
            SurfacePoint::Face { face, coords } => {
                let mut acc = Point3::default();
                for (&v, &c) in self.faces[*face].iter().zip(coords) {
                    acc = acc + self.vertices[v] * c;
                }
                acc
            }
        }
    }

    /// Whether the closed face `f` contains `p` (combinatorially).
    pub fn face_contains(&self, f: usize, p: &SurfacePoint) -> bool {
        match p {
            SurfacePoint::Vertex(v) => self.faces[f].contains(v),
            SurfacePoint::Edge { edge, .. } => self.edges[*edge].faces.contains(&f),
            SurfacePoint::Face { face, .. } => *face == f,
        }
    }

    /// Faces whose closure contains `p`.
    pub fn faces_of(&self, p: &SurfacePoint) -> Vec<usize> {
        match p {
            SurfacePoint::Vertex(v) => self.stars[*v].iter().map(|c| c.face).collect(),
            SurfacePoint::Edge { edge, .. } => self.edges[*edge].faces.to_vec(),
            SurfacePoint::Face { face, .. } => vec![*face],
        }
    }

    /// A face containing both points, if any.
    pub fn common_face(&self, a: &SurfacePoint, b: &SurfacePoint) -> Option<usize> {
        self.faces_of(a).into_iter().find(|&f| self.face_contains(f, b))
    }

    /// Total angle at any surface point: the vertex total, or `2pi` elsewhere.
    pub fn total_angle_at(&self, o: &SurfacePoint) -> f64 {
        match o {
            SurfacePoint::Vertex(v) => self.totals[*v],
            _ => TAU,
        }
    }

    fn ray_position(&self, o: &SurfacePoint, x: &SurfacePoint) -> Result<RayPos> {
        let po = self.position(o);
        let px = self.position(x);
        let domain = |msg: &str| UnfoldError::Domain(format!("{msg}: {x:?} in the star of {o:?}"));
        let through = x.as_vertex();
        match o {
            SurfacePoint::Vertex(ov) => {
                let ov = *ov;
                let neighbor = match x {
                    SurfacePoint::Vertex(w) if *w == ov => return Err(domain("point coincides with the base")),
                    SurfacePoint::Vertex(w) => Some(*w),
                    SurfacePoint::Edge { edge, t } => {
                        let e = &self.edges[*edge];
                        if e.v.contains(&ov) {
                            let w = e.other(ov);
                            let tw = if e.v[1] == w { *t } else { 1.0 - *t };
                            if tw <= 0.0 {
                                return Err(domain("point coincides with the base"));
                            }
                            Some(w)
                        } else {
                            None
                        }
                    }
                    SurfacePoint::Face { .. } => None,
                };
                if let Some(w) = neighbor {
                    if let Some(c) = self.stars[ov].iter().find(|c| c.next == w) {
                        return Ok(RayPos { pos: c.offset, through: Some(w) });
                    }
                }
                let d = px - po;
                for c in &self.stars[ov] {
                    if !self.face_contains(c.face, x) {
                        continue;
                    }
                    let mut phi = ccw_angle_about(self.vertices[c.next] - po, d, self.normals[c.face]);
                    if phi > c.angle + 0.5 * (TAU - c.angle) {
                        phi = 0.0; // tiny negative wrap
                    }
                    return Ok(RayPos { pos: c.offset + phi.min(c.angle), through });
                }
                Err(domain("point is outside the star"))
            }
            SurfacePoint::Edge { edge, t } => {
                let e = &self.edges[*edge];
                let (lo, hi) = (e.v[0], e.v[1]);
                let toward = |s: f64| -> Result<RayPos> {
                    if s > *t {
                        Ok(RayPos { pos: 0.0, through: Some(hi) })
                    } else if s < *t {
                        Ok(RayPos { pos: PI, through: Some(lo) })
                    } else {
                        Err(domain("point coincides with the base"))
                    }
                };
                match x {
                    SurfacePoint::Vertex(w) if *w == hi => return toward(1.0),
                    SurfacePoint::Vertex(w) if *w == lo => return toward(0.0),
                    SurfacePoint::Edge { edge: e2, t: s } if e2 == edge => return toward(*s),
                    _ => {}
                }
                let d = px - po;
                let clamp = |phi: f64| if phi > 1.5 * PI { 0.0 } else { phi.min(PI) };
                if self.face_contains(e.faces[0], x) {
                    let phi = ccw_angle_about(self.vertices[hi] - po, d, self.normals[e.faces[0]]);
                    Ok(RayPos { pos: clamp(phi), through })
                } else if self.face_contains(e.faces[1], x) {
                    let phi = ccw_angle_about(self.vertices[lo] - po, d, self.normals[e.faces[1]]);
                    Ok(RayPos { pos: PI + clamp(phi), through })
                } else {
                    Err(domain("point is outside the star"))
                }
            }
            SurfacePoint::Face { face, .. } => {
                if !self.face_contains(*face, x) {
                    return Err(domain("point is outside the star"));
                }
                let d = px - po;
                if d.norm() == 0.0 {
                    return Err(domain("point coincides with the base"));
                }
                let reference = self.vertices[self.faces[*face][0]] - po;
                Ok(RayPos { pos: ccw_angle_about(reference, d, self.normals[*face]), through })
            }
        }
    }

    fn same_ray(&self, a: RayPos, b: RayPos, total: f64) -> bool {
        match (a.through, b.through) {
            (Some(x), Some(y)) => x == y,
            _ => {
                let d = (a.pos - b.pos).rem_euclid(total);
                d.min(total - d) <= self.tol.eps_ang
            }
        }
    }

    /// Left angle of the path `[a, o, b]` at an arbitrary surface point `o`:
    /// the counterclockwise sweep from the ray through `b` to the ray
    /// through `a`, or the total angle when the two rays coincide.
    pub fn left_angle_at(&self, a: &SurfacePoint, o: &SurfacePoint, b: &SurfacePoint) -> Result<f64> {
        let total = self.total_angle_at(o);
        let ra = self.ray_position(o, a)?;
        let rb = self.ray_position(o, b)?;
        if self.same_ray(ra, rb, total) {
            return Ok(total);
        }
        Ok((ra.pos - rb.pos).rem_euclid(total))
    }

    /// Right angle of `[a, o, b]`, i.e. the left angle of `[b, o, a]`.
    pub fn right_angle_at(&self, a: &SurfacePoint, o: &SurfacePoint, b: &SurfacePoint) -> Result<f64> {
        self.left_angle_at(b, o, a)
    }

    pub fn left_angle(&self, a: &SurfacePoint, o: usize, b: &SurfacePoint) -> Result<f64> {
        self.left_angle_at(a, &SurfacePoint::Vertex(o), b)
    }

    /// Whether `c` lies strictly to the left of the path `[a, o, b]`.
    pub fn strictly_left_of(&self, c: &SurfacePoint, a: &SurfacePoint, o: &SurfacePoint, b: &SurfacePoint) -> Result<bool> {
        let total = self.total_angle_at(o);
        let (ra, rb, rc) = (self.ray_position(o, a)?, self.ray_position(o, b)?, self.ray_position(o, c)?);
        if self.same_ray(rc, ra, total) || self.same_ray(rc, rb, total) {
            return Ok(false);
        }
        Ok(self.left_angle_at(a, o, c)? < self.left_angle_at(a, o, b)?)
    }

    /// Angular position of the ray through `x` in the star of vertex `o`,
    /// measured counterclockwise from the first ray of the star.
    pub fn star_position(&self, o: usize, x: &SurfacePoint) -> Result<f64> {
        Ok(self.ray_position(&SurfacePoint::Vertex(o), x)?.pos)
    }

    /// Barycentric coordinates of `x` with respect to the cycle of face `f`.
    pub fn face_coords(&self, f: usize, x: &SurfacePoint) -> Result<Vec<f64>> {
        let cyc = &self.faces[f];
        let mut c = vec![0.0; cyc.len()];
        let slot = |v: usize| cyc.iter().position(|&w| w == v);
        match x {
            SurfacePoint::Vertex(v) => {
                let i = slot(*v).ok_or_else(|| UnfoldError::Domain(format!("vertex {v} not on face {f}")))?;
                c[i] = 1.0;
            }
            SurfacePoint::Edge { edge, t } => {
                let e = &self.edges[*edge];
                match (slot(e.v[0]), slot(e.v[1])) {
                    (Some(i), Some(j)) => {
                        c[i] = 1.0 - t;
                        c[j] = *t;
                    }
                    _ => return Err(UnfoldError::Domain(format!("edge {edge} not on face {f}"))),
                }
            }
            SurfacePoint::Face { face, coords } if *face == f => c.clone_from(coords),
            SurfacePoint::Face { face, .. } => {
                return Err(UnfoldError::Domain(format!("point of face {face} is not on face {f}")))
            }
        }
        Ok(c)
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.edge_between(a, b).is_some()
    }

    /// Corner of `o` lying in face `f`.
    pub fn corner_in_face(&self, o: usize, f: usize) -> Option<&Corner> {
        self.stars[o].iter().find(|c| c.face == f)
    }
}

#[cfg(test)]
mod tests {
    use super::shapes;
    use super::*;

    fn v(i: usize) -> SurfacePoint {
        SurfacePoint::Vertex(i)
    }

    fn find(p: &Polyhedron, q: Point3) -> usize {
        p.vertices().iter().position(|&x| x.dist(q) < 1e-12).unwrap()
    }

    #[test]
    fn counts() {
        let t = shapes::tetrahedron();
        assert_eq!((t.num_vertices(), t.num_edges(), t.num_faces()), (4, 6, 4));
        let c = shapes::cube();
        assert_eq!((c.num_vertices(), c.num_edges(), c.num_faces()), (8, 12, 6));
    }

    #[test]
    fn total_angles() {
        let t = shapes::tetrahedron();
        assert!((t.total_angle(0) - PI).abs() < 1e-12);
        let c = shapes::cube();
        assert!((c.total_angle(0) - 1.5 * PI).abs() < 1e-12);
        let o = shapes::octahedron();
        assert!((o.total_angle(0) - 4.0 * PI / 3.0).abs() < 1e-12);
        for p in [t, c, o, shapes::truncated_tetrahedron()] {
            assert!(p.gauss_bonnet_residual() < 1e-12 * p.num_vertices() as f64);
        }
    }

    #[test]
    fn faces_are_outward() {
        let c = shapes::cube();
        let centre = Point3::new(0.5, 0.5, 0.5);
        for f in 0..c.num_faces() {
            let p = c.vertex(c.face(f)[0]);
            assert!((p - centre).dot(c.face_normal(f)) > 0.0);
        }
    }

    #[test]
    fn cube_corner_left_angles() {
        let c = shapes::cube();
        let o = find(&c, Point3::new(0., 0., 0.));
        let a = v(find(&c, Point3::new(1., 0., 0.)));
        let b = v(find(&c, Point3::new(0., 1., 0.)));
        let ab = c.left_angle(&a, o, &b).unwrap();
        let ba = c.left_angle(&b, o, &a).unwrap();
        assert!((ab + ba - 1.5 * PI).abs() < 1e-12);
        // Seen from outside, the rays x, z, y around the origin run
        // counterclockwise, so the bottom face is on the left of [x, o, y].
        assert!((ab - 0.5 * PI).abs() < 1e-12, "{ab}");
        assert!((ba - PI).abs() < 1e-12, "{ba}");
        assert!((c.left_angle(&a, o, &a).unwrap() - 1.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn strictly_left_examples() {
        let c = shapes::cube();
        let o = find(&c, Point3::new(0., 0., 0.));
        let x = find(&c, Point3::new(1., 0., 0.));
        let y = find(&c, Point3::new(0., 1., 0.));
        let (a, b, ov) = (v(x), v(y), v(o));
        assert!(!c.strictly_left_of(&a, &a, &ov, &b).unwrap());
        assert!(!c.strictly_left_of(&b, &a, &ov, &b).unwrap());
        // The bottom face z = 0 is spanned by rays ox and oy.
        let bottom = (0..c.num_faces())
            .find(|&f| c.face(f).iter().all(|&w| c.vertex(w).z == 0.0))
            .unwrap();
        let mid = SurfacePoint::Face { face: bottom, coords: vec![0.25; 4] };
        assert!(c.strictly_left_of(&mid, &a, &ov, &b).unwrap());
        assert!(!c.strictly_left_of(&mid, &b, &ov, &a).unwrap());
    }

    #[test]
    fn left_angle_errors() {
        let c = shapes::cube();
        assert!(c.left_angle(&v(0), 0, &v(1)).is_err());
        let far = (0..8).find(|&w| !c.is_adjacent(0, w) && c.faces_of(&v(w)).iter().all(|&f| !c.face(f).contains(&0))).unwrap();
        assert!(c.left_angle(&v(far), 0, &v(c.star(0)[0].next)).is_err());
    }

    #[test]
    fn affine_stretch_examples() {
        let c = shapes::cube();
        let u = Direction::up();
        let same = c.affine_stretch(u, 1.0).unwrap();
        assert_eq!(same.vertices(), c.vertices());
        assert!(c.affine_stretch(u, 0.5).is_err());
        let s = c.affine_stretch(u, 2.0).unwrap();
        for (p, q) in c.vertices().iter().zip(s.vertices()) {
            assert_eq!(*q, Point3::new(p.x / 2.0, p.y / 2.0, p.z));
        }
        let big = c.affine_stretch(u, 2f64.powi(40)).unwrap();
        for (p, q) in c.vertices().iter().zip(big.vertices()) {
            assert!(q.x.abs() < 1e-11 && q.y.abs() < 1e-11 && q.z == p.z);
        }
        // A_2 applied to a single point through a tilted u.
        let u2 = Direction::new(Point3::new(0., 0., 1.)).unwrap();
        let tet = shapes::tetrahedron();
        let st = tet.affine_stretch(u2, 2.0).unwrap();
        let _ = st;
        let p = Point3::new(2., 4., 6.);
        let lam = 2.0;
        let q = (p + u2.vector() * ((lam - 1.0) * p.dot(u2.vector()))) * (1.0 / lam);
        assert_eq!(q, Point3::new(1., 2., 6.));
    }

    #[test]
    fn stretch_preserves_heights_and_shrinks_edges() {
        let p = shapes::rotated(&shapes::truncated_tetrahedron(), shapes::sample_rotation());
        let u = Direction::up();
        for k in 1..6 {
            let s = p.affine_stretch(u, 2f64.powi(k)).unwrap();
            for (a, b) in p.vertices().iter().zip(s.vertices()) {
                assert!((a.z - b.z).abs() < 1e-12);
            }
            for e in p.edges() {
                let l0 = p.vertex(e.v[0]).dist(p.vertex(e.v[1]));
                let l1 = s.vertex(e.v[0]).dist(s.vertex(e.v[1]));
                assert!(l1 <= l0 + 1e-12);
            }
        }
    }

    #[test]
    fn general_position() {
        let u = Direction::up();
        let c = shapes::cube();
        let r = c.check_general_position(u);
        assert!(!r.is_general);
        assert!(r.top_vertex.is_none());
        let rc = shapes::rotated(&c, shapes::sample_rotation());
        let r = rc.check_general_position(u);
        assert!(r.is_general, "{:?}", r.reasons);
        let h: Vec<f64> = rc.vertices().iter().map(|p| p.z).collect();
        let top = (0..8).max_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap();
        let bot = (0..8).min_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap();
        assert_eq!(r.top_vertex, Some(top));
        assert_eq!(r.bottom_vertex, Some(bot));
        assert!(r.min_height_gap > 0.0);
        assert_eq!(height(Point3::new(1., 2., 3.)), 3.0);
        assert_eq!(height(Point3::default()), 0.0);
    }

    #[test]
    fn stretched_total_angle_tends_to_full_turn() {
        let p = shapes::rotated(&shapes::octahedron(), shapes::sample_rotation());
        let u = Direction::up();
        let gp = p.check_general_position(u);
        let (top, bot) = (gp.top_vertex.unwrap(), gp.bottom_vertex.unwrap());
        let s = p.affine_stretch(u, 2f64.powi(20)).unwrap();
        for w in 0..p.num_vertices() {
            let t = s.total_angle(w);
            if w == top || w == bot {
                assert!(t < 0.05, "{w}: {t}");
            } else {
                assert!((TAU - t) < 0.05, "{w}: {t}");
            }
        }
    }

    #[test]
    fn edge_and_face_point_stars() {
        let c = shapes::cube();
        let e = 0;
        let o = SurfacePoint::Edge { edge: e, t: 0.5 };
        let ed = *c.edge(e);
        let a = v(ed.v[0]);
        let b = v(ed.v[1]);
        assert!((c.left_angle_at(&a, &o, &b).unwrap() - PI).abs() < 1e-12);
        assert!((c.left_angle_at(&a, &o, &a).unwrap() - TAU).abs() < 1e-12);
        let f = ed.faces[0];
        let centre = SurfacePoint::Face { face: f, coords: vec![0.25; 4] };
        let la = c.left_angle_at(&a, &o, &centre).unwrap();
        let lb = c.left_angle_at(&centre, &o, &a).unwrap();
        assert!((la + lb - TAU).abs() < 1e-12);
        // faces[0] runs lo -> hi, so its interior is on the left of a -> b.
        assert!(c.strictly_left_of(&centre, &a, &o, &b).unwrap());
    }
}
