//! The boundary walk of the surface cut open along a tree, and the paths
//! built from it: branches, dual branches and their prefixes.

use serde::{Deserialize, Serialize};

use crate::cut_tree::{validate_cut_tree, CutTree};
use crate::error::{Result, UnfoldError};
use crate::geom::Point3;
use crate::path::SurfacePath;
use crate::polyhedron::{Polyhedron, SurfacePoint};

/// Cyclic boundary walk of the cut surface, projected to the polyhedron.
/// Every tree edge is walked twice and the cut surface stays on the left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracingPath {
    /// `v0 = l0, v1, ..., v(n-1)`; the walk closes back at `v0`.
    pub vertices: Vec<usize>,
    /// Corner indices (into the star of the vertex) swept counterclockwise
    /// from the outgoing ray to the incoming ray.
    pub wedges: Vec<Vec<usize>>,
    /// Left angle at each position: the sum of its wedge's corner angles.
    pub theta: Vec<f64>,
    /// Positions of the leaves, in walk order; `leaves[0] == 0`.
    pub leaves: Vec<usize>,
    /// `junctures[i]` is the lowest position strictly between `leaves[i]`
    /// and the next leaf (cyclically).
    pub junctures: Vec<usize>,
    /// For each vertex and each corner of its star, the position whose
    /// wedge contains that corner.
    pub owner: Vec<Vec<usize>>,
}

fn heights(p: &Polyhedron, t: &CutTree) -> Vec<f64> {
    p.vertices().iter().map(|&x| t.direction.height(x)).collect()
}

/// Walks around the tree, leaving each vertex along the tree edge that
/// comes next clockwise after the arrival edge.
pub fn trace_boundary(p: &Polyhedron, t: &CutTree) -> Result<TracingPath> {
    let report = validate_cut_tree(p, t, t.direction);
    if !report.is_spanning_tree() {
        return Err(UnfoldError::Tree(format!("{:?}", report.violations)));
    }
    let nv = p.num_vertices();
    let h = heights(p, t);
    let leaf_set = t.leaves();
    let start = *leaf_set
        .iter()
        .max_by(|&&a, &&b| h[a].total_cmp(&h[b]).then(b.cmp(&a)))
        .ok_or_else(|| UnfoldError::Tree("tree has no leaves".into()))?;
    let adj = t.adjacency();
    let n = 2 * (nv - 1);

    let cw_next = |v: usize, from: usize| -> usize {
        let star = p.star(v);
        let d = star.len();
        let i = star.iter().position(|c| c.next == from).expect("tree neighbour is an edge neighbour");
        (1..=d)
            .map(|k| star[(i + d - k) % d].next)
            .find(|&w| t.contains_edge(v, w))
            .expect("arrival edge is a tree edge")
    };

    let mut vertices = Vec::with_capacity(n);
    let (mut from, mut cur) = (adj[start][0], start);
    for _ in 0..n {
        vertices.push(cur);
        let next = cw_next(cur, from);
        from = cur;
        cur = next;
    }
    if cur != start {
        return Err(UnfoldError::Internal("boundary walk did not close".into()));
    }

    let mut wedges = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    let mut owner: Vec<Vec<usize>> = (0..nv).map(|v| vec![usize::MAX; p.degree(v)]).collect();
    for q in 0..n {
        let v = vertices[q];
        let (u, w) = (vertices[(q + n - 1) % n], vertices[(q + 1) % n]);
        let star = p.star(v);
        let d = star.len();
        let c0 = star.iter().position(|c| c.next == w).expect("edge neighbour");
        let cu = star.iter().position(|c| c.next == u).expect("edge neighbour");
        let count = match (cu + d - c0) % d {
            0 => d,
            k => k,
        };
        let wedge: Vec<usize> = (0..count).map(|k| (c0 + k) % d).collect();
        for &c in &wedge {
            if owner[v][c] != usize::MAX {
                return Err(UnfoldError::Internal(format!("corner {c} of vertex {v} lies in two wedges")));
            }
            owner[v][c] = q;
        }
        theta.push(wedge.iter().map(|&c| star[c].angle).sum());
        wedges.push(wedge);
    }

    let leaves: Vec<usize> = (0..n).filter(|&q| leaf_set.contains(&vertices[q])).collect();
    let k = leaves.len();
    let junctures = (0..k)
        .map(|i| {
            let end = if i + 1 < k { leaves[i + 1] } else { n };
            (leaves[i] + 1..end)
                .min_by(|&a, &b| h[vertices[a]].total_cmp(&h[vertices[b]]).then(a.cmp(&b)))
                .unwrap_or(leaves[i])
        })
        .collect();
    Ok(TracingPath { vertices, wedges, theta, leaves, junctures, owner })
}

impl TracingPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn top_leaf(&self) -> usize {
        self.vertices[0]
    }

    /// The closed surface path `[v0, ..., v(n-1), v0]`.
    pub fn closed_path(&self) -> SurfacePath {
        SurfacePath::from_vertices(self.vertices.iter().copied().chain([self.vertices[0]]))
    }

    /// `[v0, ..., vq]`.
    pub fn prefix(&self, q: usize) -> SurfacePath {
        SurfacePath::from_vertices(self.vertices[..=q].iter().copied())
    }

    /// Face on the left of the walk edge from position `q` to `q + 1`.
    pub fn left_face(&self, p: &Polyhedron, q: usize) -> usize {
        p.star(self.vertices[q])[self.wedges[q][0]].face
    }

    /// Position of `v` whose wedge contains the ray from `v` toward its
    /// edge neighbour `w`.
    pub fn occurrence_containing(&self, p: &Polyhedron, v: usize, w: usize) -> Option<usize> {
        let c = p.star(v).iter().position(|c| c.next == w)?;
        Some(self.owner[v][c])
    }

    /// Descriptions of every structural property that fails.
    pub fn structure_violations(&self, p: &Polyhedron, t: &CutTree) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.len();
        let h = heights(p, t);
        let mut count = std::collections::HashMap::new();
        for q in 0..n {
            let (a, b) = (self.vertices[q], self.vertices[(q + 1) % n]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
        for (a, b) in t.edges() {
            let c = count.remove(&(a.min(b), a.max(b))).unwrap_or(0);
            if c != 2 {
                out.push(format!("tree edge {a}-{b} walked {c} times"));
            }
        }
        for (e, c) in count {
            out.push(format!("non-tree edge {e:?} walked {c} times"));
        }
        let deg = t.degrees();
        let mut mult = vec![0; p.num_vertices()];
        let mut tsum = vec![0.0; p.num_vertices()];
        for q in 0..n {
            mult[self.vertices[q]] += 1;
            tsum[self.vertices[q]] += self.theta[q];
        }
        for v in 0..p.num_vertices() {
            if mult[v] != deg[v] {
                out.push(format!("vertex {v} appears {} times, tree degree {}", mult[v], deg[v]));
            }
            if (tsum[v] - p.total_angle(v)).abs() > 1e-9 {
                out.push(format!("wedges at vertex {v} sum to {} not {}", tsum[v], p.total_angle(v)));
            }
            if self.owner[v].contains(&usize::MAX) {
                out.push(format!("some corner of vertex {v} is in no wedge"));
            }
        }
        let hq = |q: usize| h[self.vertices[q % n]];
        let is_max = |q: usize| hq(q) > hq(q + n - 1) && hq(q) > hq(q + 1);
        let is_min = |q: usize| hq(q) < hq(q + n - 1) && hq(q) < hq(q + 1);
        for q in 0..n {
            if is_max(q) != self.leaves.contains(&q) {
                out.push(format!("position {q}: local maximum and leaf disagree"));
            }
        }
        let k = self.leaves.len();
        for i in 0..k {
            let end = if i + 1 < k { self.leaves[i + 1] } else { n };
            let mins: Vec<usize> = (self.leaves[i] + 1..end).filter(|&q| is_min(q)).collect();
            if mins != [self.junctures[i]] {
                out.push(format!("between leaves {i} and {} the local minima are {mins:?}", (i + 1) % k));
            }
        }
        out
    }
}

/// The tree path from leaf `i` down to the root.
pub fn branch(t: &CutTree, tp: &TracingPath, i: usize) -> SurfacePath {
    SurfacePath::from_vertices(t.path_to_root(tp.vertices[tp.leaves[i]]))
}

/// The walk prefix up to leaf `i` followed by its branch.
pub fn gamma_i(t: &CutTree, tp: &TracingPath, i: usize) -> Result<SurfacePath> {
    tp.prefix(tp.leaves[i]).concat(&branch(t, tp, i))
}

/// For `1 <= i < k` the walk prefix up to leaf `i` followed by its dual
/// branch; for `i = k` the closed walk.
pub fn gamma_prime_i(p: &Polyhedron, t: &CutTree, tp: &TracingPath, i: usize) -> Result<SurfacePath> {
    let k = tp.num_leaves();
    if i == 0 || i > k {
        return Err(UnfoldError::Domain(format!("index {i} outside 1..={k}")));
    }
    if i == k {
        return Ok(tp.closed_path());
    }
    tp.prefix(tp.leaves[i]).concat(&dual_branch(p, t, tp, i)?)
}

/// A vertex of the cut surface: a polyhedron vertex together with the walk
/// position of the copy it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lifted {
    pub vertex: usize,
    pub position: usize,
}

/// How consecutive skeleton vertices are joined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    /// A non-tree edge, interior to the cut surface.
    Interior,
    /// A walk edge on the cut boundary; the cut surface lies in `face`.
    Boundary { face: usize },
}

fn steepest_upper_neighbor(p: &Polyhedron, h: &[f64], v: usize) -> Option<usize> {
    let mut ns: Vec<usize> = p.neighbors(v).collect();
    ns.sort_unstable();
    let mut best: Option<(f64, usize)> = None;
    for w in ns {
        if h[w] <= h[v] {
            continue;
        }
        let slope = (h[w] - h[v]) / p.vertex(v).dist(p.vertex(w));
        if best.is_none_or(|(s, _)| slope > s) {
            best = Some((slope, w));
        }
    }
    best.map(|(_, w)| w)
}

/// An increasing vertex path on the cut surface from leaf `i` to the top
/// leaf: from a leaf climb the steepest upward edge; from any other vertex
/// follow the boundary walk upward to the next leaf.
pub fn dual_branch_skeleton(p: &Polyhedron, t: &CutTree, tp: &TracingPath, i: usize) -> Result<(Vec<Lifted>, Vec<Link>)> {
    let n = tp.len();
    let h = heights(p, t);
    let top = tp.top_leaf();
    let is_leaf_pos = |q: usize| tp.leaves.contains(&q);
    let mut nodes = vec![Lifted { vertex: tp.vertices[tp.leaves[i]], position: tp.leaves[i] }];
    let mut links = Vec::new();
    let mut guard = 0;
    while nodes.last().unwrap().vertex != top {
        guard += 1;
        if guard > 4 * n + 4 {
            return Err(UnfoldError::Internal(format!("dual branch {i}: climb does not terminate")));
        }
        let cur = *nodes.last().unwrap();
        if is_leaf_pos(cur.position) {
            let w = steepest_upper_neighbor(p, &h, cur.vertex)
                .ok_or_else(|| UnfoldError::Internal(format!("dual branch {i}: leaf {} has no upper neighbour", cur.vertex)))?;
            if t.contains_edge(cur.vertex, w) {
                return Err(UnfoldError::Internal(format!("dual branch {i}: upward edge {}-{w} is a tree edge", cur.vertex)));
            }
            let q = tp
                .occurrence_containing(p, w, cur.vertex)
                .ok_or_else(|| UnfoldError::Internal("ray owner missing".into()))?;
            nodes.push(Lifted { vertex: w, position: q });
            links.push(Link::Interior);
            continue;
        }
        // Follow the walk in each direction while it climbs.
        let climb = |step: usize| -> Option<Vec<usize>> {
            let mut qs = vec![cur.position];
            loop {
                let q = *qs.last().unwrap();
                let nq = (q + step) % n;
                if h[tp.vertices[nq]] <= h[tp.vertices[q]] {
                    return None;
                }
                qs.push(nq);
                if is_leaf_pos(nq) {
                    return Some(qs);
                }
            }
        };
        let fwd = climb(1);
        let bwd = climb(n - 1);
        let (qs, forward) = match (fwd, bwd) {
            (Some(f), Some(b)) => {
                if f.len() < b.len() || (f.len() == b.len() && f.last() <= b.last()) {
                    (f, true)
                } else {
                    (b, false)
                }
            }
            (Some(f), None) => (f, true),
            (None, Some(b)) => (b, false),
            (None, None) => {
                return Err(UnfoldError::Internal(format!(
                    "dual branch {i}: position {} is a local minimum of the walk",
                    cur.position
                )))
            }
        };
        for w in qs.windows(2) {
            let face = if forward { tp.left_face(p, w[0]) } else { tp.left_face(p, w[1]) };
            nodes.push(Lifted { vertex: tp.vertices[w[1]], position: w[1] });
            links.push(Link::Boundary { face });
        }
    }
    Ok((nodes, links))
}

const START_FRACTION: f64 = 0.25;
const MAX_HALVINGS: usize = 20;

fn point_toward(p: &Polyhedron, v: usize, toward: &SurfacePoint, s: f64) -> Result<SurfacePoint> {
    match toward {
        SurfacePoint::Vertex(w) => {
            let e = p
                .edge_between(v, *w)
                .ok_or_else(|| UnfoldError::Internal(format!("{v}-{w} is not an edge")))?;
            let t = if p.edge(e).v[0] == v { s } else { 1.0 - s };
            Ok(SurfacePoint::Edge { edge: e, t })
        }
        SurfacePoint::Face { face, coords } => {
            let base = p.face_coords(*face, &SurfacePoint::Vertex(v))?;
            let c = base.iter().zip(coords).map(|(b, x)| (1.0 - s) * b + s * x).collect();
            Ok(SurfacePoint::Face { face: *face, coords: c })
        }
        SurfacePoint::Edge { .. } => Err(UnfoldError::Internal("unexpected edge point next to a vertex".into())),
    }
}

/// Replaces the neighbourhood of a boundary vertex `v` (its lifted copy at
/// `position`) by a detour through the interior of its wedge, crossing the
/// level of `v` at a point off the tree. Returns the replacement points in
/// increasing height order.
fn detour(
    p: &Polyhedron,
    t: &CutTree,
    tp: &TracingPath,
    node: Lifted,
    below: &SurfacePoint,
    above: &SurfacePoint,
) -> Result<Vec<SurfacePoint>> {
    let u = t.direction;
    let v = node.vertex;
    let hv = u.height(p.vertex(v));
    let star = p.star(v);
    let total = p.total_angle(v);
    let wedge = &tp.wedges[node.position];
    let start = star[wedge[0]].offset;
    let theta = tp.theta[node.position];
    let rel = |x: &SurfacePoint| -> Result<f64> { Ok((p.star_position(v, x)? - start).rem_euclid(total)) };
    let h = |x: &SurfacePoint| u.height(p.position(x));

    'attempt: for halving in 0..MAX_HALVINGS {
        let s = START_FRACTION * 0.5f64.powi(halving as i32);
        let a = point_toward(p, v, above, s)?;
        let b = point_toward(p, v, below, s)?;
        let (ra, rb) = (rel(&a)?, rel(&b)?);
        if !(ra > 0.0 && ra < theta && rb > 0.0 && rb < theta) || ra == rb {
            return Err(UnfoldError::Internal(format!("detour at vertex {v}: path leaves the wedge")));
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        let mut rays: Vec<(f64, usize)> = wedge[1..]
            .iter()
            .map(|&c| ((star[c].offset - start).rem_euclid(total), star[c].next))
            .filter(|&(r, _)| r > lo && r < hi)
            .collect();
        rays.sort_by(|x, y| x.0.total_cmp(&y.0));
        if ra > rb {
            rays.reverse();
        }
        // Rays in order from the upper point to the lower one.
        let signs: Vec<bool> = rays.iter().map(|&(_, w)| u.height(p.vertex(w)) > hv).collect();
        let mut seq = vec![true];
        seq.extend(&signs);
        seq.push(false);
        let changes: Vec<usize> = (0..seq.len() - 1).filter(|&k| seq[k] != seq[k + 1]).collect();
        if changes.len() != 1 {
            return Err(UnfoldError::Internal(format!(
                "detour at vertex {v}: {} height sign changes across the wedge",
                changes.len()
            )));
        }
        let j = changes[0]; // rays[..j] lie above, rays[j..] below
        let (ha, hb) = (h(&a), h(&b));
        if !(ha > hv && hb < hv) {
            continue 'attempt;
        }
        let on_ray = |w: usize, target: f64| -> Option<SurfacePoint> {
            let tt = (target - hv) / (u.height(p.vertex(w)) - hv);
            (tt > 0.0 && tt < 1.0).then(|| point_toward(p, v, &SurfacePoint::Vertex(w), tt).ok()).flatten()
        };
        let mut ups = Vec::with_capacity(j);
        for (k, &(_, w)) in rays[..j].iter().enumerate() {
            let target = hv + (ha - hv) * (j - k) as f64 / (j + 1) as f64;
            match on_ray(w, target) {
                Some(x) => ups.push(x),
                None => continue 'attempt,
            }
        }
        let m = rays.len() - j;
        let mut downs = Vec::with_capacity(m);
        for (k, &(_, w)) in rays[j..].iter().enumerate() {
            let target = hv - (hv - hb) * (k + 1) as f64 / (m + 1) as f64;
            match on_ray(w, target) {
                Some(x) => downs.push(x),
                None => continue 'attempt,
            }
        }
        let upper = ups.last().unwrap_or(&a).clone();
        let lower = downs.first().unwrap_or(&b).clone();
        let face = p
            .common_face(&upper, &lower)
            .ok_or_else(|| UnfoldError::Internal(format!("detour at vertex {v}: no face across the level")))?;
        let (w1, w2) = (h(&upper) - hv, hv - h(&lower));
        let cu = p.face_coords(face, &upper)?;
        let cl = p.face_coords(face, &lower)?;
        let coords = cu.iter().zip(&cl).map(|(x, y)| (w2 * y + w1 * x) / (w1 + w2)).collect();
        let level = SurfacePoint::Face { face, coords };

        let mut out = vec![b];
        out.extend(downs.into_iter().rev());
        out.push(level);
        out.extend(ups.into_iter().rev());
        out.push(a);
        return Ok(out);
    }
    Err(UnfoldError::Internal(format!("detour at vertex {v}: no admissible offset after {MAX_HALVINGS} halvings")))
}

/// Point inside `face` at the height of an interior point of the boundary
/// edge `x -> y`, pulled from the edge midpoint toward the face centroid.
fn pushed_off_edge(p: &Polyhedron, t: &CutTree, face: usize, x: usize, y: usize) -> Result<SurfacePoint> {
    let u = t.direction;
    let (hx, hy) = (u.height(p.vertex(x)), u.height(p.vertex(y)));
    let cx = p.face_coords(face, &SurfacePoint::Vertex(x))?;
    let cy = p.face_coords(face, &SurfacePoint::Vertex(y))?;
    let m = cx.len() as f64;
    for halving in 0..MAX_HALVINGS {
        let s = START_FRACTION * 0.5f64.powi(halving as i32);
        let coords: Vec<f64> = cx
            .iter()
            .zip(&cy)
            .map(|(a, b)| (1.0 - s) * 0.5 * (a + b) + s / m)
            .collect();
        let q = SurfacePoint::Face { face, coords };
        let hq = u.height(p.position(&q));
        if hq > hx.min(hy) && hq < hx.max(hy) {
            return Ok(q);
        }
    }
    Err(UnfoldError::Internal(format!("edge {x}-{y}: no interior point at an intermediate height")))
}

/// A strictly increasing path from leaf `i` to the top leaf that meets the
/// tree only at its end points.
pub fn dual_branch(p: &Polyhedron, t: &CutTree, tp: &TracingPath, i: usize) -> Result<SurfacePath> {
    if i >= tp.num_leaves() {
        return Err(UnfoldError::Domain(format!("leaf index {i} out of range")));
    }
    if i == 0 {
        return Ok(SurfacePath::from_vertices([tp.top_leaf()]));
    }
    let (nodes, links) = dual_branch_skeleton(p, t, tp, i)?;
    // Each boundary link gets an interior midpoint.
    let mut mids: Vec<Option<SurfacePoint>> = Vec::with_capacity(links.len());
    for (k, link) in links.iter().enumerate() {
        mids.push(match *link {
            Link::Interior => None,
            Link::Boundary { face } => Some(pushed_off_edge(p, t, face, nodes[k].vertex, nodes[k + 1].vertex)?),
        });
    }
    let mut points = vec![SurfacePoint::Vertex(nodes[0].vertex)];
    for k in 0..links.len() {
        if let Some(m) = &mids[k] {
            points.push(m.clone());
        }
        let node = nodes[k + 1];
        if k + 1 == nodes.len() - 1 {
            points.push(SurfacePoint::Vertex(node.vertex));
            break;
        }
        let below = mids[k].clone().unwrap_or(SurfacePoint::Vertex(nodes[k].vertex));
        let above = mids[k + 1].clone().unwrap_or(SurfacePoint::Vertex(nodes[k + 2].vertex));
        points.extend(detour(p, t, tp, node, &below, &above)?);
    }
    let path = SurfacePath::new(points);
    check_dual_branch(p, t, &path).map_err(|e| UnfoldError::Internal(format!("dual branch {i}: {e}")))?;
    Ok(path)
}

/// Whether `x` (in the plane of `face`) is off every edge of the face.
fn strictly_inside_face(p: &Polyhedron, face: usize, x: Point3) -> bool {
    let f = p.face(face);
    let n = p.face_normal(face);
    let eps = p.tolerance().eps_len;
    (0..f.len()).all(|i| {
        let (a, b) = (p.vertex(f[i]), p.vertex(f[(i + 1) % f.len()]));
        (b - a).cross(x - a).dot(n) > eps * (b - a).norm() * (b - a).norm()
    })
}

/// Strictly increasing heights, interior off the tree, segments in faces.
pub fn check_dual_branch(p: &Polyhedron, t: &CutTree, path: &SurfacePath) -> Result<()> {
    let hs = path.heights(p, t.direction);
    if let Some(k) = (1..hs.len()).find(|&k| hs[k] <= hs[k - 1]) {
        return Err(UnfoldError::Domain(format!("height does not increase at point {k}")));
    }
    let n = path.len();
    for (k, x) in path.points.iter().enumerate().take(n.saturating_sub(1)).skip(1) {
        let ok = match x {
            SurfacePoint::Vertex(_) => false,
            SurfacePoint::Edge { edge, t: s } => {
                let e = p.edge(*edge);
                !t.contains_edge(e.v[0], e.v[1]) && *s > 0.0 && *s < 1.0
            }
            SurfacePoint::Face { face, .. } => strictly_inside_face(p, *face, p.position(x)),
        };
        if !ok {
            return Err(UnfoldError::Domain(format!("interior point {k} touches the tree: {x:?}")));
        }
    }
    path.check_segments(p)
}
