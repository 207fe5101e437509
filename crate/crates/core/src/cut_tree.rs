//! Spanning edge trees used as cut trees: construction, validation and
//! enumeration.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, UnfoldError};
use crate::polyhedron::{Direction, Polyhedron};

/// A spanning tree of the edge graph, rooted at `root` and stored as parent
/// links. `direction` is the height direction the tree was built for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TreeViolation {
    WrongSize { expected: usize, found: usize },
    RootHasParent,
    MissingParent(usize),
    Cycle(usize),
    NotAnEdge(usize, usize),
    NotDescending { child: usize, parent: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeValidation {
    pub violations: Vec<TreeViolation>,
}

impl TreeValidation {
    /// Spanning, acyclic and made of polyhedron edges.
    pub fn is_spanning_tree(&self) -> bool {
        self.violations.iter().all(|v| matches!(v, TreeViolation::NotDescending { .. }))
    }

    /// A spanning tree that is also monotone.
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CutTree {
    /// Orients an undirected edge list away from `root`.
    pub fn from_edges(n: usize, root: usize, edges: &[(usize, usize)], direction: Direction) -> Result<Self> {
        if root >= n {
            return Err(UnfoldError::Tree(format!("root {root} out of range")));
        }
        if edges.len() + 1 != n {
            return Err(UnfoldError::Tree(format!("{} edges cannot span {n} vertices", edges.len())));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(UnfoldError::Tree(format!("bad tree edge {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(UnfoldError::Tree(format!("vertex {v} is not connected to the root")));
        }
        Ok(CutTree { root, parent, direction })
    }

    pub fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    /// Tree edges as `(child, parent)` pairs in vertex order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.edges() {
            adj[v].push(p);
            adj[p].push(v);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    /// Tree-degree-one vertices other than the root.
    pub fn leaves(&self) -> Vec<usize> {
        let deg = self.degrees();
        (0..deg.len()).filter(|&v| v != self.root && deg[v] == 1).collect()
    }

    /// Vertices from `v` down to the root, inclusive.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
            if out.len() > self.parent.len() {
                break;
            }
        }
        out
    }

    /// `"root N"` followed by one `"a b"` line per tree edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("root {}\n", self.root);
        for (v, p) in self.edges() {
            let _ = writeln!(s, "{v} {p}");
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output; `#` starts a comment.
    pub fn from_text(text: &str, n: usize, direction: Direction) -> Result<Self> {
        let mut root = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let bad = || UnfoldError::Tree(format!("line {}: cannot parse {raw:?}", lineno + 1));
            match toks.as_slice() {
                ["root", r] => root = Some(r.parse().map_err(|_| bad())?),
                [a, b] => edges.push((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
                _ => return Err(bad()),
            }
        }
        let root = root.ok_or_else(|| UnfoldError::Tree("missing root record".into()))?;
        Self::from_edges(n, root, &edges, direction)
    }
}

fn lowest_vertex(p: &Polyhedron, u: Direction) -> usize {
    (0..p.num_vertices())
        .min_by(|&a, &b| u.height(p.vertex(a)).total_cmp(&u.height(p.vertex(b))).then(a.cmp(&b)))
        .expect("nonempty")
}

/// Lower neighbour of `v` maximizing `(h(v) - h(w)) / |v - w|`, ties to the
/// smallest index.
pub fn steepest_lower_neighbor(p: &Polyhedron, u: Direction, v: usize) -> Option<usize> {
    let hv = u.height(p.vertex(v));
    let mut best: Option<(f64, usize)> = None;
    let mut ns: Vec<usize> = p.neighbors(v).collect();
    ns.sort_unstable();
    for w in ns {
        let hw = u.height(p.vertex(w));
        if hw >= hv {
            continue;
        }
        let slope = (hv - hw) / p.vertex(v).dist(p.vertex(w));
        if best.is_none_or(|(s, _)| slope > s) {
            best = Some((slope, w));
        }
    }
    best.map(|(_, w)| w)
}

fn require_general(p: &Polyhedron, u: Direction) -> Result<(usize, usize)> {
    let gp = p.check_general_position(u);
    match (gp.is_general, gp.top_vertex, gp.bottom_vertex) {
        (true, Some(t), Some(b)) => Ok((t, b)),
        _ => Err(UnfoldError::GeneralPosition(gp.reasons.join("; "))),
    }
}

/// Walks down from the top vertex to the bottom, then repeatedly from the
/// highest vertex not yet covered until the walk meets the covered part.
/// Each step goes to the steepest lower neighbour.
pub fn build_downhill_tree(p: &Polyhedron, u: Direction) -> Result<CutTree> {
    let (top, bottom) = require_general(p, u)?;
    let n = p.num_vertices();
    let mut parent = vec![None; n];
    let mut covered = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u.height(p.vertex(b)).total_cmp(&u.height(p.vertex(a))).then(a.cmp(&b)));
    debug_assert_eq!(order[0], top);
    covered[bottom] = true;
    for &start in &order {
        if covered[start] {
            continue;
        }
        let mut v = start;
        while !covered[v] {
            covered[v] = true;
            let w = steepest_lower_neighbor(p, u, v)
                .ok_or_else(|| UnfoldError::Internal(format!("vertex {v} has no lower neighbour")))?;
            parent[v] = Some(w);
            v = w;
        }
    }
    Ok(CutTree { root: bottom, parent, direction: u })
}

/// Links every non-bottom vertex to its steepest lower neighbour.
pub fn build_steepest_edge_tree(p: &Polyhedron, u: Direction) -> Result<CutTree> {
    let (_, bottom) = require_general(p, u)?;
    let mut parent = vec![None; p.num_vertices()];
    for (v, slot) in parent.iter_mut().enumerate() {
        if v != bottom {
            *slot = Some(
                steepest_lower_neighbor(p, u, v)
                    .ok_or_else(|| UnfoldError::Internal(format!("vertex {v} has no lower neighbour")))?,
            );
        }
    }
    Ok(CutTree { root: bottom, parent, direction: u })
}

/// Parent chosen uniformly among lower neighbours: always a monotone tree.
pub fn random_monotone_tree(p: &Polyhedron, u: Direction, rng: &mut impl Rng) -> Result<CutTree> {
    let (_, bottom) = require_general(p, u)?;
    let mut parent = vec![None; p.num_vertices()];
    for (v, slot) in parent.iter_mut().enumerate() {
        if v == bottom {
            continue;
        }
        let hv = u.height(p.vertex(v));
        let mut lower: Vec<usize> = p.neighbors(v).filter(|&w| u.height(p.vertex(w)) < hv).collect();
        lower.sort_unstable();
        *slot = Some(
            *lower
                .choose(rng)
                .ok_or_else(|| UnfoldError::Internal(format!("vertex {v} has no lower neighbour")))?,
        );
    }
    Ok(CutTree { root: bottom, parent, direction: u })
}

/// Uniformly random spanning tree (Wilson's algorithm), rooted at the lowest
/// vertex; not monotone in general.
pub fn random_spanning_tree(p: &Polyhedron, u: Direction, rng: &mut impl Rng) -> CutTree {
    let n = p.num_vertices();
    let root = lowest_vertex(p, u);
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| p.neighbors(v).collect()).collect();
    let mut in_tree = vec![false; n];
    let mut next = vec![usize::MAX; n];
    in_tree[root] = true;
    for start in 0..n {
        let mut v = start;
        while !in_tree[v] {
            next[v] = *nbrs[v].choose(rng).expect("connected graph");
            v = next[v];
        }
        let mut v = start;
        while !in_tree[v] {
            in_tree[v] = true;
            v = next[v];
        }
    }
    let parent = (0..n).map(|v| (v != root).then(|| next[v])).collect();
    CutTree { root, parent, direction: u }
}

/// Checks spanning, acyclicity, adjacency and strict descent toward the root.
pub fn validate_cut_tree(p: &Polyhedron, t: &CutTree, u: Direction) -> TreeValidation {
    let n = p.num_vertices();
    let mut violations = Vec::new();
    if t.parent.len() != n || t.root >= n {
        violations.push(TreeViolation::WrongSize { expected: n, found: t.parent.len() });
        return TreeValidation { violations };
    }
    if t.parent[t.root].is_some() {
        violations.push(TreeViolation::RootHasParent);
    }
    for v in 0..n {
        if v == t.root {
            continue;
        }
        let Some(w) = t.parent[v] else {
            violations.push(TreeViolation::MissingParent(v));
            continue;
        };
        if w >= n || !p.is_adjacent(v, w) {
            violations.push(TreeViolation::NotAnEdge(v, w));
            continue;
        }
        if u.height(p.vertex(w)) >= u.height(p.vertex(v)) {
            violations.push(TreeViolation::NotDescending { child: v, parent: w });
        }
    }
    // Every parent chain must reach the root.
    let mut state = vec![0u8; n]; // 0 unknown, 1 on stack, 2 reaches root
    state[t.root] = 2;
    for v in 0..n {
        let mut chain = Vec::new();
        let mut cur = v;
        while state[cur] == 0 {
            state[cur] = 1;
            chain.push(cur);
            match t.parent[cur] {
                Some(w) if w < n => cur = w,
                _ => break,
            }
        }
        let ok = state[cur] == 2;
        if !ok && state[cur] == 1 && t.parent[cur].is_some() {
            violations.push(TreeViolation::Cycle(cur));
        }
        for c in chain {
            state[c] = if ok { 2 } else { 3 };
        }
    }
    TreeValidation { violations }
}

/// Every monotone spanning tree: each non-bottom vertex picks any lower
/// neighbour as parent.
pub fn enumerate_monotone_trees(p: &Polyhedron, u: Direction, limit: usize) -> Result<(Vec<CutTree>, bool)> {
    let (_, bottom) = require_general(p, u)?;
    let n = p.num_vertices();
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let hv = u.height(p.vertex(v));
            let mut c: Vec<usize> = p.neighbors(v).filter(|&w| u.height(p.vertex(w)) < hv).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut digits = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        if out.len() == limit {
            return Ok((out, true));
        }
        let parent = (0..n).map(|v| (v != bottom).then(|| choices[v][digits[v]])).collect();
        out.push(CutTree { root: bottom, parent, direction: u });
        let mut i = 0;
        loop {
            if i == n {
                return Ok((out, false));
            }
            if i == bottom {
                i += 1;
                continue;
            }
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

struct RollbackDsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
    history: Vec<Option<(usize, usize, bool)>>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n], history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            self.history.push(None);
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let bumped = self.rank[a] == self.rank[b];
        self.parent[b] = a;
        if bumped {
            self.rank[a] += 1;
        }
        self.history.push(Some((a, b, bumped)));
        true
    }

    fn rollback(&mut self) {
        if let Some(Some((a, b, bumped))) = self.history.pop() {
            self.parent[b] = b;
            if bumped {
                self.rank[a] -= 1;
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Stage {
    Start,
    AfterInclude,
    AfterExclude,
}

/// Stream of every spanning tree of the edge graph, each exactly once, by
/// include/exclude search over the edge list with connectivity pruning.
pub struct SpanningTrees {
    n: usize,
    root: usize,
    direction: Direction,
    edges: Vec<(usize, usize)>,
    chosen: Vec<bool>,
    num_chosen: usize,
    dsu: RollbackDsu,
    stack: Vec<(usize, Stage)>,
    emitted: usize,
    limit: usize,
    truncated: bool,
}

impl SpanningTrees {
    /// Set once the stream stopped at `limit` with trees remaining.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn connectable_without(&self, i: usize) -> bool {
        let mut d = RollbackDsu::new(self.n);
        let mut comps = self.n;
        for (j, &(a, b)) in self.edges.iter().enumerate() {
            if ((j < i && self.chosen[j]) || j > i) && d.union(a, b) {
                comps -= 1;
            }
        }
        comps == 1
    }

    fn advance(&mut self) -> Option<CutTree> {
        while let Some(&(i, stage)) = self.stack.last() {
            match stage {
                Stage::Start => {
                    if self.num_chosen + 1 == self.n {
                        self.stack.pop();
                        let edges: Vec<(usize, usize)> =
                            self.edges.iter().zip(&self.chosen).filter(|(_, &c)| c).map(|(&e, _)| e).collect();
                        return Some(
                            CutTree::from_edges(self.n, self.root, &edges, self.direction)
                                .expect("chosen edges form a spanning tree"),
                        );
                    }
                    if i == self.edges.len() {
                        self.stack.pop();
                        continue;
                    }
                    self.stack.last_mut().unwrap().1 = Stage::AfterInclude;
                    let (a, b) = self.edges[i];
                    if self.dsu.union(a, b) {
                        self.chosen[i] = true;
                        self.num_chosen += 1;
                        self.stack.push((i + 1, Stage::Start));
                    } else {
                        self.dsu.rollback();
                    }
                }
                Stage::AfterInclude => {
                    if self.chosen[i] {
                        self.chosen[i] = false;
                        self.num_chosen -= 1;
                        self.dsu.rollback();
                    }
                    self.stack.last_mut().unwrap().1 = Stage::AfterExclude;
                    if self.connectable_without(i) {
                        self.stack.push((i + 1, Stage::Start));
                    }
                }
                Stage::AfterExclude => {
                    self.stack.pop();
                }
            }
        }
        None
    }
}

impl Iterator for SpanningTrees {
    type Item = CutTree;

    fn next(&mut self) -> Option<CutTree> {
        if self.emitted == self.limit {
            if !self.truncated && self.advance().is_some() {
                self.truncated = true;
            }
            return None;
        }
        let t = self.advance()?;
        self.emitted += 1;
        Some(t)
    }
}

/// All spanning trees of the edge graph rooted at the lowest vertex along
/// `u` (ties to the smallest index), at most `limit` of them.
pub fn enumerate_spanning_trees(p: &Polyhedron, u: Direction, limit: usize) -> SpanningTrees {
    let n = p.num_vertices();
    SpanningTrees {
        n,
        root: lowest_vertex(p, u),
        direction: u,
        edges: p.edges().iter().map(|e| (e.v[0], e.v[1])).collect(),
        chosen: vec![false; p.num_edges()],
        num_chosen: 0,
        dsu: RollbackDsu::new(n),
        stack: vec![(0, Stage::Start)],
        emitted: 0,
        limit,
        truncated: false,
    }
}
