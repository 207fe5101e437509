//! Searching for a stretch factor that makes an unfolding simple, and the
//! certificates and limit diagnostics that go with it.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::cut_tree::{validate_cut_tree, CutTree};
use crate::development::{aligned_deviation, develop, develop_mixed, InitialCondition, PlanarPath};
use crate::error::{Result, UnfoldError};
use crate::geom::{ambient_angle, orient2d, Point2};
use crate::path::SurfacePath;
use crate::polyhedron::{Direction, Polyhedron};
use crate::simplicity::{is_simple_with, unfolding_is_simple};
use crate::tracing::{gamma_i, gamma_prime_i, trace_boundary, TracingPath};

/// `mantissa * 2^exponent`, kept exact so probes are reproducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dyadic {
    pub mantissa: u64,
    pub exponent: i32,
}

impl Dyadic {
    pub const ONE: Dyadic = Dyadic { mantissa: 1, exponent: 0 };

    pub fn new(mantissa: u64, exponent: i32) -> Self {
        Self { mantissa, exponent }.normalized()
    }

    pub fn pow2(exponent: i32) -> Self {
        Self { mantissa: 1, exponent }
    }

    fn normalized(mut self) -> Self {
        if self.mantissa == 0 {
            return Self { mantissa: 0, exponent: 0 };
        }
        while self.mantissa.is_multiple_of(2) {
            self.mantissa /= 2;
            self.exponent += 1;
        }
        self
    }

    /// Exact while the mantissa fits in 53 bits.
    pub fn value(self) -> f64 {
        self.mantissa as f64 * 2f64.powi(self.exponent)
    }

    pub fn doubled(self) -> Self {
        Self { mantissa: self.mantissa, exponent: self.exponent + 1 }
    }

    pub fn halved(self) -> Self {
        Self { mantissa: self.mantissa, exponent: self.exponent - 1 }
    }

    /// `(a + b) / 2`.
    pub fn midpoint(a: Self, b: Self) -> Self {
        let e = a.exponent.min(b.exponent);
        let (ma, mb) = (a.mantissa << (a.exponent - e), b.mantissa << (b.exponent - e));
        Self::new(ma + mb, e - 1)
    }

    /// `log2` of the value, rounded up.
    pub fn ceil_log2(self) -> i32 {
        let bits = 64 - self.mantissa.leading_zeros() as i32;
        let exact = self.mantissa.is_power_of_two();
        self.exponent + bits - if exact { 1 } else { 0 }
    }
}

impl std::fmt::Display for Dyadic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.mantissa == 1 {
            write!(f, "2^{}", self.exponent)
        } else {
            write!(f, "{}*2^{}", self.mantissa, self.exponent)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub lambda: Dyadic,
    pub simple: bool,
}

/// When the doubling search may stop.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchGoal {
    /// The first probe whose unfolding is simple.
    #[default]
    FirstSimple,
    /// The first probe whose unfolding is simple and where both
    /// certificates pass.
    Certified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub lambda_start: Dyadic,
    /// Probes stop once `lambda > 2^cap_exponent`.
    pub cap_exponent: i32,
    /// Bisection steps inside the final doubling bracket.
    pub refine_steps: usize,
    pub goal: SearchGoal,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { lambda_start: Dyadic::ONE, cap_exponent: 30, refine_steps: 0, goal: SearchGoal::FirstSimple }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchResult {
    pub lambda: Dyadic,
    pub simple: bool,
    pub c1_certified: bool,
    pub c2_certified: bool,
    pub probes: Vec<Probe>,
    /// Why a certificate could not be evaluated, if it could not.
    pub notes: Vec<String>,
}

fn check_preconditions(p: &Polyhedron, t: &CutTree, u: Direction) -> Result<()> {
    let gp = p.check_general_position(u);
    if !gp.is_general {
        return Err(UnfoldError::GeneralPosition(gp.reasons.join("; ")));
    }
    let v = validate_cut_tree(p, t, u);
    if !v.is_valid() {
        return Err(UnfoldError::Tree(format!("tree is not monotone: {:?}", v.violations)));
    }
    Ok(())
}

fn probe(p: &Polyhedron, t: &CutTree, u: Direction, lambda: Dyadic) -> Result<bool> {
    let pl = p.affine_stretch(u, lambda.value())?;
    Ok(unfolding_is_simple(&pl, t)?.simple)
}

fn certify(p: &Polyhedron, t: &CutTree, u: Direction, lambda: Dyadic, notes: &mut Vec<String>) -> (bool, bool) {
    let c1 = certify_c1(p, t, u, lambda.value()).map(|r| r.passed);
    let c2 = certify_c2(p, t, u, lambda.value()).map(|r| r.passed);
    let mut flag = |r: Result<bool>, name: &str| match r {
        Ok(b) => b,
        Err(e) => {
            notes.push(format!("{name} at {lambda}: {e}"));
            false
        }
    };
    (flag(c1, "C1"), flag(c2, "C2"))
}

/// Probes `lambda_start * 2^j` for `j = 0, 1, ...` until the unfolding of the
/// stretched polyhedron is simple (and, for the certified goal, both
/// certificates pass).
pub fn stretch_search(p: &Polyhedron, t: &CutTree, u: Direction, opts: SearchOptions) -> Result<StretchResult> {
    check_preconditions(p, t, u)?;
    let mut probes = Vec::new();
    let mut notes = Vec::new();
    let mut lambda = opts.lambda_start;
    if lambda.value() < 1.0 {
        return Err(UnfoldError::Domain(format!("stretch factor {lambda} is below 1")));
    }
    while lambda.ceil_log2() <= opts.cap_exponent {
        let simple = probe(p, t, u, lambda)?;
        probes.push(Probe { lambda, simple });
        if simple {
            let mut best = lambda;
            if opts.goal == SearchGoal::FirstSimple && probes.len() > 1 && opts.refine_steps > 0 {
                let (mut lo, mut hi) = (lambda.halved(), lambda);
                for _ in 0..opts.refine_steps {
                    let mid = Dyadic::midpoint(lo, hi);
                    let s = probe(p, t, u, mid)?;
                    probes.push(Probe { lambda: mid, simple: s });
                    if s {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                best = hi;
            }
            let (c1, c2) = certify(p, t, u, best, &mut notes);
            if opts.goal == SearchGoal::FirstSimple || (c1 && c2) {
                return Ok(StretchResult { lambda: best, simple: true, c1_certified: c1, c2_certified: c2, probes, notes });
            }
        }
        lambda = lambda.doubled();
    }
    Err(UnfoldError::SearchExhausted {
        cap_exponent: opts.cap_exponent,
        probes: probes.iter().map(|q| (q.lambda.value(), q.simple)).collect(),
    })
}

/// The paths the certificates look at, built once on the unstretched
/// polyhedron. Surface points are stored combinatorially, so they carry
/// over to every stretched copy.
#[derive(Clone, Debug)]
pub struct CertificatePaths {
    pub tracing: TracingPath,
    pub gammas: Vec<SurfacePath>,
    /// `gamma_primes[i - 1]` is the path for leaf `i`, `1 <= i <= k`.
    pub gamma_primes: Vec<SurfacePath>,
}

impl CertificatePaths {
    pub fn build(p: &Polyhedron, t: &CutTree) -> Result<Self> {
        let tracing = trace_boundary(p, t)?;
        let k = tracing.num_leaves();
        let gammas = (0..k).map(|i| gamma_i(t, &tracing, i)).collect::<Result<_>>()?;
        let gamma_primes = (1..=k).map(|i| gamma_prime_i(p, t, &tracing, i)).collect::<Result<_>>()?;
        Ok(Self { tracing, gammas, gamma_primes })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Report {
    pub passed: bool,
    pub failures: Vec<String>,
    /// Half the smallest height gap across an edge.
    pub epsilon: f64,
    /// Largest distance of a developed vertex from its limit position
    /// `(0, h - h(top))`.
    pub max_limit_deviation: f64,
    pub epsilon_condition: bool,
}

/// Every monotone stretch of every `Gamma_i` and `Gamma'_i` develops to a
/// planar stretch monotone in the same sense.
pub fn certify_c1(p: &Polyhedron, t: &CutTree, u: Direction, lambda: f64) -> Result<C1Report> {
    let paths = CertificatePaths::build(p, t)?;
    certify_c1_with(p, &paths, u, lambda)
}

pub fn certify_c1_with(p: &Polyhedron, paths: &CertificatePaths, u: Direction, lambda: f64) -> Result<C1Report> {
    let pl = p.affine_stretch(u, lambda)?;
    let epsilon = 0.5 * p.check_general_position(u).min_height_gap;
    let mut failures = Vec::new();
    let mut max_dev = 0.0f64;
    let named = paths
        .gammas
        .iter()
        .enumerate()
        .map(|(i, g)| (format!("Gamma_{i}"), g))
        .chain(paths.gamma_primes.iter().enumerate().map(|(i, g)| (format!("Gamma'_{}", i + 1), g)));
    for (name, g) in named {
        let d = develop(&pl, g, InitialCondition::default())?;
        let h = g.heights(&pl, u);
        for j in 0..g.num_edges() {
            let (dh, dy) = (h[j + 1] - h[j], d.vertices[j + 1].y - d.vertices[j].y);
            if dh == 0.0 || dy == 0.0 || (dh > 0.0) != (dy > 0.0) {
                failures.push(format!("{name}: edge {j} changes height by {dh:e} but develops to {dy:e}"));
            }
        }
        for (j, v) in d.vertices.iter().enumerate() {
            max_dev = max_dev.max(v.dist(Point2::new(0.0, h[j] - h[0])));
        }
    }
    Ok(C1Report {
        passed: failures.is_empty(),
        failures,
        epsilon,
        max_limit_deviation: max_dev,
        epsilon_condition: max_dev <= epsilon,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositionCheck {
    pub index: usize,
    pub simple: bool,
    pub one_sided: bool,
    pub non_vertical: bool,
    /// Deviation between the planar composition and the mixed development
    /// of the doubled branch, after rigid alignment.
    pub identity_deviation: f64,
    /// Interior angles between the end point line and the first and last
    /// edges.
    pub end_angles: (f64, f64),
}

impl CompositionCheck {
    pub fn passed(&self) -> bool {
        self.simple && self.one_sided && self.non_vertical
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C2Report {
    pub passed: bool,
    pub checks: Vec<CompositionCheck>,
}

/// For each pair of consecutive leaves, the planar composition
/// `(Gamma_i bar)^-1 . Gamma_(i+1) bar` is simple, lies strictly on one side
/// of the line through its end points, and that line is not vertical.
pub fn certify_c2(p: &Polyhedron, t: &CutTree, u: Direction, lambda: f64) -> Result<C2Report> {
    let paths = CertificatePaths::build(p, t)?;
    certify_c2_with(p, t, &paths, u, lambda)
}

pub fn certify_c2_with(p: &Polyhedron, t: &CutTree, paths: &CertificatePaths, u: Direction, lambda: f64) -> Result<C2Report> {
    let pl = p.affine_stretch(u, lambda)?;
    let tol = pl.tolerance();
    let init = InitialCondition::default();
    let k = paths.gammas.len();
    let mut checks = Vec::new();
    for i in 0..k.saturating_sub(1) {
        let (g, o) = (&paths.gammas[i], &paths.gammas[i + 1]);
        let m = g.points.iter().zip(&o.points).take_while(|(a, b)| a == b).count() - 1;
        let direct = develop(&pl, g, init)?.inverse_compose(&develop(&pl, o, init)?, m);

        // The same composition as a mixed development of the doubled branch
        // based at the juncture.
        let tp = &paths.tracing;
        let juncture = tp.vertices[tp.junctures[i]];
        let beta = t.path_to_root(tp.vertices[tp.leaves[i + 1]]);
        let base = beta.len() - 1 - beta.iter().position(|&v| v == juncture).expect("branch passes its juncture");
        let doubled = SurfacePath::from_vertices(beta.iter().rev().chain(beta.iter().skip(1)).copied()).inverse();
        let mixed = develop_mixed(&pl, &doubled, base, init)?;
        let identity_deviation = aligned_deviation(&direct, &mixed);

        let simple = is_simple_with(&direct, &tol).simple;
        let (a, b) = (direct.first(), direct.last());
        let sides: Vec<i8> = direct.vertices[1..direct.len() - 1].iter().map(|&x| orient2d(a, b, x)).collect();
        let one_sided = a != b && (sides.iter().all(|&s| s > 0) || sides.iter().all(|&s| s < 0));
        let non_vertical = (b.x - a.x).abs() > tol.eps_len * a.dist(b);
        checks.push(CompositionCheck {
            index: i,
            simple,
            one_sided,
            non_vertical,
            identity_deviation,
            end_angles: end_angles(&direct),
        });
    }
    Ok(C2Report { passed: checks.iter().all(CompositionCheck::passed), checks })
}

fn end_angles(d: &PlanarPath) -> (f64, f64) {
    let n = d.len();
    if n < 3 {
        return (0.0, 0.0);
    }
    let (a, b) = (d.first(), d.last());
    let ang = |o: Point2, x: Point2, y: Point2| {
        let (p, q) = (x - o, y - o);
        p.cross(q).abs().atan2(p.dot(q))
    };
    (ang(a, b, d.vertices[1]), ang(b, a, d.vertices[n - 2]))
}

/// Limiting value of an angle as the stretch factor grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    Zero,
    Pi,
    TwoPi,
}

impl Limit {
    pub fn value(self) -> f64 {
        match self {
            Limit::Zero => 0.0,
            Limit::Pi => PI,
            Limit::TwoPi => TAU,
        }
    }

    /// The nearest of the three limits.
    pub fn nearest(x: f64) -> Self {
        [Limit::Zero, Limit::Pi, Limit::TwoPi]
            .into_iter()
            .min_by(|a, b| (a.value() - x).abs().total_cmp(&(b.value() - x).abs()))
            .expect("three candidates")
    }
}

/// What the angles at an interior path point tend to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpectedLimit {
    /// Height strictly monotone through the point: both angles tend to pi.
    Monotone,
    /// The highest or lowest vertex of the polyhedron: the total angle, and
    /// with it both angles, tend to zero.
    GlobalExtremum,
    /// Any other local extremum of the path: one angle tends to 2pi, the
    /// other to zero.
    LocalExtremum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    /// Index of the interior point along the path.
    pub index: usize,
    pub expected: ExpectedLimit,
    /// Left angle at each stretch factor of the schedule.
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Ambient angle between the two path edges at each stretch factor.
    pub ambient: Vec<f64>,
    /// Nearest limits of the last left and right angles.
    pub observed: (Limit, Limit),
}

impl LimitRow {
    /// Whether the observed limits agree with the expected ones.
    pub fn matches(&self) -> bool {
        match self.expected {
            ExpectedLimit::Monotone => self.observed == (Limit::Pi, Limit::Pi),
            ExpectedLimit::GlobalExtremum => self.observed == (Limit::Zero, Limit::Zero),
            ExpectedLimit::LocalExtremum => matches!(self.observed, (Limit::Zero, Limit::TwoPi) | (Limit::TwoPi, Limit::Zero)),
        }
    }

    /// Distance of the last left and right angles from their observed limits.
    pub fn final_error(&self) -> f64 {
        let (l, r) = (self.left.last().copied().unwrap_or(0.0), self.right.last().copied().unwrap_or(0.0));
        (l - self.observed.0.value()).abs().max((r - self.observed.1.value()).abs())
    }

    /// Largest amount by which a path angle falls below the ambient angle.
    pub fn lower_bound_violation(&self) -> f64 {
        self.left
            .iter()
            .zip(&self.right)
            .zip(&self.ambient)
            .map(|((l, r), a)| (a - l).max(a - r))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub schedule: Vec<Dyadic>,
    pub rows: Vec<LimitRow>,
}

/// Evaluates the left and right angles at every interior vertex of `path`
/// on `P^lambda` for each `lambda` in the schedule.
pub fn limit_angle_report(p: &Polyhedron, path: &SurfacePath, u: Direction, schedule: &[Dyadic]) -> Result<LimitReport> {
    let h = path.heights(p, u);
    if h.windows(2).any(|w| w[0] == w[1]) {
        return Err(UnfoldError::Domain("path has a horizontal edge".into()));
    }
    let gp = p.check_general_position(u);
    let extreme = |i: usize| {
        let v = path.points[i].as_vertex();
        v.is_some() && (v == gp.top_vertex || v == gp.bottom_vertex)
    };
    let mut rows: Vec<LimitRow> = (1..path.len().saturating_sub(1))
        .map(|i| {
            let monotone = (h[i - 1] < h[i]) == (h[i] < h[i + 1]);
            let expected = if monotone {
                ExpectedLimit::Monotone
            } else if extreme(i) {
                ExpectedLimit::GlobalExtremum
            } else {
                ExpectedLimit::LocalExtremum
            };
            LimitRow { index: i, expected, left: vec![], right: vec![], ambient: vec![], observed: (Limit::Pi, Limit::Pi) }
        })
        .collect();
    for &lambda in schedule {
        let pl = p.affine_stretch(u, lambda.value())?;
        let angles = path.angles(&pl)?;
        for row in rows.iter_mut() {
            let a = angles[row.index - 1];
            row.left.push(a.left);
            row.right.push(a.right);
            let o = pl.position(&path.points[row.index]);
            let x = pl.position(&path.points[row.index - 1]) - o;
            let y = pl.position(&path.points[row.index + 1]) - o;
            row.ambient.push(ambient_angle(x, y)?);
        }
    }
    for row in rows.iter_mut() {
        if let (Some(&l), Some(&r)) = (row.left.last(), row.right.last()) {
            row.observed = (Limit::nearest(l), Limit::nearest(r));
        }
    }
    Ok(LimitReport { schedule: schedule.to_vec(), rows })
}

/// `2^0, 2^1, ..., 2^max_exponent`.
pub fn doubling_schedule(max_exponent: i32) -> Vec<Dyadic> {
    (0..=max_exponent).map(Dyadic::pow2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut_tree::{build_downhill_tree, enumerate_monotone_trees};
    use crate::development::layout_faces;
    use crate::polyhedron::shapes;
    use crate::simplicity::oracle_layout_overlap;

    fn rotated(p: &Polyhedron) -> Polyhedron {
        shapes::rotated(p, shapes::sample_rotation())
    }

    #[test]
    fn dyadic_arithmetic() {
        let a = Dyadic::new(12, 0);
        assert_eq!(a, Dyadic { mantissa: 3, exponent: 2 });
        assert_eq!(a.value(), 12.0);
        assert_eq!(Dyadic::midpoint(Dyadic::pow2(3), Dyadic::pow2(4)), Dyadic::new(3, 2));
        assert_eq!(Dyadic::pow2(20).ceil_log2(), 20);
        assert_eq!(Dyadic::new(3, 2).ceil_log2(), 4);
        assert_eq!(Dyadic::ONE.doubled().halved(), Dyadic::ONE);
        assert_eq!(Dyadic::pow2(-3).to_string(), "2^-3");
    }

    #[test]
    fn cube_tree_is_simple_at_one() {
        let c = rotated(&shapes::cube());
        let t = build_downhill_tree(&c, Direction::up()).unwrap();
        let r = stretch_search(&c, &t, Direction::up(), SearchOptions::default()).unwrap();
        assert_eq!(r.lambda, Dyadic::ONE);
        assert!(r.simple);
        assert_eq!(r.probes.len(), 1);
    }

    #[test]
    fn preconditions() {
        let c = shapes::cube();
        let t = build_downhill_tree(&rotated(&shapes::cube()), Direction::up()).unwrap();
        assert!(matches!(
            stretch_search(&c, &t, Direction::up(), SearchOptions::default()),
            Err(UnfoldError::GeneralPosition(_))
        ));
        // A spanning tree that is not monotone.
        let rc = rotated(&shapes::cube());
        let h = |v: usize| rc.vertex(v).z;
        let bottom = (0..8).min_by(|&a, &b| h(a).total_cmp(&h(b))).unwrap();
        let edges: Vec<(usize, usize)> = crate::cut_tree::enumerate_spanning_trees(&rc, Direction::up(), usize::MAX)
            .find(|t| !validate_cut_tree(&rc, t, Direction::up()).is_valid())
            .unwrap()
            .edges();
        let t = CutTree::from_edges(8, bottom, &edges, Direction::up()).unwrap();
        assert!(matches!(stretch_search(&rc, &t, Direction::up(), SearchOptions::default()), Err(UnfoldError::Tree(_))));
    }

    #[test]
    fn certificates_hold_on_a_stretched_prism() {
        let p = rotated(&shapes::prism(1.5));
        let u = Direction::up();
        let t = build_downhill_tree(&p, u).unwrap();
        let c1 = certify_c1(&p, &t, u, 4096.0).unwrap();
        assert!(c1.passed, "{:?}", c1.failures);
        assert!(c1.epsilon_condition);
        let c2 = certify_c2(&p, &t, u, 4096.0).unwrap();
        assert!(c2.passed, "{:?}", c2.checks);
        for c in &c2.checks {
            assert!(c.identity_deviation < 1e-7 * p.diameter());
            assert!(c.end_angles.0 + c.end_angles.1 < PI);
        }
    }

    #[test]
    fn composition_identity_at_one() {
        let p = rotated(&shapes::truncated_tetrahedron());
        let u = Direction::up();
        let (trees, _) = enumerate_monotone_trees(&p, u, 50).unwrap();
        for t in &trees {
            for c in certify_c2(&p, t, u, 1.0).unwrap().checks {
                assert!(c.identity_deviation < 1e-7 * p.diameter(), "{}", c.identity_deviation);
            }
        }
    }

    #[test]
    fn squat_frustum_fails_first_certificate_at_one() {
        let p = rotated(&shapes::frustum(7, 3.0, 0.4, 0.3));
        let u = Direction::up();
        let (trees, _) = enumerate_monotone_trees(&p, u, 100).unwrap();
        assert!(trees.iter().any(|t| !certify_c1(&p, t, u, 1.0).unwrap().passed));
        for t in &trees {
            assert!(certify_c1(&p, t, u, 2f64.powi(20)).unwrap().passed);
        }
    }

    #[test]
    fn returned_lambda_is_sound() {
        let p = rotated(&shapes::truncated_tetrahedron());
        let u = Direction::up();
        let (trees, _) = enumerate_monotone_trees(&p, u, 100).unwrap();
        for t in &trees {
            let r = stretch_search(&p, t, u, SearchOptions::default()).unwrap();
            assert!(r.simple);
            let pl = p.affine_stretch(u, r.lambda.value()).unwrap();
            assert!(!oracle_layout_overlap(&layout_faces(&pl, t).unwrap()));
            let c = stretch_search(&p, t, u, SearchOptions { goal: SearchGoal::Certified, ..Default::default() }).unwrap();
            assert!(c.c1_certified && c.c2_certified);
            assert!(c.lambda.value() >= r.lambda.value());
        }
    }

    #[test]
    fn refinement_stays_in_the_bracket() {
        let p = rotated(&shapes::truncated_tetrahedron());
        let u = Direction::up();
        let (trees, _) = enumerate_monotone_trees(&p, u, usize::MAX).unwrap();
        for t in &trees {
            let plain = stretch_search(&p, t, u, SearchOptions::default()).unwrap();
            let refined = stretch_search(&p, t, u, SearchOptions { refine_steps: 4, ..Default::default() }).unwrap();
            assert!(refined.lambda.value() <= plain.lambda.value());
            assert!(refined.lambda.value() > plain.lambda.value() / 2.0 || plain.lambda == Dyadic::ONE);
        }
    }

    #[test]
    fn search_exhausts_below_the_cap() {
        let p = rotated(&shapes::truncated_tetrahedron());
        let u = Direction::up();
        let (trees, _) = enumerate_monotone_trees(&p, u, usize::MAX).unwrap();
        let bad = trees.iter().find(|t| !unfolding_is_simple(&p, t).unwrap().simple);
        if let Some(t) = bad {
            let r = stretch_search(&p, t, u, SearchOptions { cap_exponent: 0, ..Default::default() });
            match r {
                Err(UnfoldError::SearchExhausted { cap_exponent: 0, probes }) => assert_eq!(probes, vec![(1.0, false)]),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn limits_along_a_branch() {
        let p = rotated(&shapes::truncated_tetrahedron());
        let u = Direction::up();
        let t = build_downhill_tree(&p, u).unwrap();
        let tp = trace_boundary(&p, &t).unwrap();
        for i in 0..tp.num_leaves() {
            let g = gamma_i(&t, &tp, i).unwrap();
            let r = limit_angle_report(&p, &g, u, &doubling_schedule(20)).unwrap();
            for row in &r.rows {
                assert!(row.matches(), "{row:?}");
                assert!(row.final_error() < 0.05);
                assert!(row.lower_bound_violation() < 1e-9);
            }
        }
        let c = shapes::cube();
        let flat = SurfacePath::from_vertices([0, 1, 3]);
        assert!(limit_angle_report(&c, &flat, u, &doubling_schedule(2)).is_err());
    }

    #[test]
    fn top_vertex_angles_collapse() {
        let p = rotated(&shapes::octahedron());
        let u = Direction::up();
        let gp = p.check_general_position(u);
        let top = gp.top_vertex.unwrap();
        let ns: Vec<usize> = p.neighbors(top).collect();
        let path = SurfacePath::from_vertices([ns[0], top, ns[2]]);
        let r = limit_angle_report(&p, &path, u, &doubling_schedule(20)).unwrap();
        assert_eq!(r.rows[0].expected, ExpectedLimit::GlobalExtremum);
        assert!(r.rows[0].matches());
    }
}
