//! Randomized invariant suites and the exhaustive spanning-tree sweep.
//!
//! Each suite draws its own seeded stream, so the matrix does not depend on
//! which worker thread runs which suite.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{random_shared_prefix_pair, random_star_point, CorpusInstance};
use crate::cut_tree::{enumerate_spanning_trees, random_monotone_tree, random_spanning_tree};
use crate::development::{check_mixed_composition, develop_tracing, layout_faces, InitialCondition};
use crate::error::{Result, UnfoldError};
use crate::polyhedron::{Direction, Polyhedron, SurfacePoint};
use crate::simplicity::{oracle_layout_overlap, unfolding_is_simple};
use crate::stretch::{doubling_schedule, limit_angle_report, stretch_search, SearchOptions};
use crate::tracing::{gamma_i, trace_boundary};

/// Left angle `(a, o, b)` at vertex `o`. Swappable so that a broken angle
/// routine can be shown to fail the suites.
pub type LeftAngleFn = fn(&Polyhedron, &SurfacePoint, usize, &SurfacePoint) -> Result<f64>;

fn library_left_angle(p: &Polyhedron, a: &SurfacePoint, o: usize, b: &SurfacePoint) -> Result<f64> {
    p.left_angle(a, o, b)
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Trials per suite. Zero runs nothing.
    pub trials: usize,
    pub left_angle: LeftAngleFn,
}

impl VerifyOptions {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self { seed, trials, left_angle: library_left_angle }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    GaussBonnet,
    AngleSum,
    AngleAdditivity,
    TracingStructure,
    DevelopmentClosure,
    MixedComposition,
    OracleEquivalence,
    StretchSoundness,
    LimitAngles,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::GaussBonnet,
        Suite::AngleSum,
        Suite::AngleAdditivity,
        Suite::TracingStructure,
        Suite::DevelopmentClosure,
        Suite::MixedComposition,
        Suite::OracleEquivalence,
        Suite::StretchSoundness,
        Suite::LimitAngles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::GaussBonnet => "gauss_bonnet",
            Suite::AngleSum => "angle_sum",
            Suite::AngleAdditivity => "angle_additivity",
            Suite::TracingStructure => "tracing_structure",
            Suite::DevelopmentClosure => "development_closure",
            Suite::MixedComposition => "mixed_composition",
            Suite::OracleEquivalence => "oracle_equivalence",
            Suite::StretchSoundness => "stretch_soundness",
            Suite::LimitAngles => "limit_angles",
        }
    }
}

/// One row of the pass/fail matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub trials: usize,
    pub failures: usize,
    /// Largest error measured, in the suite's own units.
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Result of one trial: `Ok(err)` is the measured error, `Err` a failure.
type Trial = std::result::Result<f64, String>;

/// Runs every suite on random draws from `instances`.
pub fn verify(instances: &[CorpusInstance], opts: VerifyOptions) -> Result<Vec<SuiteOutcome>> {
    if opts.trials == 0 {
        return Ok(Vec::new());
    }
    if instances.is_empty() {
        return Err(UnfoldError::Domain("no instances to verify on".into()));
    }
    Ok(Suite::ALL
        .par_iter()
        .enumerate()
        .map(|(k, &suite)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            run_suite(suite, instances, opts, &mut rng)
        })
        .collect())
}

fn run_suite(suite: Suite, instances: &[CorpusInstance], opts: VerifyOptions, rng: &mut ChaCha8Rng) -> SuiteOutcome {
    let mut out = SuiteOutcome { suite, trials: opts.trials, failures: 0, worst: 0.0, first_failure: None };
    for trial in 0..opts.trials {
        let inst = &instances[rng.gen_range(0..instances.len())];
        let res = match suite {
            Suite::GaussBonnet => gauss_bonnet(inst, rng),
            Suite::AngleSum => angle_sum(inst, opts.left_angle, rng),
            Suite::AngleAdditivity => angle_additivity(inst, opts.left_angle, rng),
            Suite::TracingStructure => tracing_structure(inst, rng),
            Suite::DevelopmentClosure => development_closure(inst, rng),
            Suite::MixedComposition => mixed_composition(inst, rng),
            Suite::OracleEquivalence => oracle_equivalence(inst, rng),
            Suite::StretchSoundness => stretch_soundness(inst, rng),
            Suite::LimitAngles => limit_angles(inst, rng),
        };
        match res {
            Ok(err) => out.worst = out.worst.max(err),
            Err(msg) => {
                out.failures += 1;
                if out.first_failure.is_none() {
                    out.first_failure = Some(format!("trial {trial} on {}: {msg}", inst.name));
                }
            }
        }
    }
    out
}

fn within(err: f64, tol: f64, what: &str) -> Trial {
    if err <= tol {
        Ok(err)
    } else {
        Err(format!("{what} {err:.3e} exceeds {tol:.1e}"))
    }
}

fn gauss_bonnet(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let lambda = rng.gen_range(1.0..16.0);
    let p = inst.polyhedron.affine_stretch(inst.direction, lambda).map_err(|e| e.to_string())?;
    let n = p.num_vertices() as f64;
    within(p.gauss_bonnet_residual() / n, 1e-9, "residual per vertex")
}

/// Two star points of a random vertex whose rays are distinct.
fn star_pair(p: &Polyhedron, rng: &mut ChaCha8Rng) -> (usize, SurfacePoint, SurfacePoint) {
    loop {
        let o = rng.gen_range(0..p.num_vertices());
        let (a, b) = (random_star_point(p, o, rng), random_star_point(p, o, rng));
        let (pa, pb) = (p.star_position(o, &a).expect("star point"), p.star_position(o, &b).expect("star point"));
        if (pa - pb).abs() > 1e-6 {
            return (o, a, b);
        }
    }
}

fn angle_sum(inst: &CorpusInstance, left: LeftAngleFn, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let (o, a, b) = star_pair(p, rng);
    let ab = left(p, &a, o, &b).map_err(|e| e.to_string())?;
    let ba = left(p, &b, o, &a).map_err(|e| e.to_string())?;
    within((ab + ba - p.total_angle(o)).abs(), p.tolerance().eps_ang, "sum identity error")
}

fn angle_additivity(inst: &CorpusInstance, left: LeftAngleFn, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    loop {
        let (o, a, b) = star_pair(p, rng);
        let c = random_star_point(p, o, rng);
        let oo = SurfacePoint::Vertex(o);
        if !p.strictly_left_of(&c, &a, &oo, &b).map_err(|e| e.to_string())? {
            continue;
        }
        let f = |x: &SurfacePoint, y: &SurfacePoint| left(p, x, o, y).map_err(|e| e.to_string());
        let err = (f(&a, &c)? + f(&c, &b)? - f(&a, &b)?).abs();
        return within(err, p.tolerance().eps_ang, "additivity error");
    }
}

fn tracing_structure(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let t = random_monotone_tree(p, inst.direction, rng).map_err(|e| e.to_string())?;
    let tp = trace_boundary(p, &t).map_err(|e| e.to_string())?;
    let v = tp.structure_violations(p, &t);
    if v.is_empty() {
        Ok(0.0)
    } else {
        Err(format!("{} violations, first {:?}", v.len(), v[0]))
    }
}

fn development_closure(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let t = random_monotone_tree(p, inst.direction, rng).map_err(|e| e.to_string())?;
    let tp = trace_boundary(p, &t).map_err(|e| e.to_string())?;
    let d = develop_tracing(p, &tp, InitialCondition::default());
    let gap = d.endpoint_gap() / d.perimeter();
    let turning: f64 = tp.theta.iter().map(|th| PI - th).sum();
    within(gap, 1e-7, "endpoint gap / perimeter")?;
    within((turning - TAU).abs(), 1e-7, "total turning error")
}

fn mixed_composition(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let (g, o, m) = loop {
        if let Some(x) = random_shared_prefix_pair(p, rng) {
            break x;
        }
    };
    let r = check_mixed_composition(p, &g, &o, m).map_err(|e| e.to_string())?;
    within(r.max_deviation / p.diameter(), 1e-7, "deviation / diameter")
}

fn oracle_equivalence(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let t = random_spanning_tree(p, inst.direction, rng);
    let simple = unfolding_is_simple(p, &t).map_err(|e| e.to_string())?.simple;
    let overlap = oracle_layout_overlap(&layout_faces(p, &t).map_err(|e| e.to_string())?);
    if simple == overlap {
        return Err(format!("boundary test says simple={simple}, face oracle says overlap={overlap}"));
    }
    Ok(0.0)
}

fn stretch_soundness(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let u = inst.direction;
    let t = random_monotone_tree(p, u, rng).map_err(|e| e.to_string())?;
    let r = match stretch_search(p, &t, u, SearchOptions::default()) {
        Ok(r) => r,
        // Not simple anywhere below the cap is not a soundness failure.
        Err(UnfoldError::SearchExhausted { .. }) => return Ok(0.0),
        Err(e) => return Err(e.to_string()),
    };
    let q = p.affine_stretch(u, r.lambda.value()).map_err(|e| e.to_string())?;
    let layout = layout_faces(&q, &t).map_err(|e| e.to_string())?;
    if r.simple && oracle_layout_overlap(&layout) {
        return Err(format!("reported simple at lambda {} but the faces overlap", r.lambda));
    }
    Ok(0.0)
}

fn limit_angles(inst: &CorpusInstance, rng: &mut ChaCha8Rng) -> Trial {
    let p = &inst.polyhedron;
    let t = random_monotone_tree(p, inst.direction, rng).map_err(|e| e.to_string())?;
    let tp = trace_boundary(p, &t).map_err(|e| e.to_string())?;
    let i = rng.gen_range(0..tp.num_leaves());
    let g = gamma_i(&t, &tp, i).map_err(|e| e.to_string())?;
    let r = limit_angle_report(p, &g, inst.direction, &doubling_schedule(20)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in &r.rows {
        if !row.matches() {
            return Err(format!("path point {} classified {:?}, expected {:?}", row.index, row.observed, row.expected));
        }
        if row.lower_bound_violation() > 1e-9 {
            return Err(format!("path point {} falls below the ambient angle by {:.2e}", row.index, row.lower_bound_violation()));
        }
        worst = worst.max(row.final_error());
    }
    within(worst, 0.05, "final limit error")
}

/// Counts over every spanning tree of the edge graph, in enumeration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub trees: usize,
    pub simple: usize,
    pub overlapping: usize,
    /// Enumeration indices of the overlapping trees.
    pub overlapping_trees: Vec<usize>,
    /// Set when `limit` stopped the enumeration early.
    pub truncated: bool,
}

/// Decides simplicity of the unfolding along every spanning tree, at most
/// `limit` trees, in parallel.
pub fn sweep(p: &Polyhedron, u: Direction, limit: usize) -> Result<SweepReport> {
    let mut it = enumerate_spanning_trees(p, u, limit);
    let trees: Vec<_> = it.by_ref().collect();
    let truncated = it.truncated();
    let simple: Vec<bool> =
        trees.par_iter().map(|t| unfolding_is_simple(p, t).map(|r| r.simple)).collect::<Result<_>>()?;
    let overlapping_trees: Vec<usize> = simple.iter().enumerate().filter(|(_, &s)| !s).map(|(i, _)| i).collect();
    Ok(SweepReport {
        trees: trees.len(),
        simple: trees.len() - overlapping_trees.len(),
        overlapping: overlapping_trees.len(),
        overlapping_trees,
        truncated,
    })
}
