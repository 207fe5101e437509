//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unfolder_core::corpus::{
    corpus, random_generic_instance, random_shared_prefix_pair, random_star_point, random_truncated_tetrahedron, CorpusInstance,
};
use unfolder_core::cut_tree::{
    build_downhill_tree, enumerate_monotone_trees, enumerate_spanning_trees, random_monotone_tree, random_spanning_tree,
};
use unfolder_core::development::{check_mixed_composition, develop_tracing, layout_faces, InitialCondition};
use unfolder_core::polyhedron::{shapes, Direction, Polyhedron};
use unfolder_core::simplicity::{oracle_layout_overlap, unfolding_is_simple};
use unfolder_core::stretch::{doubling_schedule, limit_angle_report, stretch_search, SearchGoal, SearchOptions};
use unfolder_core::tracing::{gamma_i, trace_boundary};

const SEED: u64 = 0x5eed_2024;

type Criterion<'a> = (&'static str, Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

fn gauss_bonnet(instances: &[CorpusInstance]) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut ok = true;
    for inst in instances {
        let p = &inst.polyhedron;
        let r = p.gauss_bonnet_residual();
        worst = worst.max(r / p.num_vertices() as f64);
        ok &= r < 1e-9 * p.num_vertices() as f64;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 1.0, format!("{} meshes, worst residual/V {worst:.2e}, {secs:.3}s", instances.len()))
}

fn angle_calculus(instances: &[CorpusInstance], rng: &mut impl Rng) -> Outcome {
    let (mut sum_err, mut add_err) = (0.0f64, 0.0f64);
    let mut additive_cases = 0;
    let mut samples = 0;
    while samples < 10_000 {
        let p = &instances[rng.gen_range(0..instances.len())].polyhedron;
        let o = rng.gen_range(0..p.num_vertices());
        let (a, b, c) = (random_star_point(p, o, rng), random_star_point(p, o, rng), random_star_point(p, o, rng));
        let (pa, pb) = (p.star_position(o, &a).unwrap(), p.star_position(o, &b).unwrap());
        if (pa - pb).abs() < 1e-6 {
            continue;
        }
        samples += 1;
        let ab = p.left_angle(&a, o, &b).unwrap();
        let ba = p.left_angle(&b, o, &a).unwrap();
        sum_err = sum_err.max((ab + ba - p.total_angle(o)).abs());
        let oo = unfolder_core::polyhedron::SurfacePoint::Vertex(o);
        if p.strictly_left_of(&c, &a, &oo, &b).unwrap() {
            additive_cases += 1;
            let ac = p.left_angle(&a, o, &c).unwrap();
            let cb = p.left_angle(&c, o, &b).unwrap();
            add_err = add_err.max((ac + cb - ab).abs());
        }
    }
    outcome(
        sum_err < 1e-9 && add_err < 1e-9 && additive_cases > 0,
        format!("{samples} samples, sum identity err {sum_err:.1e}, additivity err {add_err:.1e} over {additive_cases} cases"),
    )
}

fn tracing_structure(instances: &[CorpusInstance], rng: &mut impl Rng) -> Outcome {
    let mut violations = 0;
    let mut first = None;
    for _ in 0..500 {
        let inst = &instances[rng.gen_range(0..instances.len())];
        let t = random_monotone_tree(&inst.polyhedron, inst.direction, rng).unwrap();
        let tp = trace_boundary(&inst.polyhedron, &t).unwrap();
        let v = tp.structure_violations(&inst.polyhedron, &t);
        if !v.is_empty() && first.is_none() {
            first = Some(format!("{}: {:?}", inst.name, v));
        }
        violations += v.len();
    }
    outcome(violations == 0, format!("500 pairs, {violations} violations{}", first.map(|f| format!(" ({f})")).unwrap_or_default()))
}

fn development_soundness(instances: &[CorpusInstance]) -> Outcome {
    let (mut worst_gap, mut worst_turn) = (0.0f64, 0.0f64);
    for inst in instances {
        let p = &inst.polyhedron;
        let t = build_downhill_tree(p, inst.direction).unwrap();
        let tp = trace_boundary(p, &t).unwrap();
        let d = develop_tracing(p, &tp, InitialCondition::default());
        worst_gap = worst_gap.max(d.endpoint_gap() / d.perimeter());
        let turning: f64 = tp.theta.iter().map(|th| PI - th).sum();
        worst_turn = worst_turn.max((turning - TAU).abs());
        // The planar polygon itself turns once.
        let planar: f64 = d.turning_angles().iter().sum();
        worst_turn = worst_turn.max((planar - TAU).abs());
    }
    outcome(
        worst_gap < 1e-7 && worst_turn < 1e-7,
        format!("{} instances, worst gap/perimeter {worst_gap:.1e}, worst turning error {worst_turn:.1e}", instances.len()),
    )
}

fn mixed_congruence(instances: &[CorpusInstance], rng: &mut impl Rng) -> Outcome {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    while pairs < 1000 {
        let p = &instances[rng.gen_range(0..instances.len())].polyhedron;
        let Some((g, o, m)) = random_shared_prefix_pair(p, rng) else { continue };
        let r = check_mixed_composition(p, &g, &o, m).unwrap();
        worst = worst.max(r.max_deviation / p.diameter());
        pairs += 1;
    }
    outcome(worst < 1e-7, format!("{pairs} pairs, worst deviation/diameter {worst:.1e}"))
}

fn oracle_equivalence(rng: &mut impl Rng) -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut disagreements = 0;
    let mut agree = |p: &Polyhedron, t: &unfolder_core::cut_tree::CutTree| {
        let simple = unfolding_is_simple(p, t).unwrap().simple;
        let overlap = oracle_layout_overlap(&layout_faces(p, t).unwrap());
        checked += 1;
        if simple == overlap {
            disagreements += 1;
        }
        simple
    };
    let mut random_overlapping = 0;
    for _ in 0..500 {
        let (p, u) = random_generic_instance(rng, 30);
        let t = random_spanning_tree(&p, u, rng);
        if !agree(&p, &t) {
            random_overlapping += 1;
        }
    }
    let cube = shapes::cube();
    let mut cube_overlapping = 0;
    let mut cube_trees = 0;
    for t in enumerate_spanning_trees(&cube, Direction::up(), usize::MAX) {
        cube_trees += 1;
        if !agree(&cube, &t) {
            cube_overlapping += 1;
        }
    }
    let tet = shapes::tetrahedron();
    let mut tet_trees = 0;
    for t in enumerate_spanning_trees(&tet, Direction::up(), usize::MAX) {
        tet_trees += 1;
        agree(&tet, &t);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        disagreements == 0 && cube_trees == 384 && tet_trees == 16 && cube_overlapping == 0 && secs < 30.0,
        format!(
            "{checked} unfoldings ({random_overlapping} random overlapping), {disagreements} disagreements, \
             cube {cube_trees} trees / {cube_overlapping} overlapping, tetrahedron {tet_trees} trees, {secs:.1}s"
        ),
    )
}

fn stretch_reproduction(rng: &mut impl Rng) -> Outcome {
    let start = Instant::now();
    let u = Direction::up();
    // The regular solid first, then squat solids with unequal corner cuts,
    // until some monotone tree overlaps at lambda = 1.
    let regular = shapes::rotated(&shapes::truncated_tetrahedron(), shapes::sample_rotation());
    let mut regular_overlaps = 0;
    for attempt in 0..100 {
        let p = if attempt == 0 { regular.clone() } else { random_truncated_tetrahedron(rng) };
        if !p.check_general_position(u).is_general {
            continue;
        }
        let (trees, _) = enumerate_monotone_trees(&p, u, usize::MAX).unwrap();
        let overlapping: Vec<_> = trees.iter().filter(|t| !unfolding_is_simple(&p, t).unwrap().simple).collect();
        if attempt == 0 {
            regular_overlaps = overlapping.len();
        }
        let Some(t) = overlapping.first() else { continue };
        let res = stretch_search(&p, t, u, SearchOptions { goal: SearchGoal::Certified, ..Default::default() }).unwrap();
        let secs = start.elapsed().as_secs_f64();
        return outcome(
            res.simple && res.lambda.value() > 1.0 && res.lambda.ceil_log2() <= 20 && res.c1_certified && res.c2_certified && secs < 10.0,
            format!(
                "regular solid: {regular_overlaps} overlapping monotone trees; solid {attempt}: {} of {} monotone trees overlap, \
                 first one simple and certified at lambda = {} after {} probes, {secs:.2}s",
                overlapping.len(),
                trees.len(),
                res.lambda,
                res.probes.len()
            ),
        );
    }
    outcome(false, "no overlapping monotone tree found on 100 truncated tetrahedra".into())
}

fn desk_scale(rng: &mut impl Rng) -> Outcome {
    let start = Instant::now();
    let (mut simple, mut certified) = (0, 0);
    let mut max_exp = 0;
    let mut failures = Vec::new();
    for run in 0..100 {
        let (p, u) = random_generic_instance(rng, 30);
        let t = build_downhill_tree(&p, u).unwrap();
        match stretch_search(&p, &t, u, SearchOptions { goal: SearchGoal::Certified, ..Default::default() }) {
            Ok(r) => {
                simple += r.simple as usize;
                certified += (r.c1_certified && r.c2_certified) as usize;
                max_exp = max_exp.max(r.lambda.ceil_log2());
                if !(r.c1_certified && r.c2_certified) {
                    failures.push(format!("run {run}: lambda {} C1 {} C2 {}", r.lambda, r.c1_certified, r.c2_certified));
                }
            }
            Err(e) => failures.push(format!("run {run}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        simple == 100 && certified >= 95 && secs < 300.0,
        format!(
            "100 runs: {simple} simple, {certified} certified, largest lambda 2^{max_exp}, {secs:.1}s{}",
            if failures.is_empty() { String::new() } else { format!("; uncertified: {}", failures.join(", ")) }
        ),
    )
}

fn limit_angles(instances: &[CorpusInstance], rng: &mut impl Rng) -> Outcome {
    let schedule = doubling_schedule(20);
    let (mut paths, mut rows, mut mismatches) = (0, 0, 0);
    let (mut worst_err, mut worst_bound) = (0.0f64, f64::NEG_INFINITY);
    while paths < 50 {
        let inst = &instances[rng.gen_range(0..instances.len())];
        let p = &inst.polyhedron;
        let t = random_monotone_tree(p, inst.direction, rng).unwrap();
        let tp = trace_boundary(p, &t).unwrap();
        let i = rng.gen_range(0..tp.num_leaves());
        let g = gamma_i(&t, &tp, i).unwrap();
        let r = limit_angle_report(p, &g, inst.direction, &schedule).unwrap();
        for row in &r.rows {
            rows += 1;
            mismatches += (!row.matches()) as usize;
            worst_err = worst_err.max(row.final_error());
            worst_bound = worst_bound.max(row.lower_bound_violation());
        }
        paths += 1;
    }
    outcome(
        mismatches == 0 && worst_err < 0.05 && worst_bound <= 1e-9,
        format!(
            "{paths} paths, {rows} interior vertices, {mismatches} misclassified, worst final error {worst_err:.1e}, \
             worst lower-bound excess {worst_bound:.1e}"
        ),
    )
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let instances = corpus(&mut rng, 100);
    let criteria: Vec<Criterion> = vec![
        ("1 Gauss-Bonnet", Box::new(|_| gauss_bonnet(&instances))),
        ("2 angle calculus", Box::new(|r| angle_calculus(&instances, r))),
        ("3 tracing structure", Box::new(|r| tracing_structure(&instances, r))),
        ("4 development soundness", Box::new(|_| development_soundness(&instances))),
        ("5 mixed development congruence", Box::new(|r| mixed_congruence(&instances, r))),
        ("6 oracle equivalence", Box::new(oracle_equivalence)),
        ("7 truncated tetrahedron stretch", Box::new(stretch_reproduction)),
        ("8 desk-scale stretch search", Box::new(desk_scale)),
        ("9 limit angles", Box::new(|r| limit_angles(&instances, r))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let (o, elapsed) = timed(|| run(&mut rng));
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {} ({:.2}s)", o.detail, elapsed.as_secs_f64());
        failed += (!o.passed) as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
