//! Commands behind the `unfolder` binary.

pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use seeded::direction_for;

use unfolder_core::corpus::{corpus, CorpusInstance};
use unfolder_core::cut_tree::{build_downhill_tree, build_steepest_edge_tree, validate_cut_tree, CutTree};
use unfolder_core::development::layout_faces;
use unfolder_core::geom::{Point3, TolerancePolicy};
use unfolder_core::polyhedron::{load_polyhedron, Direction, MeshFormat, Polyhedron};
use unfolder_core::simplicity::unfolding_is_simple;
use unfolder_core::stretch::{stretch_search, SearchGoal, SearchOptions};
use unfolder_core::verify::{sweep, verify, VerifyOptions};
use unfolder_core::{Result, UnfoldError};

use report::{digest, RunReport, Timing};

pub const EXIT_OK: i32 = 0;
/// A verification suite reported a failure.
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SEARCH_EXHAUSTED: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(e: &UnfoldError) -> i32 {
    match e {
        UnfoldError::Io(_) => EXIT_IO,
        UnfoldError::SearchExhausted { .. } => EXIT_SEARCH_EXHAUSTED,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Parser)]
#[command(name = "unfolder", version, about = "Edge unfoldings of convex polyhedra along monotone cut trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print counts, the Gauss-Bonnet residual and per-vertex total angles.
    Info {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, value_parser = parse_direction)]
        u: Option<Direction>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Unfold along a cut tree and report whether the net is simple.
    Unfold {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Stretch along u until the unfolding becomes simple.
    Stretch {
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        tree: TreeArgs,
        /// Largest exponent e probed, as lambda = 2^e.
        #[arg(long, default_value_t = 30)]
        lambda_cap: i32,
        /// Keep doubling until both certificates pass as well.
        #[arg(long)]
        certify: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the randomized invariant suites. Without a mesh, runs on a seeded
    /// corpus of standard solids and random hulls.
    Verify {
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        format: Option<MeshFormat>,
        #[arg(long, value_parser = parse_direction)]
        u: Option<Direction>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Count simple and overlapping unfoldings over all spanning trees.
    Sweep {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, value_parser = parse_direction)]
        u: Option<Direction>,
        /// Stop after this many trees.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Defaults to the file extension, then OFF.
    #[arg(long)]
    pub format: Option<MeshFormat>,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Height direction, normalized internally.
    #[arg(long, value_parser = parse_direction)]
    pub u: Option<Direction>,
    /// `downhill`, `steepest`, or a tree file.
    #[arg(long, default_value = "downhill")]
    pub tree: TreeSource,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeSource {
    Downhill,
    Steepest,
    File(PathBuf),
}

impl FromStr for TreeSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "downhill" => TreeSource::Downhill,
            "steepest" => TreeSource::Steepest,
            path => TreeSource::File(path.into()),
        })
    }
}

pub fn parse_direction(s: &str) -> std::result::Result<Direction, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("not a number: {x:?}")))
        .collect::<std::result::Result<_, _>>()?;
    let [x, y, z] = parts[..] else {
        return Err(format!("expected x,y,z, got {s:?}"));
    };
    Direction::new(Point3::new(x, y, z)).map_err(|e| e.to_string())
}

/// What a command leaves behind: its report and the text printed to stdout.
pub struct Output {
    pub report: RunReport,
    pub summary: String,
    pub exit_code: i32,
}

struct Timer {
    start: Instant,
    timings: Vec<Timing>,
}

impl Timer {
    fn new() -> Self {
        Self { start: Instant::now(), timings: Vec::new() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push(Timing { stage: stage.into(), seconds: (now - self.start).as_secs_f64() });
        self.start = now;
    }
}

struct Loaded {
    polyhedron: Polyhedron,
    digest: String,
}

fn load(path: &Path, format: Option<MeshFormat>, tol: TolerancePolicy) -> Result<Loaded> {
    let bytes = std::fs::read(path)?;
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("obj") => MeshFormat::Obj,
        _ => MeshFormat::Off,
    });
    let polyhedron = load_polyhedron(&bytes[..], format, tol)?;
    Ok(Loaded { polyhedron, digest: digest(&bytes) })
}

fn describe(report: &mut RunReport, loaded: &Loaded, u: Direction) {
    let p = &loaded.polyhedron;
    report.input_digest = Some(loaded.digest.clone());
    report.num_vertices = Some(p.num_vertices());
    report.num_edges = Some(p.num_edges());
    report.num_faces = Some(p.num_faces());
    report.gauss_bonnet_residual = Some(p.gauss_bonnet_residual());
    let v = u.vector();
    report.direction = Some([v.x, v.y, v.z]);
    report.tolerance = Some(p.tolerance());
}

fn build_tree(p: &Polyhedron, u: Direction, source: &TreeSource) -> Result<CutTree> {
    let t = match source {
        TreeSource::Downhill => build_downhill_tree(p, u)?,
        TreeSource::Steepest => build_steepest_edge_tree(p, u)?,
        TreeSource::File(path) => CutTree::from_text(&std::fs::read_to_string(path)?, p.num_vertices(), u)?,
    };
    let v = validate_cut_tree(p, &t, u);
    if !v.is_spanning_tree() {
        return Err(UnfoldError::Tree(format!("{:?}", v.violations)));
    }
    Ok(t)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

/// Runs one command. Errors carry their exit code through [`exit_code`].
pub fn run(cli: Cli) -> Result<Output> {
    let tol = TolerancePolicy::from_env()?;
    let mut timer = Timer::new();
    let (mut report, summary, exit_code, out_json, out_svg) = match cli.command {
        Command::Info { mesh, u, out_json } => {
            let loaded = load(&mesh.mesh, mesh.format, tol)?;
            timer.lap("load");
            let u = u.unwrap_or_else(Direction::up);
            let p = &loaded.polyhedron;
            let mut r = RunReport::new("info");
            describe(&mut r, &loaded, u);
            r.general_position = Some(p.check_general_position(u));
            let mut s = format!(
                "V={} E={} F={}\nGauss-Bonnet residual: {:.3e}\n",
                p.num_vertices(),
                p.num_edges(),
                p.num_faces(),
                p.gauss_bonnet_residual()
            );
            for v in 0..p.num_vertices() {
                s.push_str(&format!("vertex {v}: total angle {:.12}\n", p.total_angle(v)));
            }
            (r, s, EXIT_OK, out_json, None)
        }
        Command::Unfold { mesh, tree, out } => {
            let loaded = load(&mesh.mesh, mesh.format, tol)?;
            timer.lap("load");
            let u = tree.u.unwrap_or_else(Direction::up);
            let p = &loaded.polyhedron;
            let mut r = RunReport::new("unfold");
            describe(&mut r, &loaded, u);
            r.general_position = Some(p.check_general_position(u));
            let t = build_tree(p, u, &tree.tree)?;
            r.tree = Some(t.to_text());
            timer.lap("tree");
            let simplicity = unfolding_is_simple(p, &t)?;
            r.simplicity = Some(simplicity);
            timer.lap("simplicity");
            r.net = Some(layout_faces(p, &t)?);
            timer.lap("layout");
            let s = match simplicity.first_violation {
                None => "unfolding is simple\n".to_string(),
                Some(v) => format!(
                    "unfolding overlaps: boundary edges {} and {} meet at ({}, {})\n",
                    v.edges.0,
                    v.edges.1,
                    svg::fmt_num(v.point.x),
                    svg::fmt_num(v.point.y)
                ),
            };
            (r, s, EXIT_OK, out.out_json, out.out_svg)
        }
        Command::Stretch { mesh, tree, lambda_cap, certify, out } => {
            let loaded = load(&mesh.mesh, mesh.format, tol)?;
            timer.lap("load");
            let u = tree.u.unwrap_or_else(Direction::up);
            let p = &loaded.polyhedron;
            let mut r = RunReport::new("stretch");
            describe(&mut r, &loaded, u);
            r.general_position = Some(p.check_general_position(u));
            let t = build_tree(p, u, &tree.tree)?;
            r.tree = Some(t.to_text());
            timer.lap("tree");
            r.simplicity = Some(unfolding_is_simple(p, &t)?);
            let goal = if certify { SearchGoal::Certified } else { SearchGoal::FirstSimple };
            let opts = SearchOptions { cap_exponent: lambda_cap, goal, ..Default::default() };
            r.search_options = Some(opts);
            let res = stretch_search(p, &t, u, opts)?;
            timer.lap("search");
            let stretched = p.affine_stretch(u, res.lambda.value())?;
            r.net = Some(layout_faces(&stretched, &t)?);
            timer.lap("layout");
            let s = format!(
                "simple at lambda = {} after {} probes (C1 {}, C2 {})\n",
                res.lambda,
                res.probes.len(),
                if res.c1_certified { "certified" } else { "not certified" },
                if res.c2_certified { "certified" } else { "not certified" }
            );
            r.stretch = Some(res);
            (r, s, EXIT_OK, out.out_json, out.out_svg)
        }
        Command::Verify { mesh, format, u, seed, trials, out_json } => {
            let mut r = RunReport::new("verify");
            r.seed = Some(seed);
            let instances = match mesh {
                Some(path) => {
                    let loaded = load(&path, format, tol)?;
                    let p = loaded.polyhedron.clone();
                    let direction = match u {
                        Some(u) if p.check_general_position(u).is_general => u,
                        Some(_) => {
                            return Err(UnfoldError::GeneralPosition("mesh is not in general position for --u".into()))
                        }
                        None => direction_for(&p, seed)?,
                    };
                    describe(&mut r, &loaded, direction);
                    vec![CorpusInstance { name: path.display().to_string(), polyhedron: p, direction }]
                }
                None => corpus(&mut seeded::rng(seed), 16),
            };
            timer.lap("load");
            r.suites = verify(&instances, VerifyOptions::new(seed, trials))?;
            timer.lap("suites");
            let mut s = String::new();
            for row in &r.suites {
                s.push_str(&format!(
                    "[{}] {}: {} trials, {} failures, worst {:.2e}{}\n",
                    if row.passed() { "PASS" } else { "FAIL" },
                    row.suite.name(),
                    row.trials,
                    row.failures,
                    row.worst,
                    row.first_failure.as_deref().map(|f| format!(" ({f})")).unwrap_or_default()
                ));
            }
            if r.suites.is_empty() {
                s.push_str("no trials requested\n");
            }
            let code = if r.suites.iter().all(|row| row.passed()) { EXIT_OK } else { EXIT_SUITE_FAILED };
            (r, s, code, out_json, None)
        }
        Command::Sweep { mesh, u, limit, out_json } => {
            let loaded = load(&mesh.mesh, mesh.format, tol)?;
            timer.lap("load");
            let u = u.unwrap_or_else(Direction::up);
            let mut r = RunReport::new("sweep");
            describe(&mut r, &loaded, u);
            let sw = sweep(&loaded.polyhedron, u, limit.unwrap_or(usize::MAX))?;
            timer.lap("sweep");
            let s = format!(
                "{} trees{}: {} simple, {} overlapping\n",
                sw.trees,
                if sw.truncated { " (truncated)" } else { "" },
                sw.simple,
                sw.overlapping
            );
            r.sweep = Some(sw);
            (r, s, EXIT_OK, out_json, None)
        }
    };
    report.timings = timer.timings;
    if let (Some(path), Some(net)) = (&out_svg, &report.net) {
        write_file(path, &svg::render(net))?;
    }
    if let Some(path) = &out_json {
        write_file(path, &report.to_json())?;
    }
    Ok(Output { report, summary, exit_code })
}

mod seeded {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use unfolder_core::corpus::random_direction;
    use unfolder_core::polyhedron::{Direction, Polyhedron};
    use unfolder_core::{Result, UnfoldError};

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// First seeded random direction that puts `p` in general position.
    pub fn direction_for(p: &Polyhedron, seed: u64) -> Result<Direction> {
        let mut rng = rng(seed);
        for _ in 0..1000 {
            let u = random_direction(&mut rng);
            if p.check_general_position(u).is_general {
                return Ok(u);
            }
        }
        Err(UnfoldError::GeneralPosition("no random direction puts the mesh in general position".into()))
    }
}
