//! The JSON run report.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use unfolder_core::development::UnfoldingLayout;
use unfolder_core::geom::TolerancePolicy;
use unfolder_core::polyhedron::GeneralPositionReport;
use unfolder_core::simplicity::SimplicityReport;
use unfolder_core::stretch::{SearchOptions, StretchResult};
use unfolder_core::verify::{SuiteOutcome, SweepReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Everything a command computed. Apart from `timings`, re-running with the
/// same inputs and seed reproduces every field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the mesh file bytes, hex encoded.
    pub input_digest: Option<String>,
    pub num_vertices: Option<usize>,
    pub num_edges: Option<usize>,
    pub num_faces: Option<usize>,
    pub gauss_bonnet_residual: Option<f64>,
    pub direction: Option<[f64; 3]>,
    pub tolerance: Option<TolerancePolicy>,
    pub seed: Option<u64>,
    /// Cut tree in its text form.
    pub tree: Option<String>,
    pub general_position: Option<GeneralPositionReport>,
    pub simplicity: Option<SimplicityReport>,
    pub search_options: Option<SearchOptions>,
    pub stretch: Option<StretchResult>,
    /// Face polygons of the net that was emitted.
    pub net: Option<UnfoldingLayout>,
    pub suites: Vec<SuiteOutcome>,
    pub sweep: Option<SweepReport>,
    pub timings: Vec<Timing>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use unfolder_core::cut_tree::build_downhill_tree;
    use unfolder_core::development::layout_faces;
    use unfolder_core::polyhedron::{shapes, Direction};
    use unfolder_core::simplicity::unfolding_is_simple;
    use unfolder_core::stretch::stretch_search;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(digest(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn json_round_trip() {
        let p = shapes::rotated(&shapes::cube(), shapes::sample_rotation());
        let u = Direction::up();
        let t = build_downhill_tree(&p, u).unwrap();
        let mut r = RunReport::new("stretch");
        r.input_digest = Some(digest(b"cube"));
        r.direction = Some([0.0, 0.0, 1.0]);
        r.tolerance = Some(p.tolerance());
        r.seed = Some(u64::MAX);
        r.tree = Some(t.to_text());
        r.general_position = Some(p.check_general_position(u));
        r.simplicity = Some(unfolding_is_simple(&p, &t).unwrap());
        r.search_options = Some(SearchOptions::default());
        r.stretch = Some(stretch_search(&p, &t, u, SearchOptions::default()).unwrap());
        r.net = Some(layout_faces(&p, &t).unwrap());
        r.timings.push(Timing { stage: "search".into(), seconds: 0.1 + 0.2 });
        let back = RunReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
