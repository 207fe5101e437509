//! Edge unfolding of convex polyhedra along monotone cut trees, with affine
//! stretching to make the unfolding simple.

pub mod corpus;
pub mod cut_tree;
pub mod development;
pub mod error;
pub mod geom;
pub mod path;
pub mod polyhedron;
pub mod simplicity;
pub mod stretch;
pub mod tracing;
pub mod verify;

pub use error::{Result, UnfoldError};
