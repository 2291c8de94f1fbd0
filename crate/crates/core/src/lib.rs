//! Voronoi cells of general sites in uniformly convex normed spaces,
//! computed as unions of ray segments, with explicit stability
//! certificates and the classical counterexamples.

pub mod cells;
pub mod emanation;
pub mod error;
pub mod scene;
pub mod sites;
pub mod space;
pub mod stability;
pub mod svg;
pub mod vector;
pub mod world;

pub use cells::{build_cell, CellApprox, CellOptions};
pub use error::{Error, Result};
pub use scene::{parse_scene, Scene};
pub use sites::{Configuration, Estimate, Site};
pub use space::{Norm, NormedSpace};
pub use stability::{certify, certify_interior, StabilityCertificate};
pub use world::World;
