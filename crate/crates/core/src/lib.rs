//! Generation of spatially embedded random networks.
//!
//! Nodes are placed uniformly in a planar region and every pair is linked
//! independently with a probability that depends on the distance between
//! them. Edges are generated by geometric jumping over bucket pairs, with
//! the expected work proportional to the number of edges.

pub mod analysis;
pub mod bench;
pub mod config;
pub mod edgegen;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod io;
pub mod model;
pub mod nodegen;
pub mod rng;

pub use edgegen::EdgeStore;
pub use engine::{generate, Algorithm, GenConfig, GenStats, Generator, Graph};
pub use error::{Result, SernError};
pub use geometry::Region;
pub use model::{Deterrence, Metric, Model, ModelParams};
pub use nodegen::NodeStore;
