//! Geometric congruence and navigability of networks embedded in the
//! hyperbolic disk.
//!
//! The crate generates (n)PSO networks, enumerates topological shortest
//! paths, and measures how well those paths follow the underlying geometry
//! (GC) and how efficiently greedy routing navigates it (GRE).

pub mod connectome;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod paths;
pub mod stats;

pub use error::{Error, Result};
pub use generator::{generate, GeneratedNetwork, NpsoParams};
pub use geometry::{hyperbolic_distance, GeodesicMatrix, PolarPoint};
pub use graph::{Graph, WeightedGraph};
pub use metrics::{gc, gre, GreedyRouter, Reference};
pub use paths::{pair_records, PairSet, DEFAULT_PATH_CAP};
