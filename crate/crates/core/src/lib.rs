//! Reconstruction of closed component surfaces from unorganized point
//! clouds: Delaunay/alpha filtration, persistent homology over Z2,
//! significance selection on the persistence diagram, volume-optimal
//! representative cycles, mesh cleanup and simplification, and subdivision
//! surface fitting.

pub mod cycles;
pub mod fitting;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod persistence;
pub mod pipeline;
pub mod scalar;
pub mod significance;
pub mod spatial;
pub mod subdivision;
pub mod vec3;

pub use geometry::{
    alpha_filtration, delaunay3, DelaunayComplex, Filtration, FiltrationError, GeometryError,
    PointCloud, Simplex,
};
pub use io::{export_outputs, load_point_cloud, IoError};
pub use mesh::{clean_cycle, qem_simplify, MeshError, SurfaceMesh};
pub use pipeline::{
    reconstruct, PipelineConfig, PipelineError, ReconstructionResult, StageTimings,
};
pub use scalar::Real;

/// Double precision cloud, the default throughout the pipeline.
pub type PointCloudF64 = PointCloud<f64>;
/// Single precision cloud for memory-bound inputs.
pub type PointCloudF32 = PointCloud<f32>;
