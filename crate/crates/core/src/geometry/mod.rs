//! Point clouds, Delaunay triangulation and the alpha filtration.

pub mod alpha;
pub mod delaunay;
pub mod filtration;
pub mod predicates;

pub use alpha::alpha_filtration;
pub use delaunay::{delaunay3, DelaunayComplex};
pub use filtration::{Filtration, FiltrationError, Simplex};

use crate::scalar::Real;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    /// Fewer than four affinely independent points: no 3D triangulation.
    #[error("degenerate input: points do not span three dimensions")]
    DegenerateInput,
    /// The operation requires pairwise distinct points.
    #[error("duplicate points present; deduplicate the cloud first")]
    DuplicatePoints,
    /// Coordinates must be finite.
    #[error("non-finite coordinate in point cloud")]
    NonFinite,
}

/// An unorganized set of sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<S> {
    points: Vec<[S; 3]>,
}

impl<S: Real> PointCloud<S> {
    pub fn new(points: Vec<[S; 3]>) -> Result<Self, GeometryError> {
        for p in &points {
            if !(p[0].is_finite() && p[1].is_finite() && p[2].is_finite()) {
                return Err(GeometryError::NonFinite);
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[S; 3]] {
        &self.points
    }

    pub fn point(&self, i: u32) -> [S; 3] {
        self.points[i as usize]
    }

    /// Merges exactly coincident points (first occurrence wins) and returns
    /// the merged cloud together with the old-index to new-index mapping.
    pub fn dedup(&self) -> (PointCloud<S>, Vec<u32>) {
        let mut seen = std::collections::HashMap::new();
        let mut points = Vec::new();
        let mut mapping = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let key = [
                (p[0].to_f64_exact() + 0.0).to_bits(),
                (p[1].to_f64_exact() + 0.0).to_bits(),
                (p[2].to_f64_exact() + 0.0).to_bits(),
            ];
            let next = points.len() as u32;
            let id = *seen.entry(key).or_insert_with(|| {
                points.push(*p);
                next
            });
            mapping.push(id);
        }
        (PointCloud { points }, mapping)
    }

    /// Coordinates widened to f64 for the exact predicates.
    pub(crate) fn coords_f64(&self) -> Vec<[f64; 3]> {
        self.points
            .iter()
            .map(|p| [p[0].to_f64_exact(), p[1].to_f64_exact(), p[2].to_f64_exact()])
            .collect()
    }
}
