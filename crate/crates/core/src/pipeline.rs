//! End-to-end reconstruction: alpha filtration, persistence, significance,
//! volume-optimal cycles, cleanup, simplification, and subdivision fitting.
//!
//! Failures of individual components (emptied volumes, unreachable
//! simplification budgets, non-convergent fits) degrade to warnings so the
//! remaining components still come out.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::cycles::persistent_volume;
use crate::fitting::{fit, neighbor_subset, FitReport};
use crate::geometry::{alpha_filtration, delaunay3, GeometryError, PointCloud};
use crate::mesh::{clean_cycle, qem_simplify, SurfaceMesh};
use crate::persistence::{persistence, PersistenceDiagram};
use crate::scalar::Real;
use crate::significance::{classify_2pd, SignificanceError, SignificanceSplit};
use crate::subdivision::loop_subdivide;

#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    /// Fraction of cycle faces kept by simplification.
    pub target_ratio: f64,
    /// Loop subdivision depth of the fitted surface.
    pub subdiv_levels: usize,
    /// Relative-RMS stopping threshold of the fit.
    pub epsilon: f64,
    /// Iteration cap of the fit.
    pub max_iters: usize,
    /// Where exports land.
    pub output_dir: PathBuf,
    /// Also export the persistence diagram as CSV.
    pub export_pd: bool,
    /// Seed of the symbolic perturbation used to break geometric ties.
    pub perturbation_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            target_ratio: 0.25,
            subdiv_levels: 2,
            epsilon: 1e-3,
            max_iters: 100,
            output_dir: PathBuf::from("."),
            export_pd: false,
            perturbation_seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    /// The cloud does not span three dimensions after deduplication.
    #[error(transparent)]
    DegenerateInput(#[from] GeometryError),
}

/// One reconstructed component: the fitted refined surface, the fitting
/// report (whose `final_control` is the coarse control mesh), and the size
/// of the cloud subset it was fitted to.
#[derive(Debug, Clone)]
pub struct ComponentReconstruction<S> {
    /// Index of the generating pair in `ReconstructionResult::diagram`.
    pub pair_index: u32,
    pub surface: SurfaceMesh<S>,
    pub fit: FitReport<S>,
    pub neighbor_count: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StageTimings {
    /// Filtration, persistence, significance, volumes, cleanup.
    pub topology_seconds: f64,
    /// Neighbor selection, simplification, subdivision, LSPIA.
    pub fitting_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult<S> {
    pub components: Vec<ComponentReconstruction<S>>,
    pub diagram: PersistenceDiagram<S>,
    /// None when the diagram has no positive-persistence 2-pairs.
    pub significance: Option<SignificanceSplit<S>>,
    pub timings: StageTimings,
    pub warnings: Vec<String>,
}

/// Reconstructs every significant closed component surface of the cloud.
pub fn reconstruct<S: Real>(
    cloud: &PointCloud<S>,
    cfg: &PipelineConfig,
) -> Result<ReconstructionResult<S>, PipelineError> {
    assert!(!cloud.is_empty(), "empty point cloud");
    assert!(
        cfg.target_ratio > 0.0 && cfg.target_ratio < 1.0,
        "target ratio must lie in (0, 1)"
    );
    assert!(cfg.epsilon > 0.0, "epsilon must be positive");
    assert!(cfg.max_iters >= 1, "need at least one fitting iteration");

    let mut warnings = Vec::new();
    let topo_start = Instant::now();

    let before = cloud.len();
    let (cloud, _) = cloud.dedup();
    if cloud.len() < before {
        warnings.push(format!(
            "merged {} duplicate points ({} remain)",
            before - cloud.len(),
            cloud.len()
        ));
    }

    let complex = delaunay3(&cloud, cfg.perturbation_seed)
        .map_err(PipelineError::DegenerateInput)?;
    let filtration =
        alpha_filtration(&cloud, &complex).map_err(PipelineError::DegenerateInput)?;
    let diagram = persistence(&filtration);

    let significance = match classify_2pd(&diagram) {
        Ok(split) => {
            if split.ambiguous {
                warnings.push(
                    "significance split is ambiguous: max persistence is less than \
                     twice the min"
                        .to_string(),
                );
            }
            Some(split)
        }
        Err(SignificanceError::EmptyDiagram) => {
            warnings.push(
                "no components: diagram has no positive-persistence 2-pairs".to_string(),
            );
            None
        }
    };

    // Volumes and cleanup per significant pair, in ascending pair order.
    let mut prepared: Vec<(u32, SurfaceMesh<S>)> = Vec::new();
    if let Some(split) = &significance {
        let mut order = split.significant.clone();
        order.sort_unstable();
        for &pair_index in &order {
            let pair = &diagram.pairs[pair_index as usize];
            let pv = match persistent_volume(&filtration, pair) {
                Ok(pv) => pv,
                Err(e) => {
                    warnings.push(format!("pair {}: dropped ({})", pair_index, e));
                    continue;
                }
            };
            match clean_cycle(&filtration, &cloud, &pv) {
                Ok(mesh) => prepared.push((pair_index, mesh)),
                Err(e) => {
                    warnings.push(format!("pair {}: dropped ({})", pair_index, e));
                }
            }
        }
    }
    let topology_seconds = topo_start.elapsed().as_secs_f64();

    let fit_start = Instant::now();
    let mut components = Vec::new();
    for (pair_index, mesh) in prepared {
        let subset = match neighbor_subset(&cloud, &mesh.vertices) {
            Ok(s) => s,
            Err(e) => {
                warnings.push(format!("pair {}: dropped ({})", pair_index, e));
                continue;
            }
        };
        let outcome = match qem_simplify(&mesh, cfg.target_ratio) {
            Ok(o) => o,
            Err(e) => {
                warnings.push(format!("pair {}: dropped ({})", pair_index, e));
                continue;
            }
        };
        if !outcome.target_reached {
            warnings.push(format!(
                "pair {}: simplification stopped above the face budget at {} faces",
                pair_index,
                outcome.mesh.faces.len()
            ));
        }
        let report = match fit(
            &outcome.mesh,
            &subset,
            cfg.subdiv_levels,
            cfg.epsilon,
            cfg.max_iters,
        ) {
            Ok(r) => r,
            Err(e) => {
                warnings.push(format!("pair {}: dropped ({})", pair_index, e));
                continue;
            }
        };
        if !report.converged {
            warnings.push(format!(
                "pair {}: fit hit the iteration cap without meeting the RMS criterion",
                pair_index
            ));
        }
        let (surface, _) = loop_subdivide(&report.final_control, cfg.subdiv_levels)
            .expect("fitted control mesh stays a closed manifold");
        components.push(ComponentReconstruction {
            pair_index,
            surface,
            fit: report,
            neighbor_count: subset.len(),
        });
    }
    let fitting_seconds = fit_start.elapsed().as_secs_f64();

    Ok(ReconstructionResult {
        components,
        diagram,
        significance,
        timings: StageTimings { topology_seconds, fitting_seconds },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn gaussian(rng: &mut impl Rng) -> f64 {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    fn noisy_sphere(n: usize, sigma: f64, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let dir = loop {
                    let v = [gaussian(&mut rng), gaussian(&mut rng), gaussian(&mut rng)];
                    let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    if len > 1e-9 {
                        break [v[0] / len, v[1] / len, v[2] / len];
                    }
                };
                [
                    dir[0] + sigma * gaussian(&mut rng),
                    dir[1] + sigma * gaussian(&mut rng),
                    dir[2] + sigma * gaussian(&mut rng),
                ]
            })
            .collect()
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let cloud = PointCloud::new(vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(
            reconstruct(&cloud, &PipelineConfig::default()),
            Err(PipelineError::DegenerateInput(_))
        ));
    }

    #[test]
    fn cavityless_input_yields_no_components_with_warning() {
        // A lone tetrahedron's interior void closes at the same radius the
        // last boundary face appears, so its 2-pair has zero persistence.
        let cloud = PointCloud::new(vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        let result = reconstruct(&cloud, &PipelineConfig::default()).unwrap();
        assert!(result.components.is_empty());
        assert!(result.significance.is_none());
        assert!(result.warnings.iter().any(|w| w.contains("no components")));
    }

    #[test]
    fn octahedron_hits_the_simplification_floor_but_still_fits() {
        // Eight boundary faces, budget ceil(0.25 * 8) = 2: simplification
        // bottoms out at a 4-face shell and must say so.
        let cloud = PointCloud::new(vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.05],
            [0.0, 0.0, -1.0],
        ])
        .unwrap();
        let result = reconstruct(&cloud, &PipelineConfig::default()).unwrap();
        assert_eq!(result.components.len(), 1, "warnings: {:?}", result.warnings);
        let c = &result.components[0];
        assert!(c.surface.manifold && c.surface.closed);
        assert_eq!(c.surface.euler_characteristic(), 2);
        assert_eq!(c.neighbor_count, 6);
        assert!(result
            .warnings
            .iter()
            .any(|w| w.contains("above the face budget")));
    }

    #[test]
    fn noisy_sphere_reconstructs_one_closed_component() {
        let cloud = PointCloud::new(noisy_sphere(600, 0.005, 3)).unwrap();
        let result = reconstruct(&cloud, &PipelineConfig::default()).unwrap();
        assert_eq!(result.components.len(), 1, "warnings: {:?}", result.warnings);
        let c = &result.components[0];
        assert!(c.surface.manifold && c.surface.closed);
        assert_eq!(c.surface.euler_characteristic(), 2);
        assert!(c.fit.converged);
        let split = result.significance.as_ref().unwrap();
        assert_eq!(split.significant.len(), 1);
    }

    #[test]
    fn duplicate_points_are_merged_with_a_warning() {
        let mut pts = noisy_sphere(200, 0.0, 5);
        let dup = pts[0];
        pts.push(dup);
        let cloud = PointCloud::new(pts).unwrap();
        let result = reconstruct(&cloud, &PipelineConfig::default()).unwrap();
        assert!(result.warnings.iter().any(|w| w.contains("duplicate")));
        assert_eq!(result.components.len(), 1);
    }
}
