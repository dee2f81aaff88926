//! Loop subdivision with an explicit refinement basis.
//!
//! Besides the refined mesh, subdivision returns the sparse linear map from
//! control vertices to refined vertices (the product of the per-level
//! stencil matrices). Fitting moves control points but keeps this map
//! fixed, so refined positions are always `basis * control`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::mesh::{MeshError, SurfaceMesh};
use crate::scalar::Real;
use crate::vec3::V3;

/// Row-sparse linear map from control vertices to refined vertices. Rows
/// are convex combinations: entries are positive and sum to one.
#[derive(Debug, Clone)]
pub struct SubdivisionBasis {
    rows: Vec<Vec<(u32, f64)>>,
    cols: usize,
}

impl SubdivisionBasis {
    pub fn identity(n: usize) -> SubdivisionBasis {
        SubdivisionBasis {
            rows: (0..n as u32).map(|i| vec![(i, 1.0)]).collect(),
            cols: n,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Nonzero (control vertex, coefficient) entries of one refined vertex,
    /// in ascending control-vertex order.
    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    /// Refined positions for the given control positions.
    pub fn apply<S: Real>(&self, control: &[V3<S>]) -> Vec<V3<S>> {
        assert_eq!(control.len(), self.cols, "control size mismatch");
        self.rows
            .iter()
            .map(|row| {
                let mut acc = [0.0_f64; 3];
                for &(j, w) in row {
                    let p = control[j as usize];
                    for k in 0..3 {
                        acc[k] += w * p[k].to_f64_exact();
                    }
                }
                acc.map(S::cast)
            })
            .collect()
    }

    /// self = level * self, composing one more refinement step.
    fn compose(&mut self, level: &[Vec<(u32, f64)>]) {
        let rows = level
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
                for &(k, w) in row {
                    for &(j, u) in &self.rows[k as usize] {
                        *acc.entry(j).or_insert(0.0) += w * u;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        self.rows = rows;
    }
}

fn loop_beta(n: usize) -> f64 {
    let c = 0.375 + 0.25 * (TAU / n as f64).cos();
    (0.625 - c * c) / n as f64
}

/// Sparse stencil rows: one `(vertex, weight)` list per refined vertex.
type StencilRows = Vec<Vec<(u32, f64)>>;

/// One Loop refinement of a closed manifold mesh: the stencil matrix (rows
/// in new-vertex order, old vertices first, then edge midvertices in sorted
/// edge order) and the new face list.
fn subdivide_level(
    faces: &[[u32; 3]],
    n_vertices: usize,
) -> Result<(StencilRows, Vec<[u32; 3]>), MeshError> {
    let mut edges: BTreeMap<(u32, u32), [u32; 2]> = BTreeMap::new();
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n_vertices];
    const NONE: u32 = u32::MAX;
    for f in faces {
        for (a, b, opposite) in [
            (f[0], f[1], f[2]),
            (f[1], f[2], f[0]),
            (f[2], f[0], f[1]),
        ] {
            let key = if a < b { (a, b) } else { (b, a) };
            let slot = edges.entry(key).or_insert([NONE; 2]);
            if slot[0] == NONE {
                slot[0] = opposite;
            } else if slot[1] == NONE {
                slot[1] = opposite;
            } else {
                return Err(MeshError::NotManifold);
            }
        }
    }
    for (&(a, b), opposites) in &edges {
        if opposites[1] == NONE {
            return Err(MeshError::NotManifold);
        }
        neighbors[a as usize].push(b);
        neighbors[b as usize].push(a);
    }

    let mut rows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n_vertices + edges.len());
    for (v, nbrs) in neighbors.iter_mut().enumerate() {
        nbrs.sort_unstable();
        let n = nbrs.len();
        assert!(n >= 3, "closed manifold vertex has degree >= 3");
        let beta = loop_beta(n);
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(n + 1);
        row.push((v as u32, 1.0 - n as f64 * beta));
        row.extend(nbrs.iter().map(|&w| (w, beta)));
        row.sort_unstable_by_key(|&(j, _)| j);
        rows.push(row);
    }
    let mut edge_vertex: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for (i, (&(a, b), &[c, d])) in edges.iter().enumerate() {
        edge_vertex.insert((a, b), (n_vertices + i) as u32);
        let mut row = vec![(a, 0.375), (b, 0.375), (c, 0.125), (d, 0.125)];
        row.sort_unstable_by_key(|&(j, _)| j);
        // An edge whose two opposite vertices coincide would double its
        // coefficient; the sort keeps duplicates adjacent for merging.
        row.dedup_by(|next, prev| {
            if next.0 == prev.0 {
                prev.1 += next.1;
                true
            } else {
                false
            }
        });
        rows.push(row);
    }

    let mid = |a: u32, b: u32| edge_vertex[&if a < b { (a, b) } else { (b, a) }];
    let mut new_faces = Vec::with_capacity(4 * faces.len());
    for f in faces {
        let [a, b, c] = *f;
        let (mab, mbc, mca) = (mid(a, b), mid(b, c), mid(c, a));
        new_faces.push([a, mab, mca]);
        new_faces.push([b, mbc, mab]);
        new_faces.push([c, mca, mbc]);
        new_faces.push([mab, mbc, mca]);
    }
    Ok((rows, new_faces))
}

/// Applies `levels` rounds of Loop subdivision. Returns the refined mesh
/// and the basis mapping control positions to refined positions. Zero
/// levels return the input mesh with the identity basis.
pub fn loop_subdivide<S: Real>(
    control: &SurfaceMesh<S>,
    levels: usize,
) -> Result<(SurfaceMesh<S>, SubdivisionBasis), MeshError> {
    if !(control.manifold && control.closed) {
        return Err(MeshError::NotManifold);
    }
    let mut basis = SubdivisionBasis::identity(control.vertices.len());
    let mut faces = control.faces.clone();
    let mut n_vertices = control.vertices.len();
    for _ in 0..levels {
        let (rows, new_faces) = subdivide_level(&faces, n_vertices)?;
        n_vertices = rows.len();
        basis.compose(&rows);
        faces = new_faces;
    }
    let vertices = basis.apply(&control.vertices);
    let mesh = SurfaceMesh::new(vertices, faces);
    debug_assert!(mesh.manifold && mesh.closed);
    Ok((mesh, basis))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tet_shell() -> SurfaceMesh<f64> {
        SurfaceMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ],
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
    }

    fn icosahedron() -> SurfaceMesh<f64> {
        let p = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let vertices = vec![
            [-1.0, p, 0.0],
            [1.0, p, 0.0],
            [-1.0, -p, 0.0],
            [1.0, -p, 0.0],
            [0.0, -1.0, p],
            [0.0, 1.0, p],
            [0.0, -1.0, -p],
            [0.0, 1.0, -p],
            [p, 0.0, -1.0],
            [p, 0.0, 1.0],
            [-p, 0.0, -1.0],
            [-p, 0.0, 1.0],
        ];
        let faces = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        SurfaceMesh::new(vertices, faces)
    }

    /// One level of stencils applied directly to positions, with no basis
    /// matrix involved. Serves as the oracle for the matrix path.
    fn direct_stencil_level(mesh: &SurfaceMesh<f64>) -> Vec<[f64; 3]> {
        let mut edges: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        let mut neighbors: Vec<std::collections::BTreeSet<u32>> =
            vec![Default::default(); mesh.vertices.len()];
        for f in &mesh.faces {
            for (a, b, o) in [
                (f[0], f[1], f[2]),
                (f[1], f[2], f[0]),
                (f[2], f[0], f[1]),
            ] {
                let key = if a < b { (a, b) } else { (b, a) };
                edges.entry(key).or_default().push(o);
                neighbors[a as usize].insert(b);
                neighbors[b as usize].insert(a);
            }
        }
        let mut out = Vec::new();
        for (v, nbrs) in neighbors.iter().enumerate() {
            let n = nbrs.len();
            let beta = loop_beta(n);
            let keep = 1.0 - n as f64 * beta;
            let p = mesh.vertices[v];
            let mut q = [p[0] * keep, p[1] * keep, p[2] * keep];
            for &w in nbrs {
                for k in 0..3 {
                    q[k] += beta * mesh.vertices[w as usize][k];
                }
            }
            out.push(q);
        }
        for (&(a, b), opposites) in &edges {
            let (pa, pb) = (mesh.vertices[a as usize], mesh.vertices[b as usize]);
            let (pc, pd) = (
                mesh.vertices[opposites[0] as usize],
                mesh.vertices[opposites[1] as usize],
            );
            let mut q = [0.0; 3];
            for k in 0..3 {
                q[k] = 0.375 * (pa[k] + pb[k]) + 0.125 * (pc[k] + pd[k]);
            }
            out.push(q);
        }
        out
    }

    #[test]
    fn zero_levels_is_identity() {
        let tet = tet_shell();
        let (mesh, basis) = loop_subdivide(&tet, 0).unwrap();
        assert_eq!(mesh.vertices, tet.vertices);
        assert_eq!(mesh.faces, tet.faces);
        assert_eq!(basis.rows(), 4);
        for i in 0..4 {
            assert_eq!(basis.row(i), &[(i as u32, 1.0)]);
        }
    }

    #[test]
    fn tet_shell_counts_after_one_level() {
        let (mesh, basis) = loop_subdivide(&tet_shell(), 1).unwrap();
        assert_eq!(mesh.vertices.len(), 10, "4 vertices plus 6 edge vertices");
        assert_eq!(mesh.faces.len(), 16);
        assert_eq!(basis.rows(), 10);
        assert_eq!(basis.cols(), 4);
        assert!(mesh.manifold && mesh.closed);
        assert_eq!(mesh.euler_characteristic(), 2);
    }

    #[test]
    fn basis_rows_are_convex_combinations() {
        let (_, basis) = loop_subdivide(&icosahedron(), 2).unwrap();
        assert_eq!(basis.rows(), 162);
        assert_eq!(basis.cols(), 12);
        for i in 0..basis.rows() {
            let row = basis.row(i);
            let sum: f64 = row.iter().map(|&(_, w)| w).sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {} sums to {}", i, sum);
            assert!(row.iter().all(|&(_, w)| w > 0.0));
            assert!(row.windows(2).all(|w| w[0].0 < w[1].0), "row sorted by column");
        }
    }

    #[test]
    fn matrix_path_matches_direct_stencils() {
        let ico = icosahedron();
        let (level1, _) = loop_subdivide(&ico, 1).unwrap();
        let direct1 = direct_stencil_level(&ico);
        let direct2 = direct_stencil_level(&SurfaceMesh::new(
            direct1.clone(),
            level1.faces.clone(),
        ));
        let (level2, basis2) = loop_subdivide(&ico, 2).unwrap();
        let via_basis = basis2.apply(&ico.vertices);
        assert_eq!(via_basis.len(), direct2.len());
        for (a, b) in via_basis.iter().zip(direct2.iter()) {
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-10);
            }
        }
        assert_eq!(level2.vertices, via_basis);
    }

    #[test]
    fn subdivided_vertex_count_follows_edge_count() {
        let (mesh, _) = loop_subdivide(&icosahedron(), 1).unwrap();
        assert_eq!(mesh.vertices.len(), 42, "12 + 30 edges");
        assert_eq!(mesh.faces.len(), 80);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let tri = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        );
        assert!(matches!(loop_subdivide(&tri, 1), Err(MeshError::NotManifold)));
    }
}
