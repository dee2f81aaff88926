//! Indexed triangle surfaces extracted from tetrahedral volumes.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cycles::Chain;
use crate::geometry::{Filtration, PointCloud};
use crate::scalar::Real;
use crate::vec3::V3;

pub mod cleanup;
pub mod qem;

pub use cleanup::{clean_cycle, find_nonmanifold_edges, find_nonmanifold_vertices};
pub use qem::{qem_simplify, QemOutcome};

#[derive(Debug, Error)]
pub enum MeshError {
    /// Cleanup deleted every tetrahedron of the volume.
    #[error("cleanup emptied the volume without reaching a manifold boundary")]
    EmptiedVolume,
    /// An operation that requires a closed manifold surface got something else.
    #[error("mesh is not a closed manifold surface")]
    NotManifold,
}

/// Triangle mesh with indexed vertices. `manifold` and `closed` record the
/// outcome of the structural check that produced the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh<S> {
    pub vertices: Vec<V3<S>>,
    pub faces: Vec<[u32; 3]>,
    pub manifold: bool,
    pub closed: bool,
}

impl<S: Real> SurfaceMesh<S> {
    /// Builds a mesh and runs the structural check to fill in the flags.
    pub fn new(vertices: Vec<V3<S>>, faces: Vec<[u32; 3]>) -> SurfaceMesh<S> {
        let mut mesh = SurfaceMesh { vertices, faces, manifold: false, closed: false };
        let (manifold, closed) = mesh.check_structure();
        mesh.manifold = manifold;
        mesh.closed = closed;
        mesh
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = BTreeSet::new();
        for f in &self.faces {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                edges.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        let used: BTreeSet<u32> = self.faces.iter().flatten().copied().collect();
        used.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }

    /// Returns (manifold, closed) from scratch. Manifold requires every edge
    /// on at most two faces and every vertex with a single face fan; closed
    /// additionally requires every edge on exactly two faces.
    pub fn check_structure(&self) -> (bool, bool) {
        let mut edge_faces: BTreeMap<(u32, u32), Vec<u32>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return (false, false);
            }
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                let key = if a < b { (a, b) } else { (b, a) };
                edge_faces.entry(key).or_default().push(fi as u32);
            }
        }
        let mut closed = true;
        for faces in edge_faces.values() {
            if faces.len() > 2 {
                return (false, false);
            }
            if faces.len() != 2 {
                closed = false;
            }
        }
        // Vertex fans: the faces around each vertex must form one connected
        // component under shared-edge adjacency.
        let mut vertex_faces: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in f {
                vertex_faces.entry(v).or_default().push(fi as u32);
            }
        }
        for (&v, faces) in &vertex_faces {
            if !single_fan(v, faces, &self.faces) {
                return (false, closed);
            }
        }
        (true, closed)
    }
}

fn single_fan(v: u32, faces: &[u32], all_faces: &[[u32; 3]]) -> bool {
    if faces.len() <= 1 {
        return true;
    }
    // Local adjacency: two incident faces are linked when they share an edge
    // through v, i.e. the same opposite vertex appears in both.
    let mut by_other: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &f) in faces.iter().enumerate() {
        for &w in &all_faces[f as usize] {
            if w != v {
                by_other.entry(w).or_default().push(i);
            }
        }
    }
    let mut seen = vec![false; faces.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut visited = 1;
    while let Some(i) = stack.pop() {
        let f = faces[i];
        for &w in &all_faces[f as usize] {
            if w == v {
                continue;
            }
            for &j in &by_other[&w] {
                if !seen[j] {
                    seen[j] = true;
                    visited += 1;
                    stack.push(j);
                }
            }
        }
    }
    visited == faces.len()
}

/// Extracts the boundary surface of a tetrahedral volume chain as an oriented
/// triangle mesh. Triangles are wound so right-hand normals point out of the
/// volume. Vertices are renumbered compactly in ascending point-id order.
pub fn extract_surface<S: Real>(
    f: &Filtration<S>,
    cloud: &PointCloud<S>,
    volume: &Chain,
) -> SurfaceMesh<S> {
    assert_eq!(volume.dim, 3, "volume must be a 3-chain");

    // Boundary triangles are the facets appearing an odd number of times,
    // and each keeps the single volume tetrahedron it bounds.
    let mut owner: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &tet_id in &volume.simplices {
        for k in 0..4 {
            let facet = f.faces(tet_id)[k];
            owner.entry(facet).or_default().push(tet_id);
        }
    }
    let mut faces_raw: Vec<[u32; 3]> = Vec::new();
    for (&tri_id, tets) in &owner {
        if tets.len() % 2 == 1 {
            debug_assert_eq!(tets.len(), 1, "triangle with three volume cofaces");
            faces_raw.push(oriented_facet(f, cloud, tets[0], tri_id));
        }
    }

    let mut used: BTreeSet<u32> = BTreeSet::new();
    for face in &faces_raw {
        used.extend(face.iter().copied());
    }
    let remap: BTreeMap<u32, u32> =
        used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let vertices: Vec<V3<S>> = used.iter().map(|&v| cloud.point(v)).collect();
    let faces: Vec<[u32; 3]> =
        faces_raw.iter().map(|f| f.map(|v| remap[&v])).collect();
    SurfaceMesh::new(vertices, faces)
}

/// Winds `tri_id` as the facet of tetrahedron `tet_id` whose right-hand
/// normal points away from the opposite vertex.
fn oriented_facet<S: Real>(
    f: &Filtration<S>,
    cloud: &PointCloud<S>,
    tet_id: u32,
    tri_id: u32,
) -> [u32; 3] {
    use crate::geometry::predicates::orient3d;

    let tet = f.simplex(tet_id);
    let tri = f.simplex(tri_id);
    let mut w: [u32; 4] = [tet.vertices()[0], tet.vertices()[1], tet.vertices()[2], tet.vertices()[3]];
    let p = |v: u32| {
        let q = cloud.point(v);
        [q[0].to_f64_exact(), q[1].to_f64_exact(), q[2].to_f64_exact()]
    };
    let o = orient3d(p(w[0]), p(w[1]), p(w[2]), p(w[3]));
    debug_assert!(o != 0, "degenerate tetrahedron in volume");
    if o < 0 {
        w.swap(2, 3);
    }
    // With (w0,w1,w2,w3) positively oriented, each facet tuple below has its
    // right-hand normal pointing away from the omitted vertex.
    const FACETS: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];
    let opposite = (0..4)
        .find(|&i| !tri.vertices().contains(&w[i]))
        .expect("triangle must be a facet of the tetrahedron");
    FACETS[opposite].map(|k| w[k])
}
