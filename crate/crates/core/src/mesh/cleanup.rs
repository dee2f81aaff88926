//! Non-manifold repair of boundary cycles.
//!
//! A volume-optimal cycle bounds a tetrahedral volume but may pinch at
//! vertices or carry edges with more than two triangles. Deleting the
//! offending tetrahedra from the volume and taking the boundary again
//! strictly shrinks the volume, so iterating reaches a fixed point whose
//! boundary is a closed 2-manifold, or empties the volume entirely.

use std::collections::{BTreeMap, BTreeSet};

use crate::cycles::{boundary, Chain, PersistentVolume};
use crate::geometry::{Filtration, PointCloud};
use crate::mesh::{extract_surface, MeshError, SurfaceMesh};
use crate::scalar::Real;

/// Vertices of `cycle` whose incident triangles do not form a single fan
/// under shared-edge adjacency.
pub fn find_nonmanifold_vertices<S: Real>(f: &Filtration<S>, cycle: &Chain) -> BTreeSet<u32> {
    assert_eq!(cycle.dim, 2, "detector expects a triangle cycle");
    let mut vertex_tris: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &t in &cycle.simplices {
        for &v in f.simplex(t).vertices() {
            vertex_tris.entry(v).or_default().push(t);
        }
    }
    let mut flagged = BTreeSet::new();
    for (&v, tris) in &vertex_tris {
        if !fan_connected(f, v, tris) {
            flagged.insert(v);
        }
    }
    flagged
}

fn fan_connected<S: Real>(f: &Filtration<S>, v: u32, tris: &[u32]) -> bool {
    if tris.len() <= 1 {
        return true;
    }
    // Triangles sharing the edge (v, w) are grouped under w.
    let mut by_other: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &t) in tris.iter().enumerate() {
        for &w in f.simplex(t).vertices() {
            if w != v {
                by_other.entry(w).or_default().push(i);
            }
        }
    }
    let mut seen = vec![false; tris.len()];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut visited = 1;
    while let Some(i) = stack.pop() {
        for &w in f.simplex(tris[i]).vertices() {
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
    visited == tris.len()
}

/// Edges of `cycle` incident to more than two of its triangles, as sorted
/// vertex pairs.
pub fn find_nonmanifold_edges<S: Real>(f: &Filtration<S>, cycle: &Chain) -> BTreeSet<(u32, u32)> {
    assert_eq!(cycle.dim, 2, "detector expects a triangle cycle");
    let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for &t in &cycle.simplices {
        let vs = f.simplex(t).vertices();
        for (a, b) in [(vs[0], vs[1]), (vs[0], vs[2]), (vs[1], vs[2])] {
            *counts.entry((a, b)).or_default() += 1;
        }
    }
    counts.into_iter().filter(|&(_, c)| c > 2).map(|(e, _)| e).collect()
}

/// Shrinks `volume` until its boundary is free of non-manifold vertices and
/// edges. Each round deletes exactly the tetrahedra touching a flagged
/// vertex, or failing that a flagged edge, then recomputes the boundary.
pub fn clean_volume<S: Real>(f: &Filtration<S>, volume: &Chain) -> Result<Chain, MeshError> {
    assert_eq!(volume.dim, 3, "cleanup expects a tetrahedral volume");
    let mut volume = volume.clone();
    loop {
        if volume.is_empty() {
            return Err(MeshError::EmptiedVolume);
        }
        let cycle = boundary(f, &volume);

        let bad_vertices = find_nonmanifold_vertices(f, &cycle);
        if !bad_vertices.is_empty() {
            volume.simplices.retain(|&t| {
                !f.simplex(t).vertices().iter().any(|v| bad_vertices.contains(v))
            });
            continue;
        }

        let bad_edges = find_nonmanifold_edges(f, &cycle);
        if !bad_edges.is_empty() {
            volume.simplices.retain(|&t| {
                let vs = f.simplex(t).vertices();
                !bad_edges.iter().any(|&(a, b)| vs.contains(&a) && vs.contains(&b))
            });
            continue;
        }

        return Ok(volume);
    }
}

/// Repairs the persistent volume's boundary and extracts it as an oriented
/// closed manifold surface.
pub fn clean_cycle<S: Real>(
    f: &Filtration<S>,
    cloud: &PointCloud<S>,
    pv: &PersistentVolume<S>,
) -> Result<SurfaceMesh<S>, MeshError> {
    let volume = clean_volume(f, &pv.volume)?;
    let mesh = extract_surface(f, cloud, &volume);
    assert!(
        mesh.manifold && mesh.closed,
        "cleanup fixed point must be a closed manifold"
    );
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Filtration closure of the given tetrahedra, every simplex at value 0.
    fn complex_of(tets: &[[u32; 4]]) -> Filtration<f64> {
        let mut simplices: BTreeSet<Vec<u32>> = BTreeSet::new();
        for tet in tets {
            for mask in 1u32..16 {
                let mut s: Vec<u32> =
                    (0..4).filter(|&i| mask & (1 << i) != 0).map(|i| tet[i]).collect();
                s.sort_unstable();
                s.dedup();
                simplices.insert(s);
            }
        }
        Filtration::build(simplices.into_iter().map(|s| (s, 0.0)).collect()).unwrap()
    }

    fn volume_of(f: &Filtration<f64>, tets: &[[u32; 4]]) -> Chain {
        let mut v = Chain::new(3);
        for tet in tets {
            v.toggle(f.index_of(tet).unwrap());
        }
        v
    }

    #[test]
    fn pinched_vertex_is_flagged_and_cleaned() {
        // Glued pair AB is manifold; tet C hangs off vertex 3 of A, pinching
        // the boundary there. The vertex pass must delete A and C.
        let a = [0, 1, 2, 3];
        let b = [0, 1, 2, 4];
        let c = [3, 5, 6, 7];
        let f = complex_of(&[a, b, c]);
        let volume = volume_of(&f, &[a, b, c]);

        let cycle = boundary(&f, &volume);
        assert_eq!(find_nonmanifold_vertices(&f, &cycle), BTreeSet::from([3]));
        assert!(find_nonmanifold_edges(&f, &cycle).is_empty());

        let cleaned = clean_volume(&f, &volume).unwrap();
        assert_eq!(cleaned, volume_of(&f, &[b]));

        // Both deleted tetrahedra touch the flagged vertex.
        for tet in [a, c] {
            assert!(tet.contains(&3));
        }

        let fixed = boundary(&f, &cleaned);
        assert!(find_nonmanifold_vertices(&f, &fixed).is_empty());
        assert!(find_nonmanifold_edges(&f, &fixed).is_empty());

        // Idempotent: cleaning again changes nothing.
        assert_eq!(clean_volume(&f, &cleaned).unwrap(), cleaned);
    }

    #[test]
    fn overused_edge_is_flagged_and_cleaned() {
        // Three tetrahedra share the face 012, so its edges sit on four
        // boundary triangles each. A disjoint tet D survives the repair.
        let a = [0, 1, 2, 3];
        let b = [0, 1, 2, 4];
        let c = [0, 1, 2, 5];
        let d = [6, 7, 8, 9];
        let f = complex_of(&[a, b, c, d]);
        let volume = volume_of(&f, &[a, b, c, d]);

        let cycle = boundary(&f, &volume);
        assert!(find_nonmanifold_vertices(&f, &cycle).is_empty());
        assert_eq!(
            find_nonmanifold_edges(&f, &cycle),
            BTreeSet::from([(0, 1), (0, 2), (1, 2)])
        );

        let cleaned = clean_volume(&f, &volume).unwrap();
        assert_eq!(cleaned, volume_of(&f, &[d]));
        assert_eq!(clean_volume(&f, &cleaned).unwrap(), cleaned);
    }

    #[test]
    fn cleanup_that_deletes_everything_reports_emptied_volume() {
        // Two tetrahedra joined only at vertex 3: the flagged vertex touches
        // both, so the repair empties the volume.
        let a = [0, 1, 2, 3];
        let b = [3, 4, 5, 6];
        let f = complex_of(&[a, b]);
        let volume = volume_of(&f, &[a, b]);

        let cycle = boundary(&f, &volume);
        assert_eq!(find_nonmanifold_vertices(&f, &cycle), BTreeSet::from([3]));

        match clean_volume(&f, &volume) {
            Err(MeshError::EmptiedVolume) => {}
            other => panic!("expected EmptiedVolume, got {:?}", other),
        }
    }
}
