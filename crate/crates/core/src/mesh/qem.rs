//! Quadric error metric edge collapse for closed manifold surfaces.
//!
//! Each vertex accumulates the squared-distance quadric of its incident
//! face planes. Collapsing the cheapest edge into its optimal point repeats
//! until the face budget is met or every remaining collapse is blocked by
//! the link condition or a normal flip.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use crate::mesh::{MeshError, SurfaceMesh};
use crate::scalar::Real;

/// Result of a simplification run. `target_reached` is false when blocked
/// collapses left the mesh above the requested face budget.
#[derive(Debug, Clone)]
pub struct QemOutcome<S> {
    pub mesh: SurfaceMesh<S>,
    pub target_reached: bool,
}

/// Symmetric quadric q(p) = p'Ap + 2b'p + c stored as
/// (xx, xy, xz, yy, yz, zz, bx, by, bz, c).
type Quadric = [f64; 10];

fn quadric_add(a: &mut Quadric, b: &Quadric) {
    for i in 0..10 {
        a[i] += b[i];
    }
}

fn quadric_eval(q: &Quadric, p: [f64; 3]) -> f64 {
    let [x, y, z] = p;
    let a = q[0] * x * x + q[3] * y * y + q[5] * z * z
        + 2.0 * (q[1] * x * y + q[2] * x * z + q[4] * y * z);
    a + 2.0 * (q[6] * x + q[7] * y + q[8] * z) + q[9]
}

fn plane_quadric(n: [f64; 3], d: f64) -> Quadric {
    [
        n[0] * n[0],
        n[0] * n[1],
        n[0] * n[2],
        n[1] * n[1],
        n[1] * n[2],
        n[2] * n[2],
        d * n[0],
        d * n[1],
        d * n[2],
        d * d,
    ]
}

/// Minimizer of the quadric, when the 3x3 system is well conditioned.
fn quadric_minimizer(q: &Quadric) -> Option<[f64; 3]> {
    let (a, b, c, d, e, f) = (q[0], q[1], q[2], q[3], q[4], q[5]);
    let det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d);
    if det.abs() < 1e-12 {
        return None;
    }
    let rhs = [-q[6], -q[7], -q[8]];
    let inv = [
        (d * f - e * e) / det,
        (c * e - b * f) / det,
        (b * e - c * d) / det,
        (a * f - c * c) / det,
        (b * c - a * e) / det,
        (a * d - b * b) / det,
    ];
    let x = [
        inv[0] * rhs[0] + inv[1] * rhs[1] + inv[2] * rhs[2],
        inv[1] * rhs[0] + inv[3] * rhs[1] + inv[4] * rhs[2],
        inv[2] * rhs[0] + inv[4] * rhs[1] + inv[5] * rhs[2],
    ];
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    a: u32,
    b: u32,
    va: u32,
    vb: u32,
    pos: [f64; 3],
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Candidate) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Candidate) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Candidate) -> Ordering {
        // BinaryHeap is a max-heap; invert so the cheapest edge pops first,
        // with the edge key breaking cost ties deterministically.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

struct Collapser {
    pos: Vec<[f64; 3]>,
    quadrics: Vec<Quadric>,
    faces: Vec<Option<[u32; 3]>>,
    vertex_faces: Vec<BTreeSet<u32>>,
    neighbors: Vec<BTreeSet<u32>>,
    version: Vec<u32>,
    alive: Vec<bool>,
    heap: BinaryHeap<Candidate>,
    faces_alive: usize,
}

impl Collapser {
    fn new(pos: Vec<[f64; 3]>, faces: Vec<[u32; 3]>) -> Collapser {
        let nv = pos.len();
        let mut quadrics = vec![[0.0; 10]; nv];
        let mut vertex_faces = vec![BTreeSet::new(); nv];
        let mut neighbors = vec![BTreeSet::new(); nv];
        for (fi, f) in faces.iter().enumerate() {
            let [a, b, c] = f.map(|v| pos[v as usize]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let mut n = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            if len > 0.0 {
                n = [n[0] / len, n[1] / len, n[2] / len];
                let d = -(n[0] * a[0] + n[1] * a[1] + n[2] * a[2]);
                let q = plane_quadric(n, d);
                for &v in f {
                    quadric_add(&mut quadrics[v as usize], &q);
                }
            }
            for &v in f {
                vertex_faces[v as usize].insert(fi as u32);
            }
            for (x, y) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                neighbors[x as usize].insert(y);
                neighbors[y as usize].insert(x);
            }
        }
        let faces_alive = faces.len();
        let mut c = Collapser {
            pos,
            quadrics,
            faces: faces.into_iter().map(Some).collect(),
            vertex_faces,
            neighbors,
            version: vec![0; nv],
            alive: vec![true; nv],
            heap: BinaryHeap::new(),
            faces_alive,
        };
        for a in 0..nv as u32 {
            for &b in c.neighbors[a as usize].clone().iter() {
                if a < b {
                    c.push_candidate(a, b);
                }
            }
        }
        c
    }

    fn push_candidate(&mut self, a: u32, b: u32) {
        let mut q = self.quadrics[a as usize];
        quadric_add(&mut q, &self.quadrics[b as usize]);
        let pa = self.pos[a as usize];
        let pb = self.pos[b as usize];
        let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0, (pa[2] + pb[2]) / 2.0];
        let mut best = (quadric_eval(&q, mid), mid);
        for cand in [pa, pb] {
            let cost = quadric_eval(&q, cand);
            if cost < best.0 {
                best = (cost, cand);
            }
        }
        if let Some(x) = quadric_minimizer(&q) {
            let cost = quadric_eval(&q, x);
            if cost < best.0 {
                best = (cost, x);
            }
        }
        self.heap.push(Candidate {
            cost: best.0,
            a,
            b,
            va: self.version[a as usize],
            vb: self.version[b as usize],
            pos: best.1,
        });
    }

    fn face_verts(&self, fi: u32) -> [u32; 3] {
        self.faces[fi as usize].expect("live face")
    }

    fn face_exists(&self, a: u32, b: u32, c: u32) -> bool {
        let want = {
            let mut v = [a, b, c];
            v.sort_unstable();
            v
        };
        self.vertex_faces[a as usize].iter().any(|&fi| {
            let mut v = self.face_verts(fi);
            v.sort_unstable();
            v == want
        })
    }

    /// Link condition for edge (a, b) on a closed manifold: the common
    /// neighbors are exactly the two face-opposite vertices, and they are
    /// not joined to both endpoints by faces of their own.
    fn link_ok(&self, a: u32, b: u32) -> bool {
        let common: Vec<u32> = self.neighbors[a as usize]
            .intersection(&self.neighbors[b as usize])
            .copied()
            .collect();
        if common.len() != 2 {
            return false;
        }
        let (c, d) = (common[0], common[1]);
        !(self.face_exists(a, c, d) && self.face_exists(b, c, d))
    }

    /// Rejects collapses that reverse the orientation of any surviving face
    /// around the edge.
    fn flips_normal(&self, a: u32, b: u32, x: [f64; 3]) -> bool {
        let mut affected: BTreeSet<u32> = self.vertex_faces[a as usize].clone();
        affected.extend(self.vertex_faces[b as usize].iter().copied());
        for fi in affected {
            let f = self.face_verts(fi);
            if f.contains(&a) && f.contains(&b) {
                continue;
            }
            let old = f.map(|v| self.pos[v as usize]);
            let new = f.map(|v| if v == a || v == b { x } else { self.pos[v as usize] });
            let nr = |t: [[f64; 3]; 3]| {
                let u = [t[1][0] - t[0][0], t[1][1] - t[0][1], t[1][2] - t[0][2]];
                let v = [t[2][0] - t[0][0], t[2][1] - t[0][1], t[2][2] - t[0][2]];
                [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ]
            };
            let n0 = nr(old);
            let n1 = nr(new);
            if n0 == [0.0; 3] {
                continue;
            }
            if n0[0] * n1[0] + n0[1] * n1[1] + n0[2] * n1[2] <= 0.0 {
                return true;
            }
        }
        false
    }

    fn collapse(&mut self, a: u32, b: u32, x: [f64; 3]) {
        self.pos[a as usize] = x;
        let qb = self.quadrics[b as usize];
        quadric_add(&mut self.quadrics[a as usize], &qb);

        let shared: Vec<u32> = self.vertex_faces[a as usize]
            .intersection(&self.vertex_faces[b as usize])
            .copied()
            .collect();
        debug_assert_eq!(shared.len(), 2, "manifold edge must have two faces");
        for fi in shared {
            let f = self.face_verts(fi);
            for v in f {
                self.vertex_faces[v as usize].remove(&fi);
            }
            self.faces[fi as usize] = None;
            self.faces_alive -= 1;
        }
        let b_faces: Vec<u32> = self.vertex_faces[b as usize].iter().copied().collect();
        for fi in b_faces {
            let mut f = self.face_verts(fi);
            for v in f.iter_mut() {
                if *v == b {
                    *v = a;
                }
            }
            self.faces[fi as usize] = Some(f);
            self.vertex_faces[b as usize].remove(&fi);
            self.vertex_faces[a as usize].insert(fi);
        }

        let b_nbrs: Vec<u32> = self.neighbors[b as usize].iter().copied().collect();
        for n in b_nbrs {
            self.neighbors[n as usize].remove(&b);
            if n != a {
                self.neighbors[n as usize].insert(a);
                self.neighbors[a as usize].insert(n);
            }
        }
        self.neighbors[a as usize].remove(&a);
        self.neighbors[a as usize].remove(&b);
        self.neighbors[b as usize].clear();
        self.alive[b as usize] = false;
        self.version[a as usize] += 1;
        self.version[b as usize] += 1;

        for n in self.neighbors[a as usize].clone() {
            self.push_candidate(a.min(n), a.max(n));
        }
    }

    fn run(&mut self, target: usize) {
        while self.faces_alive > target {
            let cand = match self.heap.pop() {
                Some(c) => c,
                None => break,
            };
            let (a, b) = (cand.a, cand.b);
            if !self.alive[a as usize]
                || !self.alive[b as usize]
                || cand.va != self.version[a as usize]
                || cand.vb != self.version[b as usize]
                || !self.neighbors[a as usize].contains(&b)
            {
                continue;
            }
            if !self.link_ok(a, b) || self.flips_normal(a, b, cand.pos) {
                continue;
            }
            self.collapse(a, b, cand.pos);
        }
    }
}

/// Simplifies a closed manifold mesh to at most `ceil(target_ratio * F)`
/// faces by greedy quadric edge collapse. Topology is preserved; when no
/// admissible collapse remains above the budget, the best achievable mesh
/// is returned with `target_reached` false.
pub fn qem_simplify<S: Real>(
    mesh: &SurfaceMesh<S>,
    target_ratio: f64,
) -> Result<QemOutcome<S>, MeshError> {
    assert!(
        target_ratio > 0.0 && target_ratio <= 1.0,
        "target ratio must lie in (0, 1]"
    );
    if !(mesh.manifold && mesh.closed) {
        return Err(MeshError::NotManifold);
    }
    let target = (target_ratio * mesh.faces.len() as f64).ceil() as usize;
    let pos: Vec<[f64; 3]> = mesh
        .vertices
        .iter()
        .map(|p| [p[0].to_f64_exact(), p[1].to_f64_exact(), p[2].to_f64_exact()])
        .collect();
    let mut collapser = Collapser::new(pos, mesh.faces.clone());
    collapser.run(target);

    let mut used: BTreeSet<u32> = BTreeSet::new();
    let mut faces_out: Vec<[u32; 3]> = Vec::new();
    for f in collapser.faces.iter().flatten() {
        used.extend(f.iter().copied());
        faces_out.push(*f);
    }
    let remap: std::collections::BTreeMap<u32, u32> =
        used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let vertices: Vec<[S; 3]> = used
        .iter()
        .map(|&v| collapser.pos[v as usize].map(S::cast))
        .collect();
    let faces_out: Vec<[u32; 3]> = faces_out.iter().map(|f| f.map(|v| remap[&v])).collect();
    let out = SurfaceMesh::new(vertices, faces_out);
    assert!(
        out.manifold && out.closed,
        "link-conditioned collapses must preserve the closed manifold"
    );
    Ok(QemOutcome { target_reached: out.faces.len() <= target, mesh: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::loop_subdivide;

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

    fn grid_torus(n: usize, m: usize) -> SurfaceMesh<f64> {
        use std::f64::consts::TAU;
        let (big, small) = (1.0, 0.3);
        let mut vertices = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let u = TAU * i as f64 / n as f64;
                let v = TAU * j as f64 / m as f64;
                vertices.push([
                    (big + small * v.cos()) * u.cos(),
                    (big + small * v.cos()) * u.sin(),
                    small * v.sin(),
                ]);
            }
        }
        let at = |i: usize, j: usize| ((i % n) * m + (j % m)) as u32;
        let mut faces = Vec::with_capacity(2 * n * m);
        for i in 0..n {
            for j in 0..m {
                faces.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
                faces.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
            }
        }
        SurfaceMesh::new(vertices, faces)
    }

    #[test]
    fn icosphere_simplifies_to_quarter_budget() {
        let (sphere, _) = loop_subdivide(&icosahedron(), 2).unwrap();
        assert_eq!(sphere.faces.len(), 320);
        let out = qem_simplify(&sphere, 0.25).unwrap();
        assert!(out.target_reached);
        assert!(out.mesh.faces.len() <= 80);
        assert!(out.mesh.manifold && out.mesh.closed);
        assert_eq!(out.mesh.euler_characteristic(), 2);
    }

    #[test]
    fn torus_keeps_genus_through_simplification() {
        let torus = grid_torus(20, 20);
        assert_eq!(torus.faces.len(), 800);
        assert_eq!(torus.euler_characteristic(), 0);
        let out = qem_simplify(&torus, 0.25).unwrap();
        assert!(out.target_reached);
        assert!(out.mesh.faces.len() <= 200);
        assert!(out.mesh.manifold && out.mesh.closed);
        assert_eq!(out.mesh.euler_characteristic(), 0);
    }

    #[test]
    fn minimal_shell_is_left_alone_with_warning() {
        let tet = SurfaceMesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ],
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        );
        assert!(tet.manifold && tet.closed);
        let out = qem_simplify(&tet, 0.25).unwrap();
        assert!(!out.target_reached);
        assert_eq!(out.mesh.faces.len(), 4);
    }

    #[test]
    fn open_mesh_is_rejected() {
        let tri = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        );
        match qem_simplify(&tri, 0.5) {
            Err(MeshError::NotManifold) => {}
            other => panic!("expected NotManifold, got {:?}", other),
        }
    }

    #[test]
    fn planar_quadric_keeps_vertices_on_the_plane() {
        // All faces of the icosphere contribute, but a vertex on a flat
        // region has a singular quadric; the fallback midpoint candidates
        // must keep costs finite and the result valid.
        let (sphere, _) = loop_subdivide(&icosahedron(), 1).unwrap();
        let out = qem_simplify(&sphere, 0.5).unwrap();
        assert!(out.mesh.faces.len() <= 40);
        assert!(out.target_reached);
        for v in &out.mesh.vertices {
            assert!(v.iter().all(|c| c.is_finite()));
        }
    }
}
