//! Incremental 3D Delaunay triangulation.
//!
//! Exact predicates decide every orientation and in-sphere question, and a
//! symbolic perturbation of the lifting weights breaks cospherical ties, so
//! the triangulation is well defined for any input with at least four
//! affinely independent points. Convex hull boundaries are handled through a
//! single infinite vertex: every hull facet is covered by one infinite cell,
//! which keeps insertion free of special cases.
//!
//! Cells store vertices and the neighbor across each facet. Facet `i` is
//! opposite vertex `i`. Finite cells are positively oriented; for infinite
//! cells the facet opposite the infinite vertex is oriented with the hull
//! exterior on its positive side. Both invariants are preserved by the
//! cavity refill, which cones boundary facets (reversed) onto the new point.

use super::predicates::{incircle_coplanar_sos, insphere_sos, orient3d, P3};
use super::{GeometryError, PointCloud};
use crate::scalar::Real;
use std::collections::HashMap;

/// Sentinel vertex id of the infinite vertex.
pub const INFINITE: u32 = u32::MAX;

const NO_TET: u32 = u32::MAX;

/// `FACETS[i]` lists the vertex slots of facet `i` in an order that puts
/// vertex `i` on the positive side for a positively oriented cell.
const FACETS: [[usize; 3]; 4] = [[1, 3, 2], [0, 2, 3], [0, 3, 1], [0, 1, 2]];

/// The finite cells of the triangulation, in canonical order: vertices
/// sorted ascending within each cell, cells sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelaunayComplex {
    pub n_points: usize,
    pub tetrahedra: Vec<[u32; 4]>,
}

/// Computes the Delaunay triangulation of a deduplicated cloud.
///
/// `seed` selects the symbolic perturbation used to break cospherical ties:
/// 0 ranks points by index (later points dominate), any other value ranks
/// them by a splitmix64 hash. Either way the result is a valid
/// triangulation; the seed only picks between equally Delaunay
/// tie-break diagonals.
pub fn delaunay3<S: Real>(
    cloud: &PointCloud<S>,
    seed: u64,
) -> Result<DelaunayComplex, GeometryError> {
    let builder = triangulate(cloud, seed)?;
    Ok(builder.finish())
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn priority(seed: u64, i: usize) -> u64 {
    if seed == 0 {
        i as u64
    } else {
        // Distinct inputs to a bijective mixer: no two points ever tie.
        mix64(seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }
}

#[derive(Debug, Clone, Copy)]
struct Tet {
    v: [u32; 4],
    nb: [u32; 4],
    alive: bool,
}

impl Tet {
    fn inf_slot(&self) -> Option<usize> {
        self.v.iter().position(|&v| v == INFINITE)
    }

    fn slot_of_nb(&self, n: u32) -> usize {
        self.nb.iter().position(|&w| w == n).expect("neighbor present")
    }
}

pub(crate) struct Builder {
    pts: Vec<P3>,
    prio: Vec<u64>,
    tets: Vec<Tet>,
    free: Vec<u32>,
    hint: u32,
    epoch: u32,
    conflict_stamp: Vec<u32>,
    conflict_val: Vec<bool>,
    queued_stamp: Vec<u32>,
}

pub(crate) fn triangulate<S: Real>(
    cloud: &PointCloud<S>,
    seed: u64,
) -> Result<Builder, GeometryError> {
    let n = cloud.len();
    let prio = (0..n).map(|i| priority(seed, i)).collect();
    triangulate_with_priorities(cloud, prio)
}

pub(crate) fn triangulate_with_priorities<S: Real>(
    cloud: &PointCloud<S>,
    prio: Vec<u64>,
) -> Result<Builder, GeometryError> {
    let pts = cloud.coords_f64();
    let n = pts.len();
    assert_eq!(prio.len(), n);
    {
        let mut seen = std::collections::HashSet::with_capacity(n);
        for p in &pts {
            let key = [(p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits(), (p[2] + 0.0).to_bits()];
            if !seen.insert(key) {
                return Err(GeometryError::DuplicatePoints);
            }
        }
    }
    if n < 4 {
        return Err(GeometryError::DegenerateInput);
    }

    // First four affinely independent points in index order seed the
    // triangulation; everything else is inserted incrementally.
    let i0 = 0usize;
    let i1 = 1usize;
    let mut i2 = usize::MAX;
    for i in 2..n {
        if !super::predicates::collinear(pts[i0], pts[i1], pts[i]) {
            i2 = i;
            break;
        }
    }
    if i2 == usize::MAX {
        return Err(GeometryError::DegenerateInput);
    }
    let mut i3 = usize::MAX;
    let mut o = 0i8;
    for i in 2..n {
        if i == i2 {
            continue;
        }
        o = orient3d(pts[i0], pts[i1], pts[i2], pts[i]);
        if o != 0 {
            i3 = i;
            break;
        }
    }
    if i3 == usize::MAX {
        return Err(GeometryError::DegenerateInput);
    }

    let mut b = Builder {
        pts,
        prio,
        tets: Vec::new(),
        free: Vec::new(),
        hint: 0,
        epoch: 0,
        conflict_stamp: Vec::new(),
        conflict_val: Vec::new(),
        queued_stamp: Vec::new(),
    };
    let first = if o > 0 {
        [i0 as u32, i1 as u32, i2 as u32, i3 as u32]
    } else {
        [i0 as u32, i1 as u32, i3 as u32, i2 as u32]
    };
    b.bootstrap(first);
    for pid in 0..n {
        if pid == i0 || pid == i1 || pid == i2 || pid == i3 {
            continue;
        }
        b.insert(pid as u32);
    }
    Ok(b)
}

impl Builder {
    fn alloc(&mut self, v: [u32; 4]) -> u32 {
        let t = Tet { v, nb: [NO_TET; 4], alive: true };
        if let Some(id) = self.free.pop() {
            self.tets[id as usize] = t;
            id
        } else {
            self.tets.push(t);
            self.conflict_stamp.push(0);
            self.conflict_val.push(false);
            self.queued_stamp.push(0);
            (self.tets.len() - 1) as u32
        }
    }

    fn facet_verts(&self, t: u32, i: usize) -> [u32; 3] {
        let tet = &self.tets[t as usize];
        [tet.v[FACETS[i][0]], tet.v[FACETS[i][1]], tet.v[FACETS[i][2]]]
    }

    fn bootstrap(&mut self, v: [u32; 4]) {
        debug_assert!(
            orient3d(
                self.pts[v[0] as usize],
                self.pts[v[1] as usize],
                self.pts[v[2] as usize],
                self.pts[v[3] as usize]
            ) > 0
        );
        let t0 = self.alloc(v);
        let mut infs = [NO_TET; 4];
        for i in 0..4 {
            let f = self.facet_verts(t0, i);
            // Reversing the shared facet puts the hull exterior on its
            // positive side in the infinite cell.
            let inf = self.alloc([f[0], f[2], f[1], INFINITE]);
            self.tets[inf as usize].nb[3] = t0;
            self.tets[t0 as usize].nb[i] = inf;
            infs[i] = inf;
        }
        let mut edge_map: HashMap<(u32, u32), (u32, usize)> = HashMap::new();
        for &inf in &infs {
            self.link_cone_facets(inf, &mut edge_map);
        }
        debug_assert!(edge_map.is_empty());
        self.hint = t0;
    }

    /// Links facets 0..3 of a cell `(a, b, c, apex)` against siblings that
    /// share the same apex, keying each facet by its non-apex edge. Every
    /// key is visited exactly twice across the whole batch.
    fn link_cone_facets(&mut self, id: u32, edge_map: &mut HashMap<(u32, u32), (u32, usize)>) {
        let v = self.tets[id as usize].v;
        for s in 0..3 {
            let (a, b) = match s {
                0 => (v[1], v[2]),
                1 => (v[0], v[2]),
                _ => (v[0], v[1]),
            };
            let key = (a.min(b), a.max(b));
            match edge_map.remove(&key) {
                Some((other, os)) => {
                    self.tets[id as usize].nb[s] = other;
                    self.tets[other as usize].nb[os] = id;
                }
                None => {
                    edge_map.insert(key, (id, s));
                }
            }
        }
    }

    /// Whether inserting `pid` must destroy cell `t` (the perturbed
    /// circumball of `t` contains the point).
    fn conflict_raw(&self, t: u32, pid: u32) -> bool {
        let tet = &self.tets[t as usize];
        let p = self.pts[pid as usize];
        match tet.inf_slot() {
            None => {
                let [a, b, c, d] = tet.v;
                insphere_sos(
                    self.pts[a as usize],
                    self.pts[b as usize],
                    self.pts[c as usize],
                    self.pts[d as usize],
                    p,
                    [
                        self.prio[a as usize],
                        self.prio[b as usize],
                        self.prio[c as usize],
                        self.prio[d as usize],
                        self.prio[pid as usize],
                    ],
                )
            }
            Some(k) => {
                let [a, b, c] = self.facet_verts(t, k);
                let (pa, pb, pc) =
                    (self.pts[a as usize], self.pts[b as usize], self.pts[c as usize]);
                match orient3d(pa, pb, pc, p) {
                    1 => true,
                    -1 => false,
                    _ => incircle_coplanar_sos(
                        pa,
                        pb,
                        pc,
                        p,
                        [
                            self.prio[a as usize],
                            self.prio[b as usize],
                            self.prio[c as usize],
                            self.prio[pid as usize],
                        ],
                    ),
                }
            }
        }
    }

    fn in_conflict(&mut self, t: u32, pid: u32) -> bool {
        let ti = t as usize;
        if self.conflict_stamp[ti] == self.epoch {
            return self.conflict_val[ti];
        }
        let val = self.conflict_raw(t, pid);
        self.conflict_stamp[ti] = self.epoch;
        self.conflict_val[ti] = val;
        val
    }

    /// Visibility walk toward `p`, crossing strictly negative facets.
    /// Returns the first cell whose closed interior contains `p`, or the
    /// infinite cell entered when the walk leaves the hull, or `NO_TET` if
    /// the step budget runs out.
    fn locate(&self, p: P3) -> u32 {
        let mut cur = self.hint;
        let mut steps = 0usize;
        let cap = 8 * self.tets.len() + 32;
        loop {
            if self.tets[cur as usize].inf_slot().is_some() {
                return cur;
            }
            let mut next = NO_TET;
            for i in 0..4 {
                let [a, b, c] = self.facet_verts(cur, i);
                if orient3d(
                    self.pts[a as usize],
                    self.pts[b as usize],
                    self.pts[c as usize],
                    p,
                ) < 0
                {
                    next = self.tets[cur as usize].nb[i];
                    break;
                }
            }
            if next == NO_TET {
                return cur;
            }
            cur = next;
            steps += 1;
            if steps > cap {
                return NO_TET;
            }
        }
    }

    /// Finds a cell in conflict with `pid`, searching outward from `start`.
    /// A conflict cell always exists for a non-duplicate point.
    fn find_conflict(&mut self, start: u32, pid: u32) -> u32 {
        if start != NO_TET {
            if self.in_conflict(start, pid) {
                return start;
            }
            let mut queue = std::collections::VecDeque::new();
            let mut visited = std::collections::HashSet::new();
            queue.push_back(start);
            visited.insert(start);
            while let Some(t) = queue.pop_front() {
                for i in 0..4 {
                    let n = self.tets[t as usize].nb[i];
                    if visited.insert(n) {
                        if self.in_conflict(n, pid) {
                            return n;
                        }
                        queue.push_back(n);
                    }
                }
            }
        }
        for t in 0..self.tets.len() as u32 {
            if self.tets[t as usize].alive && self.in_conflict(t, pid) {
                return t;
            }
        }
        panic!("no conflict cell for point {pid}; predicates inconsistent");
    }

    fn insert(&mut self, pid: u32) {
        let p = self.pts[pid as usize];
        self.epoch += 1;
        let located = self.locate(p);
        let seed = self.find_conflict(located, pid);

        // Grow the conflict region by BFS. Boundary facets are recorded
        // from the surviving side so the refill can read them after the
        // region is carved out.
        let mut region = vec![seed];
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        self.queued_stamp[seed as usize] = self.epoch;
        let mut qi = 0;
        while qi < region.len() {
            let t = region[qi];
            qi += 1;
            for i in 0..4 {
                let n = self.tets[t as usize].nb[i];
                if self.in_conflict(n, pid) {
                    if self.queued_stamp[n as usize] != self.epoch {
                        self.queued_stamp[n as usize] = self.epoch;
                        region.push(n);
                    }
                } else {
                    let jn = self.tets[n as usize].slot_of_nb(t);
                    boundary.push((n, jn));
                }
            }
        }

        for &t in &region {
            self.tets[t as usize].alive = false;
            self.free.push(t);
        }

        // Cone every boundary facet, reversed, onto the new point. Reversal
        // keeps the orientation invariants: finite cones are positive,
        // infinite cones keep the exterior on the hull facet's plus side.
        let mut edge_map: HashMap<(u32, u32), (u32, usize)> = HashMap::new();
        let mut first_new = NO_TET;
        for &(n, jn) in &boundary {
            let base = self.facet_verts(n, jn);
            let id = self.alloc([base[0], base[2], base[1], pid]);
            self.tets[id as usize].nb[3] = n;
            self.tets[n as usize].nb[jn] = id;
            self.link_cone_facets(id, &mut edge_map);
            let better = first_new == NO_TET
                || (self.tets[first_new as usize].inf_slot().is_some()
                    && self.tets[id as usize].inf_slot().is_none());
            if better {
                first_new = id;
            }
        }
        debug_assert!(edge_map.is_empty());
        debug_assert!(first_new != NO_TET);
        self.hint = first_new;
    }

    fn finish(&self) -> DelaunayComplex {
        let mut tetrahedra = Vec::new();
        for t in &self.tets {
            if t.alive && t.inf_slot().is_none() {
                let mut v = t.v;
                v.sort_unstable();
                tetrahedra.push(v);
            }
        }
        tetrahedra.sort_unstable();
        DelaunayComplex { n_points: self.pts.len(), tetrahedra }
    }

    /// Structural invariants: reciprocal neighbor links sharing the right
    /// facet, positive finite cells, infinite cells with the hull exterior
    /// on the positive side of their hull facet.
    #[cfg(test)]
    fn check_structure(&self) {
        for (ti, t) in self.tets.iter().enumerate() {
            if !t.alive {
                continue;
            }
            let ti = ti as u32;
            for i in 0..4 {
                let n = t.nb[i];
                assert_ne!(n, NO_TET, "missing neighbor");
                let nt = &self.tets[n as usize];
                assert!(nt.alive, "neighbor is dead");
                let jn = nt.slot_of_nb(ti);
                let mut mine: Vec<u32> = self.facet_verts(ti, i).to_vec();
                let mut theirs: Vec<u32> = self.facet_verts(n, jn).to_vec();
                mine.sort_unstable();
                theirs.sort_unstable();
                assert_eq!(mine, theirs, "facet mismatch across neighbors");
            }
            match t.inf_slot() {
                None => {
                    let o = orient3d(
                        self.pts[t.v[0] as usize],
                        self.pts[t.v[1] as usize],
                        self.pts[t.v[2] as usize],
                        self.pts[t.v[3] as usize],
                    );
                    assert_eq!(o, 1, "finite cell not positively oriented");
                }
                Some(k) => {
                    let [a, b, c] = self.facet_verts(ti, k);
                    let fin = t.nb[k];
                    let ft = &self.tets[fin as usize];
                    assert!(ft.inf_slot().is_none(), "hull facet must border a finite cell");
                    let opp = ft.v[ft.slot_of_nb(ti)];
                    let o = orient3d(
                        self.pts[a as usize],
                        self.pts[b as usize],
                        self.pts[c as usize],
                        self.pts[opp as usize],
                    );
                    assert_eq!(o, -1, "hull interior must lie on the negative side");
                }
            }
        }
    }

    /// The perturbed empty-sphere property: no cell is in conflict with any
    /// point that is not one of its vertices. Quadratic; test sizes only.
    #[cfg(test)]
    fn check_delaunay(&mut self) {
        for t in 0..self.tets.len() as u32 {
            if !self.tets[t as usize].alive {
                continue;
            }
            for pid in 0..self.pts.len() as u32 {
                if self.tets[t as usize].v.contains(&pid) {
                    continue;
                }
                self.epoch += 1;
                assert!(
                    !self.in_conflict(t, pid),
                    "point {pid} lies in the perturbed circumball of cell {t}"
                );
            }
        }
    }
}
