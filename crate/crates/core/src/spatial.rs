//! Static 3D kd-tree for nearest-neighbor queries.
//!
//! Queries break distance ties toward the smallest point index, so results
//! do not depend on tree shape and are reproducible across builds.

const NO_NODE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    point: u32,
    left: u32,
    right: u32,
    axis: u8,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    pts: Vec<[f64; 3]>,
    nodes: Vec<Node>,
    root: u32,
}

impl KdTree {
    pub fn build(pts: Vec<[f64; 3]>) -> KdTree {
        let mut idx: Vec<u32> = (0..pts.len() as u32).collect();
        let mut tree = KdTree { pts, nodes: Vec::new(), root: NO_NODE };
        let n = idx.len();
        if n > 0 {
            tree.nodes.reserve(n);
            let root = tree.build_rec(&mut idx, 0);
            tree.root = root;
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    fn build_rec(&mut self, idx: &mut [u32], depth: usize) -> u32 {
        if idx.is_empty() {
            return NO_NODE;
        }
        let axis = (depth % 3) as u8;
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            self.pts[a as usize][axis as usize]
                .partial_cmp(&self.pts[b as usize][axis as usize])
                .expect("finite coordinates")
                .then(a.cmp(&b))
        });
        let point = idx[mid];
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { point, left: NO_NODE, right: NO_NODE, axis });
        let (lo, hi) = idx.split_at_mut(mid);
        let left = self.build_rec(lo, depth + 1);
        let right = self.build_rec(&mut hi[1..], depth + 1);
        self.nodes[id as usize].left = left;
        self.nodes[id as usize].right = right;
        id
    }

    /// Index and squared distance of the nearest point. Ties resolve to the
    /// smallest index. Panics on an empty tree.
    pub fn nearest(&self, q: [f64; 3]) -> (u32, f64) {
        self.nearest_filtered(q, false)
    }

    /// Nearest point at strictly positive distance: the query's own
    /// position is skipped. Panics if every point coincides with `q`.
    pub fn nearest_other(&self, q: [f64; 3]) -> (u32, f64) {
        self.nearest_filtered(q, true)
    }

    fn nearest_filtered(&self, q: [f64; 3], skip_zero: bool) -> (u32, f64) {
        assert!(!self.pts.is_empty(), "nearest on empty tree");
        let mut best: (u32, f64) = (u32::MAX, f64::INFINITY);
        self.search(self.root, q, skip_zero, &mut best);
        assert!(best.0 != u32::MAX, "no admissible point");
        (best.0, best.1)
    }

    fn search(&self, node: u32, q: [f64; 3], skip_zero: bool, best: &mut (u32, f64)) {
        if node == NO_NODE {
            return;
        }
        let n = self.nodes[node as usize];
        let p = self.pts[n.point as usize];
        let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
        if !(skip_zero && d2 == 0.0)
            && (d2 < best.1 || (d2 == best.1 && n.point < best.0))
        {
            *best = (n.point, d2);
        }
        let delta = q[n.axis as usize] - p[n.axis as usize];
        let (near, far) = if delta < 0.0 { (n.left, n.right) } else { (n.right, n.left) };
        self.search(near, q, skip_zero, best);
        // The far half-space can still hold an equal-distance point with a
        // smaller index, so <= rather than <.
        if delta * delta <= best.1 {
            self.search(far, q, skip_zero, best);
        }
    }
}
