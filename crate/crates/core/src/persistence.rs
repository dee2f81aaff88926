//! Persistent homology of a filtration over Z2.
//!
//! Standard boundary-matrix column reduction with the twist optimization:
//! dimensions are processed in decreasing order and a column whose simplex
//! was already matched as the pivot of a higher dimensional column is
//! cleared without reduction. Zero-persistence pairs are kept; consumers
//! that do not care filter them out.

use crate::geometry::Filtration;
use crate::scalar::Real;
use std::collections::HashMap;

const NONE: u32 = u32::MAX;

/// One point of the persistence diagram. `dim` is the homology dimension:
/// the class is born with `birth_simplex` (a `dim`-simplex) and dies with
/// `death_simplex` (a `dim + 1`-simplex), or never, for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair<S> {
    pub dim: u8,
    pub birth: S,
    pub death: Option<S>,
    pub birth_simplex: u32,
    pub death_simplex: Option<u32>,
}

impl<S: Real> PersistencePair<S> {
    pub fn persistence(&self) -> S {
        match self.death {
            Some(d) => d - self.birth,
            None => S::infinity(),
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct PersistenceDiagram<S> {
    /// All pairs, finite and essential, sorted by (dim, birth simplex).
    pub pairs: Vec<PersistencePair<S>>,
}

impl<S: Real> PersistenceDiagram<S> {
    pub fn pairs_in_dim(&self, dim: u8) -> impl Iterator<Item = &PersistencePair<S>> + '_ {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Betti number of the sublevel complex at parameter `r`.
    pub fn betti(&self, dim: u8, r: S) -> usize {
        self.pairs_in_dim(dim)
            .filter(|p| p.birth <= r && p.death.is_none_or(|d| r < d))
            .count()
    }
}

/// Reduces the filtration's boundary matrices and returns the diagram.
pub fn persistence<S: Real>(f: &Filtration<S>) -> PersistenceDiagram<S> {
    let n = f.len();
    let mut pivot_owner: Vec<u32> = vec![NONE; n];
    // A simplex matched as a pivot is the birth of a pair; its own column
    // would reduce to zero, so it is skipped (cleared) in the next round.
    let mut matched = vec![false; n];
    let mut pairs: Vec<PersistencePair<S>> = Vec::new();

    for d in (1..=3u8).rev() {
        // Negative columns of this dimension, kept for later additions.
        let mut stored: HashMap<u32, Vec<u32>> = HashMap::new();
        for j in 0..n as u32 {
            if f.dim(j) != d as usize || matched[j as usize] {
                continue;
            }
            let mut col: Vec<u32> = f.faces(j).to_vec();
            col.sort_unstable();
            loop {
                match col.last() {
                    None => {
                        // Emptied: births an essential class (higher
                        // dimensions were already reduced, nothing can
                        // kill it).
                        pairs.push(PersistencePair {
                            dim: d,
                            birth: f.value(j),
                            death: None,
                            birth_simplex: j,
                            death_simplex: None,
                        });
                        break;
                    }
                    Some(&piv) => {
                        let owner = pivot_owner[piv as usize];
                        if owner == NONE {
                            pivot_owner[piv as usize] = j;
                            matched[piv as usize] = true;
                            pairs.push(PersistencePair {
                                dim: d - 1,
                                birth: f.value(piv),
                                death: Some(f.value(j)),
                                birth_simplex: piv,
                                death_simplex: Some(j),
                            });
                            stored.insert(j, col);
                            break;
                        }
                        col = xor_sorted(&col, &stored[&owner]);
                    }
                }
            }
        }
    }

    for v in 0..n as u32 {
        if f.dim(v) == 0 && !matched[v as usize] {
            pairs.push(PersistencePair {
                dim: 0,
                birth: f.value(v),
                death: None,
                birth_simplex: v,
                death_simplex: None,
            });
        }
    }

    pairs.sort_by_key(|p| (p.dim, p.birth_simplex));
    PersistenceDiagram { pairs }
}

/// Symmetric difference of two strictly ascending index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
