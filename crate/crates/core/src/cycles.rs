//! Volume-optimal representative cycles for dimension-2 pairs.
//!
//! The persistent volume of a pair (birth triangle, death cell) is the
//! smallest 3-chain that contains the death cell, uses only cells with
//! values in (birth, death], and whose boundary avoids every triangle with
//! value in that interval. In a Delaunay-based complex each triangle
//! borders at most two cells, so the constraint "this triangle cannot stay
//! on the boundary" forces the cell on the other side into the chain. The
//! transitive closure of that forcing, grown from the death cell, is
//! contained in every feasible chain and is itself feasible, hence it is
//! the unique minimizer. Its boundary is the volume-optimal cycle.

use crate::geometry::Filtration;
use crate::persistence::PersistencePair;
use crate::scalar::Real;
use std::collections::BTreeSet;
use thiserror::Error;

/// A Z2 chain: a set of simplex ids of one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub dim: u8,
    pub simplices: BTreeSet<u32>,
}

impl Chain {
    pub fn new(dim: u8) -> Chain {
        Chain { dim, simplices: BTreeSet::new() }
    }

    /// Z2 addition of a single simplex.
    pub fn toggle(&mut self, id: u32) {
        if !self.simplices.remove(&id) {
            self.simplices.insert(id);
        }
    }

    pub fn contains(&self, id: u32) -> bool {
        self.simplices.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }
}

/// Boundary of a chain: the Z2 sum of the codimension-1 faces of all
/// members. Shared faces cancel in pairs.
pub fn boundary<S: Real>(f: &Filtration<S>, chain: &Chain) -> Chain {
    assert!(chain.dim >= 1, "boundary needs dimension >= 1");
    let mut out = Chain::new(chain.dim - 1);
    for &s in &chain.simplices {
        debug_assert_eq!(f.dim(s), chain.dim as usize);
        for &face in f.faces(s) {
            out.toggle(face);
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycleError {
    /// The feasible region is empty; with a correct pairing this cannot
    /// happen, so it flags an upstream inconsistency.
    #[error("no feasible persistent volume for the pair; pairing is inconsistent")]
    InternalInconsistency,
}

#[derive(Debug, Clone)]
pub struct PersistentVolume<S> {
    pub pair: PersistencePair<S>,
    pub volume: Chain,
    pub cycle: Chain,
}

impl<S> PersistentVolume<S> {
    /// The boundary of the persistent volume.
    pub fn volume_optimal_cycle(&self) -> &Chain {
        &self.cycle
    }
}

/// Computes the persistent volume and its boundary cycle for a finite
/// dimension-2 pair of `f`.
pub fn persistent_volume<S: Real>(
    f: &Filtration<S>,
    pair: &PersistencePair<S>,
) -> Result<PersistentVolume<S>, CycleError> {
    assert_eq!(pair.dim, 2, "persistent volumes are defined for 2-pairs");
    let death_simplex = pair.death_simplex.expect("finite pair required");
    let death = pair.death.expect("finite pair required");
    let birth = pair.birth;

    // Triangle -> bordering cells (at most two in a Delaunay closure).
    const NONE: u32 = u32::MAX;
    let mut cofaces: Vec<[u32; 2]> = vec![[NONE; 2]; f.len()];
    for t in 0..f.len() as u32 {
        if f.dim(t) != 3 {
            continue;
        }
        for &tri in f.faces(t) {
            let slot = &mut cofaces[tri as usize];
            if slot[0] == NONE {
                slot[0] = t;
            } else {
                debug_assert_eq!(slot[1], NONE, "triangle with more than two cells");
                slot[1] = t;
            }
        }
    }

    let mut volume = Chain::new(3);
    volume.toggle(death_simplex);
    let mut queue = vec![death_simplex];
    while let Some(t) = queue.pop() {
        for &tri in f.faces(t) {
            if f.value(tri) <= birth {
                continue;
            }
            // A boundary triangle in (birth, death] is forbidden: the cell
            // on the other side is forced into the volume.
            let [c0, c1] = cofaces[tri as usize];
            let other = if c0 == t { c1 } else { c0 };
            if other == NONE {
                return Err(CycleError::InternalInconsistency);
            }
            if f.value(other) > death {
                return Err(CycleError::InternalInconsistency);
            }
            if !volume.contains(other) {
                volume.toggle(other);
                queue.push(other);
            }
        }
    }

    let cycle = boundary(f, &volume);
    if !cycle.contains(pair.birth_simplex) {
        return Err(CycleError::InternalInconsistency);
    }
    debug_assert!(cycle.simplices.iter().all(|&tri| f.value(tri) <= birth));
    Ok(PersistentVolume { pair: *pair, volume, cycle })
}
