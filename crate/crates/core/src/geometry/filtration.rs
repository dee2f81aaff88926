//! Filtered simplicial complexes of dimension at most three.

use crate::scalar::Real;
use std::collections::HashMap;
use thiserror::Error;

const NO_VERT: u32 = u32::MAX;

/// A simplex of dimension 0..=3, stored as sorted vertex ids padded with
/// `u32::MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    verts: [u32; 4],
    dim: u8,
}

impl Simplex {
    /// Builds a simplex from 1 to 4 distinct vertex ids in any order.
    pub fn new(vertices: &[u32]) -> Option<Simplex> {
        if vertices.is_empty() || vertices.len() > 4 || vertices.contains(&NO_VERT) {
            return None;
        }
        let mut verts = [NO_VERT; 4];
        verts[..vertices.len()].copy_from_slice(vertices);
        verts[..vertices.len()].sort_unstable();
        for i in 1..vertices.len() {
            if verts[i - 1] == verts[i] {
                return None;
            }
        }
        Some(Simplex { verts, dim: (vertices.len() - 1) as u8 })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts[..=self.dim as usize]
    }

    /// The facet obtained by removing the vertex at position `i`.
    pub fn facet(&self, i: usize) -> Simplex {
        debug_assert!(self.dim > 0 && i <= self.dim as usize);
        let mut verts = [NO_VERT; 4];
        let mut k = 0;
        for j in 0..=self.dim as usize {
            if j != i {
                verts[k] = self.verts[j];
                k += 1;
            }
        }
        Simplex { verts, dim: self.dim - 1 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FiltrationError {
    #[error("invalid simplex vertex list")]
    InvalidSimplex,
    #[error("duplicate simplex in filtration")]
    DuplicateSimplex,
    #[error("missing face of a listed simplex")]
    MissingFace,
    #[error("face value exceeds coface value")]
    NonMonotone,
    #[error("non-finite filtration value")]
    NonFinite,
}

/// A simplexwise filtration: simplices sorted by (value, dimension,
/// lexicographic vertex tuple), every face preceding its cofaces.
///
/// Face filtration values never exceed coface values; `build` rejects
/// violations exactly, with no tolerance.
#[derive(Debug, Clone)]
pub struct Filtration<S> {
    simplices: Vec<Simplex>,
    values: Vec<S>,
    /// For simplex `i` of dimension d, `faces[i][k]` for k <= d is the index
    /// of the facet with vertex k removed.
    faces: Vec<[u32; 4]>,
    index: HashMap<Simplex, u32>,
}

impl<S: Real> Filtration<S> {
    /// Assembles a filtration from (vertex list, value) pairs.
    ///
    /// All faces of every simplex must be present. The input order is
    /// irrelevant; simplices are sorted into filtration order.
    pub fn build(items: Vec<(Vec<u32>, S)>) -> Result<Filtration<S>, FiltrationError> {
        let mut entries = Vec::with_capacity(items.len());
        for (verts, value) in items {
            let s = Simplex::new(&verts).ok_or(FiltrationError::InvalidSimplex)?;
            if !value.is_finite() {
                return Err(FiltrationError::NonFinite);
            }
            entries.push((s, value));
        }
        entries.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .expect("finite values compare")
                .then(a.0.dim.cmp(&b.0.dim))
                .then(a.0.cmp(&b.0))
        });

        let mut index = HashMap::with_capacity(entries.len());
        for (i, (s, _)) in entries.iter().enumerate() {
            if index.insert(*s, i as u32).is_some() {
                return Err(FiltrationError::DuplicateSimplex);
            }
        }

        let mut simplices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut faces = vec![[NO_VERT; 4]; entries.len()];
        for (i, (s, v)) in entries.iter().enumerate() {
            if s.dim > 0 {
                for k in 0..=s.dim as usize {
                    let f = s.facet(k);
                    let fi = *index.get(&f).ok_or(FiltrationError::MissingFace)?;
                    if entries[fi as usize].1 > *v {
                        return Err(FiltrationError::NonMonotone);
                    }
                    faces[i][k] = fi;
                }
            }
            simplices.push(*s);
            values.push(*v);
        }
        Ok(Filtration { simplices, values, faces, index })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex(&self, i: u32) -> &Simplex {
        &self.simplices[i as usize]
    }

    pub fn value(&self, i: u32) -> S {
        self.values[i as usize]
    }

    pub fn dim(&self, i: u32) -> usize {
        self.simplices[i as usize].dim()
    }

    /// Indices of the codimension-1 faces of simplex `i`.
    pub fn faces(&self, i: u32) -> &[u32] {
        let d = self.simplices[i as usize].dim();
        &self.faces[i as usize][..if d == 0 { 0 } else { d + 1 }]
    }

    pub fn index_of(&self, vertices: &[u32]) -> Option<u32> {
        self.index.get(&Simplex::new(vertices)?).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Simplex, S)> + '_ {
        self.simplices
            .iter()
            .enumerate()
            .map(move |(i, s)| (i as u32, s, self.values[i]))
    }
}
