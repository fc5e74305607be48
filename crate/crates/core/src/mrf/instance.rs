use std::collections::BTreeMap;
use std::sync::Arc;

use super::local::LocalView;
use super::potential::{EdgeKey, EdgePotential, SpinDomain, VertexId, VertexPotential};
use crate::error::{Error, Result};

/// One entry of a vertex's adjacency list. `index` is the neighbor's dense
/// position in [`MrfInstance::vertex_ids`].
#[derive(Debug, Clone)]
pub struct Neighbor {
    pub id: VertexId,
    pub index: usize,
    pub potential: Arc<EdgePotential>,
}

#[derive(Debug, Clone)]
struct VertexSlot {
    potential: Arc<VertexPotential>,
    neighbors: Vec<Neighbor>,
}

/// An immutable MRF instance `(V, E, Q, Phi)`.
///
/// Vertices are stored densely in ascending id order; adjacency lists are
/// sorted by neighbor id. Potentials are reference counted so derived
/// instances share unchanged storage.
#[derive(Debug, Clone)]
pub struct MrfInstance {
    domain: SpinDomain,
    ids: Vec<VertexId>,
    slots: Vec<VertexSlot>,
    edges: BTreeMap<EdgeKey, Arc<EdgePotential>>,
    max_degree: usize,
}

pub type VertexMap = BTreeMap<VertexId, Arc<VertexPotential>>;
pub type EdgeMap = BTreeMap<EdgeKey, Arc<EdgePotential>>;

impl MrfInstance {
    pub fn new(
        domain: SpinDomain,
        vertices: impl IntoIterator<Item = (VertexId, VertexPotential)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, EdgePotential)>,
    ) -> Result<Self> {
        let mut vmap = VertexMap::new();
        for (id, phi) in vertices {
            if vmap.insert(id, Arc::new(phi)).is_some() {
                return Err(Error::DuplicateVertex(id));
            }
        }
        let mut emap = EdgeMap::new();
        for (u, v, phi) in edges {
            let key = EdgeKey::new(u, v)?;
            if emap.insert(key, Arc::new(phi)).is_some() {
                return Err(Error::DuplicateEdge(key.endpoints().0, key.endpoints().1));
            }
        }
        Self::from_maps(domain, vmap, emap)
    }

    pub fn empty(domain: SpinDomain) -> Self {
        Self {
            domain,
            ids: Vec::new(),
            slots: Vec::new(),
            edges: EdgeMap::new(),
            max_degree: 0,
        }
    }

    /// Builds an instance from shared potential maps, validating arity and
    /// that every edge endpoint exists.
    pub fn from_maps(domain: SpinDomain, vertices: VertexMap, edges: EdgeMap) -> Result<Self> {
        let q = domain.q();
        let mut ids = Vec::with_capacity(vertices.len());
        let mut slots = Vec::with_capacity(vertices.len());
        for (id, phi) in vertices {
            if phi.q() != q {
                return Err(Error::BadArity {
                    expected: q,
                    got: phi.q(),
                });
            }
            ids.push(id);
            slots.push(VertexSlot {
                potential: phi,
                neighbors: Vec::new(),
            });
        }
        for (key, phi) in &edges {
            if phi.q() != q {
                return Err(Error::BadArity {
                    expected: q,
                    got: phi.q(),
                });
            }
            let (u, v) = key.endpoints();
            let iu = ids.binary_search(&u).map_err(|_| Error::UnknownVertex(u))?;
            let iv = ids.binary_search(&v).map_err(|_| Error::UnknownVertex(v))?;
            slots[iu].neighbors.push(Neighbor {
                id: v,
                index: iv,
                potential: Arc::clone(phi),
            });
            slots[iv].neighbors.push(Neighbor {
                id: u,
                index: iu,
                potential: Arc::clone(phi),
            });
        }
        let mut max_degree = 0;
        for slot in &mut slots {
            slot.neighbors.sort_by_key(|n| n.id);
            max_degree = max_degree.max(slot.neighbors.len());
        }
        Ok(Self {
            domain,
            ids,
            slots,
            edges,
            max_degree,
        })
    }

    pub fn domain(&self) -> SpinDomain {
        self.domain
    }

    pub fn q(&self) -> usize {
        self.domain.q()
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Vertex ids in ascending order.
    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        EdgeKey::new(u, v).is_ok_and(|k| self.edges.contains_key(&k))
    }

    pub fn vertex_potential(&self, v: VertexId) -> Option<&VertexPotential> {
        self.index_of(v).map(|i| &*self.slots[i].potential)
    }

    pub fn edge_potential(&self, u: VertexId, v: VertexId) -> Option<&EdgePotential> {
        let key = EdgeKey::new(u, v).ok()?;
        self.edges.get(&key).map(|p| &**p)
    }

    #[inline]
    pub fn potential_at(&self, index: usize) -> &VertexPotential {
        &self.slots[index].potential
    }

    #[inline]
    pub fn neighbors_at(&self, index: usize) -> &[Neighbor] {
        &self.slots[index].neighbors
    }

    pub fn neighbors(&self, v: VertexId) -> Result<&[Neighbor]> {
        let i = self.index_of(v).ok_or(Error::UnknownVertex(v))?;
        Ok(&self.slots[i].neighbors)
    }

    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.neighbors(v).map(|n| n.len())
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &VertexPotential)> + '_ {
        self.ids
            .iter()
            .zip(&self.slots)
            .map(|(&id, s)| (id, &*s.potential))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeKey, &EdgePotential)> + '_ {
        self.edges.iter().map(|(&k, p)| (k, &**p))
    }

    /// Shared copy of the vertex potentials, for deriving new instances.
    pub fn vertex_map(&self) -> VertexMap {
        self.ids
            .iter()
            .zip(&self.slots)
            .map(|(&id, s)| (id, Arc::clone(&s.potential)))
            .collect()
    }

    pub fn edge_map(&self) -> EdgeMap {
        self.edges.clone()
    }

    /// True if any potential contains a `-inf` entry.
    pub fn has_hard_constraints(&self) -> bool {
        self.slots.iter().any(|s| !s.potential.is_finite())
            || self.edges.values().any(|p| !p.is_finite())
    }

    /// Restriction of the instance to the inclusive neighborhood of `v`.
    pub fn local(&self, v: VertexId) -> Result<LocalView<'_>> {
        let i = self.index_of(v).ok_or(Error::UnknownVertex(v))?;
        Ok(self.local_at(i))
    }

    #[inline]
    pub fn local_at(&self, index: usize) -> LocalView<'_> {
        let slot = &self.slots[index];
        LocalView::new(self.ids[index], &slot.potential, &slot.neighbors)
    }

    /// Vertex and edge sets coincide (potentials may differ).
    pub fn same_graph(&self, other: &Self) -> bool {
        self.ids == other.ids && self.edges.keys().eq(other.edges.keys())
    }
}
