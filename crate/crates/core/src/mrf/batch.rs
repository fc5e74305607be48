use std::collections::BTreeMap;
use std::sync::Arc;

use super::instance::MrfInstance;
use super::potential::{EdgeKey, EdgePotential, VertexId, VertexPotential};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum UpdateRecord {
    AddVertex(VertexId, VertexPotential),
    DeleteVertex(VertexId),
    AddEdge(VertexId, VertexId, EdgePotential),
    DeleteEdge(VertexId, VertexId),
    SetVertexPotential(VertexId, VertexPotential),
    SetEdgePotential(VertexId, VertexId, EdgePotential),
}

/// An ordered list of edits turning one instance into the next.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UpdateBatch {
    records: Vec<UpdateRecord>,
}

impl UpdateBatch {
    pub fn new(records: Vec<UpdateRecord>) -> Self {
        Self { records }
    }

    pub fn push(&mut self, record: UpdateRecord) -> &mut Self {
        self.records.push(record);
        self
    }

    pub fn records(&self) -> &[UpdateRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }
}

impl FromIterator<UpdateRecord> for UpdateBatch {
    fn from_iter<I: IntoIterator<Item = UpdateRecord>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl MrfInstance {
    /// Applies the batch record by record and returns the resulting instance.
    /// Unchanged potentials are shared with `self`.
    pub fn apply(&self, batch: &UpdateBatch) -> Result<MrfInstance> {
        let q = self.q();
        let mut vertices = self.vertex_map();
        let mut edges = self.edge_map();
        let mut degree: BTreeMap<VertexId, usize> = self
            .vertex_ids()
            .iter()
            .map(|&v| (v, self.neighbors(v).map(|n| n.len()).unwrap_or(0)))
            .collect();

        let check_q = |got: usize| -> Result<()> {
            if got != q {
                Err(Error::BadArity { expected: q, got })
            } else {
                Ok(())
            }
        };

        for record in &batch.records {
            match record {
                UpdateRecord::AddVertex(v, phi) => {
                    check_q(phi.q())?;
                    if vertices.contains_key(v) {
                        return Err(Error::DuplicateVertex(*v));
                    }
                    vertices.insert(*v, Arc::new(phi.clone()));
                    degree.insert(*v, 0);
                }
                UpdateRecord::DeleteVertex(v) => {
                    match degree.get(v) {
                        None => return Err(Error::UnknownVertex(*v)),
                        Some(&d) if d > 0 => return Err(Error::NotIsolated(*v)),
                        _ => {}
                    }
                    vertices.remove(v);
                    degree.remove(v);
                }
                UpdateRecord::AddEdge(u, v, phi) => {
                    check_q(phi.q())?;
                    let key = EdgeKey::new(*u, *v)?;
                    for w in [u, v] {
                        if !vertices.contains_key(w) {
                            return Err(Error::UnknownVertex(*w));
                        }
                    }
                    if edges.contains_key(&key) {
                        return Err(Error::DuplicateEdge(key.endpoints().0, key.endpoints().1));
                    }
                    edges.insert(key, Arc::new(phi.clone()));
                    *degree.get_mut(u).expect("checked") += 1;
                    *degree.get_mut(v).expect("checked") += 1;
                }
                UpdateRecord::DeleteEdge(u, v) => {
                    let key = EdgeKey::new(*u, *v)?;
                    if edges.remove(&key).is_none() {
                        return Err(Error::UnknownEdge(*u, *v));
                    }
                    *degree.get_mut(u).expect("edge endpoint") -= 1;
                    *degree.get_mut(v).expect("edge endpoint") -= 1;
                }
                UpdateRecord::SetVertexPotential(v, phi) => {
                    check_q(phi.q())?;
                    match vertices.get_mut(v) {
                        Some(slot) => *slot = Arc::new(phi.clone()),
                        None => return Err(Error::UnknownVertex(*v)),
                    }
                }
                UpdateRecord::SetEdgePotential(u, v, phi) => {
                    check_q(phi.q())?;
                    let key = EdgeKey::new(*u, *v)?;
                    match edges.get_mut(&key) {
                        Some(slot) => *slot = Arc::new(phi.clone()),
                        None => return Err(Error::UnknownEdge(*u, *v)),
                    }
                }
            }
        }
        MrfInstance::from_maps(self.domain(), vertices, edges)
    }
}
