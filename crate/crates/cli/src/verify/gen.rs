//! Instance and update generators shared by the criteria.

use std::collections::{BTreeMap, BTreeSet};

use dyngibbs::models::{ising_edge_potential, ising_vertex_potential};
use dyngibbs::{ChainRng, MrfInstance, UpdateBatch, UpdateRecord, VertexId};

/// Shape of a random Ising update batch.
#[derive(Debug, Clone, Copy)]
pub struct IsingBatchSpec {
    /// Number of potential changes (edge couplings or fields).
    pub potentials: usize,
    /// Number of edge insertions or deletions.
    pub edges: usize,
    /// Couplings are drawn from `[0, beta_max]` (ferromagnetic).
    pub beta_max: f64,
    pub field_max: f64,
    /// Insertions never raise a degree above this.
    pub max_degree: usize,
}

fn symmetric(rng: &mut ChainRng, bound: f64) -> f64 {
    bound * (2.0 * rng.uniform() - 1.0)
}

/// Random batch of Ising edits on `inst` that keeps every coupling within
/// `[0, beta_max]` and every degree at most `max_degree`.
pub fn random_ising_batch(inst: &MrfInstance, rng: &mut ChainRng, spec: IsingBatchSpec) -> UpdateBatch {
    let ids = inst.vertex_ids();
    let n = ids.len();
    let mut edges: BTreeSet<(VertexId, VertexId)> = inst.edges().map(|(k, _)| k.endpoints()).collect();
    let mut degree: BTreeMap<VertexId, usize> = ids.iter().map(|&v| (v, inst.degree(v).unwrap_or(0))).collect();
    let mut records = Vec::new();
    for _ in 0..spec.potentials {
        if !edges.is_empty() && rng.below(2) == 0 {
            let &(u, v) = edges.iter().nth(rng.below(edges.len())).expect("nonempty");
            let beta = spec.beta_max * rng.uniform();
            records.push(UpdateRecord::SetEdgePotential(u, v, ising_edge_potential(beta)));
        } else if n > 0 {
            let v = ids[rng.below(n)];
            let h = symmetric(rng, spec.field_max);
            records.push(UpdateRecord::SetVertexPotential(v, ising_vertex_potential(h)));
        }
    }
    for k in 0..spec.edges {
        if k % 2 == 0 && !edges.is_empty() {
            let e = *edges.iter().nth(rng.below(edges.len())).expect("nonempty");
            edges.remove(&e);
            *degree.get_mut(&e.0).expect("known") -= 1;
            *degree.get_mut(&e.1).expect("known") -= 1;
            records.push(UpdateRecord::DeleteEdge(e.0, e.1));
        } else if n >= 2 {
            for _ in 0..100 {
                let (u, v) = (ids[rng.below(n)], ids[rng.below(n)]);
                let key = (u.min(v), u.max(v));
                if u == v || edges.contains(&key) || degree[&u] >= spec.max_degree || degree[&v] >= spec.max_degree {
                    continue;
                }
                edges.insert(key);
                *degree.get_mut(&u).expect("known") += 1;
                *degree.get_mut(&v).expect("known") += 1;
                let beta = spec.beta_max * rng.uniform();
                records.push(UpdateRecord::AddEdge(key.0, key.1, ising_edge_potential(beta)));
                break;
            }
        }
    }
    UpdateBatch::new(records)
}

/// Histogram index of a complete sample over the vertices of `inst`.
pub fn config_of(inst: &MrfInstance, s: &dyngibbs::inference::Sample) -> usize {
    let spins: Vec<usize> = inst.vertex_ids().iter().map(|v| s[v]).collect();
    dyngibbs::inference::config_index(&spins, inst.q())
}
