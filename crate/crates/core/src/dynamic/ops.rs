use std::collections::BTreeSet;

use super::filter::FilterSet;
use super::replay::{check_same_graph, replay, ReplayReport, Rule};
use crate::error::{Error, Result};
use crate::exec_log::ExecutionLog;
use crate::gibbs::Chain;
use crate::mrf::{normalize_log_weights, MrfInstance, Spin, VertexId, VertexPotential};
use crate::rng::{bernoulli_positions, ChainRng};

/// Rewrites a log valid for `old` into one valid for `new`, where the two
/// instances differ only in potentials. `filter` must have been built from
/// the `p_up` bounds of this change.
///
/// If `trace` is given, every visited rank is appended to it.
pub fn update_hamiltonian(
    old: &MrfInstance,
    new: &MrfInstance,
    log: &mut ExecutionLog,
    filter: &FilterSet,
    rng: &mut ChainRng,
    trace: Option<&mut Vec<usize>>,
) -> Result<ReplayReport> {
    check_same_graph(old, new)?;
    replay(old, new, Rule::Hamiltonian(filter), log, rng, trace)
}

/// Endpoints of the edges in `E xor E'`, ascending.
pub fn affected_vertices(old: &MrfInstance, new: &MrfInstance) -> BTreeSet<VertexId> {
    let a: BTreeSet<_> = old.edges().map(|(k, _)| k).collect();
    let b: BTreeSet<_> = new.edges().map(|(k, _)| k).collect();
    a.symmetric_difference(&b)
        .flat_map(|k| {
            let (u, v) = k.endpoints();
            [u, v]
        })
        .collect()
}

pub(crate) fn check_edge_update(old: &MrfInstance, new: &MrfInstance) -> Result<()> {
    if old.vertex_ids() != new.vertex_ids() {
        return Err(Error::VertexSetMismatch);
    }
    for ((_, a), (_, b)) in old.vertices().zip(new.vertices()) {
        if a != b {
            return Err(Error::SharedPotentialMismatch);
        }
    }
    for (k, p) in old.edges() {
        let (u, v) = k.endpoints();
        if let Some(q) = new.edge_potential(u, v) {
            if p != q {
                return Err(Error::SharedPotentialMismatch);
            }
        }
    }
    Ok(())
}

/// Rewrites a log valid for `old` into one valid for `new`, where the two
/// instances have the same vertices and shared potentials and differ in
/// their edge sets.
pub fn update_edge(
    old: &MrfInstance,
    new: &MrfInstance,
    log: &mut ExecutionLog,
    rng: &mut ChainRng,
    trace: Option<&mut Vec<usize>>,
) -> Result<ReplayReport> {
    check_edge_update(old, new)?;
    let s = affected_vertices(old, new);
    update_edge_with(old, new, &s, log, rng, trace)
}

pub(crate) fn update_edge_with(
    old: &MrfInstance,
    new: &MrfInstance,
    affected: &BTreeSet<VertexId>,
    log: &mut ExecutionLog,
    rng: &mut ChainRng,
    trace: Option<&mut Vec<usize>>,
) -> Result<ReplayReport> {
    if affected.is_empty() {
        return Ok(ReplayReport::default());
    }
    replay(old, new, Rule::Edge(affected), log, rng, trace)
}

/// Initial spin for a vertex entering a chain: the first spin with positive
/// weight.
pub(crate) fn entry_spin(phi: &VertexPotential) -> Result<Spin> {
    phi.weights()
        .iter()
        .position(|&w| w > f64::NEG_INFINITY)
        .ok_or(Error::InvalidWeight)
}

fn check_isolated(inst: &MrfInstance, vertices: &[VertexId]) -> Result<()> {
    for &v in vertices {
        if inst.degree(v)? > 0 {
            return Err(Error::NotIsolated(v));
        }
    }
    Ok(())
}

/// Vertices of `after` missing from `before`, ascending.
pub fn vertex_difference(before: &MrfInstance, after: &MrfInstance) -> Vec<VertexId> {
    after
        .vertex_ids()
        .iter()
        .copied()
        .filter(|&v| !before.contains(v))
        .collect()
}

/// Inserts steps of the isolated vertices of `after` that are missing from
/// `before`. Each rank is selected with probability `|S| / |V'|`, the log is
/// truncated to the unselected count, and every selected rank receives a
/// uniform new vertex with a spin drawn from its single-site law. The length
/// is unchanged. Returns the number of inserted steps.
pub fn add_vertices(before: &MrfInstance, after: &MrfInstance, chain: &mut Chain) -> Result<usize> {
    let added = vertex_difference(before, after);
    if added.is_empty() {
        return Ok(0);
    }
    check_isolated(after, &added)?;
    let t = chain.log.len();
    let p = added.len() as f64 / after.num_vertices() as f64;
    let positions = bernoulli_positions(&mut chain.rng, t, p);
    let picks: Vec<VertexId> = positions
        .iter()
        .map(|_| added[chain.rng.below(added.len())])
        .collect();

    let touched = chain.log.truncate(t - positions.len());
    chain.refresh(&touched);

    let mut weights = Vec::new();
    for &v in &added {
        let phi = after.vertex_potential(v).ok_or(Error::UnknownVertex(v))?;
        let c = entry_spin(phi)?;
        chain.log.add_vertex_initial(v, c)?;
    }
    for (&r, &v) in positions.iter().zip(&picks) {
        let phi = after.vertex_potential(v).expect("added vertex");
        weights.clear();
        weights.extend_from_slice(phi.weights());
        normalize_log_weights(&mut weights);
        let c = chain.rng.categorical(&weights);
        chain.log.insert(r, v, c)?;
    }
    chain.refresh(&added);
    Ok(positions.len())
}

/// Removes the isolated vertices of `before` missing from `after` together
/// with all their steps, then extends the log on `after` back to
/// `target_len`. Returns the number of removed steps.
pub fn delete_vertices(
    before: &MrfInstance,
    after: &MrfInstance,
    chain: &mut Chain,
    target_len: usize,
) -> Result<usize> {
    let removed = vertex_difference(after, before);
    if removed.is_empty() {
        return Ok(0);
    }
    check_isolated(before, &removed)?;
    let mut count = 0;
    for &v in &removed {
        count += chain.log.remove_transitions_of(v)?;
        chain.log.remove_vertex(v)?;
        chain.set_sample(v, None);
    }
    chain.length_fix(after, target_len)?;
    Ok(count)
}
