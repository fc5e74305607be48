use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::filter::build_filter;
use super::ops::{add_vertices, affected_vertices, delete_vertices, update_edge_with};
use super::replay::{replay, ReplayReport, Rule};
use super::UpdateMetrics;
use crate::coupling::p_up;
use crate::error::{Error, Result};
use crate::gibbs::{mixing_length, Chain, ChainParams};
use crate::mrf::{
    instance_diff, validate_feasibility_at, EdgeMap, Feasibility, MrfInstance, UpdateBatch,
    VertexId, VertexMap,
};

/// One edge phase: replay from `from` to `to`, where `affected` are the
/// endpoints of the edges that differ.
#[derive(Debug, Clone)]
struct EdgeStage {
    to: MrfInstance,
    affected: BTreeSet<VertexId>,
}

/// The decomposition of one update `I -> I'`, computed once and applied to
/// any number of chains valid for `I`.
///
/// Intermediate instances:
/// - `mid`: the old graph with new potentials on every shared vertex and
///   edge;
/// - `grown`: `mid` plus the inserted vertices (isolated, new potentials);
/// - edge stages ending at the new edge set over all vertices of `grown`
///   (deletions first, then additions, when hard constraints are present);
/// - `new`: the last stage minus the deleted vertices.
#[derive(Debug, Clone)]
pub struct UpdatePlan {
    old: MrfInstance,
    mid: MrfInstance,
    grown: MrfInstance,
    stages: Vec<EdgeStage>,
    new: MrfInstance,
    pbar: BTreeMap<VertexId, f64>,
    fallback: bool,
}

fn restrict(map: &EdgeMap, keep: impl Fn(&crate::mrf::EdgeKey) -> bool) -> EdgeMap {
    map.iter()
        .filter(|(k, _)| keep(k))
        .map(|(k, p)| (*k, p.clone()))
        .collect()
}

impl UpdatePlan {
    /// Plan for applying `batch` to `old`.
    pub fn new(old: &MrfInstance, batch: &UpdateBatch) -> Result<Self> {
        let new = old.apply(batch)?;
        Self::between(old, &new)
    }

    /// Plan for the change `old -> new`.
    ///
    /// Fails with [`Error::InfeasibleInstance`] if a vertex of `new` touched
    /// by the change can be left without a positive-weight spin. If a changed
    /// potential switches between finite and `-inf` somewhere, or an
    /// intermediate instance is infeasible at a touched vertex, the plan
    /// falls back to regenerating chains.
    pub fn between(old: &MrfInstance, new: &MrfInstance) -> Result<Self> {
        if old.q() != new.q() {
            return Err(Error::DomainMismatch(old.q(), new.q()));
        }
        let domain = old.domain();
        let (old_v, new_v) = (old.vertex_map(), new.vertex_map());
        let (old_e, new_e) = (old.edge_map(), new.edge_map());

        let mut mid_v = old_v.clone();
        for (v, p) in mid_v.iter_mut() {
            if let Some(np) = new_v.get(v) {
                *p = np.clone();
            }
        }
        let mut mid_e = old_e.clone();
        for (k, p) in mid_e.iter_mut() {
            if let Some(np) = new_e.get(k) {
                *p = np.clone();
            }
        }
        let mid = MrfInstance::from_maps(domain, mid_v.clone(), mid_e)?;

        let mut grown_v: VertexMap = mid_v;
        for (v, p) in &new_v {
            grown_v.entry(*v).or_insert_with(|| p.clone());
        }
        let grown = MrfInstance::from_maps(domain, grown_v.clone(), mid.edge_map())?;

        let added_edges = new_e.keys().any(|k| !old_e.contains_key(k));
        let deleted_edges = old_e.keys().any(|k| !new_e.contains_key(k));
        let mut stages = Vec::new();
        let mut from = grown.clone();
        let split = added_edges
            && deleted_edges
            && (old.has_hard_constraints() || new.has_hard_constraints());
        if split {
            let kept = restrict(&new_e, |k| old_e.contains_key(k));
            let to = MrfInstance::from_maps(domain, grown_v.clone(), kept)?;
            stages.push(EdgeStage {
                affected: affected_vertices(&from, &to),
                to: to.clone(),
            });
            from = to;
        }
        if added_edges || deleted_edges {
            let to = MrfInstance::from_maps(domain, grown_v, new_e.clone())?;
            stages.push(EdgeStage {
                affected: affected_vertices(&from, &to),
                to,
            });
        }

        let mut changed = BTreeSet::new();
        for (v, p) in &old_v {
            if let Some(np) = new_v.get(v) {
                if p != np {
                    changed.insert(*v);
                }
            }
        }
        for (k, p) in &old_e {
            if let Some(np) = new_e.get(k) {
                if p != np {
                    let (u, v) = k.endpoints();
                    changed.insert(u);
                    changed.insert(v);
                }
            }
        }
        let mut touched: BTreeSet<VertexId> = changed.clone();
        for s in &stages {
            touched.extend(s.affected.iter().copied());
        }
        touched.extend(new_v.keys().filter(|v| !old_v.contains_key(v)));

        if let Feasibility::Violation { vertex, .. } =
            validate_feasibility_at(new, touched.iter().copied())
        {
            return Err(Error::InfeasibleInstance(vertex));
        }

        let mut fallback = !instance_diff(old, &mid)?.d_ham.is_finite();
        if !fallback {
            let intermediate = std::iter::once(&mid)
                .chain(stages.iter().map(|s| &s.to))
                .any(|inst| !validate_feasibility_at(inst, touched.iter().copied()).is_ok());
            fallback = intermediate;
        }

        let mut pbar = BTreeMap::new();
        if !fallback {
            for &v in &changed {
                let p = p_up(&old.local(v)?, &mid.local(v)?)?;
                if p > 0.0 {
                    pbar.insert(v, p);
                }
            }
        }

        Ok(Self {
            old: old.clone(),
            mid,
            grown,
            stages,
            new: new.clone(),
            pbar,
            fallback,
        })
    }

    pub fn old_instance(&self) -> &MrfInstance {
        &self.old
    }

    pub fn new_instance(&self) -> &MrfInstance {
        &self.new
    }

    /// `p_up` of every vertex whose local potentials change.
    pub fn pbar(&self) -> &BTreeMap<VertexId, f64> {
        &self.pbar
    }

    /// True if chains will be regenerated instead of replayed.
    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    /// Rewrites `chain` (valid for the old instance) into a chain for the new
    /// instance of length `mixing_length(n')`.
    pub fn apply(&self, chain: &mut Chain, params: &ChainParams) -> Result<UpdateMetrics> {
        let mut m = UpdateMetrics {
            length_before: chain.log.len(),
            ..UpdateMetrics::default()
        };
        let target = mixing_length(self.new.num_vertices(), params);
        if self.fallback {
            let start = Instant::now();
            chain.regenerate(&self.new, target)?;
            m.fallback = true;
            m.length_after = chain.log.len();
            m.time_length_fix = start.elapsed();
            return Ok(m);
        }

        let start = Instant::now();
        if !self.pbar.is_empty() {
            let filter = build_filter(&chain.log, &self.pbar, &mut chain.rng)?;
            m.filter_size = filter.len();
            let report = replay(
                &self.old,
                &self.mid,
                Rule::Hamiltonian(&filter),
                &mut chain.log,
                &mut chain.rng,
                None,
            )?;
            m.r_ham = report.visited;
            absorb(chain, &report);
        }
        m.time_hamiltonian = start.elapsed();

        let start = Instant::now();
        m.inserted = add_vertices(&self.mid, &self.grown, chain)?;
        let mut from = &self.grown;
        for stage in &self.stages {
            let report = update_edge_with(
                from,
                &stage.to,
                &stage.affected,
                &mut chain.log,
                &mut chain.rng,
                None,
            )?;
            m.r_graph += report.visited;
            absorb(chain, &report);
            from = &stage.to;
        }
        let t = chain.log.len();
        m.removed = delete_vertices(from, &self.new, chain, t)?;
        m.time_graph = start.elapsed();

        let start = Instant::now();
        chain.length_fix(&self.new, target)?;
        m.time_length_fix = start.elapsed();
        m.length_after = chain.log.len();
        Ok(m)
    }
}

/// Copies the final spins of the replay into the maintained sample.
fn absorb(chain: &mut Chain, report: &ReplayReport) {
    for (&v, &(_, y)) in &report.disagreements {
        chain.set_sample(v, Some(y));
    }
}

/// Applies `batch` to `inst` and rewrites `chain` accordingly. Returns the
/// new instance and the work done.
pub fn apply_update(
    inst: &MrfInstance,
    batch: &UpdateBatch,
    chain: &mut Chain,
    params: &ChainParams,
) -> Result<(MrfInstance, UpdateMetrics)> {
    let plan = UpdatePlan::new(inst, batch)?;
    let metrics = plan.apply(chain, params)?;
    Ok((plan.new, metrics))
}
