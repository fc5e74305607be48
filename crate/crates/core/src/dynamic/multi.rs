use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::plan::UpdatePlan;
use super::UpdateMetrics;
use crate::error::Result;
use crate::gibbs::{Chain, ChainParams};
use crate::inference::{DiffEntry, Sample, SampleDiff};
use crate::mrf::{MrfInstance, UpdateBatch, VertexId};
use crate::schedule::PowerLaw;

/// `N(n)` independent chains for the current instance. Chain `i` of a fresh
/// set runs on stream `i`; chains added later get streams never used before.
#[derive(Debug, Clone)]
pub struct ChainSet {
    chains: Vec<Chain>,
    params: ChainParams,
    count: PowerLaw,
    next_stream: u64,
    instance: MrfInstance,
}

/// Outcome of one multi-chain update.
#[derive(Debug, Clone, Default)]
pub struct MultiUpdate {
    /// Metrics summed over the replayed chains.
    pub metrics: UpdateMetrics,
    pub per_chain: Vec<UpdateMetrics>,
    /// Changes of the final samples, including dropped and appended chains.
    pub diff: SampleDiff,
    pub dropped: usize,
    pub appended: usize,
    pub wall_time: Duration,
}

fn generate_many(
    inst: &MrfInstance,
    params: &ChainParams,
    streams: std::ops::Range<u64>,
) -> Result<Vec<Chain>> {
    streams
        .into_par_iter()
        .map(|s| Chain::generate(inst, params, s))
        .collect()
}

fn whole_sample(chain: usize, s: &Sample, removed: bool) -> impl Iterator<Item = DiffEntry> + '_ {
    s.iter().map(move |(&vertex, &c)| DiffEntry {
        chain,
        vertex,
        old: removed.then_some(c),
        new: (!removed).then_some(c),
    })
}

impl ChainSet {
    /// `count.eval_count(n)` fresh chains, generated in parallel.
    pub fn new(inst: &MrfInstance, params: ChainParams, count: PowerLaw) -> Result<Self> {
        let n = count.eval_count(inst.num_vertices()) as u64;
        let chains = generate_many(inst, &params, 0..n)?;
        Ok(Self {
            chains,
            params,
            count,
            next_stream: n,
            instance: inst.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn instance(&self) -> &MrfInstance {
        &self.instance
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    /// Changes the contraction gap used for chain lengths from the next
    /// update on.
    pub fn set_delta(&mut self, delta: f64) -> Result<()> {
        self.params = self.params.clone().with_delta(delta)?;
        Ok(())
    }

    /// Final samples in chain order.
    pub fn samples(&self) -> Vec<Sample> {
        self.chains.iter().map(|c| c.sample().clone()).collect()
    }

    /// `H_v`: every `(chain, rank)` whose transition updates `v`, ordered by
    /// chain then rank. Computed from the per-chain vertex trees.
    pub fn cross_index(&self, v: VertexId) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for (i, c) in self.chains.iter().enumerate() {
            out.extend(c.log().vertex_ranks(v)?.into_iter().map(|t| (i, t)));
        }
        Ok(out)
    }

    pub fn apply_update(&mut self, batch: &UpdateBatch) -> Result<MultiUpdate> {
        let new = self.instance.apply(batch)?;
        self.apply_instance(&new)
    }

    /// Moves every chain to `new`: replays the surviving chains in parallel,
    /// then drops or appends chains so that there are `N(n')` of them.
    ///
    /// On error the set is left in an unspecified state.
    pub fn apply_instance(&mut self, new: &MrfInstance) -> Result<MultiUpdate> {
        let start = Instant::now();
        let plan = UpdatePlan::between(&self.instance, new)?;
        let before = self.chains.len();
        let after = self.count.eval_count(new.num_vertices());

        let mut tail = Vec::new();
        if after < before {
            for (i, c) in self.chains.drain(after..).enumerate() {
                tail.extend(whole_sample(after + i, c.sample(), true));
            }
        }

        let params = &self.params;
        let per_chain = self
            .chains
            .par_iter_mut()
            .map(|c| plan.apply(c, params))
            .collect::<Result<Vec<_>>>()?;

        let mut entries = Vec::new();
        for (i, c) in self.chains.iter_mut().enumerate() {
            entries.extend(c.take_diff().into_iter().map(|d| DiffEntry {
                chain: i,
                vertex: d.vertex,
                old: d.old,
                new: d.new,
            }));
        }
        entries.extend(tail);

        let mut appended = 0;
        if after > before {
            let streams = self.next_stream..self.next_stream + (after - before) as u64;
            self.next_stream = streams.end;
            let fresh = generate_many(new, params, streams)?;
            for (i, c) in fresh.iter().enumerate() {
                entries.extend(whole_sample(before + i, c.sample(), false));
            }
            appended = fresh.len();
            self.chains.extend(fresh);
        }
        self.instance = new.clone();

        let mut metrics = UpdateMetrics::default();
        for m in &per_chain {
            metrics += m;
        }
        Ok(MultiUpdate {
            metrics,
            per_chain,
            diff: SampleDiff {
                chains_before: before,
                chains_after: after,
                entries,
            },
            dropped: before.saturating_sub(after),
            appended,
            wall_time: start.elapsed(),
        })
    }
}

/// Applies `batch` to every chain of `set`.
pub fn apply_update_multi(set: &mut ChainSet, batch: &UpdateBatch) -> Result<MultiUpdate> {
    set.apply_update(batch)
}
