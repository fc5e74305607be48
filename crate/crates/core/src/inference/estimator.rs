use std::collections::BTreeMap;

use super::diff::{Sample, SampleDiff};
use super::query::{config_index, Query, QueryKind, HARD_VAR_CAP};
use crate::error::{Error, Result};
use crate::mrf::{Spin, VertexId};

/// Exact integer counts backing one query.
///
/// For every chain the spins of `A ++ B` are kept, so a diff can be applied
/// by moving the chain between buckets. A chain missing any vertex of
/// `A ++ B` is not counted.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    query: Query,
    q: usize,
    positions: BTreeMap<VertexId, usize>,
    chains: Vec<Vec<Option<Spin>>>,
    counts: Vec<u64>,
    joint: BTreeMap<(usize, usize), u64>,
    total: u64,
}

impl EstimatorState {
    /// Counts `samples` from scratch.
    pub fn rebuild(query: &Query, q: usize, samples: &[Sample]) -> Result<Self> {
        query.validate(q, HARD_VAR_CAP)?;
        let vars: Vec<VertexId> = query.a.iter().chain(&query.b).copied().collect();
        let positions = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut st = Self {
            query: query.clone(),
            q,
            positions,
            chains: Vec::with_capacity(samples.len()),
            counts: if query.kind == QueryKind::Marginal {
                vec![0; query.dimension(q)]
            } else {
                Vec::new()
            },
            joint: BTreeMap::new(),
            total: 0,
        };
        for (i, s) in samples.iter().enumerate() {
            st.chains.push(vars.iter().map(|v| s.get(v).copied()).collect());
            st.add(i, 1);
        }
        Ok(st)
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    /// Number of counted chains.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Marginal counts indexed by configuration of `A` (empty for other
    /// kinds).
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Counts of `(config of A, config of B)` pairs (posterior and MAP).
    pub fn joint_counts(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.joint
    }

    fn key(&self, chain: usize) -> Option<(usize, usize)> {
        let spins: Option<Vec<Spin>> = self.chains[chain].iter().copied().collect();
        let spins = spins?;
        let na = self.query.a.len();
        Some((
            config_index(&spins[..na], self.q),
            config_index(&spins[na..], self.q),
        ))
    }

    fn add(&mut self, chain: usize, sign: i8) {
        let Some((a, b)) = self.key(chain) else {
            return;
        };
        let bump = |c: &mut u64| {
            if sign > 0 {
                *c += 1
            } else {
                *c -= 1
            }
        };
        if self.query.kind == QueryKind::Marginal {
            bump(&mut self.counts[a]);
        } else {
            let c = self.joint.entry((a, b)).or_insert(0);
            bump(c);
            if *c == 0 {
                self.joint.remove(&(a, b));
            }
        }
        bump(&mut self.total);
    }

    /// Applies a diff stream. Entries for vertices outside `A ++ B` are
    /// skipped. On error the state is left partially updated and should be
    /// rebuilt.
    pub fn incremental_apply(&mut self, diff: &SampleDiff) -> Result<()> {
        if diff.chains_before != self.chains.len() {
            return Err(Error::ChainCountMismatch {
                expected: self.chains.len(),
                got: diff.chains_before,
            });
        }
        let width = self.positions.len();
        if diff.chains_after > self.chains.len() {
            self.chains.resize(diff.chains_after, vec![None; width]);
        }
        for e in &diff.entries {
            let Some(&p) = self.positions.get(&e.vertex) else {
                continue;
            };
            let inconsistent = Error::DiffInconsistent {
                chain: e.chain,
                vertex: e.vertex,
            };
            if e.chain >= self.chains.len() || self.chains[e.chain][p] != e.old {
                return Err(inconsistent);
            }
            self.add(e.chain, -1);
            self.chains[e.chain][p] = e.new;
            self.add(e.chain, 1);
        }
        for (i, c) in self.chains.iter().enumerate().skip(diff.chains_after) {
            if let Some(p) = c.iter().position(Option::is_some) {
                let vertex = *self
                    .positions
                    .iter()
                    .find(|&(_, &j)| j == p)
                    .expect("position of a variable")
                    .0;
                return Err(Error::DiffInconsistent { chain: i, vertex });
            }
        }
        self.chains.truncate(diff.chains_after);
        Ok(())
    }

    /// The estimate vector of length `q^|A|`.
    pub fn estimate(&self) -> Result<Vec<f64>> {
        if self.total == 0 {
            return Err(Error::NoSamples);
        }
        let k = self.query.dimension(self.q);
        let total = self.total as f64;
        match self.query.kind {
            QueryKind::Marginal => Ok(self.counts.iter().map(|&c| c as f64 / total).collect()),
            QueryKind::Posterior => {
                let b = config_index(&self.query.tau_b, self.q);
                let col: Vec<u64> = (0..k)
                    .map(|a| self.joint.get(&(a, b)).copied().unwrap_or(0))
                    .collect();
                let sum: u64 = col.iter().sum();
                if sum == 0 {
                    return Err(Error::EmptyPosteriorCondition);
                }
                Ok(col.iter().map(|&c| c as f64 / sum as f64).collect())
            }
            QueryKind::Map => {
                let mut best = vec![0u64; k];
                for (&(a, _), &c) in &self.joint {
                    best[a] = best[a].max(c);
                }
                Ok(best.iter().map(|&c| c as f64 / total).collect())
            }
        }
    }
}
