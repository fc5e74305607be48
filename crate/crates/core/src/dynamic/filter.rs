use std::collections::BTreeMap;

use crate::error::Result;
use crate::exec_log::ExecutionLog;
use crate::mrf::VertexId;
use crate::rng::{bernoulli_positions, ChainRng};

/// Steps that may need a correction during a potential update: every step
/// of vertex `v` is included independently with probability `pbar[v]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilterSet {
    steps: Vec<usize>,
    pbar: BTreeMap<VertexId, f64>,
}

impl FilterSet {
    /// Ranks in ascending order.
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Inclusion probability of the steps of `v` (0 if unchanged).
    pub fn pbar(&self, v: VertexId) -> f64 {
        self.pbar.get(&v).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, t: usize) -> bool {
        self.steps.binary_search(&t).is_ok()
    }
}

/// Samples the filter set by geometric skipping over each vertex's steps, so
/// the cost is proportional to the output plus the number of vertices with a
/// positive `pbar`. Vertices are visited in ascending id.
pub fn build_filter(
    log: &ExecutionLog,
    pbar: &BTreeMap<VertexId, f64>,
    rng: &mut ChainRng,
) -> Result<FilterSet> {
    let mut steps = Vec::new();
    let mut kept = BTreeMap::new();
    for (&v, &p) in pbar {
        if p <= 0.0 {
            continue;
        }
        kept.insert(v, p);
        let k = log.vertex_len(v)?;
        for j in bernoulli_positions(rng, k, p) {
            steps.push(log.vertex_kth(v, j - 1)?);
        }
    }
    steps.sort_unstable();
    Ok(FilterSet { steps, pbar: kept })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec_log::Transition;

    fn log_of(n: u64, t: usize) -> ExecutionLog {
        let trs: Vec<Transition> = (0..t)
            .map(|i| Transition::new(VertexId(i as u64 % n), 0))
            .collect();
        ExecutionLog::from_transitions((0..n).map(|v| (VertexId(v), 0)), &trs).unwrap()
    }

    #[test]
    fn zero_and_one() {
        let log = log_of(3, 30);
        let mut rng = ChainRng::new(1, 0);
        let zero: BTreeMap<_, _> = (0..3).map(|v| (VertexId(v), 0.0)).collect();
        assert!(build_filter(&log, &zero, &mut rng).unwrap().is_empty());
        let one: BTreeMap<_, _> = (0..3).map(|v| (VertexId(v), 1.0)).collect();
        let f = build_filter(&log, &one, &mut rng).unwrap();
        assert_eq!(f.steps(), (1..=30).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn only_selected_vertex_steps() {
        let log = log_of(3, 300);
        let mut rng = ChainRng::new(2, 0);
        let pbar: BTreeMap<_, _> = [(VertexId(1), 0.5)].into();
        let f = build_filter(&log, &pbar, &mut rng).unwrap();
        assert!(!f.is_empty());
        for &t in f.steps() {
            assert_eq!(log.get(t).unwrap().vertex, VertexId(1));
        }
        assert_eq!(f.pbar(VertexId(1)), 0.5);
        assert_eq!(f.pbar(VertexId(0)), 0.0);
    }
}
