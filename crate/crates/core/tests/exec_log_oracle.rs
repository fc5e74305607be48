//! The execution log against a plain vector with linear scans.

use std::collections::BTreeMap;

use dyngibbs::exec_log::{ExecutionLog, Transition};
use dyngibbs::{ChainRng, Spin, VertexId};
use proptest::prelude::*;

struct Naive {
    initial: BTreeMap<VertexId, Spin>,
    steps: Vec<Transition>,
}

impl Naive {
    fn evaluate(&self, t: usize, v: VertexId) -> Spin {
        self.steps[..t.min(self.steps.len())]
            .iter()
            .rev()
            .find(|s| s.vertex == v)
            .map_or(self.initial[&v], |s| s.spin)
    }

    fn successor(&self, t: usize, v: VertexId) -> Option<usize> {
        (t + 1..=self.steps.len()).find(|&i| self.steps[i - 1].vertex == v)
    }

    fn predecessor(&self, t: usize, v: VertexId) -> Option<usize> {
        (1..=t.min(self.steps.len())).rev().find(|&i| self.steps[i - 1].vertex == v)
    }
}

fn run_workload(ops: usize, n: u64, q: usize, seed: u64) {
    let mut rng = ChainRng::new(seed, 0);
    let initial: BTreeMap<VertexId, Spin> = (0..n).map(|i| (VertexId(i), rng.below(q))).collect();
    let mut log = ExecutionLog::new(initial.clone());
    let mut naive = Naive {
        initial,
        steps: Vec::new(),
    };
    for _ in 0..ops {
        let len = naive.steps.len();
        let v = VertexId(rng.below(n as usize) as u64);
        let c = rng.below(q);
        match rng.below(100) {
            0..=34 => {
                let t = rng.below(len + 1) + 1;
                log.insert(t, v, c).unwrap();
                naive.steps.insert(t - 1, Transition::new(v, c));
            }
            35..=49 if len > 0 => {
                let t = rng.below(len) + 1;
                assert_eq!(log.remove(t).unwrap(), naive.steps.remove(t - 1));
            }
            50..=59 if len > 0 => {
                let t = rng.below(len) + 1;
                assert_eq!(log.change(t, c).unwrap(), naive.steps[t - 1].spin);
                naive.steps[t - 1].spin = c;
            }
            60..=74 => {
                let t = rng.below(len + 2);
                assert_eq!(log.evaluate(t, v).unwrap(), naive.evaluate(t, v));
            }
            75..=84 => {
                let t = rng.below(len + 1);
                assert_eq!(log.successor(t, v).unwrap(), naive.successor(t, v));
                assert_eq!(log.predecessor(t, v).unwrap(), naive.predecessor(t, v));
            }
            85..=89 if len > 0 => {
                let t = rng.below(len) + 1;
                assert_eq!(log.get(t).unwrap(), naive.steps[t - 1]);
            }
            90..=91 => {
                let m = len - rng.below(len.min(20) + 1);
                log.truncate(m);
                naive.steps.truncate(m);
            }
            92..=93 => {
                let extra: Vec<Transition> = (0..rng.below(30))
                    .map(|_| Transition::new(VertexId(rng.below(n as usize) as u64), rng.below(q)))
                    .collect();
                log.append_all(&extra).unwrap();
                naive.steps.extend(extra);
            }
            94 => {
                let count = naive.steps.iter().filter(|s| s.vertex == v).count();
                assert_eq!(log.vertex_len(v).unwrap(), count);
                if count > 0 {
                    let j = rng.below(count);
                    let rank = naive
                        .steps
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.vertex == v)
                        .nth(j)
                        .unwrap()
                        .0
                        + 1;
                    assert_eq!(log.vertex_kth(v, j).unwrap(), rank);
                }
            }
            _ => {
                assert_eq!(log.len(), naive.steps.len());
            }
        }
    }
    assert_eq!(log.transitions(), naive.steps);
    assert_eq!(log.node_count(), naive.steps.len());
    let fin = log.final_state();
    for (&v, &c) in &fin {
        assert_eq!(c, naive.evaluate(naive.steps.len(), v));
    }
}

#[test]
fn hundred_thousand_mixed_operations() {
    run_workload(100_000, 50, 3, 1);
}

#[test]
fn few_vertices_long_runs() {
    run_workload(20_000, 2, 2, 2);
}

#[test]
fn bulk_build_matches_pushes() {
    let mut rng = ChainRng::new(3, 0);
    let trs: Vec<Transition> = (0..5_000)
        .map(|_| Transition::new(VertexId(rng.below(17) as u64), rng.below(4)))
        .collect();
    let init = (0..17).map(|i| (VertexId(i), 0));
    let bulk = ExecutionLog::from_transitions(init.clone(), &trs).unwrap();
    let mut pushed = ExecutionLog::new(init);
    for t in &trs {
        pushed.push(t.vertex, t.spin).unwrap();
    }
    assert_eq!(bulk.transitions(), pushed.transitions());
    for v in 0..17 {
        let v = VertexId(v);
        assert_eq!(bulk.vertex_ranks(v).unwrap(), pushed.vertex_ranks(v).unwrap());
    }
}

proptest! {
    #[test]
    fn insert_then_remove_is_identity(
        steps in prop::collection::vec((0u64..4, 0usize..3), 0..60),
        pos in 0usize..61,
        v in 0u64..4,
        c in 0usize..3,
    ) {
        let trs: Vec<Transition> = steps.iter().map(|&(v, c)| Transition::new(VertexId(v), c)).collect();
        let mut log = ExecutionLog::from_transitions((0..4).map(|i| (VertexId(i), 0)), &trs).unwrap();
        let t = pos.min(trs.len()) + 1;
        log.insert(t, VertexId(v), c).unwrap();
        prop_assert_eq!(log.len(), trs.len() + 1);
        log.remove(t).unwrap();
        prop_assert_eq!(log.transitions(), trs);
    }

    #[test]
    fn evaluate_matches_replay(
        steps in prop::collection::vec((0u64..5, 0usize..3), 0..80),
        t in 0usize..90,
    ) {
        let trs: Vec<Transition> = steps.iter().map(|&(v, c)| Transition::new(VertexId(v), c)).collect();
        let log = ExecutionLog::from_transitions((0..5).map(|i| (VertexId(i), 2)), &trs).unwrap();
        let mut state = [2usize; 5];
        for s in &trs[..t.min(trs.len())] {
            state[s.vertex.0 as usize] = s.spin;
        }
        for v in 0..5 {
            prop_assert_eq!(log.evaluate(t, VertexId(v)).unwrap(), state[v as usize]);
        }
    }
}
