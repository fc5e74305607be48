//! Mixed execution-log operations against a vector with linear scans.

use std::collections::BTreeMap;
use std::time::Instant;

use dyngibbs::{ChainRng, ExecutionLog, Spin, Transition, VertexId};

use super::{verdict, Outcome, VerifyOptions};

const TIME_LIMIT_SECS: f64 = 30.0;

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

/// Runs `ops` random operations and returns the number of disagreements.
fn workload(ops: usize, n: usize, q: usize, seed: u64) -> anyhow::Result<usize> {
    let mut rng = ChainRng::new(seed, 0);
    let initial: BTreeMap<VertexId, Spin> = (0..n as u64).map(|i| (VertexId(i), rng.below(q))).collect();
    let mut log = ExecutionLog::new(initial.clone());
    let mut naive = Naive {
        initial,
        steps: Vec::new(),
    };
    let mut bad = 0usize;
    let mut check = |ok: bool| bad += usize::from(!ok);
    for _ in 0..ops {
        let len = naive.steps.len();
        let v = VertexId(rng.below(n) as u64);
        let c = rng.below(q);
        match rng.below(100) {
            0..=34 => {
                let t = rng.below(len + 1) + 1;
                log.insert(t, v, c)?;
                naive.steps.insert(t - 1, Transition::new(v, c));
            }
            35..=49 if len > 0 => {
                let t = rng.below(len) + 1;
                check(log.remove(t)? == naive.steps.remove(t - 1));
            }
            50..=59 if len > 0 => {
                let t = rng.below(len) + 1;
                check(log.change(t, c)? == naive.steps[t - 1].spin);
                naive.steps[t - 1].spin = c;
            }
            60..=74 => {
                let t = rng.below(len + 2);
                check(log.evaluate(t, v)? == naive.evaluate(t, v));
            }
            75..=84 => {
                let t = rng.below(len + 1);
                check(log.successor(t, v)? == naive.successor(t, v));
                check(log.predecessor(t, v)? == naive.predecessor(t, v));
            }
            85..=89 if len > 0 => {
                let t = rng.below(len) + 1;
                check(log.get(t)? == naive.steps[t - 1]);
            }
            90..=91 => {
                let m = len - rng.below(len.min(20) + 1);
                log.truncate(m);
                naive.steps.truncate(m);
            }
            92..=93 => {
                let extra: Vec<Transition> = (0..rng.below(30))
                    .map(|_| Transition::new(VertexId(rng.below(n) as u64), rng.below(q)))
                    .collect();
                log.append_all(&extra)?;
                naive.steps.extend(extra);
            }
            94 => {
                let ranks: Vec<usize> = (1..=len).filter(|&i| naive.steps[i - 1].vertex == v).collect();
                check(log.vertex_len(v)? == ranks.len());
                if !ranks.is_empty() {
                    let j = rng.below(ranks.len());
                    check(log.vertex_kth(v, j)? == ranks[j]);
                }
            }
            _ => check(log.len() == naive.steps.len()),
        }
    }
    check(log.transitions() == naive.steps);
    for (v, c) in log.final_state() {
        check(c == naive.evaluate(naive.steps.len(), v));
    }
    Ok(bad)
}

pub fn check(opts: &VerifyOptions) -> Outcome {
    let ops = if opts.quick { 20_000 } else { 100_000 };
    let start = Instant::now();
    let mismatches = workload(ops, 50, 3, opts.seed)?;
    let secs = start.elapsed().as_secs_f64();
    Ok((
        verdict(mismatches == 0 && secs < TIME_LIMIT_SECS),
        format!("{ops} operations, {mismatches} mismatches, {secs:.2} s (limit {TIME_LIMIT_SECS} s)"),
    ))
}
