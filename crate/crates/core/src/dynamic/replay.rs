//! Coupled replay of an execution log.
//!
//! The log holds the old chain `X`. Ranks up to the frontier `t0` have been
//! rewritten to the new chain `Y`; ranks after it still hold `X`. Outside the
//! disagreement set `D` both chains agree, so a neighbor spin is read from the
//! log unless the neighbor is in `D`, whose `(x, y)` values are cached.
//!
//! Only steps that can differ are visited: steps of vertices in `D` or next to
//! it, filter steps (potential updates) and steps of affected vertices (edge
//! updates). They are found through a min-heap of ranks fed by successor
//! probes; entries that went stale are dropped when popped.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use super::filter::FilterSet;
use crate::coupling::{correction_from_marginals, maximal_couple_conditional};
use crate::error::{Error, Result};
use crate::exec_log::ExecutionLog;
use crate::mrf::{MrfInstance, Spin, VertexId};
use crate::rng::ChainRng;

/// What a replay did: the number of visited steps and the final
/// disagreements as `vertex -> (x, y)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayReport {
    pub visited: usize,
    pub disagreements: BTreeMap<VertexId, (Spin, Spin)>,
}

pub(crate) enum Rule<'a> {
    Hamiltonian(&'a FilterSet),
    Edge(&'a BTreeSet<VertexId>),
}

struct State<'a> {
    log: &'a ExecutionLog,
    d: BTreeMap<VertexId, (Spin, Spin)>,
    near: BTreeMap<VertexId, u32>,
    heap: BinaryHeap<Reverse<usize>>,
}

impl State<'_> {
    fn in_gamma_plus(&self, w: VertexId) -> bool {
        self.d.contains_key(&w) || self.near.contains_key(&w)
    }

    fn x_at(&self, t: usize, u: VertexId) -> Result<Spin> {
        match self.d.get(&u) {
            Some(&(x, _)) => Ok(x),
            None => self.log.evaluate(t, u),
        }
    }

    fn y_at(&self, t: usize, u: VertexId) -> Result<Spin> {
        match self.d.get(&u) {
            Some(&(_, y)) => Ok(y),
            None => self.log.evaluate(t, u),
        }
    }

    fn push_next(&mut self, t: usize, u: VertexId) -> Result<()> {
        if let Some(r) = self.log.successor(t, u)? {
            self.heap.push(Reverse(r));
        }
        Ok(())
    }
}

fn marginal_with(
    inst: &MrfInstance,
    w: VertexId,
    mut spin: impl FnMut(VertexId) -> Result<Spin>,
    tau: &mut Vec<Spin>,
) -> Result<Vec<f64>> {
    let view = inst.local(w)?;
    tau.clear();
    for nb in view.neighbors() {
        tau.push(spin(nb.id)?);
    }
    view.marginal(tau)
}

/// Rewrites `log` from a chain for `old` into a chain for `new`. Neighbor
/// structure for the disagreement frontier is taken from `new`.
pub(crate) fn replay(
    old: &MrfInstance,
    new: &MrfInstance,
    rule: Rule<'_>,
    log: &mut ExecutionLog,
    rng: &mut ChainRng,
    mut trace: Option<&mut Vec<usize>>,
) -> Result<ReplayReport> {
    let filter_steps: &[usize] = match &rule {
        Rule::Hamiltonian(f) => f.steps(),
        Rule::Edge(_) => &[],
    };
    let mut st = State {
        log: &*log,
        d: BTreeMap::new(),
        near: BTreeMap::new(),
        heap: BinaryHeap::new(),
    };
    if let Rule::Edge(s) = &rule {
        for &u in s.iter() {
            st.push_next(0, u)?;
        }
    }
    // Rewrites are deferred to the end. This is safe: a vertex whose latest
    // step is pending a rewrite has x != y there, so it sits in D and its
    // spin is read from the cache, never from the log.
    let mut writes: Vec<(usize, Spin)> = Vec::new();
    let mut fi = 0;
    let mut t0 = 0;
    let mut visited = 0;
    let mut tau = Vec::new();

    loop {
        let h = st.heap.peek().map(|r| r.0);
        let f = filter_steps.get(fi).copied();
        let t = match (h, f) {
            (None, None) => break,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        if h == Some(t) {
            st.heap.pop();
        }
        let in_p = f == Some(t);
        if in_p {
            fi += 1;
        }
        if t <= t0 {
            continue;
        }
        t0 = t;

        let tr = st.log.get(t)?;
        let (w, x) = (tr.vertex, tr.spin);
        let in_s = matches!(&rule, Rule::Edge(s) if s.contains(&w));
        if !(in_p || in_s || st.in_gamma_plus(w)) {
            continue;
        }
        visited += 1;
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(t);
        }

        let y = if in_s {
            // Affected vertex: fresh draw from the new conditional.
            let nu = marginal_with(new, w, |u| st.y_at(t - 1, u), &mut tau)?;
            rng.categorical(&nu)
        } else {
            // Entries of D always disagree, so the boundaries differ exactly
            // when some neighbor is in D.
            let differs = old.neighbors(w)?.iter().any(|nb| st.d.contains_key(&nb.id));
            let mut y = x;
            if differs {
                let mu = marginal_with(old, w, |u| st.x_at(t - 1, u), &mut tau)?;
                let nu = marginal_with(old, w, |u| st.y_at(t - 1, u), &mut tau)?;
                y = maximal_couple_conditional(&mu, &nu, x, rng)?;
            }
            if in_p {
                if let Rule::Hamiltonian(filter) = &rule {
                    let mu = marginal_with(old, w, |u| st.y_at(t - 1, u), &mut tau)?;
                    let mu_new = marginal_with(new, w, |u| st.y_at(t - 1, u), &mut tau)?;
                    let kernel = correction_from_marginals(&mu, &mu_new);
                    let pbar = filter.pbar(w);
                    let p = kernel.p[y];
                    debug_assert!(p <= pbar + 1e-9, "correction probability above its bound");
                    if pbar > 0.0 && rng.bernoulli(p / pbar) {
                        let nu = kernel.nu.as_ref().expect("positive correction implies a residual");
                        y = rng.categorical(nu);
                    }
                }
            }
            y
        };

        if y != x {
            writes.push((t, y));
        }
        let was_in = st.d.contains_key(&w);
        if x != y {
            st.d.insert(w, (x, y));
            if !was_in {
                for nb in new.neighbors(w)? {
                    *st.near.entry(nb.id).or_insert(0) += 1;
                    st.push_next(t, nb.id)?;
                }
            }
        } else if was_in {
            st.d.remove(&w);
            for nb in new.neighbors(w)? {
                match st.near.get_mut(&nb.id) {
                    Some(c) if *c > 1 => *c -= 1,
                    _ => {
                        st.near.remove(&nb.id);
                    }
                }
            }
        }
        if in_s || st.in_gamma_plus(w) {
            st.push_next(t, w)?;
        }
    }
    let disagreements = st.d;
    for (t, y) in writes {
        log.change(t, y)?;
    }
    Ok(ReplayReport {
        visited,
        disagreements,
    })
}

/// Checks that `old` and `new` differ only in potentials.
pub(crate) fn check_same_graph(old: &MrfInstance, new: &MrfInstance) -> Result<()> {
    if old.same_graph(new) {
        Ok(())
    } else {
        Err(Error::GraphMismatch)
    }
}
