//! Static Gibbs sampling into execution logs.
//!
//! Randomness is consumed per step in a fixed order: one `below(n)` draw for
//! the vertex (over vertices in ascending id), then one uniform for the spin
//! by inverse CDF over the conditional marginal.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec_log::{ExecutionLog, Transition};
use crate::mrf::{normalize_log_weights, MrfInstance, Neighbor, Spin, VertexId};
use crate::rng::ChainRng;
use crate::schedule::PowerLaw;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    /// Contraction gap `delta` of the instance family.
    pub delta: f64,
    /// Target error `eps(n)` per sample.
    pub eps: PowerLaw,
    pub seed: u64,
    /// Fixed chain length, bypassing the mixing bound.
    pub length_override: Option<usize>,
}

impl ChainParams {
    /// `delta` must lie in `(0, 1]`.
    pub fn new(delta: f64, eps: PowerLaw, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        Ok(Self {
            delta,
            eps,
            seed,
            length_override: None,
        })
    }

    pub fn with_length(mut self, t: usize) -> Self {
        self.length_override = Some(t);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        let fresh = Self::new(delta, self.eps, self.seed)?;
        self.delta = fresh.delta;
        Ok(self)
    }
}

/// `T(n) = ceil((n / delta) ln(n / eps(n)))`, or the override if set. Never
/// negative: an error level at or above `n` gives length 0.
pub fn mixing_length(n: usize, params: &ChainParams) -> usize {
    if let Some(t) = params.length_override {
        return t;
    }
    if n == 0 {
        return 0;
    }
    let nf = n as f64;
    let t = (nf / params.delta * (nf / params.eps.eval(n)).ln()).ceil();
    if t <= 0.0 {
        0
    } else {
        t as usize
    }
}

/// Scratch space for one Gibbs step.
#[derive(Debug, Default, Clone)]
pub(crate) struct StepBuf {
    tau: Vec<Spin>,
    w: Vec<f64>,
}

impl StepBuf {
    /// Picks a vertex and resamples it given neighbor spins from `spin_of`.
    /// Returns the dense index of the vertex and its new spin.
    #[inline]
    pub fn step(
        &mut self,
        inst: &MrfInstance,
        rng: &mut ChainRng,
        mut spin_of: impl FnMut(&Neighbor) -> Spin,
    ) -> Result<(usize, Spin)> {
        let i = rng.below(inst.num_vertices());
        let view = inst.local_at(i);
        self.tau.clear();
        self.tau.extend(view.neighbors().iter().map(&mut spin_of));
        view.log_weights_into(&self.tau, &mut self.w);
        if !normalize_log_weights(&mut self.w) {
            return Err(Error::InfeasibleInstance(view.vertex()));
        }
        Ok((i, rng.categorical(&self.w)))
    }
}

/// Greedy feasible start: vertices in ascending id order each take the first
/// spin with positive weight given already assigned neighbors (unassigned
/// neighbors are ignored). Soft models and hardcore start at all zeros.
pub fn default_initial(inst: &MrfInstance) -> Result<Vec<Spin>> {
    let n = inst.num_vertices();
    let q = inst.q();
    let mut state: Vec<Option<Spin>> = vec![None; n];
    for i in 0..n {
        let view = inst.local_at(i);
        let c = (0..q).find(|&c| {
            let mut w = view.potential().get(c);
            for nb in view.neighbors() {
                if let Some(s) = state[nb.index] {
                    w += nb.potential.get(s, c);
                }
            }
            w > f64::NEG_INFINITY
        });
        match c {
            Some(c) => state[i] = Some(c),
            None => return Err(Error::InfeasibleInstance(view.vertex())),
        }
    }
    Ok(state.into_iter().map(|s| s.expect("assigned")).collect())
}

/// Simulates `steps` Gibbs steps on the dense `state`.
pub(crate) fn simulate_dense(
    inst: &MrfInstance,
    state: &mut [Spin],
    steps: usize,
    rng: &mut ChainRng,
) -> Result<Vec<Transition>> {
    let mut out = Vec::with_capacity(steps);
    if inst.num_vertices() == 0 {
        return Ok(out);
    }
    let mut buf = StepBuf::default();
    let ids = inst.vertex_ids();
    for _ in 0..steps {
        let (i, c) = buf.step(inst, rng, |nb| state[nb.index])?;
        state[i] = c;
        out.push(Transition::new(ids[i], c));
    }
    Ok(out)
}

/// Simulates `steps` Gibbs steps on a sparse state, reporting every write
/// together with the value it replaced.
pub(crate) fn simulate_sparse(
    inst: &MrfInstance,
    state: &mut BTreeMap<VertexId, Spin>,
    steps: usize,
    rng: &mut ChainRng,
    mut on_write: impl FnMut(VertexId, Option<Spin>),
) -> Result<Vec<Transition>> {
    let mut out = Vec::with_capacity(steps);
    if inst.num_vertices() == 0 {
        return Ok(out);
    }
    let mut buf = StepBuf::default();
    let ids = inst.vertex_ids();
    for _ in 0..steps {
        let (i, c) = buf.step(inst, rng, |nb| state[&nb.id])?;
        let v = ids[i];
        let old = state.insert(v, c);
        on_write(v, old);
        out.push(Transition::new(v, c));
    }
    Ok(out)
}

/// Runs a chain of length `mixing_length(n)` on stream 0 of `params.seed`.
pub fn run_chain(inst: &MrfInstance, params: &ChainParams) -> Result<ExecutionLog> {
    Ok(Chain::generate(inst, params, 0)?.log)
}

/// Fits `log` (valid for `inst`) to length `new_t`: truncates, or appends
/// fresh Gibbs steps on `inst`. Returns the vertices whose final spin may
/// have changed.
pub fn length_fix(
    inst: &MrfInstance,
    log: &mut ExecutionLog,
    new_t: usize,
    rng: &mut ChainRng,
) -> Result<Vec<VertexId>> {
    let t = log.len();
    if new_t <= t {
        return Ok(log.truncate(new_t));
    }
    let mut state = log.final_state();
    let mut touched = Vec::new();
    let trs = simulate_sparse(inst, &mut state, new_t - t, rng, |v, _| touched.push(v))?;
    log.append_all(&trs)?;
    touched.sort_unstable();
    touched.dedup();
    Ok(touched)
}

/// `X_T` of the log.
pub fn extract_sample(log: &ExecutionLog) -> BTreeMap<VertexId, Spin> {
    log.final_state()
}

/// Change of one coordinate of a maintained sample. `None` means the vertex
/// is absent on that side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleChange {
    pub vertex: VertexId,
    pub old: Option<Spin>,
    pub new: Option<Spin>,
}

/// One Gibbs chain: its execution log, an explicit copy of its final sample,
/// and its private random stream.
#[derive(Debug, Clone)]
pub struct Chain {
    pub(crate) log: ExecutionLog,
    pub(crate) sample: BTreeMap<VertexId, Spin>,
    pub(crate) rng: ChainRng,
    stream: u64,
    touched: BTreeMap<VertexId, Option<Spin>>,
}

impl Chain {
    /// Fresh chain of length `mixing_length(n)` from the default initial
    /// state, on stream `stream` of `params.seed`.
    pub fn generate(inst: &MrfInstance, params: &ChainParams, stream: u64) -> Result<Self> {
        let rng = ChainRng::new(params.seed, stream);
        let x0 = default_initial(inst)?;
        let t = mixing_length(inst.num_vertices(), params);
        Self::from_dense(inst, x0, t, rng, stream)
    }

    /// Fresh chain of length `t` from `x0` (which must cover `inst`'s
    /// vertices) using `rng`.
    pub fn from_initial(
        inst: &MrfInstance,
        x0: &BTreeMap<VertexId, Spin>,
        t: usize,
        rng: ChainRng,
        stream: u64,
    ) -> Result<Self> {
        let dense = inst
            .vertex_ids()
            .iter()
            .map(|v| x0.get(v).copied().ok_or(Error::UnknownVertex(*v)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_dense(inst, dense, t, rng, stream)
    }

    fn from_dense(
        inst: &MrfInstance,
        x0: Vec<Spin>,
        t: usize,
        mut rng: ChainRng,
        stream: u64,
    ) -> Result<Self> {
        let ids = inst.vertex_ids();
        let initial: Vec<(VertexId, Spin)> = ids.iter().copied().zip(x0.iter().copied()).collect();
        let mut state = x0;
        let trs = simulate_dense(inst, &mut state, t, &mut rng)?;
        let log = ExecutionLog::from_transitions(initial, &trs)?;
        let sample = ids.iter().copied().zip(state).collect();
        Ok(Self {
            log,
            sample,
            rng,
            stream,
            touched: BTreeMap::new(),
        })
    }

    pub fn log(&self) -> &ExecutionLog {
        &self.log
    }

    /// The final sample `X_T`, kept current across updates.
    pub fn sample(&self) -> &BTreeMap<VertexId, Spin> {
        &self.sample
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn rng_mut(&mut self) -> &mut ChainRng {
        &mut self.rng
    }

    /// Sets one coordinate of the maintained sample, remembering the value
    /// it had before the first change since the last [`Self::take_diff`].
    pub(crate) fn set_sample(&mut self, v: VertexId, value: Option<Spin>) {
        let old = match value {
            Some(c) => self.sample.insert(v, c),
            None => self.sample.remove(&v),
        };
        self.touched.entry(v).or_insert(old);
    }

    /// Re-reads the final spin of `vertices` from the log.
    pub(crate) fn refresh(&mut self, vertices: &[VertexId]) {
        for &v in vertices {
            let value = self
                .log
                .contains_vertex(v)
                .then(|| self.log.evaluate(self.log.len(), v).expect("known vertex"));
            if self.sample.get(&v).copied() != value {
                self.set_sample(v, value);
            }
        }
    }

    /// Coordinates whose value changed since the previous call, ascending.
    pub fn take_diff(&mut self) -> Vec<SampleChange> {
        let touched = std::mem::take(&mut self.touched);
        touched
            .into_iter()
            .filter_map(|(v, old)| {
                let new = self.sample.get(&v).copied();
                (old != new).then_some(SampleChange { vertex: v, old, new })
            })
            .collect()
    }

    /// LengthFix on the chain, reading and writing the explicit sample so
    /// that extension costs `O(steps)` rather than `O(n)`.
    pub fn length_fix(&mut self, inst: &MrfInstance, new_t: usize) -> Result<()> {
        let t = self.log.len();
        if new_t <= t {
            let touched = self.log.truncate(new_t);
            self.refresh(&touched);
            return Ok(());
        }
        let mut sample = std::mem::take(&mut self.sample);
        let mut first: Vec<(VertexId, Option<Spin>)> = Vec::new();
        let result = simulate_sparse(inst, &mut sample, new_t - t, &mut self.rng, |v, old| {
            first.push((v, old))
        });
        self.sample = sample;
        let trs = result?;
        for (v, old) in first {
            self.touched.entry(v).or_insert(old);
        }
        self.log.append_all(&trs)
    }

    /// Discards the log and runs a fresh chain of length `t` on `inst` from
    /// the default initial state, continuing this chain's stream.
    pub fn regenerate(&mut self, inst: &MrfInstance, t: usize) -> Result<()> {
        let x0 = default_initial(inst)?;
        let rng = self.rng.clone();
        let fresh = Self::from_dense(inst, x0, t, rng, self.stream)?;
        let old: Vec<VertexId> = self.sample.keys().copied().collect();
        for v in old {
            if !fresh.sample.contains_key(&v) {
                self.set_sample(v, None);
            }
        }
        for (&v, &c) in &fresh.sample {
            if self.sample.get(&v) != Some(&c) {
                self.set_sample(v, Some(c));
            }
        }
        self.log = fresh.log;
        self.rng = fresh.rng;
        Ok(())
    }

    /// True if the maintained sample equals the log's final state.
    pub fn sample_is_consistent(&self) -> bool {
        self.sample == self.log.final_state()
    }
}
