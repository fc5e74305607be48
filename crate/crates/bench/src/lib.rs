//! Fixtures shared by the benchmarks.

use dyngibbs::models::{ising, random_bounded_degree};
use dyngibbs::{ChainParams, ChainRng, ExecutionLog, MrfInstance, PowerLaw, UpdateBatch, VertexId};
use dyngibbs_cli::verify::gen::{random_ising_batch, IsingBatchSpec};

pub const MAX_DEGREE: usize = 4;
pub const BETA: f64 = 0.1;

/// Sparse high-temperature Ising model on `n` vertices with about `n` edges.
pub fn ising_instance(n: usize, seed: u64) -> MrfInstance {
    let mut rng = ChainRng::new(seed, 0);
    let g = random_bounded_degree(n, n, MAX_DEGREE, &mut rng);
    ising(&g, BETA, 0.0).expect("valid Ising parameters")
}

/// Chain parameters with the closed-form gap for the fixture family.
pub fn params(seed: u64) -> ChainParams {
    let delta = 1.0 - MAX_DEGREE as f64 * BETA.tanh();
    ChainParams::new(delta, PowerLaw::constant(0.05).expect("positive"), seed).expect("valid delta")
}

/// `l` potential changes plus `l` edge insertions or deletions.
pub fn mixed_batch(inst: &MrfInstance, l: usize, seed: u64) -> UpdateBatch {
    let mut rng = ChainRng::new(seed, 1);
    random_ising_batch(
        inst,
        &mut rng,
        IsingBatchSpec {
            potentials: l,
            edges: l,
            beta_max: BETA,
            field_max: 0.2,
            max_degree: MAX_DEGREE,
        },
    )
}

/// A log of `len` uniformly random transitions over `n` binary vertices.
pub fn random_log(n: usize, len: usize, seed: u64) -> ExecutionLog {
    let mut rng = ChainRng::new(seed, 2);
    let mut log = ExecutionLog::new((0..n as u64).map(|v| (VertexId(v), 0)));
    for _ in 0..len {
        log.push(VertexId(rng.below(n) as u64), rng.below(2)).expect("known vertex");
    }
    log
}
