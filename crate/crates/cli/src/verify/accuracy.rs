//! Empirical law of the maintained samples against the exact Gibbs
//! distribution after a stream of in-regime updates.

use dyngibbs::models::{self, regime_delta, Model};
use dyngibbs::oracle::{empirical, exact_gibbs, exact_tv};
use dyngibbs::{ChainParams, ChainRng, ChainSet, PowerLaw};

use super::gen::{random_ising_batch, IsingBatchSpec};
use super::{verdict, Outcome, VerifyOptions};

const N_VERTICES: usize = 6;
const EPS: f64 = 0.05;
const BATCHES: usize = 20;
const BETA_MAX: f64 = 0.35;

pub fn check(opts: &VerifyOptions) -> Outcome {
    let chains = if opts.quick { 5_000 } else { 20_000 };
    let inst = models::ising_cycle(N_VERTICES, 0.2, 0.0)?;
    // Degrees stay at most 2, so every instance contracts at least this fast.
    let delta = 1.0 - 2.0 * BETA_MAX.tanh();
    let params = ChainParams::new(delta, PowerLaw::constant(EPS)?, opts.seed)?;
    let mut set = ChainSet::new(&inst, params, PowerLaw::constant(chains as f64)?)?;
    let mut rng = ChainRng::new(opts.seed, 4);
    let mut min_delta = f64::INFINITY;
    for _ in 0..BATCHES {
        let spec = IsingBatchSpec {
            potentials: 1 + rng.below(3),
            edges: rng.below(2),
            beta_max: BETA_MAX,
            field_max: 0.5,
            max_degree: 2,
        };
        let batch = random_ising_batch(set.instance(), &mut rng, spec);
        let new = set.instance().apply(&batch)?;
        let d = regime_delta(Model::Ising, &new)?;
        min_delta = min_delta.min(d);
        if d < delta - 1e-12 {
            anyhow::bail!("generated instance left the regime: delta {d} < {delta}");
        }
        set.apply_instance(&new)?;
    }
    let fin = set.instance();
    let tv = exact_tv(&empirical(fin, &set.samples())?, &exact_gibbs(fin)?)?;
    let states = fin.q().pow(fin.num_vertices() as u32) as f64;
    let bound = EPS + 2.0 * (states / chains as f64).sqrt();
    Ok((
        verdict(tv <= bound),
        format!(
            "n={N_VERTICES} Ising, {BATCHES} batches, {chains} chains, TV {tv:.4} <= {bound:.4} (min delta {min_delta:.3})"
        ),
    ))
}
