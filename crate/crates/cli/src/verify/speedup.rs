//! Dynamic update wall time against regenerating every chain.

use dyngibbs::models;
use dyngibbs::{ChainParams, ChainRng, PowerLaw};

use super::gen::{random_ising_batch, IsingBatchSpec};
use super::{Outcome, Status, VerifyOptions};
use crate::commands::{bench_prepared, Prepared};
use crate::config::DeltaSource;

const TARGET_RATIO: f64 = 0.2;
const BETA: f64 = 0.05;

pub fn check(opts: &VerifyOptions) -> Outcome {
    let (n, chains, batches) = if opts.quick { (2_000, 20, 2) } else { (10_000, 100, 3) };
    let l = 10;
    let mut rng = ChainRng::new(opts.seed, 6);
    let g = models::random_bounded_degree(n, 3 * n / 2, 4, &mut rng);
    let inst = models::ising(&g, BETA, 0.0)?;
    let delta = 1.0 - 4.0 * BETA.tanh();
    let mut cur = inst.clone();
    let mut list = Vec::with_capacity(batches);
    for _ in 0..batches {
        let spec = IsingBatchSpec {
            potentials: l / 2,
            edges: l - l / 2,
            beta_max: BETA,
            field_max: 0.05,
            max_degree: 4,
        };
        let b = random_ising_batch(&cur, &mut rng, spec);
        cur = cur.apply(&b)?;
        list.push(b);
    }
    let prep = Prepared {
        instance: inst,
        batches: list,
        queries: Vec::new(),
        params: ChainParams::new(delta, PowerLaw::constant(0.1)?, opts.seed)?,
    };
    let report = bench_prepared(&prep, PowerLaw::constant(chains as f64)?, &DeltaSource::Given(delta))?;
    let ratio = report.ratio;
    let status = if ratio <= TARGET_RATIO { Status::Pass } else { Status::Warn };
    Ok((
        status,
        format!(
            "n={n}, N={chains}, L={l}, T={}: dynamic {:.1} ms vs regeneration {:.1} ms over {batches} updates, ratio {ratio:.4} (target <= {TARGET_RATIO})",
            report.chain_length, report.dynamic_total_ms, report.baseline_total_ms
        ),
    ))
}
