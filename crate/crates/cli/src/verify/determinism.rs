//! Two runs with the same seed write identical bytes, whatever the thread
//! count.

use std::fs;
use std::path::Path;

use super::{verdict, Outcome, VerifyOptions};
use crate::commands::{cmd_run, ESTIMATES_FILE, FINAL_INSTANCE_FILE, SAMPLES_FILE, STEPS_FILE};
use crate::config::{parse_schedule, DeltaSource, RunConfig};

const INSTANCE: &str = include_str!("../../fixtures/ising_cycle6.json");
const UPDATES: &str = include_str!("../../fixtures/ising_cycle6.updates.jsonl");
const QUERIES: &str = include_str!("../../fixtures/ising_cycle6.queries.json");

fn config(dir: &Path, out: &str, seed: u64, threads: usize) -> anyhow::Result<RunConfig> {
    Ok(RunConfig {
        instance: dir.join("instance.json"),
        updates: Some(dir.join("updates.jsonl")),
        schedule: parse_schedule("N=200,eps=0.05")?,
        delta: DeltaSource::Check,
        seed,
        queries: Some(dir.join("queries.json")),
        out: dir.join(out),
        threads: Some(threads),
    })
}

fn outputs(cfg: &RunConfig) -> anyhow::Result<Vec<Vec<u8>>> {
    [ESTIMATES_FILE, STEPS_FILE, SAMPLES_FILE, FINAL_INSTANCE_FILE]
        .iter()
        .map(|f| Ok(fs::read(cfg.out.join(f))?))
        .collect()
}

pub fn check(opts: &VerifyOptions) -> Outcome {
    let dir = tempfile::tempdir()?;
    fs::write(dir.path().join("instance.json"), INSTANCE)?;
    fs::write(dir.path().join("updates.jsonl"), UPDATES)?;
    fs::write(dir.path().join("queries.json"), QUERIES)?;
    let a = config(dir.path(), "a", opts.seed, 1)?;
    let b = config(dir.path(), "b", opts.seed, 3)?;
    let c = config(dir.path(), "c", opts.seed + 1, 1)?;
    for cfg in [&a, &b, &c] {
        cmd_run(cfg)?;
    }
    let (oa, ob, oc) = (outputs(&a)?, outputs(&b)?, outputs(&c)?);
    let bytes: usize = oa.iter().map(Vec::len).sum();
    let same = oa == ob;
    let seed_matters = oa != oc;
    Ok((
        verdict(same && seed_matters),
        format!(
            "fixture run twice (1 and 3 threads): {} ({bytes} bytes); other seed differs: {seed_matters}",
            if same { "byte-identical" } else { "outputs differ" }
        ),
    ))
}
