//! The `run` and `bench` commands.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::Context;
use dyngibbs::inference::Sample;
use dyngibbs::{
    Chain, ChainParams, ChainSet, EstimatorState, MrfInstance, MultiUpdate, Query, UpdateBatch,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{check_schedule, DeltaSource, RunConfig};
use crate::error::{fail, ExitKind};
use crate::formats::{parse_instance, parse_queries, parse_update_stream, query_to_doc, serialize_instance, QueryDoc};

/// Everything a command needs after reading and validating its inputs.
pub struct Prepared {
    pub instance: MrfInstance,
    pub batches: Vec<UpdateBatch>,
    pub queries: Vec<Query>,
    pub params: ChainParams,
}

fn read(path: &Path, what: &str) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| fail(ExitKind::Usage, format!("cannot read {what} {}: {e}", path.display())))
}

/// Default query when none is given: the marginal of the smallest vertex.
fn default_queries(inst: &MrfInstance) -> Vec<Query> {
    inst.vertex_ids().first().map(|&v| vec![Query::marginal(vec![v])]).unwrap_or_default()
}

pub fn prepare(cfg: &RunConfig) -> anyhow::Result<Prepared> {
    let instance = parse_instance(&read(&cfg.instance, "instance")?)
        .with_context(|| format!("parsing {}", cfg.instance.display()))?;
    let batches = match &cfg.updates {
        Some(p) => parse_update_stream(&read(p, "update stream")?, &instance)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => Vec::new(),
    };
    let queries = match &cfg.queries {
        Some(p) => parse_queries(&read(p, "queries")?, instance.q())
            .with_context(|| format!("parsing {}", p.display()))?,
        None => default_queries(&instance),
    };
    check_schedule(&cfg.schedule, instance.num_vertices())?;
    let delta = cfg.delta.resolve(&instance)?;
    let params = ChainParams::new(delta, cfg.schedule.eps, cfg.seed)?;
    Ok(Prepared {
        instance,
        batches,
        queries,
        params,
    })
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .context("building thread pool")?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

#[derive(Serialize)]
struct EstimateLine<'a> {
    step: usize,
    query: usize,
    kind: &'a str,
    estimate: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct StepLine {
    step: usize,
    chains: usize,
    vertices: usize,
    edges: usize,
    diff: usize,
    r_ham: usize,
    r_graph: usize,
    filter: usize,
    inserted: usize,
    removed: usize,
    dropped: usize,
    appended: usize,
    fallback: bool,
}

#[derive(Serialize)]
struct SampleLine {
    chain: usize,
    sample: Vec<(u64, usize)>,
}

fn kind_name(doc: &QueryDoc) -> &'static str {
    match doc {
        QueryDoc::Marginal { .. } => "marginal",
        QueryDoc::Posterior { .. } => "posterior",
        QueryDoc::Map { .. } => "map",
    }
}

fn write_line(w: &mut impl Write, value: &impl Serialize) -> anyhow::Result<()> {
    serde_json::to_writer(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn write_estimates(
    w: &mut impl Write,
    step: usize,
    queries: &[Query],
    states: &[EstimatorState],
) -> anyhow::Result<()> {
    for (i, (q, st)) in queries.iter().zip(states).enumerate() {
        let (estimate, error) = match st.estimate() {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        };
        write_line(
            w,
            &EstimateLine {
                step,
                query: i,
                kind: kind_name(&query_to_doc(q)),
                estimate,
                error,
            },
        )?;
    }
    Ok(())
}

fn step_line(step: usize, inst: &MrfInstance, chains: usize, up: &MultiUpdate) -> StepLine {
    let m = &up.metrics;
    StepLine {
        step,
        chains,
        vertices: inst.num_vertices(),
        edges: inst.num_edges(),
        diff: up.diff.size(),
        r_ham: m.r_ham,
        r_graph: m.r_graph,
        filter: m.filter_size,
        inserted: m.inserted,
        removed: m.removed,
        dropped: up.dropped,
        appended: up.appended,
        fallback: m.fallback,
    }
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<fs::File>> {
    let path = dir.join(name);
    let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// What `run` wrote.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub steps: usize,
    pub chains: usize,
    pub files: Vec<PathBuf>,
}

pub const ESTIMATES_FILE: &str = "estimates.jsonl";
pub const STEPS_FILE: &str = "steps.jsonl";
pub const SAMPLES_FILE: &str = "samples.jsonl";
pub const FINAL_INSTANCE_FILE: &str = "final_instance.json";
pub const BENCH_FILE: &str = "bench.json";

/// Maintains the chain set and the estimators across the update stream.
///
/// Writes, under `cfg.out`: per-step estimates, per-step replay counters,
/// the final samples and the final instance. Outputs contain no timings, so
/// equal inputs and seed give byte-identical files.
pub fn cmd_run(cfg: &RunConfig) -> anyhow::Result<RunSummary> {
    let prep = prepare(cfg)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    with_threads(cfg.threads, || run_prepared(cfg, &prep))?
}

fn run_prepared(cfg: &RunConfig, prep: &Prepared) -> anyhow::Result<RunSummary> {
    let q = prep.instance.q();
    let mut set = ChainSet::new(&prep.instance, prep.params.clone(), cfg.schedule.count)?;
    let mut states = prep
        .queries
        .iter()
        .map(|query| EstimatorState::rebuild(query, q, &set.samples()))
        .collect::<dyngibbs::Result<Vec<_>>>()?;

    let mut est = create(&cfg.out, ESTIMATES_FILE)?;
    let mut steps = create(&cfg.out, STEPS_FILE)?;
    write_estimates(&mut est, 0, &prep.queries, &states)?;

    for (i, batch) in prep.batches.iter().enumerate() {
        let step = i + 1;
        let new = set.instance().apply(batch)?;
        let delta = cfg.delta.resolve(&new).with_context(|| format!("update {step}"))?;
        set.set_delta(delta)?;
        let up = set.apply_instance(&new).with_context(|| format!("update {step}"))?;
        for st in &mut states {
            st.incremental_apply(&up.diff)?;
        }
        write_line(&mut steps, &step_line(step, &new, set.len(), &up))?;
        write_estimates(&mut est, step, &prep.queries, &states)?;
    }
    est.flush()?;
    steps.flush()?;

    let mut samples = create(&cfg.out, SAMPLES_FILE)?;
    for (i, s) in set.samples().iter().enumerate() {
        write_line(
            &mut samples,
            &SampleLine {
                chain: i,
                sample: s.iter().map(|(v, &c)| (v.0, c)).collect(),
            },
        )?;
    }
    samples.flush()?;
    fs::write(cfg.out.join(FINAL_INSTANCE_FILE), serialize_instance(set.instance()))?;

    Ok(RunSummary {
        steps: prep.batches.len(),
        chains: set.len(),
        files: [ESTIMATES_FILE, STEPS_FILE, SAMPLES_FILE, FINAL_INSTANCE_FILE]
            .iter()
            .map(|f| cfg.out.join(f))
            .collect(),
    })
}

/// Per-update measurements of `bench`.
#[derive(Debug, Clone, Serialize)]
pub struct BenchStep {
    pub step: usize,
    pub chains: usize,
    pub dynamic_ms: f64,
    pub baseline_ms: f64,
    pub ratio: f64,
    pub r_ham: usize,
    pub r_graph: usize,
    pub filter: usize,
    pub diff: usize,
    pub fallback: bool,
    pub hamiltonian_ms: f64,
    pub graph_ms: f64,
    pub length_fix_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub vertices: usize,
    pub edges: usize,
    pub chains: usize,
    pub delta: f64,
    pub chain_length: usize,
    pub initial_generation_ms: f64,
    pub steps: Vec<BenchStep>,
    pub dynamic_total_ms: f64,
    pub baseline_total_ms: f64,
    /// Dynamic over baseline wall time; below 1 means the update is faster.
    pub ratio: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Wall time to draw `count` fresh chains on `inst`, each dropped as soon as
/// its sample is taken.
pub fn regeneration_time(inst: &MrfInstance, params: &ChainParams, count: usize) -> anyhow::Result<Duration> {
    let start = Instant::now();
    let samples: Vec<Sample> = (0..count as u64)
        .into_par_iter()
        .map(|s| Chain::generate(inst, params, s).map(|c| c.sample().clone()))
        .collect::<dyngibbs::Result<_>>()?;
    let elapsed = start.elapsed();
    drop(samples);
    Ok(elapsed)
}

/// Times each update against regenerating every chain from scratch with
/// fresh seeds.
pub fn bench_prepared(
    prep: &Prepared,
    count: dyngibbs::PowerLaw,
    delta: &DeltaSource,
) -> anyhow::Result<BenchReport> {
    let start = Instant::now();
    let mut set = ChainSet::new(&prep.instance, prep.params.clone(), count)?;
    let initial = start.elapsed();
    let mut steps = Vec::with_capacity(prep.batches.len());
    for (i, batch) in prep.batches.iter().enumerate() {
        let step = i + 1;
        let new = set.instance().apply(batch)?;
        set.set_delta(delta.resolve(&new)?)?;
        let t0 = Instant::now();
        let up = set.apply_instance(&new)?;
        let dynamic = t0.elapsed();
        let mut fresh = set.params().clone();
        fresh.seed = prep.params.seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(step as u64));
        let baseline = regeneration_time(&new, &fresh, set.len())?;
        let m = &up.metrics;
        steps.push(BenchStep {
            step,
            chains: set.len(),
            dynamic_ms: ms(dynamic),
            baseline_ms: ms(baseline),
            ratio: dynamic.as_secs_f64() / baseline.as_secs_f64().max(1e-12),
            r_ham: m.r_ham,
            r_graph: m.r_graph,
            filter: m.filter_size,
            diff: up.diff.size(),
            fallback: m.fallback,
            hamiltonian_ms: ms(m.time_hamiltonian),
            graph_ms: ms(m.time_graph),
            length_fix_ms: ms(m.time_length_fix),
        });
    }
    let dynamic_total_ms: f64 = steps.iter().map(|s| s.dynamic_ms).sum();
    let baseline_total_ms: f64 = steps.iter().map(|s| s.baseline_ms).sum();
    Ok(BenchReport {
        vertices: set.instance().num_vertices(),
        edges: set.instance().num_edges(),
        chains: set.len(),
        delta: prep.params.delta,
        chain_length: set.chains().first().map_or(0, |c| c.log().len()),
        initial_generation_ms: ms(initial),
        steps,
        dynamic_total_ms,
        baseline_total_ms,
        ratio: if baseline_total_ms > 0.0 {
            dynamic_total_ms / baseline_total_ms
        } else {
            0.0
        },
    })
}

pub fn cmd_bench(cfg: &RunConfig) -> anyhow::Result<BenchReport> {
    let prep = prepare(cfg)?;
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let report = with_threads(cfg.threads, || bench_prepared(&prep, cfg.schedule.count, &cfg.delta))??;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(cfg.out.join(BENCH_FILE), text)?;
    Ok(report)
}
