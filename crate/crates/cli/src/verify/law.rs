//! Updated chains against fresh chains on the new instance: two-sample
//! chi-square on the final configuration.

use dyngibbs::models::{self, ising_edge_potential, ising_vertex_potential};
use dyngibbs::oracle::chi_square_two_sample;
use dyngibbs::{
    Chain, ChainParams, ChainRng, MrfInstance, PowerLaw, UpdateBatch, UpdatePlan,
    UpdateRecord as R, VertexId, VertexPotential,
};
use rayon::prelude::*;

use super::gen::config_of;
use super::{verdict, Outcome, VerifyOptions};

const ALPHA: f64 = 0.01;
const CHAIN_LENGTH: usize = 12;
const TIME_LIMIT_SECS: f64 = 600.0;

fn v(i: u64) -> VertexId {
    VertexId(i)
}

struct Scenario {
    name: &'static str,
    old: MrfInstance,
    batch: UpdateBatch,
}

fn scenarios() -> anyhow::Result<Vec<Scenario>> {
    let hc = models::hardcore_edge_potential;
    let col = || models::coloring_edge_potential(3);
    let lam = |l: f64| models::hardcore_vertex_potential(l);
    Ok(vec![
        Scenario {
            name: "ising path n=5, potential change",
            old: models::ising(&models::path_graph(5), 0.3, 0.1)?,
            batch: UpdateBatch::new(vec![
                R::SetEdgePotential(v(1), v(2), ising_edge_potential(-0.4)),
                R::SetVertexPotential(v(3), ising_vertex_potential(-0.5)),
            ]),
        },
        Scenario {
            name: "ising cycle n=5, edge delete",
            old: models::ising_cycle(5, 0.4, 0.0)?,
            batch: UpdateBatch::new(vec![R::DeleteEdge(v(0), v(4))]),
        },
        Scenario {
            name: "ising path n=4, edge add",
            old: models::ising(&models::path_graph(4), 0.3, 0.2)?,
            batch: UpdateBatch::new(vec![R::AddEdge(v(0), v(3), ising_edge_potential(0.5))]),
        },
        Scenario {
            name: "hardcore path n=5, edge add and fugacity",
            old: models::hardcore(&models::path_graph(5), 1.0)?,
            batch: UpdateBatch::new(vec![R::AddEdge(v(0), v(4), hc()), R::SetVertexPotential(v(2), lam(2.0))]),
        },
        Scenario {
            name: "3-coloring path n=4, vertex add and delete",
            old: models::coloring(&models::path_graph(4), 3)?,
            batch: UpdateBatch::new(vec![
                R::DeleteEdge(v(2), v(3)),
                R::DeleteVertex(v(3)),
                R::AddVertex(v(7), VertexPotential::zero(3)),
                R::AddEdge(v(0), v(7), col()),
            ]),
        },
        Scenario {
            name: "hardcore cycle n=5, composite",
            old: models::hardcore(&models::cycle_graph(5), 0.8)?,
            batch: UpdateBatch::new(vec![
                R::DeleteEdge(v(0), v(1)),
                R::DeleteEdge(v(1), v(2)),
                R::DeleteVertex(v(1)),
                R::AddEdge(v(0), v(2), hc()),
                R::SetVertexPotential(v(3), lam(1.5)),
                R::AddVertex(v(9), lam(0.7)),
                R::AddEdge(v(4), v(9), hc()),
            ]),
        },
        Scenario {
            name: "ising cycle n=5, composite",
            old: models::ising_cycle(5, 0.25, 0.1)?,
            batch: UpdateBatch::new(vec![
                R::SetEdgePotential(v(1), v(2), ising_edge_potential(0.6)),
                R::SetVertexPotential(v(0), ising_vertex_potential(-0.3)),
                R::DeleteEdge(v(3), v(4)),
                R::AddEdge(v(0), v(2), ising_edge_potential(-0.2)),
                R::AddVertex(v(5), ising_vertex_potential(0.4)),
                R::AddEdge(v(3), v(5), ising_edge_potential(0.3)),
            ]),
        },
        Scenario {
            name: "3-coloring path n=4, forbidden color",
            old: models::coloring(&models::path_graph(4), 3)?,
            batch: UpdateBatch::new(vec![R::SetVertexPotential(
                v(0),
                VertexPotential::new(vec![0.0, f64::NEG_INFINITY, 0.2])?,
            )]),
        },
    ])
}

/// p-value of the two-sample test between `reps` updated and `reps` fresh
/// final samples.
fn law_p_value(old: &MrfInstance, new: &MrfInstance, reps: usize, seed: u64) -> anyhow::Result<f64> {
    let params = ChainParams::new(0.5, PowerLaw::constant(0.1)?, seed)?.with_length(CHAIN_LENGTH);
    let plan = UpdatePlan::between(old, new)?;
    let bins = new.q().pow(new.num_vertices() as u32);
    let pairs = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> anyhow::Result<(usize, usize)> {
            let mut chain = Chain::generate(old, &params, r)?;
            plan.apply(&mut chain, &params)?;
            let y0 = chain.log().initial_state();
            let rng = ChainRng::new(seed.wrapping_add(0x5eed), r);
            let fresh = Chain::from_initial(new, &y0, CHAIN_LENGTH, rng, r)?;
            Ok((config_of(new, chain.sample()), config_of(new, fresh.sample())))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (mut a, mut b) = (vec![0u64; bins], vec![0u64; bins]);
    for (x, y) in pairs {
        a[x] += 1;
        b[y] += 1;
    }
    Ok(chi_square_two_sample(&a, &b).p_value)
}

pub fn check(opts: &VerifyOptions) -> Outcome {
    let reps = if opts.quick { 10_000 } else { 100_000 };
    let start = std::time::Instant::now();
    let list = scenarios()?;
    let level = ALPHA / list.len() as f64;
    let mut worst = (f64::INFINITY, "");
    let mut failed = Vec::new();
    for (i, s) in list.iter().enumerate() {
        let new = s.old.apply(&s.batch)?;
        let p = law_p_value(&s.old, &new, reps, opts.seed.wrapping_add(i as u64))?;
        if p < worst.0 {
            worst = (p, s.name);
        }
        if p <= level {
            failed.push(format!("{} (p = {p:.2e})", s.name));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let mut detail = format!(
        "{} scenarios x {reps} chains, min p = {:.3} ({}), level {level:.2e}, {secs:.0} s (limit {TIME_LIMIT_SECS} s)",
        list.len(),
        worst.0,
        worst.1
    );
    if !failed.is_empty() {
        detail.push_str(&format!("; rejected: {}", failed.join(", ")));
    }
    Ok((verdict(failed.is_empty() && secs < TIME_LIMIT_SECS), detail))
}
