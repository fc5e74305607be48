//! Mean replay work per update against the envelopes
//! `50 Δ T L / (n δ)` for both phases and `4 T L_ham / n` for the filter.

use dyngibbs::models::{self, regime_delta, Model};
use dyngibbs::{instance_diff, mixing_length, ChainParams, ChainRng, ChainSet, PowerLaw};

use super::gen::{random_ising_batch, IsingBatchSpec};
use super::{verdict, Outcome, VerifyOptions};

const BETA: f64 = 0.1;
const MAX_DEGREE: usize = 4;
const CHAINS: f64 = 8.0;
const UPDATES: usize = 6;

struct Cell {
    n: usize,
    l: usize,
    r_ham: f64,
    r_graph: f64,
    filter: f64,
    ham_bound: f64,
    graph_bound: f64,
    filter_bound: f64,
}

impl Cell {
    fn ok(&self) -> bool {
        self.r_ham <= self.ham_bound && self.r_graph <= self.graph_bound && self.filter <= self.filter_bound
    }
}

fn measure(n: usize, l: usize, seed: u64) -> anyhow::Result<Cell> {
    let mut rng = ChainRng::new(seed, (n * 100 + l) as u64);
    let g = models::random_bounded_degree(n, 3 * n / 2, MAX_DEGREE, &mut rng);
    let inst = models::ising(&g, BETA, 0.0)?;
    // Couplings stay in [0, BETA] and degrees at most MAX_DEGREE.
    let delta = 1.0 - MAX_DEGREE as f64 * BETA.tanh();
    let params = ChainParams::new(delta, PowerLaw::constant(0.1)?, seed)?;
    let t = mixing_length(n, &params) as f64;
    let mut set = ChainSet::new(&inst, params, PowerLaw::constant(CHAINS)?)?;
    let (mut r_ham, mut r_graph, mut filter) = (0.0, 0.0, 0.0);
    let (mut l_ham, mut l_graph) = (0.0, 0.0);
    let mut deg: usize = 0;
    for _ in 0..UPDATES {
        let spec = IsingBatchSpec {
            potentials: l,
            edges: l,
            beta_max: BETA,
            field_max: 0.1,
            max_degree: MAX_DEGREE,
        };
        let batch = random_ising_batch(set.instance(), &mut rng, spec);
        let new = set.instance().apply(&batch)?;
        if regime_delta(Model::Ising, &new)? < delta - 1e-12 {
            anyhow::bail!("generated instance left the regime");
        }
        let d = instance_diff(set.instance(), &new)?;
        deg = deg.max(set.instance().max_degree()).max(new.max_degree());
        let up = set.apply_instance(&new)?;
        let k = up.per_chain.len() as f64;
        l_ham += d.d_ham * k;
        l_graph += d.d_graph * k;
        r_ham += up.metrics.r_ham as f64;
        r_graph += up.metrics.r_graph as f64;
        filter += up.metrics.filter_size as f64;
    }
    let trials = UPDATES as f64 * CHAINS;
    let nf = n as f64;
    let (l_ham, l_graph) = (l_ham / trials, l_graph / trials);
    let scale = 50.0 * deg as f64 * t / (nf * delta);
    let e = 4.0 * t * l_ham / nf;
    Ok(Cell {
        n,
        l,
        r_ham: r_ham / trials,
        r_graph: r_graph / trials,
        filter: filter / trials,
        ham_bound: scale * l_ham,
        graph_bound: scale * l_graph,
        filter_bound: e + 4.0 * (e / trials).sqrt(),
    })
}

pub fn check(opts: &VerifyOptions) -> Outcome {
    let (ns, ls): (&[usize], &[usize]) = if opts.quick {
        (&[200], &[1, 4])
    } else {
        (&[200, 400, 800], &[1, 4, 16])
    };
    let mut cells = Vec::new();
    for &n in ns {
        for &l in ls {
            cells.push(measure(n, l, opts.seed)?);
        }
    }
    let bad: Vec<String> = cells
        .iter()
        .filter(|c| !c.ok())
        .map(|c| {
            format!(
                "n={} L={}: r_ham {:.1}/{:.1}, r_graph {:.1}/{:.1}, |P| {:.1}/{:.1}",
                c.n, c.l, c.r_ham, c.ham_bound, c.r_graph, c.graph_bound, c.filter, c.filter_bound
            )
        })
        .collect();
    let worst = |f: fn(&Cell) -> f64| cells.iter().map(f).fold(0.0, f64::max);
    let mut detail = format!(
        "{} cells, worst ratios to envelope: r_ham {:.3}, r_graph {:.3}, |P| {:.3}",
        cells.len(),
        worst(|c| c.r_ham / c.ham_bound.max(1e-300)),
        worst(|c| c.r_graph / c.graph_bound.max(1e-300)),
        worst(|c| c.filter / c.filter_bound.max(1e-300)),
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; outside: {}", bad.join("; ")));
    }
    Ok((verdict(bad.is_empty()), detail))
}
