//! Structural properties of coupled replay: frugality, disagreement
//! bookkeeping, no-op updates and the cost envelopes.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{params, v};
use dyngibbs::models;
use dyngibbs::mrf::{UpdateBatch, UpdateRecord as R};
use dyngibbs::{
    build_filter, update_edge, update_hamiltonian, Chain, ChainRng, UpdatePlan,
};

fn changed_ranks(before: &[dyngibbs::Transition], after: &[dyngibbs::Transition]) -> BTreeSet<usize> {
    assert_eq!(before.len(), after.len());
    before
        .iter()
        .zip(after)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i + 1)
        .collect()
}

fn final_disagreement(a: &dyngibbs::ExecutionLog, b: &dyngibbs::ExecutionLog) -> BTreeSet<dyngibbs::VertexId> {
    let (x, y) = (a.final_state(), b.final_state());
    x.keys().filter(|k| x[k] != y[k]).copied().collect()
}

#[test]
fn hamiltonian_frugality_and_bookkeeping() {
    let old = models::ising_cycle(12, 0.3, 0.0).unwrap();
    let batch = UpdateBatch::new(vec![
        R::SetEdgePotential(v(3), v(4), models::ising_edge_potential(0.6)),
        R::SetVertexPotential(v(9), models::ising_vertex_potential(0.5)),
    ]);
    let new = old.apply(&batch).unwrap();
    let pbar: BTreeMap<_, _> = UpdatePlan::between(&old, &new).unwrap().pbar().clone();
    assert_eq!(pbar.keys().copied().collect::<Vec<_>>(), vec![v(3), v(4), v(9)]);
    for seed in 0..200 {
        let chain = Chain::generate(&old, &params(seed, 300), 0).unwrap();
        let mut log = chain.log().clone();
        let mut rng = ChainRng::new(seed, 99);
        let filter = build_filter(&log, &pbar, &mut rng).unwrap();
        let mut trace = Vec::new();
        let report = update_hamiltonian(&old, &new, &mut log, &filter, &mut rng, Some(&mut trace)).unwrap();
        let visited: BTreeSet<usize> = trace.iter().copied().collect();
        assert_eq!(visited.len(), trace.len(), "rank visited twice");
        assert!(trace.windows(2).all(|w| w[0] < w[1]), "ranks out of order");
        assert_eq!(report.visited, trace.len());
        let changed = changed_ranks(&chain.log().transitions(), &log.transitions());
        assert!(changed.is_subset(&visited));
        for t in filter.steps() {
            assert!(visited.contains(t));
        }
        let d: BTreeSet<_> = report.disagreements.keys().copied().collect();
        assert_eq!(d, final_disagreement(chain.log(), &log));
        for (k, &(x, y)) in &report.disagreements {
            assert_eq!(chain.log().final_state()[k], x);
            assert_eq!(log.final_state()[k], y);
        }
    }
}

#[test]
fn edge_frugality_and_bookkeeping() {
    let old = models::ising(&models::path_graph(12), 0.4, 0.1).unwrap();
    let new = old
        .apply(&UpdateBatch::new(vec![
            R::AddEdge(v(0), v(11), models::ising_edge_potential(0.4)),
            R::DeleteEdge(v(5), v(6)),
        ]))
        .unwrap();
    let affected: BTreeSet<_> = [0, 5, 6, 11].into_iter().map(v).collect();
    for seed in 0..200 {
        let chain = Chain::generate(&old, &params(seed, 300), 0).unwrap();
        let mut log = chain.log().clone();
        let mut rng = ChainRng::new(seed, 7);
        let mut trace = Vec::new();
        let report = update_edge(&old, &new, &mut log, &mut rng, Some(&mut trace)).unwrap();
        let visited: BTreeSet<usize> = trace.iter().copied().collect();
        let changed = changed_ranks(&chain.log().transitions(), &log.transitions());
        assert!(changed.is_subset(&visited));
        for t in 1..=log.len() {
            if affected.contains(&log.get(t).unwrap().vertex) {
                assert!(visited.contains(&t), "affected step {t} skipped");
            }
        }
        let d: BTreeSet<_> = report.disagreements.keys().copied().collect();
        assert_eq!(d, final_disagreement(chain.log(), &log));
    }
}

#[test]
fn identical_instance_is_noop() {
    let inst = models::ising_cycle(8, 0.3, 0.2).unwrap();
    let plan = UpdatePlan::between(&inst, &inst).unwrap();
    assert!(plan.pbar().is_empty());
    let p = params(5, 200);
    let mut chain = Chain::generate(&inst, &p, 0).unwrap();
    let before = chain.log().transitions();
    let m = plan.apply(&mut chain, &p).unwrap();
    assert_eq!((m.r_ham, m.r_graph, m.filter_size), (0, 0, 0));
    assert_eq!(chain.log().transitions(), before);
    assert!(chain.take_diff().is_empty());
}

#[test]
fn mismatched_phases_rejected() {
    let a = models::ising_cycle(5, 0.3, 0.0).unwrap();
    let b = models::ising(&models::path_graph(5), 0.3, 0.0).unwrap();
    let p = params(1, 50);
    let mut log = Chain::generate(&a, &p, 0).unwrap().log().clone();
    let mut rng = ChainRng::new(1, 1);
    let f = build_filter(&log, &BTreeMap::new(), &mut rng).unwrap();
    assert_eq!(
        update_hamiltonian(&a, &b, &mut log, &f, &mut rng, None),
        Err(dyngibbs::Error::GraphMismatch)
    );
    let c = models::ising_cycle(5, 0.5, 0.0).unwrap();
    assert_eq!(
        update_edge(&a, &c, &mut log, &mut rng, None),
        Err(dyngibbs::Error::SharedPotentialMismatch)
    );
    let d = models::ising_cycle(6, 0.3, 0.0).unwrap();
    assert_eq!(
        update_edge(&a, &d, &mut log, &mut rng, None),
        Err(dyngibbs::Error::VertexSetMismatch)
    );
}

#[test]
fn non_isolated_vertex_changes_rejected_by_batch() {
    let inst = models::ising_cycle(5, 0.3, 0.0).unwrap();
    let batch = UpdateBatch::new(vec![R::DeleteVertex(v(0))]);
    assert!(matches!(inst.apply(&batch), Err(dyngibbs::Error::NotIsolated(_))));
}

/// Mean replay cost stays inside the envelope `50 Δ T L / (n δ)` and the mean
/// filter size inside `4 T L / n` on an in-regime instance.
#[test]
fn cost_envelopes_small() {
    let n = 100;
    let mut grng = ChainRng::new(42, 0);
    let g = models::random_bounded_degree(n, 150, 4, &mut grng);
    let beta = 0.1;
    let old = models::ising(&g, beta, 0.0).unwrap();
    let delta = models::regime_delta(models::Model::Ising, &old).unwrap();
    let deg = old.max_degree() as f64;
    let p = dyngibbs::ChainParams::new(delta, dyngibbs::PowerLaw::constant(0.01).unwrap(), 3).unwrap();
    let t = dyngibbs::mixing_length(n, &p) as f64;
    let (mut r_ham, mut r_graph, mut filt) = (0.0, 0.0, 0.0);
    let (mut l_ham, mut l_graph) = (0.0, 0.0);
    let trials = 30;
    for k in 0..trials {
        let mut chain = Chain::generate(&old, &p, k).unwrap();
        let e = g.edges[k as usize];
        let batch = UpdateBatch::new(vec![
            R::SetEdgePotential(v(e.0), v(e.1), models::ising_edge_potential(0.05)),
            R::DeleteEdge(v(g.edges[k as usize + 40].0), v(g.edges[k as usize + 40].1)),
        ]);
        let new = old.apply(&batch).unwrap();
        let d = dyngibbs::instance_diff(&old, &new).unwrap();
        l_ham += d.d_ham;
        l_graph += d.d_graph;
        let m = UpdatePlan::between(&old, &new).unwrap().apply(&mut chain, &p).unwrap();
        r_ham += m.r_ham as f64;
        r_graph += m.r_graph as f64;
        filt += m.filter_size as f64;
    }
    let tr = trials as f64;
    let (r_ham, r_graph, filt, l_ham, l_graph) = (r_ham / tr, r_graph / tr, filt / tr, l_ham / tr, l_graph / tr);
    let nf = n as f64;
    assert!(r_ham <= 50.0 * deg * t * l_ham / (nf * delta), "r_ham {r_ham}");
    assert!(r_graph <= 50.0 * deg * t * l_graph / (nf * delta), "r_graph {r_graph}");
    let e = 4.0 * t * l_ham / nf;
    assert!(filt <= e + 4.0 * (e / tr).sqrt(), "filter {filt} vs {e}");
}
