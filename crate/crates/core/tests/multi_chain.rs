//! Chain sets: sizing, diffs, determinism and the cross index.

mod common;

use common::v;
use dyngibbs::inference::{sample_diff, EstimatorState, Query};
use dyngibbs::mrf::{UpdateBatch, UpdateRecord, VertexPotential};
use dyngibbs::{models, ChainParams, ChainSet, MrfInstance, PowerLaw};

fn params(seed: u64) -> ChainParams {
    ChainParams::new(0.5, PowerLaw::constant(0.1).unwrap(), seed).unwrap()
}

fn base() -> MrfInstance {
    models::ising(&models::cycle_graph(8), 0.2, 0.05).unwrap()
}

fn field_batch(u: u64, h: f64) -> UpdateBatch {
    UpdateBatch::new(vec![UpdateRecord::SetVertexPotential(
        v(u),
        models::ising_vertex_potential(h),
    )])
}

#[test]
fn empty_batch_is_identity() {
    let mut set = ChainSet::new(&base(), params(1), PowerLaw::constant(6.0).unwrap()).unwrap();
    let before = set.samples();
    let logs: Vec<_> = set.chains().iter().map(|c| c.log().transitions()).collect();
    let up = set.apply_update(&UpdateBatch::default()).unwrap();
    assert!(up.diff.entries.is_empty());
    assert_eq!(set.samples(), before);
    let after: Vec<_> = set.chains().iter().map(|c| c.log().transitions()).collect();
    assert_eq!(logs, after);
}

#[test]
fn growth_appends_and_shrink_drops() {
    let inst = base();
    let mut set = ChainSet::new(&inst, params(2), PowerLaw::new(1.0, 1.0, 0.0).unwrap()).unwrap();
    assert_eq!(set.len(), 8);
    let streams: Vec<u64> = set.chains().iter().map(|c| c.stream()).collect();
    let before = set.samples();

    let grow = UpdateBatch::new(vec![UpdateRecord::AddVertex(v(100), VertexPotential::zero(2))]);
    let up = set.apply_update(&grow).unwrap();
    assert_eq!((up.appended, up.dropped, set.len()), (1, 0, 9));
    assert_eq!(set.chains()[8].stream(), 8);
    let kept: Vec<u64> = set.chains()[..8].iter().map(|c| c.stream()).collect();
    assert_eq!(kept, streams);
    let mut d = up.diff.entries.clone();
    d.sort_by_key(|e| (e.chain, e.vertex));
    let mut expect = sample_diff(&before, &set.samples()).entries;
    expect.sort_by_key(|e| (e.chain, e.vertex));
    assert_eq!(d, expect);

    let mid = set.samples();
    let shrink = UpdateBatch::new(vec![
        UpdateRecord::DeleteVertex(v(100)),
        UpdateRecord::DeleteEdge(v(7), v(0)),
        UpdateRecord::DeleteEdge(v(6), v(7)),
        UpdateRecord::DeleteVertex(v(7)),
        UpdateRecord::DeleteEdge(v(5), v(6)),
        UpdateRecord::DeleteVertex(v(6)),
    ]);
    let up = set.apply_update(&shrink).unwrap();
    assert_eq!((up.dropped, set.len()), (3, 6));
    let mut d = up.diff.entries.clone();
    d.sort_by_key(|e| (e.chain, e.vertex));
    let mut expect = sample_diff(&mid, &set.samples()).entries;
    expect.sort_by_key(|e| (e.chain, e.vertex));
    assert_eq!(d, expect);

    // A later growth never reuses a stream.
    let regrow = UpdateBatch::new(vec![UpdateRecord::AddVertex(v(200), VertexPotential::zero(2))]);
    set.apply_update(&regrow).unwrap();
    assert_eq!(set.chains().last().unwrap().stream(), 9);
}

#[test]
fn estimator_follows_updates() {
    let mut set = ChainSet::new(&base(), params(3), PowerLaw::constant(50.0).unwrap()).unwrap();
    let queries = [
        Query::marginal(vec![v(0), v(1)]),
        Query::posterior(vec![v(2)], vec![(v(3), 1)]),
        Query::map(vec![v(4)], vec![v(5)]),
    ];
    let mut states: Vec<_> = queries
        .iter()
        .map(|q| EstimatorState::rebuild(q, 2, &set.samples()).unwrap())
        .collect();
    for step in 0..10u64 {
        let up = set.apply_update(&field_batch(step % 8, 0.1 * step as f64)).unwrap();
        for (st, q) in states.iter_mut().zip(&queries) {
            st.incremental_apply(&up.diff).unwrap();
            assert_eq!(*st, EstimatorState::rebuild(q, 2, &set.samples()).unwrap());
        }
    }
}

#[test]
fn cross_index_matches_logs() {
    let mut set = ChainSet::new(&base(), params(4), PowerLaw::constant(5.0).unwrap()).unwrap();
    set.apply_update(&field_batch(3, 0.7)).unwrap();
    for u in 0..8 {
        let mut expect = Vec::new();
        for (i, c) in set.chains().iter().enumerate() {
            // Ranks are 1-based.
            for (t, tr) in c.log().transitions().iter().enumerate() {
                if tr.vertex == v(u) {
                    expect.push((i, t + 1));
                }
            }
        }
        assert_eq!(set.cross_index(v(u)).unwrap(), expect);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut set = ChainSet::new(&base(), params(5), PowerLaw::constant(16.0).unwrap()).unwrap();
            let mut trace = Vec::new();
            for step in 0..6u64 {
                let up = set.apply_update(&field_batch(step, -0.3)).unwrap();
                trace.push(up.diff.entries.clone());
            }
            (set.samples(), trace)
        })
    };
    assert_eq!(run(1), run(4));
}
