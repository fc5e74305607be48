//! Incremental estimators agree with recounting, and estimates agree with
//! exact marginals.

mod common;

use common::v;
use dyngibbs::inference::{sample_diff, EstimatorState, Query, Sample, SampleDiff};
use dyngibbs::oracle::{exact_gibbs, exact_marginal};
use dyngibbs::{models, ChainParams, ChainRng, ChainSet, PowerLaw};
use proptest::prelude::*;

const Q: usize = 3;
const VERTS: u64 = 6;

fn random_sample(rng: &mut ChainRng) -> Sample {
    let mut s = Sample::new();
    for i in 0..VERTS {
        if rng.below(8) != 0 {
            s.insert(v(i), rng.below(Q));
        }
    }
    s
}

fn random_samples(rng: &mut ChainRng, count: usize) -> Vec<Sample> {
    (0..count).map(|_| random_sample(rng)).collect()
}

/// Perturbs a few spins, drops or adds vertices, and resizes the chain list.
fn evolve(rng: &mut ChainRng, old: &[Sample]) -> Vec<Sample> {
    let mut new: Vec<Sample> = old.to_vec();
    for s in &mut new {
        for _ in 0..rng.below(3) {
            let u = v(rng.below(VERTS as usize) as u64);
            match rng.below(4) {
                0 => {
                    s.remove(&u);
                }
                _ => {
                    s.insert(u, rng.below(Q));
                }
            }
        }
    }
    match rng.below(3) {
        0 => {
            let keep = rng.below(new.len() + 1);
            new.truncate(keep);
        }
        1 => {
            for _ in 0..rng.below(3) {
                new.push(random_sample(rng));
            }
        }
        _ => {}
    }
    new
}

fn random_query(rng: &mut ChainRng) -> Query {
    let mut ids: Vec<_> = (0..VERTS).map(v).collect();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.below(i + 1));
    }
    let na = 1 + rng.below(2);
    let nb = 1 + rng.below(2);
    let a = ids[..na].to_vec();
    let b = ids[na..na + nb].to_vec();
    match rng.below(3) {
        0 => Query::marginal(a),
        1 => Query::posterior(a, b.into_iter().map(|u| (u, rng.below(Q))).collect()),
        _ => Query::map(a, b),
    }
}

fn naive_diff(old: &[Sample], new: &[Sample]) -> Vec<(usize, u64, Option<usize>, Option<usize>)> {
    let mut out = Vec::new();
    for i in 0..old.len().max(new.len()) {
        for u in 0..VERTS {
            let a = old.get(i).and_then(|s| s.get(&v(u)).copied());
            let b = new.get(i).and_then(|s| s.get(&v(u)).copied());
            if a != b {
                out.push((i, u, a, b));
            }
        }
    }
    out
}

fn as_tuples(d: &SampleDiff) -> Vec<(usize, u64, Option<usize>, Option<usize>)> {
    let mut out: Vec<_> = d.entries.iter().map(|e| (e.chain, e.vertex.0, e.old, e.new)).collect();
    out.sort();
    out
}

#[test]
fn incremental_matches_rebuild_over_random_streams() {
    let mut rng = ChainRng::new(31, 0);
    for stream in 0..1000 {
        let query = random_query(&mut rng);
        let count = rng.below(8);
        let mut samples = random_samples(&mut rng, count);
        let mut st = EstimatorState::rebuild(&query, Q, &samples).unwrap();
        for step in 0..5 {
            let next = evolve(&mut rng, &samples);
            let diff = sample_diff(&samples, &next);
            assert_eq!(as_tuples(&diff), naive_diff(&samples, &next));
            assert_eq!((diff.chains_before, diff.chains_after), (samples.len(), next.len()));
            st.incremental_apply(&diff).unwrap();
            let fresh = EstimatorState::rebuild(&query, Q, &next).unwrap();
            assert_eq!(st, fresh, "stream {stream} step {step}");
            samples = next;
        }
    }
}

#[test]
fn stale_diff_is_rejected() {
    let mut rng = ChainRng::new(32, 0);
    let samples = random_samples(&mut rng, 4);
    let query = Query::marginal(vec![v(0)]);
    let mut st = EstimatorState::rebuild(&query, Q, &samples).unwrap();
    let diff = sample_diff(&random_samples(&mut rng, 5), &samples);
    assert!(st.incremental_apply(&diff).is_err());
}

proptest! {
    #[test]
    fn marginal_sums_to_one(seed in 0u64..10_000, count in 1usize..20) {
        let mut rng = ChainRng::new(seed, 0);
        let samples: Vec<Sample> = (0..count)
            .map(|_| (0..VERTS).map(|i| (v(i), rng.below(Q))).collect())
            .collect();
        let st = EstimatorState::rebuild(&Query::marginal(vec![v(0), v(3)]), Q, &samples).unwrap();
        let est = st.estimate().unwrap();
        prop_assert_eq!(est.len(), Q * Q);
        prop_assert!((est.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_scores_scale_invariant(seed in 0u64..10_000, count in 1usize..12, k in 2usize..5) {
        let mut rng = ChainRng::new(seed, 1);
        let samples: Vec<Sample> = (0..count)
            .map(|_| (0..VERTS).map(|i| (v(i), rng.below(Q))).collect())
            .collect();
        let repeated: Vec<Sample> = samples.iter().flat_map(|s| std::iter::repeat_n(s.clone(), k)).collect();
        let query = Query::map(vec![v(1)], vec![v(2)]);
        let a = EstimatorState::rebuild(&query, Q, &samples).unwrap().estimate().unwrap();
        let b = EstimatorState::rebuild(&query, Q, &repeated).unwrap().estimate().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let argmax = |e: &[f64]| e.iter().enumerate().fold(0, |m, (i, x)| if *x > e[m] { i } else { m });
        prop_assert_eq!(argmax(&a), argmax(&b));
    }
}

#[test]
fn chain_estimate_matches_exact_marginal() {
    let inst = models::ising(&models::path_graph(4), 0.3, 0.1).unwrap();
    let eps = 0.05;
    let params = ChainParams::new(0.5, PowerLaw::constant(eps).unwrap(), 77).unwrap();
    let set = ChainSet::new(&inst, params, PowerLaw::constant(20_000.0).unwrap()).unwrap();
    let a = vec![v(0), v(3)];
    let est = EstimatorState::rebuild(&Query::marginal(a.clone()), 2, &set.samples())
        .unwrap()
        .estimate()
        .unwrap();
    let exact = exact_marginal(&exact_gibbs(&inst).unwrap(), &a).unwrap();
    let noise = 4.0 * (0.25f64 / 20_000.0).sqrt();
    let tv = 0.5 * est.iter().zip(&exact).map(|(x, y)| (x - y).abs()).sum::<f64>();
    assert!(tv <= eps + 2.0 * noise, "tv {tv}");
}
