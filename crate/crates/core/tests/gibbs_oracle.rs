//! The engine against brute-force ground truth.

mod common;

use common::{index_of, params, v};
use dyngibbs::models;
use dyngibbs::mrf::{conditional_marginal, MrfInstance, SpinDomain, UpdateBatch, UpdateRecord as R, VertexPotential};
use dyngibbs::oracle::{empirical, exact_gibbs, exact_marginal, exact_tv, reference_chain};
use dyngibbs::{extract_sample, run_chain, Chain, UpdatePlan};
use proptest::prelude::*;
use rayon::prelude::*;

#[test]
fn reference_chain_is_bit_exact() {
    let instances = [
        models::ising_cycle(7, 0.4, 0.1).unwrap(),
        models::hardcore(&models::cycle_graph(6), 1.3).unwrap(),
        models::coloring(&models::path_graph(6), 4).unwrap(),
    ];
    for inst in &instances {
        for seed in 0..20 {
            let t = 50 + 13 * seed as usize;
            let log = run_chain(inst, &params(seed, t)).unwrap();
            let sample = extract_sample(&log);
            let dense: Vec<_> = inst.vertex_ids().iter().map(|v| sample[v]).collect();
            assert_eq!(dense, reference_chain(inst, t, seed).unwrap());
        }
    }
}

#[test]
fn exact_conditionals_match_local_marginals() {
    let inst = models::ising(&models::Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]), 0.7, 0.3).unwrap();
    let d = exact_gibbs(&inst).unwrap();
    let q = inst.q();
    let n = inst.num_vertices();
    for idx in 0..q.pow(n as u32) {
        let config = dyngibbs::inference::config_from_index(idx, q, n);
        for i in 0..n {
            let vid = inst.vertex_ids()[i];
            let mu = conditional_marginal(&inst, vid, |u| Some(config[u.0 as usize])).unwrap();
            let mut probs = Vec::new();
            for c in 0..q {
                let mut cc = config.clone();
                cc[i] = c;
                probs.push(d.prob(&cc));
            }
            let z: f64 = probs.iter().sum();
            for c in 0..q {
                assert!((probs[c] / z - mu[c]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn exact_gibbs_shift_invariant() {
    let inst = models::hardcore(&models::path_graph(4), 0.7).unwrap();
    let mut shifted = inst.vertex_map();
    let phi = VertexPotential::new(inst.vertex_potential(v(2)).unwrap().weights().iter().map(|w| w + 5.0).collect()).unwrap();
    shifted.insert(v(2), std::sync::Arc::new(phi));
    let other = MrfInstance::from_maps(inst.domain(), shifted, inst.edge_map()).unwrap();
    let tv = exact_tv(&exact_gibbs(&inst).unwrap(), &exact_gibbs(&other).unwrap()).unwrap();
    assert!(tv < 1e-12);
}

#[test]
fn chains_converge_to_gibbs() {
    let inst = models::ising_cycle(4, 0.3, 0.0).unwrap();
    let p = dyngibbs::ChainParams::new(0.5, dyngibbs::PowerLaw::constant(0.01).unwrap(), 9).unwrap();
    let samples: Vec<_> = (0..100_000u64)
        .into_par_iter()
        .map(|r| Chain::generate(&inst, &p, r).unwrap().sample().clone())
        .collect();
    let tv = exact_tv(&empirical(&inst, &samples).unwrap(), &exact_gibbs(&inst).unwrap()).unwrap();
    assert!(tv < 0.02, "tv {tv}");
}

#[test]
fn single_vertex_potential_update_reaches_new_law() {
    let dom = SpinDomain::new(2).unwrap();
    let old = MrfInstance::new(dom, [(v(0), VertexPotential::zero(2))], []).unwrap();
    let batch = UpdateBatch::new(vec![R::SetVertexPotential(v(0), VertexPotential::new(vec![0.0, 3f64.ln()]).unwrap())]);
    let new = old.apply(&batch).unwrap();
    let plan = UpdatePlan::between(&old, &new).unwrap();
    let p = params(4, 20);
    let ones: usize = (0..100_000u64)
        .into_par_iter()
        .map(|r| {
            let mut c = Chain::generate(&old, &p, r).unwrap();
            plan.apply(&mut c, &p).unwrap();
            c.sample()[&v(0)]
        })
        .sum();
    let f = ones as f64 / 1e5;
    let sigma = (0.75f64 * 0.25 / 1e5).sqrt();
    assert!((f - 0.75).abs() < 4.0 * sigma, "{f}");
}

#[test]
fn add_vertex_to_empty_model() {
    let dom = SpinDomain::new(2).unwrap();
    let old = MrfInstance::empty(dom);
    let batch = UpdateBatch::new(vec![R::AddVertex(v(3), VertexPotential::new(vec![0.0, 3f64.ln()]).unwrap())]);
    let new = old.apply(&batch).unwrap();
    let plan = UpdatePlan::between(&old, &new).unwrap();
    let p = params(4, 10);
    let ones: usize = (0..100_000u64)
        .into_par_iter()
        .map(|r| {
            let mut c = Chain::generate(&old, &p, r).unwrap();
            plan.apply(&mut c, &p).unwrap();
            assert!(c.sample_is_consistent());
            c.sample()[&v(3)]
        })
        .sum();
    let f = ones as f64 / 1e5;
    let sigma = (0.75f64 * 0.25 / 1e5).sqrt();
    assert!((f - 0.75).abs() < 4.0 * sigma, "{f}");
}

#[test]
fn deleting_the_only_edge_decorrelates() {
    let old = models::ising(&models::path_graph(2), 0.8, 0.0).unwrap();
    let batch = UpdateBatch::new(vec![R::DeleteEdge(v(0), v(1))]);
    let new = old.apply(&batch).unwrap();
    let plan = UpdatePlan::between(&old, &new).unwrap();
    let p = dyngibbs::ChainParams::new(0.5, dyngibbs::PowerLaw::constant(0.01).unwrap(), 2).unwrap();
    let reps = 100_000u64;
    let prods: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut c = Chain::generate(&old, &p, r).unwrap();
            plan.apply(&mut c, &p).unwrap();
            let s = c.sample();
            models::ising_sign(s[&v(0)]) * models::ising_sign(s[&v(1)])
        })
        .collect();
    let rho = prods.iter().sum::<f64>() / reps as f64;
    assert!(rho.abs() < 4.0 / (reps as f64).sqrt(), "{rho}");
}

#[test]
fn exact_marginal_matches_sum() {
    let inst = models::ising(&models::path_graph(4), 0.5, 0.2).unwrap();
    let d = exact_gibbs(&inst).unwrap();
    let m = exact_marginal(&d, &[v(3), v(1)]).unwrap();
    let mut check = vec![0.0; 4];
    for (idx, p) in d.probs().iter().enumerate() {
        let c = dyngibbs::inference::config_from_index(idx, 2, 4);
        check[c[3] + 2 * c[1]] += p;
    }
    for k in 0..4 {
        assert!((m[k] - check[k]).abs() < 1e-15);
    }
    assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn tv_matches_sorted_merge(a in prop::collection::vec(0.0f64..1.0, 8), b in prop::collection::vec(0.0f64..1.0, 8)) {
        prop_assume!(a.iter().sum::<f64>() > 0.0 && b.iter().sum::<f64>() > 0.0);
        let ids = vec![v(0), v(1), v(2)];
        let p = dyngibbs::oracle::ExactDistribution::from_weights(2, ids.clone(), a).unwrap();
        let q = dyngibbs::oracle::ExactDistribution::from_weights(2, ids, b).unwrap();
        // TV as the mass where p exceeds q.
        let mut pairs: Vec<(f64, f64)> = p.probs().iter().copied().zip(q.probs().iter().copied()).collect();
        pairs.sort_by(|x, y| (x.0 - x.1).partial_cmp(&(y.0 - y.1)).unwrap());
        let excess: f64 = pairs.iter().map(|(x, y)| (x - y).max(0.0)).sum();
        prop_assert!((exact_tv(&p, &q).unwrap() - excess).abs() < 1e-12);
    }
}

#[test]
fn index_helper_round_trip() {
    let inst = models::ising_cycle(3, 0.1, 0.0).unwrap();
    let s = [(v(0), 1), (v(1), 0), (v(2), 1)].into();
    assert_eq!(index_of(&inst, &s), 5);
}
