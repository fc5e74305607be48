//! Exactness of the couplings by enumeration.

use dyngibbs::coupling::{correction_kernel, maximal_couple, maximal_couple_conditional, p_up};
use dyngibbs::mrf::{EdgePotential, MrfInstance, SpinDomain, VertexId, VertexPotential};
use dyngibbs::ChainRng;
use proptest::prelude::*;

fn random_star(rng: &mut ChainRng, q: usize, deg: usize, hard: bool) -> MrfInstance {
    let val = |rng: &mut ChainRng| {
        if hard && rng.below(6) == 0 {
            f64::NEG_INFINITY
        } else {
            4.0 * rng.uniform() - 2.0
        }
    };
    let center = VertexPotential::new((0..q).map(|_| 4.0 * rng.uniform() - 2.0).collect()).unwrap();
    let mut vertices = vec![(VertexId(0), center)];
    let mut edges = Vec::new();
    for i in 1..=deg as u64 {
        vertices.push((VertexId(i), VertexPotential::zero(q)));
        let mut rows = vec![vec![0.0; q]; q];
        for a in 0..q {
            for b in a..q {
                let w = val(rng);
                rows[a][b] = w;
                rows[b][a] = w;
            }
        }
        edges.push((VertexId(0), VertexId(i), EdgePotential::new(rows).unwrap()));
    }
    MrfInstance::new(SpinDomain::new(q).unwrap(), vertices, edges).unwrap()
}

/// Perturbs every finite entry of the center's potentials by up to `scale`.
fn perturb(inst: &MrfInstance, rng: &mut ChainRng, scale: f64) -> MrfInstance {
    let q = inst.q();
    let mut vmap = inst.vertex_map();
    let phi = inst.vertex_potential(VertexId(0)).unwrap();
    let moved = VertexPotential::new(phi.weights().iter().map(|w| w + scale * (2.0 * rng.uniform() - 1.0)).collect()).unwrap();
    vmap.insert(VertexId(0), moved.into());
    let mut emap = inst.edge_map();
    for p in emap.values_mut() {
        let mut rows = p.rows();
        for a in 0..q {
            for b in a..q {
                if rows[a][b].is_finite() {
                    let w = rows[a][b] + scale * (2.0 * rng.uniform() - 1.0);
                    rows[a][b] = w;
                    rows[b][a] = w;
                }
            }
        }
        *p = EdgePotential::new(rows).unwrap().into();
    }
    MrfInstance::from_maps(inst.domain(), vmap, emap).unwrap()
}

#[test]
fn corrected_law_is_new_marginal_and_bounded() {
    let mut rng = ChainRng::new(2024, 0);
    let mut checked = 0;
    for case in 0..200 {
        let q = 2 + rng.below(2);
        let deg = rng.below(4);
        let old = random_star(&mut rng, q, deg, case % 3 == 0);
        let scale = [0.01, 0.1, 0.5, 2.0][case % 4];
        let new = perturb(&old, &mut rng, scale);
        let (a, b) = (old.local(VertexId(0)).unwrap(), new.local(VertexId(0)).unwrap());
        let bound = p_up(&a, &b).unwrap();
        let mut tau = vec![0; deg];
        loop {
            if let (Ok(mu), Ok(mu_new)) = (a.marginal(&tau), b.marginal(&tau)) {
                let k = correction_kernel(&a, &b, &tau).unwrap();
                let moved: f64 = mu.iter().zip(&k.p).map(|(m, p)| m * p).sum();
                for c in 0..q {
                    let resample = k.nu.as_ref().map_or(0.0, |nu| nu[c]);
                    let law = mu[c] * (1.0 - k.p[c]) + moved * resample;
                    assert!((law - mu_new[c]).abs() < 1e-12, "case {case}: {law} vs {}", mu_new[c]);
                    assert!(k.p[c] <= bound + 1e-15, "case {case}: p {} > bound {bound}", k.p[c]);
                }
                checked += 1;
            }
            let mut i = 0;
            while i < deg {
                tau[i] += 1;
                if tau[i] < q {
                    break;
                }
                tau[i] = 0;
                i += 1;
            }
            if i == deg {
                break;
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn conditional_coupling_has_right_marginal_and_overlap() {
    let mu = [0.5, 0.3, 0.2];
    let nu = [0.2, 0.3, 0.5];
    let mut rng = ChainRng::new(5, 0);
    let reps = 200_000;
    let (mut counts, mut differ) = ([0usize; 3], 0usize);
    for _ in 0..reps {
        let x = rng.categorical(&mu);
        let y = maximal_couple_conditional(&mu, &nu, x, &mut rng).unwrap();
        counts[y] += 1;
        differ += usize::from(x != y);
    }
    for c in 0..3 {
        let f = counts[c] as f64 / reps as f64;
        let sigma = (nu[c] * (1.0 - nu[c]) / reps as f64).sqrt();
        assert!((f - nu[c]).abs() < 4.0 * sigma);
    }
    let f = differ as f64 / reps as f64;
    assert!((f - 0.3).abs() < 4.0 * (0.21f64 / reps as f64).sqrt());
}

proptest! {
    #[test]
    fn joint_coupling_is_maximal(w in prop::collection::vec(0.01f64..1.0, 6), seed in 0u64..1000) {
        let (a, b) = w.split_at(3);
        let sa: f64 = a.iter().sum();
        let sb: f64 = b.iter().sum();
        let mu: Vec<f64> = a.iter().map(|x| x / sa).collect();
        let nu: Vec<f64> = b.iter().map(|x| x / sb).collect();
        let tv = 0.5 * mu.iter().zip(&nu).map(|(x, y)| (x - y).abs()).sum::<f64>();
        let mut rng = ChainRng::new(seed, 0);
        let reps = 4000;
        let mut differ = 0;
        for _ in 0..reps {
            let o = maximal_couple(&mu, &nu, &mut rng).unwrap();
            differ += usize::from(o.x != o.y);
        }
        let f = differ as f64 / reps as f64;
        prop_assert!((f - tv).abs() < 5.0 * (0.25f64 / reps as f64).sqrt() + 1e-9);
    }

    #[test]
    fn equal_inputs_keep_the_spin(w in prop::collection::vec(0.01f64..1.0, 4), x in 0usize..4) {
        let s: f64 = w.iter().sum();
        let mu: Vec<f64> = w.iter().map(|v| v / s).collect();
        let mut rng = ChainRng::new(1, 0);
        prop_assert_eq!(maximal_couple_conditional(&mu, &mu, x, &mut rng).unwrap(), x);
    }
}
