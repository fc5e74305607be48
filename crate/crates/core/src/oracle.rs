//! Brute-force ground truth for small instances: the exact Gibbs
//! distribution by enumeration, total variation, marginals, and a naive
//! Gibbs simulator that mirrors [`crate::gibbs::run_chain`] draw for draw.
//!
//! Configurations are encoded as base-`q` integers over the vertices in
//! ascending id order, the smallest id being the least significant digit.

use crate::error::{Error, Result};
use crate::inference::{config_index, Sample};
use crate::mrf::{conditional_marginal, MrfInstance, Spin, VertexId};
use crate::rng::ChainRng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Largest configuration space [`exact_gibbs`] will enumerate.
pub const MAX_STATES: f64 = 1e6;

/// A distribution over `Q^V`, stored densely by configuration index.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    q: usize,
    vertices: Vec<VertexId>,
    probs: Vec<f64>,
}

impl ExactDistribution {
    /// Builds a distribution from nonnegative weights, normalizing them.
    pub fn from_weights(q: usize, vertices: Vec<VertexId>, mut probs: Vec<f64>) -> Result<Self> {
        let states = (q as f64).powi(vertices.len() as i32);
        if probs.len() as f64 != states {
            return Err(Error::SpaceMismatch);
        }
        let z: f64 = probs.iter().sum();
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NotNormalized(z));
        }
        for p in &mut probs {
            *p /= z;
        }
        Ok(Self { q, vertices, probs })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, config: &[Spin]) -> f64 {
        self.probs[config_index(config, self.q)]
    }

    fn same_space(&self, other: &Self) -> bool {
        self.q == other.q && self.vertices == other.vertices
    }
}

/// `H(sigma)`: the sum of all potentials at a dense configuration (ascending
/// vertex order).
pub fn hamiltonian(inst: &MrfInstance, config: &[Spin]) -> f64 {
    let mut h = 0.0;
    for (i, &c) in config.iter().enumerate() {
        h += inst.potential_at(i).get(c);
        for nb in inst.neighbors_at(i) {
            if nb.index > i {
                h += nb.potential.get(c, config[nb.index]);
            }
        }
    }
    h
}

/// `mu_I` by enumeration of `Q^V`, in log space with max-subtraction.
pub fn exact_gibbs(inst: &MrfInstance) -> Result<ExactDistribution> {
    let (q, n) = (inst.q(), inst.num_vertices());
    let states = (q as f64).powi(n as i32);
    if states > MAX_STATES {
        return Err(Error::TooLarge(states));
    }
    let states = states as usize;
    let mut config = vec![0; n];
    let mut logw = Vec::with_capacity(states);
    for _ in 0..states {
        logw.push(hamiltonian(inst, &config));
        for c in config.iter_mut() {
            *c += 1;
            if *c < q {
                break;
            }
            *c = 0;
        }
    }
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::NotNormalized(0.0));
    }
    let weights = logw.into_iter().map(|h| (h - max).exp()).collect();
    ExactDistribution::from_weights(q, inst.vertex_ids().to_vec(), weights)
}

/// `1/2 sum |p - q|`.
pub fn exact_tv(p: &ExactDistribution, q: &ExactDistribution) -> Result<f64> {
    if !p.same_space(q) {
        return Err(Error::SpaceMismatch);
    }
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Marginal on `a`, indexed by configuration of `a` (first vertex least
/// significant).
pub fn exact_marginal(dist: &ExactDistribution, a: &[VertexId]) -> Result<Vec<f64>> {
    let pos = a
        .iter()
        .map(|v| {
            dist.vertices
                .binary_search(v)
                .map_err(|_| Error::UnknownVertex(*v))
        })
        .collect::<Result<Vec<_>>>()?;
    let q = dist.q;
    let n = dist.vertices.len();
    let mut out = vec![0.0; q.pow(a.len() as u32)];
    let mut config = vec![0; n];
    let mut sub = vec![0; a.len()];
    for &p in &dist.probs {
        for (j, &i) in pos.iter().enumerate() {
            sub[j] = config[i];
        }
        out[config_index(&sub, q)] += p;
        for c in config.iter_mut() {
            *c += 1;
            if *c < q {
                break;
            }
            *c = 0;
        }
    }
    Ok(out)
}

/// Empirical distribution of `samples` over the vertices of `inst`.
/// Samples missing a vertex are an error.
pub fn empirical(inst: &MrfInstance, samples: &[Sample]) -> Result<ExactDistribution> {
    let (q, n) = (inst.q(), inst.num_vertices());
    let states = (q as f64).powi(n as i32);
    if states > MAX_STATES {
        return Err(Error::TooLarge(states));
    }
    let mut counts = vec![0.0; states as usize];
    let mut config = vec![0; n];
    for s in samples {
        for (i, v) in inst.vertex_ids().iter().enumerate() {
            config[i] = *s.get(v).ok_or(Error::UnknownVertex(*v))?;
        }
        counts[config_index(&config, q)] += 1.0;
    }
    ExactDistribution::from_weights(q, inst.vertex_ids().to_vec(), counts)
}

/// Naive Gibbs simulation: `T` steps from the greedy start on stream 0 of
/// `seed`, drawing exactly as the engine does. Returns the final
/// configuration in ascending vertex order.
pub fn reference_chain(inst: &MrfInstance, t: usize, seed: u64) -> Result<Vec<Spin>> {
    let ids = inst.vertex_ids();
    let n = ids.len();
    let q = inst.q();
    let mut state: Vec<Option<Spin>> = vec![None; n];
    for i in 0..n {
        let mut chosen = None;
        for c in 0..q {
            let mut w = inst.potential_at(i).get(c);
            for nb in inst.neighbors_at(i) {
                if let Some(s) = state[nb.index] {
                    w += nb.potential.get(s, c);
                }
            }
            if w > f64::NEG_INFINITY {
                chosen = Some(c);
                break;
            }
        }
        state[i] = Some(chosen.ok_or(Error::InfeasibleInstance(ids[i]))?);
    }
    let mut state: Vec<Spin> = state.into_iter().flatten().collect();
    if n == 0 {
        return Ok(state);
    }
    let mut rng = ChainRng::new(seed, 0);
    for _ in 0..t {
        let i = rng.below(n);
        let mu = conditional_marginal(inst, ids[i], |u| {
            ids.binary_search(&u).ok().map(|j| state[j])
        })?;
        state[i] = rng.categorical(&mu);
    }
    Ok(state)
}

/// Result of a two-sample chi-square test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Two-sample chi-square homogeneity test on histograms `a` and `b` over the
/// same bins. Bins empty on both sides are dropped.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (ka, kb) = if na == 0 || nb == 0 {
        (1.0, 1.0)
    } else {
        ((nb as f64 / na as f64).sqrt(), (na as f64 / nb as f64).sqrt())
    };
    let mut statistic = 0.0;
    let mut bins = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        bins += 1;
        let d = ka * x as f64 - kb * y as f64;
        statistic += d * d / (x + y) as f64;
    }
    let df = bins.saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquare {
        statistic,
        df,
        p_value,
    }
}
