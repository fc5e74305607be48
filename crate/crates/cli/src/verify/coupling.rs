//! Exhaustive check of the correction coupling on random local models.

use dyngibbs::{
    correction_kernel, p_up, ChainRng, EdgePotential, LocalView, MrfInstance, SpinDomain, VertexId,
    VertexPotential,
};

use super::{verdict, Outcome, VerifyOptions};

const TOLERANCE: f64 = 1e-12;

fn uniform(rng: &mut ChainRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.uniform()
}

/// A star with center `0`: the center's potential and every edge potential
/// random, some entries `-inf` when `hard`.
fn random_star(rng: &mut ChainRng, q: usize, deg: usize, hard: bool) -> anyhow::Result<MrfInstance> {
    let center = VertexPotential::new((0..q).map(|_| uniform(rng, -2.0, 2.0)).collect())?;
    let mut vertices = vec![(VertexId(0), center)];
    let mut edges = Vec::new();
    for i in 1..=deg as u64 {
        vertices.push((VertexId(i), VertexPotential::zero(q)));
        let mut rows = vec![vec![0.0; q]; q];
        for a in 0..q {
            for b in a..q {
                let w = if hard && rng.below(6) == 0 {
                    f64::NEG_INFINITY
                } else {
                    uniform(rng, -2.0, 2.0)
                };
                rows[a][b] = w;
                rows[b][a] = w;
            }
        }
        edges.push((VertexId(0), VertexId(i), EdgePotential::new(rows)?));
    }
    Ok(MrfInstance::new(SpinDomain::new(q)?, vertices, edges)?)
}

/// Moves every finite potential entry at the center by up to `scale`.
fn perturb(inst: &MrfInstance, rng: &mut ChainRng, scale: f64) -> anyhow::Result<MrfInstance> {
    let q = inst.q();
    let mut vmap = inst.vertex_map();
    let phi = inst.vertex_potential(VertexId(0)).expect("center exists");
    let moved: Vec<f64> = phi.weights().iter().map(|w| w + uniform(rng, -scale, scale)).collect();
    vmap.insert(VertexId(0), VertexPotential::new(moved)?.into());
    let mut emap = inst.edge_map();
    for p in emap.values_mut() {
        let mut rows = p.rows();
        for a in 0..q {
            for b in a..q {
                if rows[a][b].is_finite() {
                    let w = rows[a][b] + uniform(rng, -scale, scale);
                    rows[a][b] = w;
                    rows[b][a] = w;
                }
            }
        }
        *p = EdgePotential::new(rows)?.into();
    }
    Ok(MrfInstance::from_maps(inst.domain(), vmap, emap)?)
}

#[derive(Default)]
struct Tally {
    boundaries: usize,
    law_errors: usize,
    bound_errors: usize,
    worst: f64,
}

/// Checks, for every boundary `tau`, that keeping `c ~ mu` with probability
/// `1 - p[c]` and otherwise drawing from `nu` yields `mu'` exactly, and that
/// `p[c]` never exceeds `p_up`.
fn check_pair(a: &LocalView<'_>, b: &LocalView<'_>, t: &mut Tally) -> anyhow::Result<()> {
    let (q, deg) = (a.q(), a.degree());
    let bound = p_up(a, b)?;
    let mut tau = vec![0; deg];
    loop {
        if let (Ok(mu), Ok(mu_new)) = (a.marginal(&tau), b.marginal(&tau)) {
            let k = correction_kernel(a, b, &tau)?;
            let moved: f64 = mu.iter().zip(&k.p).map(|(m, p)| m * p).sum();
            t.boundaries += 1;
            for c in 0..q {
                let resample = k.nu.as_ref().map_or(0.0, |nu| nu[c]);
                let err = (mu[c] * (1.0 - k.p[c]) + moved * resample - mu_new[c]).abs();
                t.worst = t.worst.max(err);
                t.law_errors += usize::from(err > TOLERANCE);
                t.bound_errors += usize::from(k.p[c] > bound);
            }
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
            return Ok(());
        }
    }
}

pub fn check(opts: &VerifyOptions) -> Outcome {
    let pairs = if opts.quick { 50 } else { 200 };
    let mut rng = ChainRng::new(opts.seed, 2);
    let mut t = Tally::default();
    for case in 0..pairs {
        let q = 2 + rng.below(2);
        let deg = rng.below(4);
        let old = random_star(&mut rng, q, deg, case % 3 == 0)?;
        let new = perturb(&old, &mut rng, [0.01, 0.1, 0.5, 2.0][case % 4])?;
        check_pair(&old.local(VertexId(0))?, &new.local(VertexId(0))?, &mut t)?;
    }
    Ok((
        verdict(t.law_errors == 0 && t.bound_errors == 0 && t.boundaries > 0),
        format!(
            "{pairs} potential pairs, {} boundaries, max law error {:.1e} (tol {TOLERANCE:.0e}), {} law / {} p_up violations",
            t.boundaries, t.worst, t.law_errors, t.bound_errors
        ),
    ))
}
