//! Maximal couplings of conditional marginals and the correction kernel used
//! when potentials change.
//!
//! All categorical draws go through [`ChainRng::categorical`], so a coupling
//! consumes a fixed, documented number of uniforms: one for the overlap coin
//! and one per categorical draw.

use crate::error::{Error, Result};
use crate::mrf::{LocalView, Spin};
use crate::rng::ChainRng;

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingOutcome {
    pub x: Spin,
    pub y: Spin,
}

fn check_normalized(p: &[f64]) -> Result<()> {
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > NORMALIZATION_TOL || p.iter().any(|&x| x < 0.0 || x.is_nan()) {
        Err(Error::NotNormalized(s))
    } else {
        Ok(())
    }
}

/// Draws `(x, y)` from the overlap/residual maximal coupling of `mu` and `nu`.
pub fn maximal_couple(mu: &[f64], nu: &[f64], rng: &mut ChainRng) -> Result<CouplingOutcome> {
    check_normalized(mu)?;
    check_normalized(nu)?;
    if mu.len() != nu.len() {
        return Err(Error::DomainMismatch(mu.len(), nu.len()));
    }
    let overlap: Vec<f64> = mu.iter().zip(nu).map(|(a, b)| a.min(*b)).collect();
    let mass: f64 = overlap.iter().sum();
    if rng.uniform() < mass {
        let c = rng.categorical(&overlap);
        return Ok(CouplingOutcome { x: c, y: c });
    }
    let rx: Vec<f64> = mu.iter().zip(&overlap).map(|(a, o)| (a - o).max(0.0)).collect();
    let ry: Vec<f64> = nu.iter().zip(&overlap).map(|(b, o)| (b - o).max(0.0)).collect();
    let x = rng.categorical(&rx);
    let y = rng.categorical(&ry);
    Ok(CouplingOutcome { x, y })
}

/// Second coordinate of the maximal coupling given the first is `x`:
/// keep `x` with probability `min(mu[x], nu[x]) / mu[x]`, otherwise draw from
/// `nu - min(mu, nu)`. Equal inputs return `x` without consuming randomness.
#[inline]
pub fn maximal_couple_conditional(
    mu: &[f64],
    nu: &[f64],
    x: Spin,
    rng: &mut ChainRng,
) -> Result<Spin> {
    let mx = mu[x];
    if mx <= 0.0 {
        return Err(Error::ZeroProbabilityCondition(x));
    }
    if mu == nu {
        return Ok(x);
    }
    let keep = mx.min(nu[x]) / mx;
    if keep >= 1.0 || rng.uniform() < keep {
        return Ok(x);
    }
    let mut residual = [0.0f64; 16];
    let mut heap_residual;
    let res: &mut [f64] = if nu.len() <= residual.len() {
        &mut residual[..nu.len()]
    } else {
        heap_residual = vec![0.0; nu.len()];
        &mut heap_residual
    };
    let mut total = 0.0;
    for (r, (a, b)) in res.iter_mut().zip(mu.iter().zip(nu)) {
        *r = (b - a).max(0.0);
        total += *r;
    }
    if total <= 0.0 {
        // Only reachable through rounding when mu and nu are nearly equal.
        return Ok(x);
    }
    Ok(rng.categorical(res))
}

/// Probability vector `p` of the correction step and the resampling law `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionKernel {
    pub p: Vec<f64>,
    pub nu: Option<Vec<f64>>,
}

/// `p[c] = max(0, (mu(c) - mu'(c)) / mu(c))` (zero where `mu(c) = 0`),
/// `nu(b) ∝ max(0, mu'(b) - mu(b))`.
pub fn correction_from_marginals(mu: &[f64], mu_new: &[f64]) -> CorrectionKernel {
    let p = mu
        .iter()
        .zip(mu_new)
        .map(|(&a, &b)| if a > 0.0 && a > b { (a - b) / a } else { 0.0 })
        .collect();
    if mu == mu_new {
        return CorrectionKernel { p, nu: None };
    }
    let mut nu: Vec<f64> = mu.iter().zip(mu_new).map(|(a, b)| (b - a).max(0.0)).collect();
    let total: f64 = nu.iter().sum();
    if total <= 0.0 {
        return CorrectionKernel { p, nu: None };
    }
    for x in &mut nu {
        *x /= total;
    }
    CorrectionKernel { p, nu: Some(nu) }
}

/// Correction kernel at boundary `tau` for a potential change from `old` to
/// `new` on the same neighborhood.
pub fn correction_kernel(
    old: &LocalView<'_>,
    new: &LocalView<'_>,
    tau: &[Spin],
) -> Result<CorrectionKernel> {
    if !old.same_neighborhood(new) {
        return Err(Error::NeighborMismatch);
    }
    let mu = old.marginal(tau)?;
    let mu_new = new.marginal(tau)?;
    Ok(correction_from_marginals(&mu, &mu_new))
}

/// `min(1, 2 (|phi_v - phi'_v|_1 + sum_e |phi_e - phi'_e|_1))`, an upper bound
/// on every `p[c]` of the correction kernel.
pub fn p_up(old: &LocalView<'_>, new: &LocalView<'_>) -> Result<f64> {
    if !old.same_neighborhood(new) {
        return Err(Error::NeighborMismatch);
    }
    let mut l1 = old.potential().l1_distance(new.potential());
    for (a, b) in old.neighbors().iter().zip(new.neighbors()) {
        l1 += a.potential.l1_distance(&b.potential);
    }
    Ok((2.0 * l1).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::{MrfInstance, SpinDomain, VertexId, VertexPotential};

    #[test]
    fn equal_marginals_never_disagree() {
        let mut rng = ChainRng::new(1, 0);
        for _ in 0..1000 {
            let o = maximal_couple(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], &mut rng).unwrap();
            assert_eq!(o.x, o.y);
        }
    }

    #[test]
    fn disjoint_support() {
        let mut rng = ChainRng::new(1, 0);
        for _ in 0..100 {
            assert_eq!(
                maximal_couple(&[1.0, 0.0], &[0.0, 1.0], &mut rng).unwrap(),
                CouplingOutcome { x: 0, y: 1 }
            );
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let mut rng = ChainRng::new(1, 0);
        assert!(matches!(
            maximal_couple(&[0.5, 0.6], &[0.5, 0.5], &mut rng),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn conditional_zero_probability() {
        let mut rng = ChainRng::new(1, 0);
        assert_eq!(
            maximal_couple_conditional(&[1.0, 0.0], &[0.5, 0.5], 1, &mut rng),
            Err(Error::ZeroProbabilityCondition(1))
        );
    }

    #[test]
    fn hand_evaluated_kernel() {
        let k = correction_from_marginals(&[0.5, 0.5], &[0.25, 0.75]);
        assert_eq!(k.p, vec![0.5, 0.0]);
        assert_eq!(k.nu, Some(vec![0.0, 1.0]));
        let same = correction_from_marginals(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(same.p, vec![0.0, 0.0]);
        assert_eq!(same.nu, None);
    }

    fn single(phi: Vec<f64>) -> MrfInstance {
        MrfInstance::new(
            SpinDomain::new(2).unwrap(),
            [(VertexId(0), VertexPotential::new(phi).unwrap())],
            [],
        )
        .unwrap()
    }

    #[test]
    fn p_up_values() {
        let a = single(vec![0.0, 0.0]);
        let b = single(vec![0.05, -0.05]);
        let c = single(vec![1.5, -1.5]);
        let (va, vb, vc) = (a.local_at(0), b.local_at(0), c.local_at(0));
        assert_eq!(p_up(&va, &va).unwrap(), 0.0);
        assert!((p_up(&va, &vb).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(p_up(&va, &vc).unwrap(), 1.0);
    }
}
