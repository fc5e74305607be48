//! Exact Dobrushin check against the closed-form model regimes.
//!
//! On a `d`-regular graph with `d` odd and no external field the exact
//! Ising influence of a neighbor is `tanh|beta|`, so the exact check and the
//! closed form share their boundary and must agree away from it. A field
//! only lowers the influence, so with fields, and for coloring, the closed
//! form is checked as sufficient.

use dyngibbs::models::{self, coloring_regime, ising_regime};
use dyngibbs::mrf::DEFAULT_DEGREE_CAP;
use dyngibbs::{dobrushin_check, ChainRng};

use super::{verdict, Outcome, VerifyOptions};

/// Positive gap used in the closed-form predicates.
const MARGIN: f64 = 1e-9;
const BAND: f64 = 1e-9;

pub fn check(opts: &VerifyOptions) -> Outcome {
    let count = if opts.quick { 20 } else { 50 };
    let mut rng = ChainRng::new(opts.seed, 7);

    let (mut ising_in, mut ising_bad, mut ising_band) = (0, 0, 0);
    let mut field_bad = 0;
    for k in 0..count {
        let d = [3, 5, 7][k % 3];
        let g = models::random_regular(4 * d, d, &mut rng)?;
        let boundary = (1.0 / d as f64).atanh();
        let side = if k % 2 == 0 { 1.0 } else { -1.0 };
        let sign = if rng.below(2) == 0 { 1.0 } else { -1.0 };
        let beta = sign * boundary * (1.0 + side * 0.2 * rng.uniform());
        let closed = ising_regime(beta, d, MARGIN);
        ising_in += usize::from(closed);

        let exact = dobrushin_check(&models::ising(&g, beta, 0.0)?, DEFAULT_DEGREE_CAP)?.satisfied;
        if exact != closed {
            if (d as f64 * beta.abs().tanh() - 1.0).abs() < BAND {
                ising_band += 1;
            } else {
                ising_bad += 1;
            }
        }
        let field = rng.uniform() - 0.5;
        let with_field = dobrushin_check(&models::ising(&g, beta, field)?, DEFAULT_DEGREE_CAP)?.satisfied;
        field_bad += usize::from(closed && !with_field);
    }

    let (mut col_in, mut col_bad, mut col_extra) = (0, 0, 0);
    for k in 0..count {
        let d = 2 + k % 3;
        let g = models::random_regular(4 * d, d, &mut rng)?;
        let q = 2 * d - 1 + k % 4;
        let inst = models::coloring(&g, q)?;
        let exact = dobrushin_check(&inst, DEFAULT_DEGREE_CAP)?.satisfied;
        let closed = coloring_regime(q, d, MARGIN);
        col_in += usize::from(closed);
        col_bad += usize::from(closed && !exact);
        col_extra += usize::from(!closed && exact);
    }

    Ok((
        verdict(ising_bad == 0 && field_bad == 0 && col_bad == 0),
        format!(
            "Ising {count} (in regime {ising_in}): {ising_bad} disagreements, {ising_band} in band, \
             {field_bad} regime-without-contraction with fields; \
             coloring {count} (in regime {col_in}): {col_bad} regime-without-contraction, {col_extra} contraction outside regime"
        ),
    ))
}
