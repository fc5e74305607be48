use std::collections::BTreeMap;

use super::feasibility::for_each_boundary;
use super::instance::MrfInstance;
use super::potential::VertexId;
use crate::error::{Error, Result};

pub const DEFAULT_DEGREE_CAP: usize = 8;

/// Influence-matrix summary: `row_sums[u] = sum_v A(u, v)` and
/// `delta = 1 - max_u row_sums[u]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DobrushinReport {
    pub row_sums: BTreeMap<VertexId, f64>,
    pub delta: f64,
    pub satisfied: bool,
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Exact influence matrix by enumeration of `Q^Gamma(v)` for every `v`.
///
/// For each `v` all conditional marginals are computed once; `A(u, v)` is then
/// the largest TV distance over boundary pairs differing only at `u`.
pub fn dobrushin_check(inst: &MrfInstance, degree_cap: usize) -> Result<DobrushinReport> {
    let q = inst.q();
    let mut row_sums: BTreeMap<VertexId, f64> =
        inst.vertex_ids().iter().map(|&v| (v, 0.0)).collect();

    for vi in 0..inst.num_vertices() {
        let view = inst.local_at(vi);
        let deg = view.degree();
        if deg == 0 {
            continue;
        }
        if deg > degree_cap {
            return Err(Error::DegreeTooLarge {
                vertex: view.vertex(),
                degree: deg,
                cap: degree_cap,
            });
        }
        let count = q.pow(deg as u32);
        let mut marginals = Vec::with_capacity(count * q);
        let mut buf = Vec::with_capacity(q);
        let mut failure = None;
        for_each_boundary(q, deg, |tau| {
            match view.marginal_into(tau, &mut buf) {
                Ok(()) => {
                    marginals.extend_from_slice(&buf);
                    true
                }
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }

        // Boundary index = sum_i tau_i q^i, matching for_each_boundary.
        let mut stride = 1;
        for nb in view.neighbors() {
            let mut best: f64 = 0.0;
            for idx in 0..count {
                let digit = (idx / stride) % q;
                let m1 = &marginals[idx * q..(idx + 1) * q];
                for other in (digit + 1)..q {
                    let jdx = idx + (other - digit) * stride;
                    let m2 = &marginals[jdx * q..(jdx + 1) * q];
                    best = best.max(total_variation(m1, m2));
                }
            }
            *row_sums.get_mut(&nb.id).expect("neighbor is a vertex") += best;
            stride *= q;
        }
    }

    let max_row = row_sums.values().copied().fold(0.0, f64::max);
    let delta = 1.0 - max_row;
    Ok(DobrushinReport {
        row_sums,
        delta,
        satisfied: delta > 0.0,
    })
}
