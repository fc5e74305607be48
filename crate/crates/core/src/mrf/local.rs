use super::instance::Neighbor;
use super::potential::{EdgePotential, Spin, VertexId, VertexPotential};
use crate::error::{Error, Result};

/// Read-only view of `I_v`: the vertex potential, the incident edge
/// potentials and the neighbor ids, in ascending neighbor order.
///
/// Boundaries passed to the view are slices aligned with that order.
#[derive(Debug, Clone, Copy)]
pub struct LocalView<'a> {
    vertex: VertexId,
    potential: &'a VertexPotential,
    neighbors: &'a [Neighbor],
}

impl<'a> LocalView<'a> {
    pub(crate) fn new(
        vertex: VertexId,
        potential: &'a VertexPotential,
        neighbors: &'a [Neighbor],
    ) -> Self {
        Self {
            vertex,
            potential,
            neighbors,
        }
    }

    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    pub fn q(&self) -> usize {
        self.potential.q()
    }

    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn potential(&self) -> &'a VertexPotential {
        self.potential
    }

    pub fn neighbors(&self) -> &'a [Neighbor] {
        self.neighbors
    }

    pub fn neighbor_ids(&self) -> impl Iterator<Item = VertexId> + 'a {
        self.neighbors.iter().map(|n| n.id)
    }

    pub fn edge_potentials(&self) -> impl Iterator<Item = (VertexId, &'a EdgePotential)> + 'a {
        self.neighbors.iter().map(|n| (n.id, &*n.potential))
    }

    pub fn same_neighborhood(&self, other: &LocalView<'_>) -> bool {
        self.vertex == other.vertex
            && self.neighbors.len() == other.neighbors.len()
            && self
                .neighbors
                .iter()
                .zip(other.neighbors)
                .all(|(a, b)| a.id == b.id)
    }

    /// `out[c] = phi_v(c) + sum_u phi_uv(tau_u, c)`.
    #[inline]
    pub fn log_weights_into(&self, tau: &[Spin], out: &mut Vec<f64>) {
        debug_assert_eq!(tau.len(), self.neighbors.len());
        out.clear();
        out.extend_from_slice(self.potential.weights());
        for (n, &s) in self.neighbors.iter().zip(tau) {
            for (w, &e) in out.iter_mut().zip(n.potential.row(s)) {
                *w += e;
            }
        }
    }

    /// Conditional marginal `mu_v(. | tau)` written into `out`.
    #[inline]
    pub fn marginal_into(&self, tau: &[Spin], out: &mut Vec<f64>) -> Result<()> {
        self.log_weights_into(tau, out);
        if normalize_log_weights(out) {
            Ok(())
        } else {
            Err(Error::InfeasibleNeighborhood(self.vertex))
        }
    }

    pub fn marginal(&self, tau: &[Spin]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.q());
        self.marginal_into(tau, &mut out)?;
        Ok(out)
    }

    /// Collects the boundary slice for this view from a lookup function.
    pub fn boundary_from(&self, mut lookup: impl FnMut(VertexId) -> Option<Spin>) -> Result<Vec<Spin>> {
        self.neighbors
            .iter()
            .map(|n| {
                lookup(n.id).ok_or(Error::MissingBoundary {
                    vertex: self.vertex,
                    neighbor: n.id,
                })
            })
            .collect()
    }
}

/// Exponentiates log-weights in place after subtracting the largest finite
/// entry, then normalizes. Returns `false` (leaving `w` unspecified) when every
/// entry is `-inf`.
#[inline]
pub fn normalize_log_weights(w: &mut [f64]) -> bool {
    let max = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return false;
    }
    let mut sum = 0.0;
    for x in w.iter_mut() {
        // exp(-inf - max) is exactly 0; max is finite so no NaN arises.
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in w.iter_mut() {
        *x /= sum;
    }
    true
}
