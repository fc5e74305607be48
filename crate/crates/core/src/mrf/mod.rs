//! MRF instances, local views, update batches and the static checks run on
//! them (feasibility, Dobrushin influence).

mod batch;
mod diff;
mod dobrushin;
mod feasibility;
mod instance;
mod local;
mod potential;

pub use batch::{UpdateBatch, UpdateRecord};
pub use diff::{instance_diff, InstanceDiff};
pub use dobrushin::{dobrushin_check, total_variation, DobrushinReport, DEFAULT_DEGREE_CAP};
pub use feasibility::{validate_feasibility, validate_feasibility_at, Feasibility};
pub use instance::{EdgeMap, MrfInstance, Neighbor, VertexMap};
pub use local::{normalize_log_weights, LocalView};
pub use potential::{
    log_weight_distance, EdgeKey, EdgePotential, Spin, SpinDomain, VertexId, VertexPotential,
};

use crate::error::Result;

/// `mu_v(. | boundary)` for vertex `v` of `inst`.
pub fn conditional_marginal(
    inst: &MrfInstance,
    v: VertexId,
    boundary: impl FnMut(VertexId) -> Option<Spin>,
) -> Result<Vec<f64>> {
    let view = inst.local(v)?;
    let tau = view.boundary_from(boundary)?;
    view.marginal(&tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use std::collections::BTreeMap;

    #[test]
    fn isolated_zero_potential_is_uniform() {
        let inst = MrfInstance::new(
            SpinDomain::new(2).unwrap(),
            [(VertexId(0), VertexPotential::zero(2))],
            [],
        )
        .unwrap();
        assert_eq!(conditional_marginal(&inst, VertexId(0), |_| None).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn ising_neighbor_plus() {
        let inst = crate::models::ising(&crate::models::Graph::new(2, vec![(0, 1)]), 0.5, 0.0).unwrap();
        let p = conditional_marginal(&inst, VertexId(1), |_| Some(1)).unwrap();
        let e = 0.5f64.exp();
        assert!((p[1] - e / (e + 1.0 / e)).abs() < 1e-15);
        assert!((p[1] - 0.731059).abs() < 1e-6);
    }

    #[test]
    fn hardcore_occupied_neighbor() {
        let inst = crate::models::hardcore(&crate::models::Graph::new(2, vec![(0, 1)]), 2.0).unwrap();
        assert_eq!(conditional_marginal(&inst, VertexId(0), |_| Some(1)).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn missing_boundary() {
        let inst = crate::models::ising(&crate::models::Graph::new(2, vec![(0, 1)]), 0.5, 0.0).unwrap();
        assert_eq!(
            conditional_marginal(&inst, VertexId(0), |_| None),
            Err(Error::MissingBoundary {
                vertex: VertexId(0),
                neighbor: VertexId(1)
            })
        );
    }

    #[test]
    fn infeasible_neighborhood() {
        let inst = crate::models::coloring(&crate::models::cycle_graph(3), 2).unwrap();
        let b: BTreeMap<_, _> = [(VertexId(1), 0), (VertexId(2), 1)].into();
        assert_eq!(
            conditional_marginal(&inst, VertexId(0), |u| b.get(&u).copied()),
            Err(Error::InfeasibleNeighborhood(VertexId(0)))
        );
    }

    #[test]
    fn local_view_sizes() {
        let inst = crate::models::ising(&crate::models::star_graph(3), 0.1, 0.0).unwrap();
        assert_eq!(inst.local(VertexId(0)).unwrap().edge_potentials().count(), 3);
        assert_eq!(inst.local(VertexId(1)).unwrap().degree(), 1);
        assert_eq!(inst.local(VertexId(9)).unwrap_err(), Error::UnknownVertex(VertexId(9)));
    }
}
