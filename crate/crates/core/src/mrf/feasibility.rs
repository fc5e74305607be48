use super::instance::MrfInstance;
use super::local::LocalView;
use super::potential::{Spin, VertexId};

/// Outcome of [`validate_feasibility`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Ok,
    /// First violating vertex (ascending id) and neighbor configuration
    /// (ascending neighbor id, odometer order) with no positive-weight spin.
    Violation {
        vertex: VertexId,
        boundary: Vec<(VertexId, Spin)>,
    },
}

impl Feasibility {
    pub fn is_ok(&self) -> bool {
        matches!(self, Feasibility::Ok)
    }
}

/// Calls `f` on every configuration in `Q^deg`, least significant position
/// first. Stops early when `f` returns `false`.
pub(crate) fn for_each_boundary(q: usize, deg: usize, mut f: impl FnMut(&[Spin]) -> bool) {
    let mut tau = vec![0; deg];
    loop {
        if !f(&tau) {
            return;
        }
        let mut i = 0;
        loop {
            if i == deg {
                return;
            }
            tau[i] += 1;
            if tau[i] < q {
                break;
            }
            tau[i] = 0;
            i += 1;
        }
    }
}

/// A spin that stays admissible whatever the neighbors do.
fn has_permissive_spin(view: &LocalView<'_>) -> bool {
    (0..view.q()).any(|c| {
        view.potential().get(c) > f64::NEG_INFINITY
            && view
                .edge_potentials()
                .all(|(_, e)| (0..view.q()).all(|a| e.get(a, c) > f64::NEG_INFINITY))
    })
}

fn check_view(view: &LocalView<'_>, weights: &mut Vec<f64>) -> Feasibility {
    if has_permissive_spin(view) {
        return Feasibility::Ok;
    }
    let mut bad: Option<Vec<Spin>> = None;
    for_each_boundary(view.q(), view.degree(), |tau| {
        view.log_weights_into(tau, weights);
        if weights.iter().all(|&w| w == f64::NEG_INFINITY) {
            bad = Some(tau.to_vec());
            false
        } else {
            true
        }
    });
    match bad {
        Some(tau) => Feasibility::Violation {
            vertex: view.vertex(),
            boundary: view.neighbor_ids().zip(tau).collect(),
        },
        None => Feasibility::Ok,
    }
}

/// Checks that every vertex admits a positive-weight spin under every
/// neighbor configuration. Vertices with a permissive spin are accepted
/// without enumeration; the rest cost `O(q^(deg+1))`.
pub fn validate_feasibility(inst: &MrfInstance) -> Feasibility {
    let mut weights = Vec::with_capacity(inst.q());
    for i in 0..inst.num_vertices() {
        let f = check_view(&inst.local_at(i), &mut weights);
        if !f.is_ok() {
            return f;
        }
    }
    Feasibility::Ok
}

/// [`validate_feasibility`] restricted to `vertices` (unknown ids are
/// skipped). Used after an update, where only touched vertices can have
/// become infeasible.
pub fn validate_feasibility_at(
    inst: &MrfInstance,
    vertices: impl IntoIterator<Item = VertexId>,
) -> Feasibility {
    let mut weights = Vec::with_capacity(inst.q());
    for v in vertices {
        let Ok(view) = inst.local(v) else { continue };
        let f = check_view(&view, &mut weights);
        if !f.is_ok() {
            return f;
        }
    }
    Feasibility::Ok
}
