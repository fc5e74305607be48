use super::instance::MrfInstance;
use crate::error::{Error, Result};

/// Difference between two instances: structural part `d_graph`
/// (`|V xor V'| + |E xor E'|`) and potential part `d_ham` (L1 change of the
/// potentials on shared vertices and edges).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceDiff {
    pub d_graph: f64,
    pub d_ham: f64,
    pub d_total: f64,
}

impl InstanceDiff {
    pub const ZERO: InstanceDiff = InstanceDiff {
        d_graph: 0.0,
        d_ham: 0.0,
        d_total: 0.0,
    };
}

/// Computes `d(a, b)`. A shared potential entry that is `-inf` on exactly one
/// side makes `d_ham` infinite.
pub fn instance_diff(a: &MrfInstance, b: &MrfInstance) -> Result<InstanceDiff> {
    if a.q() != b.q() {
        return Err(Error::DomainMismatch(a.q(), b.q()));
    }
    let mut d_graph = 0usize;
    let mut d_ham = 0.0;

    let (va, vb) = (a.vertex_ids(), b.vertex_ids());
    let (mut i, mut j) = (0, 0);
    while i < va.len() || j < vb.len() {
        match (va.get(i), vb.get(j)) {
            (Some(x), Some(y)) if x == y => {
                d_ham += a.potential_at(i).l1_distance(b.potential_at(j));
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                d_graph += 1;
                i += 1;
            }
            (Some(_), None) => {
                d_graph += 1;
                i += 1;
            }
            _ => {
                d_graph += 1;
                j += 1;
            }
        }
    }

    let mut ea = a.edges().peekable();
    let mut eb = b.edges().peekable();
    loop {
        match (ea.peek(), eb.peek()) {
            (Some((ka, pa)), Some((kb, pb))) if ka == kb => {
                d_ham += pa.l1_distance(pb);
                ea.next();
                eb.next();
            }
            (Some((ka, _)), Some((kb, _))) if ka < kb => {
                d_graph += 1;
                ea.next();
            }
            (Some(_), None) => {
                d_graph += 1;
                ea.next();
            }
            (_, Some(_)) => {
                d_graph += 1;
                eb.next();
            }
            (None, None) => break,
        }
    }

    let d_graph = d_graph as f64;
    Ok(InstanceDiff {
        d_graph,
        d_ham,
        d_total: d_graph + d_ham,
    })
}
