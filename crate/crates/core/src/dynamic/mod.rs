//! Rewriting execution logs when the instance changes.
//!
//! An update `I -> I'` is split into phases that each keep the log a valid
//! chain for the current intermediate instance: potential changes on shared
//! vertices and edges, insertion of new (isolated) vertices, edge deletions
//! and insertions, removal of deleted (isolated) vertices, and finally a
//! length fix to the mixing length of `I'`. See [`UpdatePlan`].

mod filter;
mod multi;
mod ops;
mod plan;
mod replay;

use std::ops::AddAssign;
use std::time::Duration;

pub use filter::{build_filter, FilterSet};
pub use multi::{apply_update_multi, ChainSet, MultiUpdate};
pub use ops::{
    add_vertices, affected_vertices, delete_vertices, update_edge, update_hamiltonian,
    vertex_difference,
};
pub use plan::{apply_update, UpdatePlan};
pub use replay::ReplayReport;

/// Work done by one update of one chain (or summed over chains).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateMetrics {
    /// Steps visited while replaying the potential change.
    pub r_ham: usize,
    /// Steps visited while replaying edge changes.
    pub r_graph: usize,
    /// Size of the filter set.
    pub filter_size: usize,
    /// Steps inserted for new vertices.
    pub inserted: usize,
    /// Steps removed with deleted vertices.
    pub removed: usize,
    pub length_before: usize,
    pub length_after: usize,
    /// Set when the log was discarded and regenerated.
    pub fallback: bool,
    pub time_hamiltonian: Duration,
    pub time_graph: Duration,
    pub time_length_fix: Duration,
}

impl AddAssign<&UpdateMetrics> for UpdateMetrics {
    fn add_assign(&mut self, o: &UpdateMetrics) {
        self.r_ham += o.r_ham;
        self.r_graph += o.r_graph;
        self.filter_size += o.filter_size;
        self.inserted += o.inserted;
        self.removed += o.removed;
        self.length_before += o.length_before;
        self.length_after += o.length_after;
        self.fallback |= o.fallback;
        self.time_hamiltonian += o.time_hamiltonian;
        self.time_graph += o.time_graph;
        self.time_length_fix += o.time_length_fix;
    }
}
