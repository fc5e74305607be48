//! Dynamic Gibbs sampling for Markov random fields.
//!
//! A Gibbs chain is stored as an [`ExecutionLog`]: its initial state and the
//! sequence of single-site updates. When the model changes, the log is
//! rewritten by replaying it coupled with a chain for the new model, touching
//! only the steps whose outcome can differ. The rewritten log is distributed
//! exactly as a fresh chain for the new model, so samples and the estimators
//! built on them stay valid at a fraction of the cost of resampling.

pub mod coupling;
pub mod dynamic;
pub mod error;
pub mod exec_log;
pub mod gibbs;
pub mod inference;
pub mod models;
pub mod oracle;
pub mod mrf;
pub mod rng;
pub mod schedule;

pub use coupling::{
    correction_kernel, maximal_couple, maximal_couple_conditional, p_up, CorrectionKernel,
    CouplingOutcome,
};
pub use dynamic::{
    apply_update, apply_update_multi, build_filter, update_edge, update_hamiltonian, ChainSet,
    FilterSet, MultiUpdate, UpdateMetrics, UpdatePlan,
};
pub use error::{Error, Result};
pub use exec_log::{ExecutionLog, Transition};
pub use mrf::{
    conditional_marginal, dobrushin_check, instance_diff, validate_feasibility, DobrushinReport,
    EdgeKey, EdgePotential, Feasibility, InstanceDiff, LocalView, MrfInstance, Spin, SpinDomain,
    UpdateBatch, UpdateRecord, VertexId, VertexPotential,
};
pub use gibbs::{extract_sample, length_fix, mixing_length, run_chain, Chain, ChainParams};
pub use inference::{sample_diff, EstimatorState, Query, QueryKind, SampleDiff, ScheduleFns};
pub use rng::ChainRng;
pub use schedule::PowerLaw;
