//! Estimators over a maintained set of samples: marginal, posterior and MAP
//! queries backed by exact integer counts and updated from sample diffs.

mod diff;
mod estimator;
mod query;
mod schedule;

pub use diff::{sample_diff, DiffEntry, Sample, SampleDiff};
pub use estimator::EstimatorState;
pub use query::{
    config_from_index, config_index, Query, QueryKind, DEFAULT_VAR_CAP, DIMENSION_CAP,
    HARD_VAR_CAP,
};
pub use schedule::{schedule_check, ScheduleFns, ScheduleReport, DEFAULT_DIFFERENCE_LIMIT};
