//! Pair-collection experiments under context-free and contextual models.

pub mod context_free;
pub mod doctors;
pub mod protocol;
pub mod search;
pub mod telegraph;

pub use context_free::{context_free_property_run, FiniteModel, PropertyRunSummary};
pub use doctors::{doctors_scenario, doctors_scenario_with};
pub use protocol::{
    run_pair_protocol, run_triple_protocol, ExperimentReport, MeasurementContext,
    MeasurementModel, Schedule, ScheduledRun,
};
pub use search::{violation_search_context_free, violation_search_deterministic, SearchResult};
pub use telegraph::{telegraph_scenario, SignSchedule, TelegraphParams};
