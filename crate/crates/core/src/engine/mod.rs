//! The A-Q loop, its master problems, and the nominal multiparametric engine
//! it is an instance of.

mod aq;
mod family;
mod master;
mod nominal;

pub use aq::{pick_best, run_aq, run_aq_traced, AqOptions, HistoryEntry, MprsResult, Scenario, Timing, TraceRecord};
pub use family::{run_engine, Budget, EngineRun, Epsilon, ParametricFamily, Step, StopReason, STOP_SLACK};
pub use master::{
    build_q, build_q_budgeted, build_q_general, build_q_interval, build_q_segment, build_q_variant, QCore,
    QFormulation, QModel,
};
pub use nominal::{run_multiparametric_nominal, NominalEntry, NominalMaster, NominalProblem, NominalResult};
