//! Feasibility engine for a two-station cable-drawn field robot: pass
//! energy, cable and anchor statics, implement draft, weather synthesis
//! and off-grid power simulation, field layout, soil compaction,
//! economics, uncertainty analysis and architectural variants.
// NaN must fail the range checks, so they are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod climate;
pub mod compaction;
pub mod data;
pub mod draft;
pub mod econ;
pub mod envelope;
pub mod error;
pub mod fields;
pub mod output;
pub mod physics;
pub mod planner;
pub mod powersim;
pub mod report;
pub mod scenario;
pub mod stats;
pub mod uq;
pub mod variants;

pub use error::{Error, Result};
pub use scenario::{run_single, RunSummary, ScenarioParams};
