//! Behavior graphs of uncertain process traces.
//!
//! Events of an uncertain trace carry sets of candidate activities, timestamp
//! intervals and an optional "may not have happened" flag. The behavior graph
//! of a trace links each event to its possible immediate successors. This
//! crate builds it two ways ([`graph::build_baseline`], [`graph::build_sweep`]),
//! checks both against brute-force oracles ([`oracle`]), generates synthetic
//! logs ([`loggen`]) and reads/writes logs and graphs ([`logio`]).

pub mod fixtures;
pub mod graph;
pub mod loggen;
pub mod logio;
pub mod model;
pub mod oracle;

pub use graph::{build_baseline, build_sweep, BehaviorGraph, GraphError};
pub use model::{
    is_certain, precedes, EventId, ModelError, Timestamp, UncertainEvent, UncertainLog,
    UncertainTrace,
};
