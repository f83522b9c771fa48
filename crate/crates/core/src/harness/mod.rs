//! Benchmark cases, time loop, diagnostics and CSV output.

pub mod cases;
pub mod config;
pub mod metrics;
pub mod output;
pub mod riemann;
pub mod run;
pub mod study;

pub use cases::{BoundarySpec, CaseSpec, InitialData, SolverKind};
pub use run::{run, Probe, Profile, RunOutput, Simulation};
