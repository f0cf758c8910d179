//! Spec files, built-in manifolds, sampling, reports and the command runner.

pub mod audit;
mod report;
mod run;
mod sampling;
mod spec;

pub use report::{fmt_num, AuditSample, AuditSummary, Checks, PointReport, Report, Verdict};
pub use run::{analyze, run, Command, Options, PotentialArg, Task};
pub use sampling::{sample_points, BOX, GRID};
pub use spec::{builtin, fill_structure, load_spec, parse_spec, resolve, ManifoldSpec, SpecError, BUILTINS};

/// Failures that stop a command before a report exists (exit code 2).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("sampling exhausted: {rejections} rejections while drawing {requested} point(s) from the domain")]
    SamplingExhausted { requested: usize, rejections: usize },
    #[error("at {point}: {message}")]
    AtPoint { point: String, message: String },
    #[error("{0}")]
    Input(String),
}
