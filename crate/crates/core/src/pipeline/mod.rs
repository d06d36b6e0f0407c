//! End-to-end runs: umbrella corpus aggregation and corpus evaluation.

pub mod aggregate;
pub mod config;
pub mod eval;
pub mod output;

pub use aggregate::{aggregate, AggregateSummary};
pub use config::{PipelineConfig, SourceSpec};
pub use eval::{run_eval, split_named, EvalInput, EvalParams, EvalSummary};
pub use output::{digest, OutputSet, StagedOutput};
