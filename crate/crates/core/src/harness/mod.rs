//! Run configuration, landscape CSVs and the commands behind the `ipscore`
//! binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{
    cmd_axioms, cmd_impossibility, cmd_landscape, cmd_score, cmd_verify, AxiomsOutcome, ImpossibilityOutcome,
    ScoreOutcome, Verdict, VerifyOutcome,
};
pub use config::{BeliefSpec, Mode, Overrides, RunConfig};
pub use csv::{fmt_g12, landscape_csv, write_csv};
