//! Command-line front end for `orbitlab-core`: JSON input parsing, command
//! dispatch and deterministic reports.

pub mod expr;
pub mod input;
pub mod run;

pub use input::{parse_system, serialize_problem, InputError, Problem};
pub use run::{run, run_text, Cli, Command, Format, Outcome, RunConfig};
