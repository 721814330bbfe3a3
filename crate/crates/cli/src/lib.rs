//! Command line front end: expression parsing and subcommand dispatch.

pub mod commands;
pub mod parse;

pub use commands::{run, Command, Report, Status};
pub use parse::parse_expression;
