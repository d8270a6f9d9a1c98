//! File formats, reports and the command-line front-end for `optcausal`.

pub mod cli;
pub mod payload;
pub mod report;
pub mod text;

pub use cli::{run, Outcome};
