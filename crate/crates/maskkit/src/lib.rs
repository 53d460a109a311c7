//! Command-line front end for `maskkit-core`: JSON file formats, input
//! handling and the subcommand implementations.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
