//! Command-line front end: fixture regression, report emission, OEIS
//! cross-checking, and resumable scan streaming. The `stern` binary is a
//! thin argument parser over [`commands`].

pub mod bfile;
pub mod checkpoint;
pub mod commands;
pub mod table1;

pub use commands::{GlobalOpts, Outcome, OutputFormat};
