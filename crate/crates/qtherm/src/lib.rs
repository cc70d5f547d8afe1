//! Command-line front end and file formats for `qtherm-core`.
//!
//! * [`io`]: column files in, 17-significant-digit CSV and JSON out.
//! * [`check`]: seeded property suites over the whole core.
//! * [`cli`]: the `qtherm` subcommands and their exit codes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod cli;
pub mod io;
