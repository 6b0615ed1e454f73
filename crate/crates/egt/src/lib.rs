//! File formats, configuration and pipelines for the `egt` command-line tool.
//!
//! The numerical work lives in [`egt_core`]; this crate turns a [`RunConfig`]
//! into artifacts on disk:
//!
//! | file | columns |
//! |------|---------|
//! | `states.csv` | `index,s1,s2,s3` |
//! | `b_matrix.csv` | header of strategy names, then the rows of `B` |
//! | `transitions.csv` | `from_index,to_index,probability` |
//! | `absorption.csv` | `state_index,class_0,...,class_{K-1},r,g,b` |
//! | `trajectory.csv` | `generation,s1,s2,s3` |
//! | `stg.dot` | state transition graph with pinned `(s1, s2)` positions |
//! | `run_metadata.json` | game, protocol, `N`, `T`, `eta`, PRNG, tool version |
//!
//! Probabilities in CSV files carry 17 significant digits; DOT edge labels
//! are rounded to 4 decimals. All files are UTF-8 with LF line endings.

pub mod config;
mod error;
pub mod export;
pub mod pipeline;
pub mod report;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use pipeline::{Analysis, Experiment};
