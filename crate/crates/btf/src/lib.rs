//! File formats, reports and thread-parallel drivers for `btf-core`, plus
//! the `btf` command-line tool.

pub mod config;
pub mod format;
pub mod mps;
pub mod report;
pub mod run;
