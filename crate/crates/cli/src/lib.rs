//! Building blocks of the `phwarm` command-line tool: synthetic data,
//! perturbation suites, CSV reports and the point-cloud optimization demo.

pub mod optimize;
pub mod report;
pub mod suites;
pub mod synth;
