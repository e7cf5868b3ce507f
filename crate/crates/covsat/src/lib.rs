//! File formats, oracles and the differential test harness for the
//! covering engine in `covsat_core`.

pub mod decomp_format;
pub mod dimacs;
pub mod generate;
pub mod harness;
pub mod oracle;
pub mod probe;
pub mod report;
