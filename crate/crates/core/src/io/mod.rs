//! File formats: dataset CSVs and the JSON report document.

pub mod dataset;
pub mod report;

pub use dataset::{parse_pairs, parse_triples, read_pairs, read_triples, write_pairs, write_triples};
pub use report::ReportDocument;
