//! Travel-planning agent engine: outline generation, tool-driven information
//! collection, candidate plan search, constraint verification and corpus metrics.

pub mod collect;
pub mod domain;
pub mod harness;
pub mod llm;
pub mod metrics;
pub mod outline;
pub mod planning;
pub mod sandbox;
pub mod verify;

#[cfg(test)]
pub(crate) mod testkit;

/// Corpus report with float rates, for display and persistence.
pub type CorpusReport = metrics::CorpusReport<f64>;
/// Corpus report with exact rational rates, for equality checks.
pub type ExactCorpusReport = metrics::CorpusReport<num_rational::Rational64>;
