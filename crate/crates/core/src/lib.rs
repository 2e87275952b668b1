//! Scaffold-class hypergraph over molecule corpora.

pub mod algebra;
pub mod export;
pub mod fragment;
pub mod index;
pub mod ingest;
pub mod mcs;
pub mod molgraph;
pub mod scaffold;
pub mod stats;

pub use index::{HypergraphIndex, IndexBuilder};
pub use scaffold::{scaffold_key, Scaffold};
