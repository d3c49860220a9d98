//! Concept graphs of identifiers extracted from Java methods, and a small
//! jointly trained token + graph-attention encoder for natural-language code
//! search.
//!
//! The pipeline runs `syntax` (lex/parse a snippet) → `graph` (typed concept
//! graph) → `corpus` (⟨graph, code, query⟩ triplets and splits) → `model`
//! (encoders and contrastive loss, built on the `nn` kernel) → `search`
//! (training, indexing, ranking and MRR evaluation). `cli` wires these into
//! the `cgsearch` binary.

#[cfg(feature = "cli")]
pub mod cli;
pub mod corpus;
pub mod graph;
pub mod model;
pub mod nn;
pub mod search;
pub mod syntax;
