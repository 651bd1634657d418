//! Toolkit for extremal graph theory on small graphs.
//!
//! Graphs of order up to ten are enumerated up to isomorphism and identified
//! by the graph6 text of their canonical form ([`Signature`]). On top of that
//! sit exact invariants, per-invariant column stores, exact 2D convex hulls in
//! invariant space, minimal obstruction sets for hereditary classes, and the
//! metagraph of local edge transformations used for proofs by transformation.

pub mod canon;
pub mod enumerate;
pub mod graph;
pub mod graph6;
pub mod hull;
pub mod invariants;
pub mod obstruction;
pub mod store;
pub mod transproof;

pub use canon::{canonical_form, is_isomorphic};
pub use enumerate::{enumerate_all, GraphClass};
pub use graph::{Graph, VertexPermutation};
pub use graph6::{decode_graph6, encode_graph6, Signature};
