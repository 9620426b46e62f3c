//! Measurement trees: hierarchical, interpretable metrics.
//!
//! A measurement tree pairs a laminar (nested-or-disjoint) clustering of a
//! dataset with a summary function at every internal node. Leaves hold
//! observed values; each parent summarizes its children; the root carries the
//! headline metric. Trees that share a topology and order-inducing summary
//! functions can be compared node-wise, which yields a partial order over
//! trees rather than a forced total ranking.
//!
//! The crate is organized around that lifecycle:
//!
//! - [`value`] — the tagged observation/summary value type.
//! - [`summary`] — the registry of named summary functions (mean, median,
//!   max, min, sum, count, weighted_mean, accuracy, mean_win_rate, plus
//!   user-registered extensions).
//! - [`tree`] — tree construction, validation, bottom-up evaluation, subtree
//!   extraction, and depth pruning.
//! - [`laminar`] — set-family validation against the nested-or-disjoint
//!   clauses, usable on unvalidated candidates.
//! - [`order`] — equality, the node-wise dominance relation, and poset
//!   computation with executable axiom checks.
//! - [`io`] — canonical JSON tree documents and delimited signal-table
//!   ingestion with scale normalization.
//! - [`catalog`] — pre-built instrument topologies (the CoRIx risk
//!   instrument, a HELM-style accuracy tree) and example trees.
//! - [`render`] — deterministic text and Graphviz DOT renderings.
//!
//! All operations are pure: trees are immutable after construction, and
//! identical inputs produce bit-identical outputs.

pub mod catalog;
pub mod io;
pub mod laminar;
pub mod order;
pub mod render;
pub mod summary;
pub mod tree;
pub mod value;

pub use crate::laminar::{validate_laminar, LaminarReport, LaminarViolation, SetFamily};
pub use crate::order::{compare, poset, trees_equal, verify_poset_axioms, ComparisonReport, Relation, Scope};
pub use crate::summary::{builtin_catalog, default_registry, Registry, SummaryFunctionSpec};
pub use crate::tree::{build_tree, EvaluatedTree, MeasurementTree, MissingPolicy, Node, NodeId, TreeSpec};
pub use crate::value::{Value, ValueKind};
