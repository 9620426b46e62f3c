//! Tree-document serialization and signal-table ingestion.

mod document;
mod signals;

pub use document::{
    load_tree_file, parse_tree_document, parse_tree_file, write_evaluated_file, write_tree_document,
    write_tree_file, DocNode, DocumentDefaults, IoError, ParseMode, TreeDocument,
};
pub use signals::{
    ingest_signals, normalize_scale, Direction, ItemKey, LeafBindings, ScaleSpec, SignalError, SignalRow,
    SignalSource, SignalTable, TestingLevel,
};
