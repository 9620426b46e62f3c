//! Canonical JSON tree documents.
//!
//! One document binds everything needed to reproduce a tree: the topology,
//! the summary-function assignment, edge weights, leaf data, and optionally
//! the computed per-node values. Output is canonical — object keys sorted,
//! children in declaration order, numbers in shortest round-trip form, one
//! trailing newline — so writing is byte-stable and `parse ∘ write` is the
//! identity on canonical form.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map as JsonMap, Value as Json};

use crate::laminar::LaminarReport;
use crate::summary::{Params, Registry, SummaryFunctionSpec};
use crate::tree::{BuildError, EvaluatedTree, MeasurementTree, MissingPolicy, Node, NodeId, NodeKind};
use crate::value::Value;

/// Recognized document format version.
pub const FORMAT_VERSION: &str = "1";

/// Parsing strictness. Strict rejects unknown fields and runs full
/// validation (laminar check, function resolution); permissive preserves
/// unknown fields and defers laminar validation to the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    Permissive,
}

/// Error reading or interpreting a tree document.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("unknown summary function `{name}` at {path}")]
    UnknownFunction { path: String, name: String },
    #[error("document failed validation:\n{0}")]
    Validation(LaminarReport),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("i/o error reading `{path}`: {source}")]
    File { path: String, source: std::io::Error },
}

/// Document-level defaults applied to the whole tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentDefaults {
    pub missing_policy: MissingPolicy,
    pub display_precision: u32,
}

impl Default for DocumentDefaults {
    fn default() -> Self {
        DocumentDefaults { missing_policy: MissingPolicy::Skip, display_precision: 2 }
    }
}

/// One node record: either `children` (internal, function required) or
/// `value` (leaf), never both.
#[derive(Debug, Clone, PartialEq)]
pub struct DocNode {
    pub label: String,
    pub function: Option<SummaryFunctionSpec>,
    pub children: Vec<DocNode>,
    /// Weight of the edge from the parent; omitted means 1.0.
    pub weight: Option<f64>,
    pub value: Option<Value>,
    /// Computed summary value, present in evaluated documents.
    pub computed: Option<Value>,
    pub missing_policy: Option<MissingPolicy>,
    pub datapoint: Option<String>,
    /// Unknown fields preserved by permissive parsing.
    pub extra: BTreeMap<String, Json>,
}

/// A parsed tree document.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TreeDocument {
    pub format_version: String,
    pub defaults: DocumentDefaults,
    pub metadata: BTreeMap<String, Json>,
    /// Optional path (relative to the document) of an external leaf-data
    /// file holding a `label path -> value` object.
    pub data_ref: Option<String>,
    pub root: DocNode,
    pub extra: BTreeMap<String, Json>,
}

impl Default for DocNode {
    fn default() -> Self {
        DocNode {
            label: String::new(),
            function: None,
            children: Vec::new(),
            weight: None,
            value: None,
            computed: None,
            missing_policy: None,
            datapoint: None,
            extra: BTreeMap::new(),
        }
    }
}

/// Parses document bytes (UTF-8 JSON).
pub fn parse_tree_document(bytes: &[u8], mode: ParseMode) -> Result<TreeDocument, IoError> {
    let json: Json = serde_json::from_slice(bytes).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc_from_json(&json, mode)
}

/// Parses bytes into a document and builds the tree. Strict mode resolves
/// every function against the registry and requires a laminar topology.
/// Documents using `data_ref` must go through [`load_tree_file`].
pub fn parse_tree_file(
    bytes: &[u8],
    mode: ParseMode,
    registry: &Registry,
) -> Result<(TreeDocument, MeasurementTree), IoError> {
    let doc = parse_tree_document(bytes, mode)?;
    if let Some(data_ref) = &doc.data_ref {
        return Err(IoError::Schema {
            path: "data_ref".into(),
            reason: format!("`{data_ref}` can only be resolved when loading from a file path"),
        });
    }
    let tree = doc.to_tree(mode, registry)?;
    Ok((doc, tree))
}

/// Reads a document from disk, resolving `data_ref` relative to it.
pub fn load_tree_file(
    path: &Path,
    mode: ParseMode,
    registry: &Registry,
) -> Result<(TreeDocument, MeasurementTree), IoError> {
    let bytes = std::fs::read(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    let doc = parse_tree_document(&bytes, mode)?;
    let external = match &doc.data_ref {
        None => None,
        Some(rel) => {
            let data_path = path.parent().unwrap_or_else(|| Path::new(".")).join(rel);
            let data_bytes = std::fs::read(&data_path)
                .map_err(|source| IoError::File { path: data_path.display().to_string(), source })?;
            let map: BTreeMap<String, Value> =
                serde_json::from_slice(&data_bytes).map_err(|e| IoError::Schema {
                    path: format!("data_ref file `{}`", data_path.display()),
                    reason: e.to_string(),
                })?;
            Some(map)
        }
    };
    let tree = doc.to_tree_with_data(mode, registry, external.as_ref())?;
    Ok((doc, tree))
}

/// Canonical bytes for a bare (unevaluated) tree.
pub fn write_tree_file(tree: &MeasurementTree) -> Vec<u8> {
    write_tree_document(&TreeDocument::from_tree(tree))
}

/// Canonical bytes for an evaluated tree, computed values included.
pub fn write_evaluated_file(evaluated: &EvaluatedTree) -> Vec<u8> {
    write_tree_document(&TreeDocument::from_evaluated(evaluated))
}

/// Canonical serialization: sorted keys, shortest round-trip numbers,
/// two-space indentation, trailing newline. Byte-stable across runs.
pub fn write_tree_document(doc: &TreeDocument) -> Vec<u8> {
    let json = doc_to_json(doc);
    let mut bytes = serde_json::to_vec_pretty(&json).expect("document serialization is infallible");
    bytes.push(b'\n');
    bytes
}

impl TreeDocument {
    pub fn from_tree(tree: &MeasurementTree) -> TreeDocument {
        TreeDocument {
            format_version: FORMAT_VERSION.to_owned(),
            defaults: DocumentDefaults {
                missing_policy: tree.default_missing_policy(),
                display_precision: DocumentDefaults::default().display_precision,
            },
            metadata: BTreeMap::new(),
            data_ref: None,
            root: doc_node_from(tree.root()),
            extra: BTreeMap::new(),
        }
    }

    pub fn from_evaluated(evaluated: &EvaluatedTree) -> TreeDocument {
        TreeDocument::from_tree(evaluated.tree()).with_computed(evaluated)
    }

    /// Copies computed values onto internal node records. The document's
    /// shape must match the evaluated tree's.
    pub fn with_computed(&self, evaluated: &EvaluatedTree) -> TreeDocument {
        let mut doc = self.clone();
        attach_computed(&mut doc.root, Vec::new(), Vec::new(), evaluated);
        doc
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: Json) -> TreeDocument {
        self.metadata.insert(key.into(), value);
        self
    }

    /// Builds the tree described by this document.
    pub fn to_tree(&self, mode: ParseMode, registry: &Registry) -> Result<MeasurementTree, IoError> {
        self.to_tree_with_data(mode, registry, None)
    }

    pub fn to_tree_with_data(
        &self,
        mode: ParseMode,
        registry: &Registry,
        external: Option<&BTreeMap<String, Value>>,
    ) -> Result<MeasurementTree, IoError> {
        if mode == ParseMode::Strict {
            check_functions(&self.root, "tree", registry)?;
        }
        let root = node_to_tree(&self.root, "", true, external)?;
        match mode {
            ParseMode::Strict => MeasurementTree::with_policy(root, self.defaults.missing_policy).map_err(|e| match e {
                BuildError::Laminar(report) => IoError::Validation(report),
                other => IoError::Build(other),
            }),
            ParseMode::Permissive => {
                MeasurementTree::permissive(root, self.defaults.missing_policy).map_err(IoError::Build)
            }
        }
    }
}

fn doc_node_from(node: &Node) -> DocNode {
    let mut record = DocNode { label: node.label.clone(), ..DocNode::default() };
    match &node.kind {
        NodeKind::Leaf { observation, datapoint } => {
            record.value = Some(observation.clone());
            record.datapoint = datapoint.clone();
        }
        NodeKind::Internal { children, edge_weights, function, missing_policy } => {
            record.function = Some(function.clone());
            record.missing_policy = *missing_policy;
            record.children = children
                .iter()
                .zip(edge_weights)
                .map(|(child, &w)| {
                    let mut child_record = doc_node_from(child);
                    if w != 1.0 {
                        child_record.weight = Some(w);
                    }
                    child_record
                })
                .collect();
        }
    }
    record
}

fn attach_computed(record: &mut DocNode, path: Vec<usize>, labels: Vec<String>, evaluated: &EvaluatedTree) {
    if !record.children.is_empty() {
        let id = NodeId::from_parts(path.clone(), labels.clone());
        if let Ok(value) = evaluated.value(&id) {
            record.computed = Some(value.clone());
        }
        for (i, child) in record.children.iter_mut().enumerate() {
            let mut child_path = path.clone();
            child_path.push(i);
            let mut child_labels = labels.clone();
            child_labels.push(child.label.clone());
            attach_computed(child, child_path, child_labels, evaluated);
        }
    }
}

fn check_functions(record: &DocNode, path: &str, registry: &Registry) -> Result<(), IoError> {
    if let Some(function) = &record.function {
        if !registry.contains(&function.name) {
            return Err(IoError::UnknownFunction { path: path.to_owned(), name: function.name.clone() });
        }
    }
    for (i, child) in record.children.iter().enumerate() {
        check_functions(child, &format!("{path}.children[{i}]"), registry)?;
    }
    Ok(())
}

fn node_to_tree(
    record: &DocNode,
    prefix: &str,
    is_root: bool,
    external: Option<&BTreeMap<String, Value>>,
) -> Result<Node, BuildError> {
    let path = if is_root {
        String::new()
    } else if prefix.is_empty() {
        record.label.clone()
    } else {
        format!("{prefix}/{}", record.label)
    };

    if record.children.is_empty() {
        if record.function.is_some() {
            return Err(BuildError::EmptyInternalNode(path));
        }
        let value = record
            .value
            .clone()
            .or_else(|| external.and_then(|m| m.get(&path).cloned()))
            .ok_or_else(|| BuildError::MissingLeafBinding(path.clone()))?;
        let mut node = Node::leaf(&record.label, value);
        if let (Some(dp), NodeKind::Leaf { datapoint, .. }) = (&record.datapoint, &mut node.kind) {
            *datapoint = Some(dp.clone());
        }
        return Ok(node);
    }

    let function = record
        .function
        .clone()
        .ok_or_else(|| BuildError::MissingFunctionBinding(path.clone()))?;
    let mut children = Vec::with_capacity(record.children.len());
    for child_record in &record.children {
        let child = node_to_tree(child_record, &path, false, external)?;
        children.push((child, child_record.weight.unwrap_or(1.0)));
    }
    let mut node = Node::internal_weighted(&record.label, function, children);
    if let Some(policy) = record.missing_policy {
        node = node.with_missing_policy(policy);
    }
    Ok(node)
}

// ---------------------------------------------------------------------------
// JSON reading
// ---------------------------------------------------------------------------

fn schema(path: &str, reason: impl Into<String>) -> IoError {
    IoError::Schema { path: path.to_owned(), reason: reason.into() }
}

fn doc_from_json(json: &Json, mode: ParseMode) -> Result<TreeDocument, IoError> {
    let obj = json.as_object().ok_or_else(|| schema("$", "document must be a JSON object"))?;
    let mut doc = TreeDocument { format_version: FORMAT_VERSION.to_owned(), ..TreeDocument::default() };
    let mut have_tree = false;

    for (key, value) in obj {
        match key.as_str() {
            "format_version" => {
                let v = value
                    .as_str()
                    .ok_or_else(|| schema("format_version", "must be a string"))?;
                if v != FORMAT_VERSION {
                    return Err(schema("format_version", format!("unrecognized version `{v}`")));
                }
                doc.format_version = v.to_owned();
            }
            "defaults" => doc.defaults = defaults_from_json(value)?,
            "metadata" => {
                let map = value.as_object().ok_or_else(|| schema("metadata", "must be an object"))?;
                doc.metadata = map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            }
            "data_ref" => {
                doc.data_ref = Some(
                    value
                        .as_str()
                        .ok_or_else(|| schema("data_ref", "must be a string"))?
                        .to_owned(),
                );
            }
            "tree" => {
                doc.root = node_from_json(value, "tree", mode)?;
                have_tree = true;
            }
            other => match mode {
                ParseMode::Strict => return Err(schema(other, "unknown document field")),
                ParseMode::Permissive => {
                    doc.extra.insert(other.to_owned(), value.clone());
                }
            },
        }
    }

    if !have_tree {
        return Err(schema("tree", "required field is missing"));
    }
    Ok(doc)
}

fn defaults_from_json(json: &Json) -> Result<DocumentDefaults, IoError> {
    let obj = json.as_object().ok_or_else(|| schema("defaults", "must be an object"))?;
    let mut defaults = DocumentDefaults::default();
    for (key, value) in obj {
        match key.as_str() {
            "missing_policy" => {
                let s = value
                    .as_str()
                    .ok_or_else(|| schema("defaults.missing_policy", "must be a string"))?;
                defaults.missing_policy = MissingPolicy::parse(s)
                    .ok_or_else(|| schema("defaults.missing_policy", format!("unknown policy `{s}`")))?;
            }
            "display_precision" => {
                let p = value
                    .as_u64()
                    .filter(|&p| p <= 17)
                    .ok_or_else(|| schema("defaults.display_precision", "must be an integer in 0..=17"))?;
                defaults.display_precision = p as u32;
            }
            other => return Err(schema(&format!("defaults.{other}"), "unknown defaults field")),
        }
    }
    Ok(defaults)
}

fn node_from_json(json: &Json, path: &str, mode: ParseMode) -> Result<DocNode, IoError> {
    let obj = json
        .as_object()
        .ok_or_else(|| schema(path, "node record must be an object"))?;
    let mut record = DocNode::default();
    let mut have_label = false;

    for (key, value) in obj {
        match key.as_str() {
            "label" => {
                record.label = value
                    .as_str()
                    .ok_or_else(|| schema(&format!("{path}.label"), "must be a string"))?
                    .to_owned();
                have_label = true;
            }
            "function" => record.function = Some(function_from_json(value, &format!("{path}.function"))?),
            "children" => {
                let children = value
                    .as_array()
                    .ok_or_else(|| schema(&format!("{path}.children"), "must be an array"))?;
                record.children = children
                    .iter()
                    .enumerate()
                    .map(|(i, c)| node_from_json(c, &format!("{path}.children[{i}]"), mode))
                    .collect::<Result<_, _>>()?;
            }
            "weight" => {
                let w = value
                    .as_f64()
                    .ok_or_else(|| schema(&format!("{path}.weight"), "must be a number"))?;
                record.weight = Some(w);
            }
            "value" => {
                record.value = Some(value_from_json(value, &format!("{path}.value"))?);
            }
            "computed" => {
                record.computed = Some(value_from_json(value, &format!("{path}.computed"))?);
            }
            "missing_policy" => {
                let s = value
                    .as_str()
                    .ok_or_else(|| schema(&format!("{path}.missing_policy"), "must be a string"))?;
                record.missing_policy = Some(
                    MissingPolicy::parse(s)
                        .ok_or_else(|| schema(&format!("{path}.missing_policy"), format!("unknown policy `{s}`")))?,
                );
            }
            "datapoint" => {
                record.datapoint = Some(
                    value
                        .as_str()
                        .ok_or_else(|| schema(&format!("{path}.datapoint"), "must be a string"))?
                        .to_owned(),
                );
            }
            other => match mode {
                ParseMode::Strict => return Err(schema(&format!("{path}.{other}"), "unknown node field")),
                ParseMode::Permissive => {
                    record.extra.insert(other.to_owned(), value.clone());
                }
            },
        }
    }

    if !have_label {
        return Err(schema(&format!("{path}.label"), "required field is missing"));
    }
    if !record.children.is_empty() && record.value.is_some() {
        return Err(schema(path, "node has both `children` and `value`"));
    }
    Ok(record)
}

fn function_from_json(json: &Json, path: &str) -> Result<SummaryFunctionSpec, IoError> {
    let obj = json.as_object().ok_or_else(|| schema(path, "must be an object"))?;
    let mut name: Option<String> = None;
    let mut params = Params::new();
    for (key, value) in obj {
        match key.as_str() {
            "name" => {
                name = Some(
                    value
                        .as_str()
                        .ok_or_else(|| schema(&format!("{path}.name"), "must be a string"))?
                        .to_owned(),
                )
            }
            "params" => {
                let map = value
                    .as_object()
                    .ok_or_else(|| schema(&format!("{path}.params"), "must be an object"))?;
                params = map.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            }
            other => return Err(schema(&format!("{path}.{other}"), "unknown function field")),
        }
    }
    let name = name.ok_or_else(|| schema(&format!("{path}.name"), "required field is missing"))?;
    Ok(SummaryFunctionSpec { name, params })
}

fn value_from_json(json: &Json, path: &str) -> Result<Value, IoError> {
    serde_json::from_value(json.clone()).map_err(|e| schema(path, e.to_string()))
}

// ---------------------------------------------------------------------------
// JSON writing
// ---------------------------------------------------------------------------

fn doc_to_json(doc: &TreeDocument) -> Json {
    let mut obj = JsonMap::new();
    obj.insert("format_version".into(), json!(doc.format_version));
    obj.insert(
        "defaults".into(),
        json!({
            "missing_policy": doc.defaults.missing_policy.as_str(),
            "display_precision": doc.defaults.display_precision,
        }),
    );
    if !doc.metadata.is_empty() {
        obj.insert("metadata".into(), Json::Object(doc.metadata.clone().into_iter().collect()));
    }
    if let Some(data_ref) = &doc.data_ref {
        obj.insert("data_ref".into(), json!(data_ref));
    }
    obj.insert("tree".into(), node_to_json(&doc.root));
    for (k, v) in &doc.extra {
        obj.entry(k.clone()).or_insert_with(|| v.clone());
    }
    Json::Object(obj)
}

fn node_to_json(record: &DocNode) -> Json {
    let mut obj = JsonMap::new();
    obj.insert("label".into(), json!(record.label));
    if let Some(function) = &record.function {
        let mut f = JsonMap::new();
        f.insert("name".into(), json!(function.name));
        if !function.params.is_empty() {
            f.insert("params".into(), Json::Object(function.params.clone().into_iter().collect()));
        }
        obj.insert("function".into(), Json::Object(f));
    }
    if !record.children.is_empty() {
        obj.insert("children".into(), Json::Array(record.children.iter().map(node_to_json).collect()));
    }
    match record.weight {
        Some(w) if w != 1.0 => {
            obj.insert("weight".into(), json!(w));
        }
        _ => {}
    }
    if let Some(value) = &record.value {
        obj.insert("value".into(), serde_json::to_value(value).expect("value serializes"));
    }
    if let Some(computed) = &record.computed {
        obj.insert("computed".into(), serde_json::to_value(computed).expect("value serializes"));
    }
    if let Some(policy) = record.missing_policy {
        obj.insert("missing_policy".into(), json!(policy.as_str()));
    }
    if let Some(datapoint) = &record.datapoint {
        obj.insert("datapoint".into(), json!(datapoint));
    }
    for (k, v) in &record.extra {
        obj.entry(k.clone()).or_insert_with(|| v.clone());
    }
    Json::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summary::default_registry;

    const FOUR_LEAF_MEAN: &str = r#"{
        "format_version": "1",
        "tree": {
            "label": "measurand",
            "function": {"name": "mean"},
            "children": [
                {"label": "construct 1", "function": {"name": "mean"}, "children": [
                    {"label": "x1", "value": 1.0},
                    {"label": "x2", "value": 3.0}
                ]},
                {"label": "construct 2", "function": {"name": "mean"}, "children": [
                    {"label": "x3", "value": 2.0},
                    {"label": "x4", "value": 2.0}
                ]}
            ]
        }
    }"#;

    #[test]
    fn parses_and_evaluates_the_mean_example() {
        let (_, tree) = parse_tree_file(FOUR_LEAF_MEAN.as_bytes(), ParseMode::Strict, default_registry()).unwrap();
        let ev = tree.evaluate().unwrap();
        assert_eq!(ev.root_value(), &Value::Number(2.0));
    }

    #[test]
    fn both_children_and_value_is_a_schema_error() {
        let doc = r#"{"format_version": "1", "tree": {"label": "r", "function": {"name": "mean"},
            "children": [{"label": "x", "value": 1}], "value": 2}}"#;
        let err = parse_tree_document(doc.as_bytes(), ParseMode::Strict).unwrap_err();
        assert!(matches!(err, IoError::Schema { .. }), "{err}");
    }

    #[test]
    fn malformed_bytes_are_a_syntax_error() {
        let err = parse_tree_document(b"{not json", ParseMode::Strict).unwrap_err();
        assert!(matches!(err, IoError::Syntax { .. }));
    }

    #[test]
    fn unknown_fields_strict_vs_permissive() {
        let doc = r#"{"format_version": "1", "provenance": "pilot",
            "tree": {"label": "r", "value": 1.0, "note": "keep me"}}"#;
        let err = parse_tree_document(doc.as_bytes(), ParseMode::Strict).unwrap_err();
        assert!(matches!(err, IoError::Schema { .. }));

        let parsed = parse_tree_document(doc.as_bytes(), ParseMode::Permissive).unwrap();
        assert_eq!(parsed.extra.get("provenance"), Some(&serde_json::json!("pilot")));
        assert_eq!(parsed.root.extra.get("note"), Some(&serde_json::json!("keep me")));
        // Preserved fields survive a write.
        let bytes = write_tree_document(&parsed);
        let reparsed = parse_tree_document(&bytes, ParseMode::Permissive).unwrap();
        assert_eq!(parsed, reparsed);
    }

    #[test]
    fn unknown_function_is_rejected_in_strict_mode() {
        let doc = r#"{"format_version": "1", "tree": {"label": "r",
            "function": {"name": "no_such"}, "children": [{"label": "x", "value": 1}]}}"#;
        let err = parse_tree_file(doc.as_bytes(), ParseMode::Strict, default_registry()).unwrap_err();
        assert!(matches!(err, IoError::UnknownFunction { .. }));
    }

    #[test]
    fn unrecognized_version_is_rejected() {
        let doc = r#"{"format_version": "99", "tree": {"label": "r", "value": 1}}"#;
        assert!(parse_tree_document(doc.as_bytes(), ParseMode::Strict).is_err());
        assert!(parse_tree_document(doc.as_bytes(), ParseMode::Permissive).is_err());
    }

    #[test]
    fn write_is_a_fixpoint_of_parse() {
        let (doc, tree) = parse_tree_file(FOUR_LEAF_MEAN.as_bytes(), ParseMode::Strict, default_registry()).unwrap();
        let first = write_tree_document(&doc);
        let (doc2, tree2) = parse_tree_file(&first, ParseMode::Strict, default_registry()).unwrap();
        let second = write_tree_document(&doc2);
        assert_eq!(first, second);
        assert_eq!(tree, tree2);
    }

    #[test]
    fn evaluated_documents_carry_computed_values() {
        let (_, tree) = parse_tree_file(FOUR_LEAF_MEAN.as_bytes(), ParseMode::Strict, default_registry()).unwrap();
        let ev = tree.evaluate().unwrap();
        let bytes = write_evaluated_file(&ev);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"computed\": 2.0"), "{text}");
        // Re-parsing and re-evaluating is a fixpoint.
        let (doc, tree2) = parse_tree_file(&bytes, ParseMode::Strict, default_registry()).unwrap();
        let ev2 = tree2.evaluate().unwrap();
        assert_eq!(write_tree_document(&doc.with_computed(&ev2)), bytes);
    }

    #[test]
    fn data_ref_binds_external_leaf_data() {
        let dir = tempfile::tempdir().unwrap();
        let data_path = dir.path().join("leaves.json");
        std::fs::write(&data_path, br#"{"x1": 4.0, "x2": 6.0}"#).unwrap();
        let doc_path = dir.path().join("tree.json");
        std::fs::write(
            &doc_path,
            br#"{"format_version": "1", "data_ref": "leaves.json",
                "tree": {"label": "r", "function": {"name": "mean"},
                         "children": [{"label": "x1"}, {"label": "x2"}]}}"#,
        )
        .unwrap();
        let (_, tree) = load_tree_file(&doc_path, ParseMode::Strict, default_registry()).unwrap();
        assert_eq!(tree.evaluate().unwrap().root_value(), &Value::Number(5.0));
    }

    #[test]
    fn weights_round_trip_and_unit_weights_are_omitted() {
        let doc = r#"{"format_version": "1", "tree": {"label": "r",
            "function": {"name": "weighted_mean"},
            "children": [{"label": "a", "value": 1.0, "weight": 3.0},
                         {"label": "b", "value": 5.0, "weight": 1.0}]}}"#;
        let (parsed, tree) = parse_tree_file(doc.as_bytes(), ParseMode::Strict, default_registry()).unwrap();
        assert_eq!(tree.evaluate().unwrap().root_value(), &Value::Number(2.0));
        let text = String::from_utf8(write_tree_document(&parsed)).unwrap();
        assert!(text.contains("\"weight\": 3.0"));
        assert!(!text.contains("\"weight\": 1.0"));
    }
}
