//! Measurement-tree data model, construction, and bottom-up evaluation.
//!
//! A tree is immutable once built: every constructor validates structure
//! (sibling label uniqueness, positive edge weights, non-empty internal
//! nodes) and the strict path additionally checks that the implied leaf-set
//! family is laminar. Evaluation walks the tree post-order, applying each
//! internal node's summary function to its children's values; leaves pass
//! their observation through unchanged. All operations here are pure and
//! deterministic.

use std::collections::btree_map;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::laminar::{validate_family, FamilySet, LaminarReport, SetFamily};
use crate::summary::{default_registry, ApplyError, Registry, SummaryFunctionSpec};
use crate::value::Value;

/// How an internal node treats missing children during aggregation.
///
/// `Skip` (the instrument default) excludes missing children from the
/// aggregate; an all-missing child list yields `Missing`, which then
/// propagates upward. `Propagate` turns any missing child into a missing
/// aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Skip,
    Propagate,
}

impl MissingPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            MissingPolicy::Skip => "skip",
            MissingPolicy::Propagate => "propagate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "skip" => Some(MissingPolicy::Skip),
            "propagate" => Some(MissingPolicy::Propagate),
            _ => None,
        }
    }
}

/// Address of a node: child indexes from the root plus the matching label
/// path. The root is the empty path. Label paths are what make nodes
/// correspond across trees; sibling labels are unique, so the two forms are
/// in bijection within a tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    path: Vec<usize>,
    labels: Vec<String>,
}

impl NodeId {
    pub fn root() -> Self {
        NodeId { path: Vec::new(), labels: Vec::new() }
    }

    pub fn path(&self) -> &[usize] {
        &self.path
    }

    /// Labels from the root's child down to this node (empty for the root).
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    /// Own label; `None` for the root (whose label lives on the tree).
    pub fn label(&self) -> Option<&str> {
        self.labels.last().map(String::as_str)
    }

    /// Slash-joined label path; empty string for the root.
    pub fn to_path_string(&self) -> String {
        self.labels.join("/")
    }

    fn child(&self, index: usize, label: &str) -> NodeId {
        let mut path = self.path.clone();
        path.push(index);
        let mut labels = self.labels.clone();
        labels.push(label.to_owned());
        NodeId { path, labels }
    }

    pub(crate) fn from_parts(path: Vec<usize>, labels: Vec<String>) -> NodeId {
        NodeId { path, labels }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            f.write_str("(root)")
        } else {
            f.write_str(&self.to_path_string())
        }
    }
}

/// Leaf payload or internal structure of a [`Node`].
#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Leaf {
        observation: Value,
        /// Identity of the underlying datapoint; defaults to the leaf's
        /// label path. Distinct leaves sharing a datapoint id denote the
        /// same element observed under two constructs, which the laminar
        /// check flags as an overlap.
        datapoint: Option<String>,
    },
    Internal {
        children: Vec<Node>,
        /// Parent→child edge weights, one per child, all positive. Only
        /// weight-aware summary functions consume them.
        edge_weights: Vec<f64>,
        function: SummaryFunctionSpec,
        missing_policy: Option<MissingPolicy>,
    },
}

/// One tree node: a construct label plus leaf or internal content.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub label: String,
    pub kind: NodeKind,
}

impl Node {
    pub fn leaf(label: impl Into<String>, observation: Value) -> Node {
        Node {
            label: label.into(),
            kind: NodeKind::Leaf { observation, datapoint: None },
        }
    }

    pub fn leaf_with_datapoint(label: impl Into<String>, observation: Value, datapoint: impl Into<String>) -> Node {
        Node {
            label: label.into(),
            kind: NodeKind::Leaf { observation, datapoint: Some(datapoint.into()) },
        }
    }

    /// Internal node with unit edge weights.
    pub fn internal(label: impl Into<String>, function: SummaryFunctionSpec, children: Vec<Node>) -> Node {
        let weights = vec![1.0; children.len()];
        Node {
            label: label.into(),
            kind: NodeKind::Internal { children, edge_weights: weights, function, missing_policy: None },
        }
    }

    /// Internal node with explicit per-child edge weights.
    pub fn internal_weighted(
        label: impl Into<String>,
        function: SummaryFunctionSpec,
        children: Vec<(Node, f64)>,
    ) -> Node {
        let (children, weights): (Vec<_>, Vec<_>) = children.into_iter().unzip();
        Node {
            label: label.into(),
            kind: NodeKind::Internal { children, edge_weights: weights, function, missing_policy: None },
        }
    }

    pub fn with_missing_policy(mut self, policy: MissingPolicy) -> Node {
        if let NodeKind::Internal { missing_policy, .. } = &mut self.kind {
            *missing_policy = Some(policy);
        }
        self
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }

    pub fn children(&self) -> &[Node] {
        match &self.kind {
            NodeKind::Leaf { .. } => &[],
            NodeKind::Internal { children, .. } => children,
        }
    }

    pub fn function(&self) -> Option<&SummaryFunctionSpec> {
        match &self.kind {
            NodeKind::Leaf { .. } => None,
            NodeKind::Internal { function, .. } => Some(function),
        }
    }

    pub fn observation(&self) -> Option<&Value> {
        match &self.kind {
            NodeKind::Leaf { observation, .. } => Some(observation),
            NodeKind::Internal { .. } => None,
        }
    }
}

/// Error constructing a tree.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error("leaf `{0}` has no observation binding")]
    MissingLeafBinding(String),
    #[error("internal node `{0}` has no summary-function binding")]
    MissingFunctionBinding(String),
    #[error("duplicate sibling label `{label}` under `{parent}`")]
    DuplicateSiblingLabel { parent: String, label: String },
    #[error("internal node `{0}` has no children")]
    EmptyInternalNode(String),
    #[error("edge weight {weight} at `{node}` is not positive")]
    NonPositiveWeight { node: String, weight: f64 },
    #[error("node `{node}` declares {weights} weights for {children} children")]
    WeightCountMismatch { node: String, children: usize, weights: usize },
    #[error("non-finite observation at `{0}`")]
    NonFiniteObservation(String),
    #[error("tree is not a valid hierarchical clustering: {0}")]
    Laminar(LaminarReport),
}

/// Unknown node address.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("no node at `{0}`")]
pub struct UnknownNode(pub String);

/// A validated measurement tree: laminar topology, a summary function at
/// every internal node, and observations at leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementTree {
    root: Node,
    default_missing_policy: MissingPolicy,
    leaf_count: usize,
}

impl MeasurementTree {
    /// Builds a tree, enforcing both structural invariants and laminarity of
    /// the implied leaf-set family.
    pub fn new(root: Node) -> Result<Self, BuildError> {
        Self::with_policy(root, MissingPolicy::Skip)
    }

    pub fn with_policy(root: Node, default_missing_policy: MissingPolicy) -> Result<Self, BuildError> {
        let tree = Self::permissive(root, default_missing_policy)?;
        let report = tree.validate_laminar();
        if !report.is_valid() {
            return Err(BuildError::Laminar(report));
        }
        Ok(tree)
    }

    /// Builds a tree with structural checks only, deferring the laminar
    /// check to [`MeasurementTree::validate_laminar`]. This is the permissive
    /// parser's entry point for candidate structures.
    pub fn permissive(root: Node, default_missing_policy: MissingPolicy) -> Result<Self, BuildError> {
        validate_structure(&root, &NodeId::root())?;
        let leaf_count = count_leaves(&root);
        Ok(MeasurementTree { root, default_missing_policy, leaf_count })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn default_missing_policy(&self) -> MissingPolicy {
        self.default_missing_policy
    }

    /// Number of leaves (the dataset size N).
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    /// All node ids in pre-order.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        collect_ids(&self.root, NodeId::root(), &mut out);
        out
    }

    /// Summary-function assignment for every internal node.
    pub fn function_table(&self) -> BTreeMap<NodeId, &SummaryFunctionSpec> {
        let mut table = BTreeMap::new();
        let mut stack = vec![(&self.root, NodeId::root())];
        while let Some((node, id)) = stack.pop() {
            if let NodeKind::Internal { children, function, .. } = &node.kind {
                for (i, child) in children.iter().enumerate() {
                    stack.push((child, id.child(i, &child.label)));
                }
                table.insert(id, function);
            }
        }
        table
    }

    /// Node lookup by id; the id's labels must match the tree's.
    pub fn node(&self, id: &NodeId) -> Result<&Node, UnknownNode> {
        let mut node = &self.root;
        for (depth, &i) in id.path.iter().enumerate() {
            node = node
                .children()
                .get(i)
                .filter(|c| c.label == id.labels[depth])
                .ok_or_else(|| UnknownNode(id.to_path_string()))?;
        }
        Ok(node)
    }

    /// Resolves a slash-separated label path (empty string = root).
    pub fn resolve(&self, label_path: &str) -> Result<NodeId, UnknownNode> {
        let mut id = NodeId::root();
        if label_path.is_empty() {
            return Ok(id);
        }
        let mut node = &self.root;
        for segment in label_path.split('/') {
            let (i, child) = node
                .children()
                .iter()
                .enumerate()
                .find(|(_, c)| c.label == segment)
                .ok_or_else(|| UnknownNode(label_path.to_owned()))?;
            id = id.child(i, segment);
            node = child;
        }
        Ok(id)
    }

    /// Extracts the subtree rooted at `id` as an independently valid tree.
    /// A leaf id yields a degenerate single-node tree.
    pub fn subtree(&self, id: &NodeId) -> Result<MeasurementTree, UnknownNode> {
        let node = self.node(id)?.clone();
        Ok(MeasurementTree::with_policy(node, self.default_missing_policy)
            .expect("subtree of a structurally valid tree is valid"))
    }

    /// The leaf-set family implied by the tree: one set per node holding the
    /// datapoint ids of the leaves below it.
    pub fn to_set_family(&self) -> SetFamily {
        let mut sets = Vec::new();
        let mut universe = BTreeSet::new();
        collect_sets(&self.root, NodeId::root(), &mut sets, &mut universe);
        SetFamily { universe, sets }
    }

    /// Checks the implied leaf-set family clause by clause; an empty report
    /// means the tree is a valid hierarchical clustering.
    pub fn validate_laminar(&self) -> LaminarReport {
        validate_family(&self.to_set_family())
    }

    /// Warnings about assignments that silently ignore configuration, e.g.
    /// non-unit edge weights under a weight-unaware function.
    pub fn lint(&self, registry: &Registry) -> Vec<String> {
        let mut warnings = Vec::new();
        lint_node(&self.root, &NodeId::root(), registry, &mut warnings);
        warnings
    }

    /// Evaluates with the built-in registry.
    pub fn evaluate(&self) -> Result<EvaluatedTree, EvalError> {
        self.evaluate_with(default_registry())
    }

    /// Bottom-up evaluation: post-order traversal applying each internal
    /// node's summary function to its children's values under the node's
    /// missing-data policy. Deterministic; identical inputs yield identical
    /// results.
    pub fn evaluate_with(&self, registry: &Registry) -> Result<EvaluatedTree, EvalError> {
        let mut values = BTreeMap::new();
        eval_node(&self.root, NodeId::root(), registry, self.default_missing_policy, &mut values)?;
        Ok(EvaluatedTree { tree: self.clone(), values })
    }
}

fn validate_structure(node: &Node, id: &NodeId) -> Result<(), BuildError> {
    match &node.kind {
        NodeKind::Leaf { observation, .. } => observation
            .check_finite()
            .map_err(|_| BuildError::NonFiniteObservation(id.to_path_string())),
        NodeKind::Internal { children, edge_weights, .. } => {
            if children.is_empty() {
                return Err(BuildError::EmptyInternalNode(id.to_path_string()));
            }
            if edge_weights.len() != children.len() {
                return Err(BuildError::WeightCountMismatch {
                    node: id.to_path_string(),
                    children: children.len(),
                    weights: edge_weights.len(),
                });
            }
            if let Some(&w) = edge_weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                return Err(BuildError::NonPositiveWeight { node: id.to_path_string(), weight: w });
            }
            let mut seen = BTreeSet::new();
            for (i, child) in children.iter().enumerate() {
                if !seen.insert(child.label.as_str()) {
                    return Err(BuildError::DuplicateSiblingLabel {
                        parent: id.to_path_string(),
                        label: child.label.clone(),
                    });
                }
                validate_structure(child, &id.child(i, &child.label))?;
            }
            Ok(())
        }
    }
}

fn count_leaves(node: &Node) -> usize {
    match &node.kind {
        NodeKind::Leaf { .. } => 1,
        NodeKind::Internal { children, .. } => children.iter().map(count_leaves).sum(),
    }
}

fn collect_ids(node: &Node, id: NodeId, out: &mut Vec<NodeId>) {
    for (i, child) in node.children().iter().enumerate() {
        collect_ids(child, id.child(i, &child.label), out);
    }
    out.push(id);
}

fn collect_sets(node: &Node, id: NodeId, sets: &mut Vec<FamilySet>, universe: &mut BTreeSet<String>) -> BTreeSet<String> {
    let members = match &node.kind {
        NodeKind::Leaf { datapoint, .. } => {
            let dp = datapoint.clone().unwrap_or_else(|| id.to_path_string());
            universe.insert(dp.clone());
            BTreeSet::from([dp])
        }
        NodeKind::Internal { children, .. } => {
            let mut members = BTreeSet::new();
            for (i, child) in children.iter().enumerate() {
                members.extend(collect_sets(child, id.child(i, &child.label), sets, universe));
            }
            members
        }
    };
    sets.push(FamilySet { label: id.to_string(), members: members.clone() });
    members
}

fn lint_node(node: &Node, id: &NodeId, registry: &Registry, warnings: &mut Vec<String>) {
    if let NodeKind::Internal { children, edge_weights, function, .. } = &node.kind {
        let weight_aware = registry.meta(&function.name).map(|m| m.weight_aware).unwrap_or(false);
        if !weight_aware && edge_weights.iter().any(|&w| w != 1.0) {
            warnings.push(format!(
                "node `{id}`: function `{}` ignores its non-unit edge weights",
                function.name
            ));
        }
        for (i, child) in children.iter().enumerate() {
            lint_node(child, &id.child(i, &child.label), registry, warnings);
        }
    }
}

/// Evaluation failure, carrying the node at which it occurred.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("evaluation failed at `{node}`: {cause}")]
pub struct EvalError {
    pub node: String,
    pub cause: ApplyError,
}

fn eval_node(
    node: &Node,
    id: NodeId,
    registry: &Registry,
    default_policy: MissingPolicy,
    values: &mut BTreeMap<NodeId, Value>,
) -> Result<Value, EvalError> {
    let value = match &node.kind {
        NodeKind::Leaf { observation, .. } => observation.clone(),
        NodeKind::Internal { children, edge_weights, function, missing_policy } => {
            let mut child_values = Vec::with_capacity(children.len());
            for (i, child) in children.iter().enumerate() {
                child_values.push(eval_node(child, id.child(i, &child.label), registry, default_policy, values)?);
            }
            let policy = missing_policy.unwrap_or(default_policy);
            registry
                .apply_with_policy(function, &child_values, edge_weights, policy)
                .map_err(|cause| EvalError { node: id.to_string(), cause })?
        }
    };
    values.insert(id, value.clone());
    Ok(value)
}

/// A tree together with the value computed at every node. Leaves map to
/// their observations, internal nodes to their summary results; the map is
/// total over the tree's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedTree {
    tree: MeasurementTree,
    values: BTreeMap<NodeId, Value>,
}

impl EvaluatedTree {
    pub fn tree(&self) -> &MeasurementTree {
        &self.tree
    }

    /// All node values, keyed by id in path order (parents precede their
    /// descendants, siblings in declaration order).
    pub fn values(&self) -> &BTreeMap<NodeId, Value> {
        &self.values
    }

    /// Stored value at a node; no recomputation.
    pub fn value(&self, id: &NodeId) -> Result<&Value, UnknownNode> {
        self.values.get(id).ok_or_else(|| UnknownNode(id.to_path_string()))
    }

    /// Stored value at a slash-separated label path.
    pub fn value_at(&self, label_path: &str) -> Result<&Value, UnknownNode> {
        let id = self.tree.resolve(label_path)?;
        self.value(&id)
    }

    pub fn root_value(&self) -> &Value {
        self.values.get(&NodeId::root()).expect("values are total")
    }

    /// Depth-limited view: nodes deeper than `depth` are elided, nodes at
    /// exactly `depth` keep their already-computed summary values. Depth 0
    /// shows only the root.
    pub fn prune_depth(&self, depth: usize) -> DepthView<'_> {
        DepthView { evaluated: self, depth }
    }

    /// Evaluated subtree view, rebased from stored values — no
    /// recomputation. Summary values are pure functions of their descendants,
    /// so the rebased values are exactly what re-evaluation would produce.
    pub fn subtree(&self, id: &NodeId) -> Result<EvaluatedTree, UnknownNode> {
        let sub = self.tree.subtree(id)?;
        let base_depth = id.depth();
        let mut values = BTreeMap::new();
        for (node_id, value) in self.values.range(id.clone()..) {
            if !node_id.path.starts_with(&id.path) {
                break;
            }
            let rebased = NodeId {
                path: node_id.path[base_depth..].to_vec(),
                labels: node_id.labels[base_depth..].to_vec(),
            };
            values.insert(rebased, value.clone());
        }
        Ok(EvaluatedTree { tree: sub, values })
    }

}

/// Borrowed depth-limited view over an [`EvaluatedTree`].
pub struct DepthView<'a> {
    evaluated: &'a EvaluatedTree,
    depth: usize,
}

impl<'a> DepthView<'a> {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Surviving nodes in path order.
    pub fn nodes(&self) -> impl Iterator<Item = (&'a NodeId, &'a Value)> {
        let depth = self.depth;
        self.evaluated
            .values
            .iter()
            .filter(move |(id, _)| id.depth() <= depth)
    }

    pub fn len(&self) -> usize {
        self.nodes().count()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes().next().is_none()
    }
}

/// Declarative topology used by [`build_tree`]: labels and shape only, with
/// observations and functions bound separately by label path.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSpec {
    pub label: String,
    pub children: Vec<TreeSpec>,
    /// Weight of the edge from this node's parent (1.0 when unspecified).
    pub weight: Option<f64>,
}

impl TreeSpec {
    pub fn leaf(label: impl Into<String>) -> TreeSpec {
        TreeSpec { label: label.into(), children: Vec::new(), weight: None }
    }

    pub fn internal(label: impl Into<String>, children: Vec<TreeSpec>) -> TreeSpec {
        TreeSpec { label: label.into(), children, weight: None }
    }

    pub fn weighted(mut self, weight: f64) -> TreeSpec {
        self.weight = Some(weight);
        self
    }

    /// Label paths of the spec's leaves, in declaration order.
    pub fn leaf_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn walk(spec: &TreeSpec, prefix: &str, out: &mut Vec<String>) {
            let path = if prefix.is_empty() { spec.label.clone() } else { format!("{prefix}/{}", spec.label) };
            if spec.children.is_empty() {
                out.push(path);
            } else {
                for child in &spec.children {
                    walk(child, &path, out);
                }
            }
        }
        for child in &self.children {
            walk(child, "", &mut out);
        }
        if self.children.is_empty() {
            out.push(String::new());
        }
        out
    }
}

/// Builds a validated tree from a topology spec plus label-path-keyed leaf
/// observations and function assignments. Leaves must be bound explicitly
/// (bind `Value::Missing` for absent data); every internal path needs a
/// function. Children keep declaration order; unspecified edge weights
/// default to 1.0.
pub fn build_tree(
    topology: &TreeSpec,
    leaf_data: &BTreeMap<String, Value>,
    functions: &BTreeMap<String, SummaryFunctionSpec>,
) -> Result<MeasurementTree, BuildError> {
    let root = build_rec(topology, "", true, leaf_data, functions)?;
    MeasurementTree::new(root)
}

fn build_rec(
    spec: &TreeSpec,
    prefix: &str,
    is_root: bool,
    leaf_data: &BTreeMap<String, Value>,
    functions: &BTreeMap<String, SummaryFunctionSpec>,
) -> Result<Node, BuildError> {
    // Binding keys are label paths relative to the root: the root itself is
    // "", its children are their own labels, and so on.
    let path = if is_root {
        String::new()
    } else if prefix.is_empty() {
        spec.label.clone()
    } else {
        format!("{prefix}/{}", spec.label)
    };

    if spec.children.is_empty() {
        if functions.contains_key(&path) {
            return Err(BuildError::EmptyInternalNode(path));
        }
        let value = leaf_data
            .get(&path)
            .cloned()
            .ok_or_else(|| BuildError::MissingLeafBinding(path.clone()))?;
        return Ok(Node::leaf(&spec.label, value));
    }

    let function = functions
        .get(&path)
        .cloned()
        .ok_or_else(|| BuildError::MissingFunctionBinding(path.clone()))?;
    let mut children = Vec::with_capacity(spec.children.len());
    for child_spec in &spec.children {
        let child = build_rec(child_spec, &path, false, leaf_data, functions)?;
        let weight = child_spec.weight.unwrap_or(1.0);
        children.push((child, weight));
    }
    Ok(Node::internal_weighted(&spec.label, function, children))
}

/// Map iterator alias used by callers that expose evaluated values.
pub type ValueIter<'a> = btree_map::Iter<'a, NodeId, Value>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summary::SummaryFunctionSpec as Spec;

    fn two_construct_spec() -> TreeSpec {
        TreeSpec::internal(
            "measurand",
            vec![
                TreeSpec::internal("construct 1", vec![TreeSpec::leaf("x1"), TreeSpec::leaf("x2")]),
                TreeSpec::internal("construct 2", vec![TreeSpec::leaf("x3"), TreeSpec::leaf("x4")]),
            ],
        )
    }

    fn bindings(values: [f64; 4]) -> BTreeMap<String, Value> {
        ["construct 1/x1", "construct 1/x2", "construct 2/x3", "construct 2/x4"]
            .into_iter()
            .zip(values)
            .map(|(k, v)| (k.to_owned(), Value::Number(v)))
            .collect()
    }

    fn all_mean() -> BTreeMap<String, Spec> {
        ["", "construct 1", "construct 2"]
            .into_iter()
            .map(|k| (k.to_owned(), Spec::mean()))
            .collect()
    }

    #[test]
    fn builds_the_four_leaf_tree() {
        let tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_mean()).unwrap();
        assert_eq!(tree.leaf_count(), 4);
        assert_eq!(tree.node_ids().len(), 7);
        assert!(tree.validate_laminar().is_valid());
    }

    #[test]
    fn single_leaf_under_mean_root_passes_through() {
        let spec = TreeSpec::internal("root", vec![TreeSpec::leaf("only")]);
        let leaf_data = BTreeMap::from([("only".to_owned(), Value::Number(7.25))]);
        let functions = BTreeMap::from([(String::new(), Spec::mean())]);
        let tree = build_tree(&spec, &leaf_data, &functions).unwrap();
        let ev = tree.evaluate().unwrap();
        assert_eq!(ev.root_value(), &Value::Number(7.25));
    }

    #[test]
    fn zero_child_internal_is_rejected() {
        let spec = TreeSpec::internal("root", vec![TreeSpec::leaf("empty construct")]);
        let functions = BTreeMap::from([
            (String::new(), Spec::mean()),
            ("empty construct".to_owned(), Spec::mean()),
        ]);
        let err = build_tree(&spec, &BTreeMap::new(), &functions).unwrap_err();
        assert_eq!(err, BuildError::EmptyInternalNode("empty construct".into()));
    }

    #[test]
    fn unbound_leaf_is_rejected() {
        let err = build_tree(&two_construct_spec(), &BTreeMap::new(), &all_mean()).unwrap_err();
        assert_eq!(err, BuildError::MissingLeafBinding("construct 1/x1".into()));
    }

    #[test]
    fn missing_function_is_rejected() {
        let mut functions = all_mean();
        functions.remove("construct 2");
        let err = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &functions).unwrap_err();
        assert_eq!(err, BuildError::MissingFunctionBinding("construct 2".into()));
    }

    #[test]
    fn duplicate_sibling_labels_are_rejected() {
        let root = Node::internal(
            "root",
            Spec::mean(),
            vec![Node::leaf("x", Value::Number(1.0)), Node::leaf("x", Value::Number(2.0))],
        );
        let err = MeasurementTree::new(root).unwrap_err();
        assert!(matches!(err, BuildError::DuplicateSiblingLabel { .. }));
    }

    #[test]
    fn non_positive_weight_is_rejected() {
        let root = Node::internal_weighted(
            "root",
            Spec::mean(),
            vec![(Node::leaf("x", Value::Number(1.0)), 0.0)],
        );
        let err = MeasurementTree::new(root).unwrap_err();
        assert!(matches!(err, BuildError::NonPositiveWeight { .. }));
    }

    #[test]
    fn evaluation_matches_the_mean_and_max_examples() {
        let mean_tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_mean()).unwrap();
        let ev = mean_tree.evaluate().unwrap();
        assert_eq!(ev.value_at("construct 1").unwrap(), &Value::Number(2.0));
        assert_eq!(ev.value_at("construct 2").unwrap(), &Value::Number(2.0));
        assert_eq!(ev.root_value(), &Value::Number(2.0));

        let all_max: BTreeMap<String, Spec> = ["", "construct 1", "construct 2"]
            .into_iter()
            .map(|k| (k.to_owned(), Spec::max()))
            .collect();
        let max_tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_max).unwrap();
        let ev = max_tree.evaluate().unwrap();
        assert_eq!(ev.value_at("construct 1").unwrap(), &Value::Number(3.0));
        assert_eq!(ev.value_at("construct 2").unwrap(), &Value::Number(2.0));
        assert_eq!(ev.root_value(), &Value::Number(3.0));
    }

    #[test]
    fn node_value_lookups() {
        let tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_mean()).unwrap();
        let ev = tree.evaluate().unwrap();
        assert_eq!(ev.value_at("construct 1/x2").unwrap(), &Value::Number(3.0));
        assert!(ev.value_at("construct 3").is_err());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_mean()).unwrap();
        assert_eq!(tree.evaluate().unwrap(), tree.evaluate().unwrap());
    }

    #[test]
    fn subtree_values_agree_with_the_original() {
        let tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_mean()).unwrap();
        let ev = tree.evaluate().unwrap();
        let id = tree.resolve("construct 1").unwrap();
        let sub = tree.subtree(&id).unwrap();
        let sub_ev = sub.evaluate().unwrap();
        assert_eq!(sub_ev.root_value(), ev.value(&id).unwrap());

        let whole = tree.subtree(&NodeId::root()).unwrap();
        assert_eq!(&whole, &tree);

        let leaf_id = tree.resolve("construct 1/x1").unwrap();
        let leaf_tree = tree.subtree(&leaf_id).unwrap();
        assert_eq!(leaf_tree.leaf_count(), 1);
        assert_eq!(leaf_tree.evaluate().unwrap().root_value(), &Value::Number(1.0));
    }

    #[test]
    fn depth_pruning_keeps_computed_values() {
        let tree = build_tree(&two_construct_spec(), &bindings([1.0, 3.0, 2.0, 2.0]), &all_mean()).unwrap();
        let ev = tree.evaluate().unwrap();
        let view = ev.prune_depth(1);
        let got: Vec<(String, Value)> = view.nodes().map(|(id, v)| (id.to_path_string(), v.clone())).collect();
        assert_eq!(
            got,
            vec![
                (String::new(), Value::Number(2.0)),
                ("construct 1".to_owned(), Value::Number(2.0)),
                ("construct 2".to_owned(), Value::Number(2.0)),
            ]
        );
        assert_eq!(ev.prune_depth(0).len(), 1);
        assert_eq!(ev.prune_depth(99).len(), 7);
    }

    #[test]
    fn missing_children_are_skipped_then_propagate() {
        let root = Node::internal(
            "root",
            Spec::mean(),
            vec![
                Node::leaf("a", Value::Number(4.0)),
                Node::leaf("b", Value::Missing),
                Node::leaf("c", Value::Number(2.0)),
            ],
        );
        let ev = MeasurementTree::new(root).unwrap().evaluate().unwrap();
        assert_eq!(ev.root_value(), &Value::Number(3.0));

        let all_missing = Node::internal(
            "root",
            Spec::mean(),
            vec![Node::leaf("a", Value::Missing), Node::leaf("b", Value::Missing)],
        );
        let ev = MeasurementTree::new(all_missing).unwrap().evaluate().unwrap();
        assert_eq!(ev.root_value(), &Value::Missing);
    }

    #[test]
    fn single_child_aggregation_returns_the_child() {
        for spec in [Spec::mean(), Spec::median(), Spec::max(), Spec::min()] {
            let root = Node::internal("root", spec, vec![Node::leaf("only", Value::Number(2.36))]);
            let ev = MeasurementTree::new(root).unwrap().evaluate().unwrap();
            assert_eq!(ev.root_value(), &Value::Number(2.36));
        }
    }

    #[test]
    fn shared_datapoints_fail_strict_construction() {
        let root = Node::internal(
            "root",
            Spec::mean(),
            vec![
                Node::internal(
                    "c1",
                    Spec::mean(),
                    vec![
                        Node::leaf_with_datapoint("a", Value::Number(1.0), "x"),
                        Node::leaf_with_datapoint("b", Value::Number(2.0), "y"),
                    ],
                ),
                Node::internal(
                    "c2",
                    Spec::mean(),
                    vec![
                        Node::leaf_with_datapoint("c", Value::Number(3.0), "x"),
                        Node::leaf_with_datapoint("d", Value::Number(4.0), "z"),
                    ],
                ),
            ],
        );
        let err = MeasurementTree::new(root.clone()).unwrap_err();
        assert!(matches!(err, BuildError::Laminar(_)));
        // The permissive path holds the candidate and reports the overlap.
        let tree = MeasurementTree::permissive(root, MissingPolicy::Skip).unwrap();
        assert!(!tree.validate_laminar().is_valid());
    }

    #[test]
    fn weight_lint_fires_for_weight_unaware_functions() {
        let root = Node::internal_weighted(
            "root",
            Spec::mean(),
            vec![
                (Node::leaf("a", Value::Number(1.0)), 2.0),
                (Node::leaf("b", Value::Number(2.0)), 1.0),
            ],
        );
        let tree = MeasurementTree::new(root).unwrap();
        let warnings = tree.lint(default_registry());
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("mean"));
    }

    #[test]
    fn weighted_mean_consumes_edge_weights() {
        let root = Node::internal_weighted(
            "root",
            Spec::new("weighted_mean"),
            vec![
                (Node::leaf("a", Value::Number(1.0)), 3.0),
                (Node::leaf("b", Value::Number(5.0)), 1.0),
            ],
        );
        let tree = MeasurementTree::new(root).unwrap();
        assert!(tree.lint(default_registry()).is_empty());
        let ev = tree.evaluate().unwrap();
        assert_eq!(ev.root_value(), &Value::Number(2.0));
    }
}
