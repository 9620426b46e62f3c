//! Equality and ordering of measurement trees.
//!
//! Two trees with the same topology and the same order-inducing summary
//! functions compare node by node under each node's value ordering. The
//! induced relation is a partial order: incomparable is a legitimate
//! outcome, never an error. Equality deliberately quantifies over non-leaf
//! nodes only (trees can be equal with different observations), while the
//! dominance relation defaults to all nodes; both scopes are available.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::summary::{default_registry, category_order, Registry};
use crate::tree::{EvaluatedTree, MeasurementTree, Node, NodeId, NodeKind};
use crate::value::{order_values, Value, ValueKind};

/// Which nodes participate in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scope {
    /// Every node, leaves included (the dominance relation's quantifier).
    #[default]
    AllNodes,
    /// Internal nodes only (the equality definition's quantifier).
    NonLeafOnly,
}

/// Per-node three-way outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeOutcome {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl fmt::Display for NodeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeOutcome::Less => "less",
            NodeOutcome::Equal => "equal",
            NodeOutcome::Greater => "greater",
            NodeOutcome::Incomparable => "incomparable",
        })
    }
}

/// Overall relation between two trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    LessEq,
    GreaterEq,
    Incomparable,
}

impl Relation {
    /// Non-strict ≤ : equal or dominated.
    pub fn is_le(self) -> bool {
        matches!(self, Relation::Equal | Relation::LessEq)
    }

    pub fn converse(self) -> Relation {
        match self {
            Relation::LessEq => Relation::GreaterEq,
            Relation::GreaterEq => Relation::LessEq,
            other => other,
        }
    }

    /// Fixed-width table symbol (`=`, `≤`, `≥`, `∥`).
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::LessEq => "≤",
            Relation::GreaterEq => "≥",
            Relation::Incomparable => "∥",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Equal => "equal",
            Relation::LessEq => "less-or-equal",
            Relation::GreaterEq => "greater-or-equal",
            Relation::Incomparable => "incomparable",
        })
    }
}

/// A reason two trees cannot participate in the ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CompatFailure {
    StructureMismatch { node: String, detail: String },
    FunctionMismatch { node: String, left: String, right: String },
    WeightMismatch { node: String },
    NonOrderingFunction { node: String, function: String },
}

impl fmt::Display for CompatFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompatFailure::StructureMismatch { node, detail } => {
                write!(f, "topology mismatch at `{node}`: {detail}")
            }
            CompatFailure::FunctionMismatch { node, left, right } => {
                write!(f, "function mismatch at `{node}`: `{left}` vs `{right}`")
            }
            CompatFailure::WeightMismatch { node } => write!(f, "edge-weight mismatch at `{node}`"),
            CompatFailure::NonOrderingFunction { node, function } => {
                write!(f, "function `{function}` at `{node}` does not induce an ordering")
            }
        }
    }
}

/// Precondition report for ordering two trees.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CompatReport {
    pub failures: Vec<CompatFailure>,
}

impl CompatReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Outcome of a tree-equality check with per-node detail.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityReport {
    pub equal: bool,
    /// Human-readable reasons when unequal.
    pub reasons: Vec<String>,
    /// Value equality at each internal node (present only when the
    /// structures matched enough to pair nodes).
    pub per_node: BTreeMap<NodeId, bool>,
}

/// Result of comparing two order-compatible trees.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub overall: Relation,
    pub per_node: BTreeMap<NodeId, NodeOutcome>,
    pub precondition: CompatReport,
}

impl Serialize for ComparisonReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(4))?;
        map.serialize_entry("overall", &self.overall)?;
        let per_node: BTreeMap<String, NodeOutcome> = self
            .per_node
            .iter()
            .map(|(id, o)| (id.to_path_string(), *o))
            .collect();
        map.serialize_entry("per_node", &per_node)?;
        map.serialize_entry("precondition_ok", &self.precondition.ok())?;
        map.serialize_entry("precondition_failures", &self.precondition.failures)?;
        map.end()
    }
}

/// Why a comparison could not run.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("trees are not order-compatible: {0:?}")]
    IncompatibleTrees(CompatReport),
    #[error("value of kind {kind} at `{node}` has no defined order")]
    UnorderableValueKind { node: String, kind: ValueKind },
}

/// Checks whether two trees can be ordered: identical topology (labels,
/// structure, weights), identical function assignment at every internal
/// node, and an order-inducing function everywhere. Uses the built-in
/// registry.
pub fn check_order_compatible(a: &MeasurementTree, b: &MeasurementTree) -> CompatReport {
    check_order_compatible_with(default_registry(), a, b)
}

pub fn check_order_compatible_with(registry: &Registry, a: &MeasurementTree, b: &MeasurementTree) -> CompatReport {
    let mut failures = structural_mismatches(a.root(), b.root());
    collect_non_ordering(registry, a.root(), NodeId::root(), &mut failures);
    CompatReport { failures }
}

fn structural_mismatches(a: &Node, b: &Node) -> Vec<CompatFailure> {
    let mut failures = Vec::new();
    walk_structure(a, b, NodeId::root(), &mut failures);
    failures
}

fn walk_structure(a: &Node, b: &Node, id: NodeId, failures: &mut Vec<CompatFailure>) {
    if a.label != b.label {
        failures.push(CompatFailure::StructureMismatch {
            node: id.to_string(),
            detail: format!("label `{}` vs `{}`", a.label, b.label),
        });
        return;
    }
    match (&a.kind, &b.kind) {
        (NodeKind::Leaf { .. }, NodeKind::Leaf { .. }) => {}
        (NodeKind::Internal { .. }, NodeKind::Leaf { .. }) | (NodeKind::Leaf { .. }, NodeKind::Internal { .. }) => {
            failures.push(CompatFailure::StructureMismatch {
                node: id.to_string(),
                detail: "leaf vs internal".into(),
            });
        }
        (
            NodeKind::Internal { children: ca, edge_weights: wa, function: fa, .. },
            NodeKind::Internal { children: cb, edge_weights: wb, function: fb, .. },
        ) => {
            if fa != fb {
                failures.push(CompatFailure::FunctionMismatch {
                    node: id.to_string(),
                    left: fa.name.clone(),
                    right: fb.name.clone(),
                });
            }
            if ca.len() != cb.len() {
                failures.push(CompatFailure::StructureMismatch {
                    node: id.to_string(),
                    detail: format!("{} children vs {}", ca.len(), cb.len()),
                });
                return;
            }
            if wa != wb {
                failures.push(CompatFailure::WeightMismatch { node: id.to_string() });
            }
            for (i, (child_a, child_b)) in ca.iter().zip(cb).enumerate() {
                walk_structure(child_a, child_b, id_child(&id, i, &child_a.label), failures);
            }
        }
    }
}

fn collect_non_ordering(registry: &Registry, node: &Node, id: NodeId, failures: &mut Vec<CompatFailure>) {
    if let NodeKind::Internal { children, function, .. } = &node.kind {
        let orders = registry.induces_ordering(function).unwrap_or(false);
        if !orders {
            failures.push(CompatFailure::NonOrderingFunction {
                node: id.to_string(),
                function: function.name.clone(),
            });
        }
        for (i, child) in children.iter().enumerate() {
            collect_non_ordering(registry, child, id_child(&id, i, &child.label), failures);
        }
    }
}

fn id_child(id: &NodeId, index: usize, label: &str) -> NodeId {
    // NodeId::child is private to the tree module; rebuild via labels.
    let mut path: Vec<usize> = id.path().to_vec();
    path.push(index);
    let mut labels: Vec<String> = id.labels().to_vec();
    labels.push(label.to_owned());
    NodeId::from_parts(path, labels)
}

/// Tree equality: same topology, same function assignment, and equal values
/// at every non-leaf node. Leaf observations are deliberately excluded — two
/// trees can be equal on different data.
pub fn trees_equal(a: &EvaluatedTree, b: &EvaluatedTree) -> EqualityReport {
    let mismatches = structural_mismatches(a.tree().root(), b.tree().root());
    if !mismatches.is_empty() {
        return EqualityReport {
            equal: false,
            reasons: mismatches.iter().map(|m| m.to_string()).collect(),
            per_node: BTreeMap::new(),
        };
    }
    let mut per_node = BTreeMap::new();
    let mut reasons = Vec::new();
    for (id, av) in a.values() {
        let is_leaf = a.tree().node(id).map(Node::is_leaf).unwrap_or(true);
        if is_leaf {
            continue;
        }
        let bv = b.value(id).expect("same topology");
        let same = av == bv;
        if !same {
            reasons.push(format!("value mismatch at `{id}`"));
        }
        per_node.insert(id.clone(), same);
    }
    EqualityReport { equal: reasons.is_empty(), reasons, per_node }
}

/// Node-wise comparison of two order-compatible evaluated trees, using the
/// built-in registry for compatibility checks.
pub fn compare(a: &EvaluatedTree, b: &EvaluatedTree, scope: Scope) -> Result<ComparisonReport, CompareError> {
    compare_with(default_registry(), a, b, scope)
}

pub fn compare_with(
    registry: &Registry,
    a: &EvaluatedTree,
    b: &EvaluatedTree,
    scope: Scope,
) -> Result<ComparisonReport, CompareError> {
    let precondition = check_order_compatible_with(registry, a.tree(), b.tree());
    if !precondition.ok() {
        return Err(CompareError::IncompatibleTrees(precondition));
    }

    let mut per_node = BTreeMap::new();
    for (id, av) in a.values() {
        let node = a.tree().node(id).expect("id from this tree");
        if node.is_leaf() && scope == Scope::NonLeafOnly {
            continue;
        }
        let bv = b.value(id).expect("same topology");
        let outcome = compare_node(node, id, av, bv)?;
        per_node.insert(id.clone(), outcome);
    }

    let overall = fold_outcomes(per_node.values().copied());
    Ok(ComparisonReport { overall, per_node, precondition })
}

fn compare_node(node: &Node, id: &NodeId, av: &Value, bv: &Value) -> Result<NodeOutcome, CompareError> {
    match (av, bv) {
        (Value::Missing, Value::Missing) => return Ok(NodeOutcome::Equal),
        // A present value and an absent one have no order.
        (Value::Missing, _) | (_, Value::Missing) => return Ok(NodeOutcome::Incomparable),
        _ => {}
    }
    let declared_order = node.function().and_then(|f| category_order(&f.params));
    match order_values(av, bv, declared_order.as_deref()) {
        Some(Ordering::Less) => Ok(NodeOutcome::Less),
        Some(Ordering::Equal) => Ok(NodeOutcome::Equal),
        Some(Ordering::Greater) => Ok(NodeOutcome::Greater),
        None => Err(CompareError::UnorderableValueKind { node: id.to_string(), kind: av.kind() }),
    }
}

fn fold_outcomes(outcomes: impl Iterator<Item = NodeOutcome>) -> Relation {
    let mut any_less = false;
    let mut any_greater = false;
    for o in outcomes {
        match o {
            NodeOutcome::Incomparable => return Relation::Incomparable,
            NodeOutcome::Less => any_less = true,
            NodeOutcome::Greater => any_greater = true,
            NodeOutcome::Equal => {}
        }
    }
    match (any_less, any_greater) {
        (false, false) => Relation::Equal,
        (true, false) => Relation::LessEq,
        (false, true) => Relation::GreaterEq,
        (true, true) => Relation::Incomparable,
    }
}

/// Axiom check outcomes over an actual set of trees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub reflexivity_ok: bool,
    pub antisymmetry_ok: bool,
    pub transitivity_ok: bool,
    pub counterexamples: Vec<String>,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.reflexivity_ok && self.antisymmetry_ok && self.transitivity_ok
    }
}

/// Pairwise relations over a set of trees, their transitive reduction, and
/// an axiom report.
#[derive(Debug, Clone, PartialEq)]
pub struct PosetResult {
    /// `relation[i][j]` relates tree i to tree j; entry (j, i) is always the
    /// converse of (i, j).
    pub relation: Vec<Vec<Relation>>,
    /// Covering pairs (i, j) with i strictly below j and nothing between.
    pub hasse_edges: Vec<(usize, usize)>,
    pub axioms: AxiomReport,
}

impl Serialize for PosetResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("relation", &self.relation)?;
        map.serialize_entry("hasse_edges", &self.hasse_edges)?;
        map.serialize_entry("axioms", &self.axioms)?;
        map.end()
    }
}

/// Computes the pairwise relation matrix, Hasse edges, and axiom report for
/// a set of order-compatible evaluated trees.
pub fn poset(trees: &[EvaluatedTree], scope: Scope) -> Result<PosetResult, CompareError> {
    poset_with(default_registry(), trees, scope)
}

pub fn poset_with(registry: &Registry, trees: &[EvaluatedTree], scope: Scope) -> Result<PosetResult, CompareError> {
    let n = trees.len();
    let mut relation = vec![vec![Relation::Equal; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let rel = compare_with(registry, &trees[i], &trees[j], scope)?.overall;
            relation[i][j] = rel;
            relation[j][i] = rel.converse();
        }
    }

    // Covering pairs of the strict order. Strictly-below means LessEq here:
    // the matrix reserves Equal for value-identical trees.
    let strict = |i: usize, j: usize| relation[i][j] == Relation::LessEq;
    let mut hasse_edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if strict(i, j) && !(0..n).any(|k| strict(i, k) && strict(k, j)) {
                hasse_edges.push((i, j));
            }
        }
    }

    let axioms = axioms_from_matrix(&relation, trees, scope);
    Ok(PosetResult { relation, hasse_edges, axioms })
}

/// Explicitly tests reflexivity, antisymmetry (up to tree equality), and
/// transitivity over all pairs and triples of the given set, reporting every
/// counterexample.
pub fn verify_poset_axioms(trees: &[EvaluatedTree], scope: Scope) -> Result<AxiomReport, CompareError> {
    verify_poset_axioms_with(default_registry(), trees, scope)
}

pub fn verify_poset_axioms_with(
    registry: &Registry,
    trees: &[EvaluatedTree],
    scope: Scope,
) -> Result<AxiomReport, CompareError> {
    let n = trees.len();
    let mut relation = vec![vec![Relation::Equal; n]; n];
    for (i, row) in relation.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = compare_with(registry, &trees[i], &trees[j], scope)?.overall;
        }
    }
    Ok(axioms_from_matrix(&relation, trees, scope))
}

fn axioms_from_matrix(relation: &[Vec<Relation>], trees: &[EvaluatedTree], _scope: Scope) -> AxiomReport {
    let n = relation.len();
    let mut counterexamples = Vec::new();

    let mut reflexivity_ok = true;
    for (i, row) in relation.iter().enumerate() {
        if row[i] != Relation::Equal {
            reflexivity_ok = false;
            counterexamples.push(format!("reflexivity: tree {i} is not equal to itself"));
        }
    }

    let le = |i: usize, j: usize| relation[i][j].is_le();

    let mut antisymmetry_ok = true;
    for i in 0..n {
        for j in (i + 1)..n {
            if le(i, j) && le(j, i) && !trees_equal(&trees[i], &trees[j]).equal {
                antisymmetry_ok = false;
                counterexamples.push(format!("antisymmetry: trees {i} and {j} dominate each other but differ"));
            }
        }
    }

    let mut transitivity_ok = true;
    for i in 0..n {
        for j in 0..n {
            if !le(i, j) {
                continue;
            }
            for k in 0..n {
                if le(j, k) && !le(i, k) {
                    transitivity_ok = false;
                    counterexamples.push(format!("transitivity: {i} ≤ {j} ≤ {k} but {i} ≰ {k}"));
                }
            }
        }
    }

    AxiomReport { reflexivity_ok, antisymmetry_ok, transitivity_ok, counterexamples }
}
