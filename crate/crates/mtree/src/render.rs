//! Deterministic text and Graphviz DOT renderings of evaluated trees.
//!
//! The renderer only formats values the evaluation already computed; it
//! never re-aggregates. Output is byte-deterministic.

use std::fmt::Write as _;

use crate::tree::{EvaluatedTree, Node, NodeId, UnknownNode};
use crate::value::Value;

/// Rendering controls.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    /// Elide nodes deeper than this (relative to the rendered root).
    pub max_depth: Option<usize>,
    /// Render only the subtree at this label path.
    pub subtree_path: Option<String>,
    /// Decimal places for numbers.
    pub precision: usize,
    pub show_functions: bool,
    /// Marker for missing values.
    pub missing_marker: String,
    /// Strictly increasing breakpoints for risk shading in DOT output.
    pub color_thresholds: Option<Vec<f64>>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            max_depth: None,
            subtree_path: None,
            precision: 2,
            show_functions: true,
            missing_marker: "--".to_owned(),
            color_thresholds: None,
        }
    }
}

impl RenderOptions {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = Some(depth);
        self
    }

    pub fn with_subtree(mut self, path: impl Into<String>) -> Self {
        self.subtree_path = Some(path.into());
        self
    }

    pub fn with_precision(mut self, precision: usize) -> Self {
        self.precision = precision;
        self
    }
}

/// Breakpoints for shading 0–10 risk scores in quarters.
pub fn corix_risk_thresholds() -> Vec<f64> {
    vec![2.5, 5.0, 7.5]
}

/// Rendering failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error(transparent)]
    UnknownNode(#[from] UnknownNode),
    #[error("color thresholds must be strictly increasing")]
    BadThresholds,
}

/// Formats a value at the given precision; numbers fixed-point, vectors
/// elementwise, missing as the marker.
pub fn format_value(value: &Value, precision: usize, missing_marker: &str) -> String {
    match value {
        Value::Number(x) => format!("{x:.precision$}"),
        Value::Category(label) => label.clone(),
        Value::Text(text) => text.clone(),
        Value::Vector(xs) => {
            let inner: Vec<String> = xs.iter().map(|x| format!("{x:.precision$}")).collect();
            format!("[{}]", inner.join(", "))
        }
        Value::Missing => missing_marker.to_owned(),
    }
}

fn scoped<'a>(
    evaluated: &'a EvaluatedTree,
    opts: &RenderOptions,
) -> Result<std::borrow::Cow<'a, EvaluatedTree>, RenderError> {
    match &opts.subtree_path {
        None => Ok(std::borrow::Cow::Borrowed(evaluated)),
        Some(path) => {
            let id = evaluated.tree().resolve(path)?;
            Ok(std::borrow::Cow::Owned(evaluated.subtree(&id)?))
        }
    }
}

fn check_thresholds(opts: &RenderOptions) -> Result<(), RenderError> {
    if let Some(thresholds) = &opts.color_thresholds {
        let increasing = thresholds.windows(2).all(|w| w[0] < w[1]);
        if thresholds.is_empty() || !increasing {
            return Err(RenderError::BadThresholds);
        }
    }
    Ok(())
}

/// Indented one-node-per-line rendering: label, function name (when shown),
/// value at the configured precision.
pub fn render_text(evaluated: &EvaluatedTree, opts: &RenderOptions) -> Result<String, RenderError> {
    check_thresholds(opts)?;
    let scoped = scoped(evaluated, opts)?;
    let mut out = String::new();
    render_text_node(scoped.tree().root(), &NodeId::root(), &scoped, opts, &mut out);
    Ok(out)
}

fn render_text_node(node: &Node, id: &NodeId, evaluated: &EvaluatedTree, opts: &RenderOptions, out: &mut String) {
    let depth = id.depth();
    if let Some(max) = opts.max_depth {
        if depth > max {
            return;
        }
    }
    let value = evaluated.value(id).expect("values are total");
    let rendered = format_value(value, opts.precision, &opts.missing_marker);
    let indent = "  ".repeat(depth);
    match node.function() {
        Some(function) if opts.show_functions => {
            let _ = writeln!(out, "{indent}{}: {} {}", node.label, function.name, rendered);
        }
        _ => {
            let _ = writeln!(out, "{indent}{}: {}", node.label, rendered);
        }
    }
    for (i, child) in node.children().iter().enumerate() {
        render_text_node(child, &child_id(id, i, &child.label), evaluated, opts, out);
    }
}

/// Graphviz DOT rendering: one node statement per tree node, one edge per
/// parent–child pair (weight-labeled when not 1), identifiers derived from
/// child-index paths, optional threshold-based fill colors.
pub fn render_dot(evaluated: &EvaluatedTree, opts: &RenderOptions) -> Result<String, RenderError> {
    check_thresholds(opts)?;
    let scoped = scoped(evaluated, opts)?;
    let mut nodes = String::new();
    let mut edges = String::new();
    render_dot_node(scoped.tree().root(), &NodeId::root(), &scoped, opts, &mut nodes, &mut edges);
    Ok(format!(
        "digraph measurement_tree {{\n  graph [ordering=out];\n  node [shape=box];\n{nodes}{edges}}}\n"
    ))
}

fn dot_id(id: &NodeId) -> String {
    let mut s = String::from("n");
    for i in id.path() {
        let _ = write!(s, "_{i}");
    }
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

// Low-to-high risk anchors, light green through red.
const PALETTE: [&str; 5] = ["#b7e1a1", "#dff0a8", "#ffe08a", "#f4a582", "#d6604d"];

fn fill_for(value: &Value, thresholds: &[f64]) -> Option<&'static str> {
    let x = value.as_number()?;
    let bucket = thresholds.iter().take_while(|t| x >= **t).count();
    let scaled = if thresholds.is_empty() {
        0
    } else {
        bucket * (PALETTE.len() - 1) / thresholds.len()
    };
    Some(PALETTE[scaled.min(PALETTE.len() - 1)])
}

fn render_dot_node(
    node: &Node,
    id: &NodeId,
    evaluated: &EvaluatedTree,
    opts: &RenderOptions,
    nodes: &mut String,
    edges: &mut String,
) {
    let depth = id.depth();
    if let Some(max) = opts.max_depth {
        if depth > max {
            return;
        }
    }
    let value = evaluated.value(id).expect("values are total");
    let rendered = format_value(value, opts.precision, &opts.missing_marker);
    let mut label = node.label.clone();
    if let Some(function) = node.function() {
        if opts.show_functions {
            label.push('\n');
            label.push_str(&function.name);
        }
    }
    label.push('\n');
    label.push_str(&rendered);

    let fill = opts
        .color_thresholds
        .as_deref()
        .and_then(|t| fill_for(value, t))
        .map(|color| format!(", style=filled, fillcolor=\"{color}\""))
        .unwrap_or_default();
    let _ = writeln!(nodes, "  {} [label=\"{}\"{fill}];", dot_id(id), dot_escape(&label));

    if let crate::tree::NodeKind::Internal { children, edge_weights, .. } = &node.kind {
        for (i, (child, &weight)) in children.iter().zip(edge_weights).enumerate() {
            let cid = child_id(id, i, &child.label);
            if opts.max_depth.map(|max| cid.depth() <= max).unwrap_or(true) {
                if weight != 1.0 {
                    let _ = writeln!(edges, "  {} -> {} [label=\"{weight}\"];", dot_id(id), dot_id(&cid));
                } else {
                    let _ = writeln!(edges, "  {} -> {};", dot_id(id), dot_id(&cid));
                }
            }
            render_dot_node(child, &cid, evaluated, opts, nodes, edges);
        }
    }
}

fn child_id(id: &NodeId, index: usize, label: &str) -> NodeId {
    let mut path = id.path().to_vec();
    path.push(index);
    let mut labels = id.labels().to_vec();
    labels.push(label.to_owned());
    NodeId::from_parts(path, labels)
}
