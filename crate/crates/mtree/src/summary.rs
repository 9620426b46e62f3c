//! Registry of named summary functions.
//!
//! A summary function maps the values of a node's children (plus edge
//! weights and parameters) to one value. Trees reference functions by name;
//! the registry owns the implementations and their metadata. The registry is
//! populated once at startup and then only read: `register` needs `&mut`,
//! evaluation borrows `&Registry`, so the type system enforces the freeze.
//!
//! Every implementation must be a deterministic pure function of its input.
//! The built-ins accumulate over a canonically sorted copy of their inputs,
//! which makes them exactly permutation invariant as well.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::tree::MissingPolicy;
use crate::value::{Value, ValueKind};

/// Parameters attached to a function assignment, keyed by name.
///
/// Parameter values are raw JSON: lists of labels (`category_order`),
/// per-child competitor score lists, flags, and similar configuration that
/// the observation [`Value`] type does not carry. Parameter keys are part of
/// the tree-document format contract.
pub type Params = BTreeMap<String, serde_json::Value>;

/// A function assignment: registry name plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFunctionSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: Params,
}

impl SummaryFunctionSpec {
    pub fn new(name: impl Into<String>) -> Self {
        SummaryFunctionSpec { name: name.into(), params: Params::new() }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: serde_json::Value) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn mean() -> Self {
        Self::new("mean")
    }

    pub fn median() -> Self {
        Self::new("median")
    }

    pub fn max() -> Self {
        Self::new("max")
    }

    pub fn min() -> Self {
        Self::new("min")
    }
}

/// Registry-side metadata describing what a function accepts and produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionMeta {
    /// Whether the image of the function carries a partial order. Claimable
    /// only for number output, or category output paired with a declared
    /// `category_order` parameter at the point of use.
    pub induces_ordering: bool,
    /// Whether the function consumes edge weights (others ignore them).
    pub weight_aware: bool,
    pub input_kinds: BTreeSet<ValueKind>,
    pub output_kind: ValueKind,
}

impl FunctionMeta {
    fn numeric(weight_aware: bool) -> Self {
        FunctionMeta {
            induces_ordering: true,
            weight_aware,
            input_kinds: BTreeSet::from([ValueKind::Number]),
            output_kind: ValueKind::Number,
        }
    }
}

/// Input handed to a function implementation after missing-data filtering.
///
/// `values` and `weights` are the surviving (non-missing) children in child
/// order; `indices` gives each survivor's original child position so that
/// per-child parameters (e.g. competitor lists) stay aligned.
pub struct FnInput<'a> {
    pub values: &'a [Value],
    pub weights: &'a [f64],
    pub indices: &'a [usize],
    pub params: &'a Params,
}

type SummaryImpl = Arc<dyn Fn(&FnInput<'_>) -> Result<Value, ApplyError> + Send + Sync>;

#[derive(Clone)]
struct Entry {
    meta: FunctionMeta,
    imp: SummaryImpl,
}

/// Error applying a summary function.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApplyError {
    #[error("unknown summary function `{0}`")]
    UnknownFunction(String),
    #[error("function `{function}` does not accept {kind} inputs")]
    FunctionDomainMismatch { function: String, kind: ValueKind },
    #[error("function `{function}` applied to an empty child list")]
    EmptyInput { function: String },
    #[error("function `{function}` got {weights} weights for {children} children")]
    WeightMismatch { function: String, children: usize, weights: usize },
    #[error("competitor data missing: {0}")]
    MissingCompetitorData(String),
    #[error("bad parameters for `{function}`: {reason}")]
    BadParams { function: String, reason: String },
}

/// Error registering a summary function.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("function `{0}` is already registered")]
    DuplicateName(String),
    #[error("invalid metadata for `{name}`: {reason}")]
    InvalidMetadata { name: String, reason: String },
}

/// Named summary functions with metadata. See the module docs for the
/// freeze/purity contract.
pub struct Registry {
    entries: BTreeMap<String, Entry>,
}

impl Registry {
    /// An empty registry; useful for fully custom function sets.
    pub fn empty() -> Self {
        Registry { entries: BTreeMap::new() }
    }

    /// A registry holding all built-in functions.
    pub fn with_builtins() -> Self {
        let mut reg = Registry::empty();
        register_builtins(&mut reg);
        reg
    }

    /// Registers a function under a fresh name. Shadowing an existing name is
    /// an error, as is claiming an ordering for output kinds that cannot
    /// carry one (text, vectors, missing).
    pub fn register<F>(&mut self, name: impl Into<String>, meta: FunctionMeta, imp: F) -> Result<(), RegistryError>
    where
        F: Fn(&FnInput<'_>) -> Result<Value, ApplyError> + Send + Sync + 'static,
    {
        let name = name.into();
        if self.entries.contains_key(&name) {
            return Err(RegistryError::DuplicateName(name));
        }
        if meta.induces_ordering
            && matches!(meta.output_kind, ValueKind::Text | ValueKind::Vector | ValueKind::Missing)
        {
            return Err(RegistryError::InvalidMetadata {
                name,
                reason: format!("{} output cannot induce an ordering", meta.output_kind),
            });
        }
        self.entries.insert(name, Entry { meta, imp: Arc::new(imp) });
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn meta(&self, name: &str) -> Option<&FunctionMeta> {
        self.entries.get(name).map(|e| &e.meta)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Effective ordering claim for an assignment: the registered flag,
    /// narrowed for category output, which orders only under a declared
    /// non-empty `category_order` parameter.
    pub fn induces_ordering(&self, spec: &SummaryFunctionSpec) -> Result<bool, ApplyError> {
        let meta = self
            .meta(&spec.name)
            .ok_or_else(|| ApplyError::UnknownFunction(spec.name.clone()))?;
        if !meta.induces_ordering {
            return Ok(false);
        }
        Ok(match meta.output_kind {
            ValueKind::Number => true,
            ValueKind::Category => category_order(&spec.params).is_some_and(|o| !o.is_empty()),
            _ => false,
        })
    }

    /// Applies an assignment with the default skip policy for missing data.
    pub fn apply(&self, spec: &SummaryFunctionSpec, children: &[Value], weights: &[f64]) -> Result<Value, ApplyError> {
        self.apply_with_policy(spec, children, weights, MissingPolicy::Skip)
    }

    /// Applies an assignment: resolves the name, applies the missing-data
    /// policy, checks surviving child kinds against the declared domain, and
    /// runs the implementation. An empty weight slice means unit weights.
    pub fn apply_with_policy(
        &self,
        spec: &SummaryFunctionSpec,
        children: &[Value],
        weights: &[f64],
        policy: MissingPolicy,
    ) -> Result<Value, ApplyError> {
        let entry = self
            .entries
            .get(&spec.name)
            .ok_or_else(|| ApplyError::UnknownFunction(spec.name.clone()))?;
        if children.is_empty() {
            return Err(ApplyError::EmptyInput { function: spec.name.clone() });
        }
        let unit_weights;
        let weights = if weights.is_empty() {
            unit_weights = vec![1.0; children.len()];
            &unit_weights
        } else {
            weights
        };
        if weights.len() != children.len() {
            return Err(ApplyError::WeightMismatch {
                function: spec.name.clone(),
                children: children.len(),
                weights: weights.len(),
            });
        }

        let mut values = Vec::with_capacity(children.len());
        let mut kept_weights = Vec::with_capacity(children.len());
        let mut indices = Vec::with_capacity(children.len());
        for (i, child) in children.iter().enumerate() {
            if child.is_missing() {
                match policy {
                    MissingPolicy::Skip => continue,
                    MissingPolicy::Propagate => return Ok(Value::Missing),
                }
            }
            values.push(child.clone());
            kept_weights.push(weights[i]);
            indices.push(i);
        }
        if values.is_empty() {
            return Ok(Value::Missing);
        }
        for v in &values {
            if !entry.meta.input_kinds.contains(&v.kind()) {
                return Err(ApplyError::FunctionDomainMismatch {
                    function: spec.name.clone(),
                    kind: v.kind(),
                });
            }
        }
        (entry.imp)(&FnInput {
            values: &values,
            weights: &kept_weights,
            indices: &indices,
            params: &spec.params,
        })
    }
}

/// The core scalar aggregators guaranteed present in [`default_registry`].
pub const BUILTIN_CATALOG: [&str; 7] = ["mean", "median", "max", "min", "sum", "count", "weighted_mean"];

/// Names of the built-in scalar aggregators. All are registered with numeric
/// input/output and `induces_ordering = true`; `weighted_mean` is the only
/// weight-aware one. The default registry additionally carries the metric
/// embeddings `accuracy` and `mean_win_rate`.
pub fn builtin_catalog() -> &'static [&'static str] {
    &BUILTIN_CATALOG
}

/// Shared read-only registry holding the built-ins.
pub fn default_registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(Registry::with_builtins)
}

pub(crate) fn category_order(params: &Params) -> Option<Vec<String>> {
    let list = params.get("category_order")?.as_array()?;
    list.iter().map(|v| v.as_str().map(str::to_owned)).collect()
}

fn numbers(input: &FnInput<'_>, function: &str) -> Result<Vec<f64>, ApplyError> {
    input
        .values
        .iter()
        .map(|v| {
            v.as_number().ok_or_else(|| ApplyError::FunctionDomainMismatch {
                function: function.to_owned(),
                kind: v.kind(),
            })
        })
        .collect()
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

fn mean_of(xs: &[f64]) -> f64 {
    sorted(xs.to_vec()).iter().sum::<f64>() / xs.len() as f64
}

fn median_of(xs: &[f64]) -> f64 {
    let s = sorted(xs.to_vec());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

fn register_builtins(reg: &mut Registry) {
    reg.register("mean", FunctionMeta::numeric(false), |input| {
        Ok(Value::Number(mean_of(&numbers(input, "mean")?)))
    })
    .expect("builtin");

    reg.register("median", FunctionMeta::numeric(false), |input| {
        Ok(Value::Number(median_of(&numbers(input, "median")?)))
    })
    .expect("builtin");

    reg.register("max", FunctionMeta::numeric(false), |input| {
        let xs = sorted(numbers(input, "max")?);
        Ok(Value::Number(*xs.last().expect("non-empty")))
    })
    .expect("builtin");

    reg.register("min", FunctionMeta::numeric(false), |input| {
        let xs = sorted(numbers(input, "min")?);
        Ok(Value::Number(xs[0]))
    })
    .expect("builtin");

    reg.register("sum", FunctionMeta::numeric(false), |input| {
        Ok(Value::Number(sorted(numbers(input, "sum")?).iter().sum()))
    })
    .expect("builtin");

    reg.register("count", FunctionMeta::numeric(false), |input| {
        Ok(Value::Number(input.values.len() as f64))
    })
    .expect("builtin");

    reg.register("weighted_mean", FunctionMeta::numeric(true), |input| {
        let xs = numbers(input, "weighted_mean")?;
        let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(input.weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let num: f64 = pairs.iter().map(|(v, w)| v * w).sum();
        let den: f64 = pairs.iter().map(|(_, w)| w).sum();
        if den <= 0.0 {
            return Err(ApplyError::BadParams {
                function: "weighted_mean".into(),
                reason: "weights sum to zero".into(),
            });
        }
        Ok(Value::Number(num / den))
    })
    .expect("builtin");

    reg.register(
        "accuracy",
        FunctionMeta {
            induces_ordering: true,
            weight_aware: false,
            input_kinds: BTreeSet::from([ValueKind::Number, ValueKind::Category, ValueKind::Vector, ValueKind::Text]),
            output_kind: ValueKind::Number,
        },
        accuracy_impl,
    )
    .expect("builtin");

    reg.register(
        "mean_win_rate",
        FunctionMeta {
            induces_ordering: true,
            weight_aware: false,
            input_kinds: BTreeSet::from([ValueKind::Number]),
            output_kind: ValueKind::Number,
        },
        mean_win_rate_impl,
    )
    .expect("builtin");
}

/// Fraction of children judged correct, in [0, 1].
///
/// Two pairing conventions, selected by the `mode` parameter:
/// - `indicator` (default): each child is 1/0 (number) or a category equal
///   to the `correct_label` parameter (default `"correct"`).
/// - `pair`: each child carries a (prediction, label) pair — a two-element
///   vector for numeric pairs, or text `"pred<sep>label"` split on the
///   `separator` parameter (default `"|"`).
fn accuracy_impl(input: &FnInput<'_>) -> Result<Value, ApplyError> {
    let mode = input.params.get("mode").and_then(|v| v.as_str()).unwrap_or("indicator");
    let mut correct = 0usize;
    match mode {
        "indicator" => {
            let correct_label = input
                .params
                .get("correct_label")
                .and_then(|v| v.as_str())
                .unwrap_or("correct");
            for v in input.values {
                match v {
                    Value::Number(x) if *x == 1.0 => correct += 1,
                    Value::Number(x) if *x == 0.0 => {}
                    Value::Category(label) => {
                        if label == correct_label {
                            correct += 1;
                        }
                    }
                    other => {
                        return Err(ApplyError::FunctionDomainMismatch {
                            function: "accuracy".into(),
                            kind: other.kind(),
                        })
                    }
                }
            }
        }
        "pair" => {
            let sep = input.params.get("separator").and_then(|v| v.as_str()).unwrap_or("|");
            for v in input.values {
                match v {
                    Value::Vector(pair) if pair.len() == 2 => {
                        if pair[0] == pair[1] {
                            correct += 1;
                        }
                    }
                    Value::Text(t) => {
                        let (pred, label) = t.split_once(sep).ok_or_else(|| ApplyError::BadParams {
                            function: "accuracy".into(),
                            reason: format!("text pair `{t}` lacks separator `{sep}`"),
                        })?;
                        if pred == label {
                            correct += 1;
                        }
                    }
                    other => {
                        return Err(ApplyError::FunctionDomainMismatch {
                            function: "accuracy".into(),
                            kind: other.kind(),
                        })
                    }
                }
            }
        }
        other => {
            return Err(ApplyError::BadParams {
                function: "accuracy".into(),
                reason: format!("unknown mode `{other}`"),
            })
        }
    }
    Ok(Value::Number(correct as f64 / input.values.len() as f64))
}

/// Mean win rate: per child, the fraction of its competitors it strictly
/// beats (ties count one half), averaged over children. In [0, 1].
///
/// The `competitors` parameter is a list of per-child score lists aligned
/// with the node's declared children; `higher_is_better` (default true)
/// selects the winning direction.
fn mean_win_rate_impl(input: &FnInput<'_>) -> Result<Value, ApplyError> {
    let lists = input
        .params
        .get("competitors")
        .ok_or_else(|| ApplyError::MissingCompetitorData("no `competitors` parameter".into()))?
        .as_array()
        .ok_or_else(|| ApplyError::MissingCompetitorData("`competitors` must be a list of score lists".into()))?;
    let higher_is_better = input
        .params
        .get("higher_is_better")
        .and_then(|v| v.as_bool())
        .unwrap_or(true);

    let mut rates = Vec::with_capacity(input.values.len());
    for (v, &child_index) in input.values.iter().zip(input.indices) {
        let score = v.as_number().ok_or_else(|| ApplyError::FunctionDomainMismatch {
            function: "mean_win_rate".into(),
            kind: v.kind(),
        })?;
        let list = lists
            .get(child_index)
            .and_then(|l| l.as_array())
            .ok_or_else(|| ApplyError::MissingCompetitorData(format!("no competitor list for child {child_index}")))?;
        if list.is_empty() {
            return Err(ApplyError::MissingCompetitorData(format!(
                "empty competitor list for child {child_index}"
            )));
        }
        let mut wins = 0.0;
        for c in list {
            let other = c.as_f64().ok_or_else(|| ApplyError::MissingCompetitorData(
                "competitor scores must be numbers".into(),
            ))?;
            if score == other {
                wins += 0.5;
            } else if (score > other) == higher_is_better {
                wins += 1.0;
            }
        }
        rates.push(wins / list.len() as f64);
    }
    Ok(Value::Number(mean_of(&rates)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(name: &str, xs: &[f64]) -> Value {
        let spec = SummaryFunctionSpec::new(name);
        let children: Vec<Value> = xs.iter().map(|&x| Value::Number(x)).collect();
        default_registry().apply(&spec, &children, &[]).unwrap()
    }

    #[test]
    fn mean_and_max_match_worked_examples() {
        assert_eq!(apply("mean", &[1.0, 3.0]), Value::Number(2.0));
        assert_eq!(apply("max", &[3.0, 2.0]), Value::Number(3.0));
    }

    #[test]
    fn mean_skips_missing_children() {
        let children = vec![
            Value::Number(2.11),
            Value::Number(2.38),
            Value::Number(3.87),
            Value::Number(3.18),
            Value::Number(3.64),
            Value::Missing,
            Value::Number(4.98),
            Value::Number(3.26),
            Value::Number(4.69),
        ];
        let got = default_registry()
            .apply(&SummaryFunctionSpec::mean(), &children, &[])
            .unwrap();
        let x = got.as_number().unwrap();
        assert!((x - 28.11 / 8.0).abs() < 1e-12, "got {x}");
    }

    #[test]
    fn median_matches_field_testing_rows() {
        assert_eq!(apply("median", &[1.67, 3.33, 1.67, 1.67, 3.33]), Value::Number(1.67));
        assert_eq!(apply("median", &[5.00, 1.67, 5.00, 5.00, 0.0]), Value::Number(5.00));
        assert_eq!(apply("median", &[1.0, 2.0]), Value::Number(1.5));
    }

    #[test]
    fn all_missing_children_yield_missing() {
        let got = default_registry()
            .apply(&SummaryFunctionSpec::mean(), &[Value::Missing, Value::Missing], &[])
            .unwrap();
        assert_eq!(got, Value::Missing);
    }

    #[test]
    fn propagate_policy_spreads_missing() {
        let got = default_registry()
            .apply_with_policy(
                &SummaryFunctionSpec::mean(),
                &[Value::Number(1.0), Value::Missing],
                &[],
                MissingPolicy::Propagate,
            )
            .unwrap();
        assert_eq!(got, Value::Missing);
    }

    #[test]
    fn re_registering_a_builtin_is_rejected() {
        let mut reg = Registry::with_builtins();
        let err = reg
            .register("mean", FunctionMeta::numeric(false), |_| Ok(Value::Missing))
            .unwrap_err();
        assert_eq!(err, RegistryError::DuplicateName("mean".into()));
    }

    #[test]
    fn ordering_claim_on_text_output_is_invalid_metadata() {
        let mut reg = Registry::empty();
        let meta = FunctionMeta {
            induces_ordering: true,
            weight_aware: false,
            input_kinds: BTreeSet::from([ValueKind::Text]),
            output_kind: ValueKind::Text,
        };
        let err = reg.register("concat", meta, |_| Ok(Value::Text(String::new()))).unwrap_err();
        assert!(matches!(err, RegistryError::InvalidMetadata { .. }));
    }

    #[test]
    fn category_output_orders_only_with_declared_order() {
        let mut reg = Registry::empty();
        reg.register(
            "worst_case",
            FunctionMeta {
                induces_ordering: true,
                weight_aware: false,
                input_kinds: BTreeSet::from([ValueKind::Category]),
                output_kind: ValueKind::Category,
            },
            |input| Ok(input.values[0].clone()),
        )
        .unwrap();
        let bare = SummaryFunctionSpec::new("worst_case");
        assert!(!reg.induces_ordering(&bare).unwrap());
        let ordered = bare.clone().with_param("category_order", serde_json::json!(["low", "high"]));
        assert!(reg.induces_ordering(&ordered).unwrap());
    }

    #[test]
    fn catalog_lists_the_scalar_builtins() {
        let reg = default_registry();
        for name in builtin_catalog() {
            let meta = reg.meta(name).unwrap();
            assert!(meta.induces_ordering, "{name}");
            assert_eq!(meta.output_kind, ValueKind::Number, "{name}");
            assert_eq!(meta.weight_aware, *name == "weighted_mean", "{name}");
        }
    }

    #[test]
    fn accuracy_counts_fractions() {
        let spec = SummaryFunctionSpec::new("accuracy");
        let ones_zero = [1.0, 1.0, 0.0, 1.0].map(Value::Number);
        assert_eq!(default_registry().apply(&spec, &ones_zero, &[]).unwrap(), Value::Number(0.75));

        let all_correct = vec![Value::Number(1.0); 7];
        assert_eq!(default_registry().apply(&spec, &all_correct, &[]).unwrap(), Value::Number(1.0));

        let pairs = spec.clone().with_param("mode", serde_json::json!("pair"));
        let children = vec![Value::text("A|A"), Value::text("B|C")];
        assert_eq!(default_registry().apply(&pairs, &children, &[]).unwrap(), Value::Number(0.5));
    }

    #[test]
    fn mean_win_rate_examples() {
        let mwr = |children: &[Value], competitors: serde_json::Value| {
            let spec = SummaryFunctionSpec::new("mean_win_rate").with_param("competitors", competitors);
            default_registry().apply(&spec, children, &[]).unwrap()
        };
        assert_eq!(
            mwr(&[Value::Number(0.9)], serde_json::json!([[0.5, 0.7]])),
            Value::Number(1.0)
        );
        assert_eq!(
            mwr(&[Value::Number(0.5)], serde_json::json!([[0.5, 0.5, 0.5]])),
            Value::Number(0.5)
        );
        assert_eq!(
            mwr(
                &[Value::Number(0.9), Value::Number(0.1)],
                serde_json::json!([[0.5, 0.7], [0.5, 0.7]])
            ),
            Value::Number(0.5)
        );
    }

    #[test]
    fn mean_win_rate_requires_competitors() {
        let spec = SummaryFunctionSpec::new("mean_win_rate");
        let err = default_registry().apply(&spec, &[Value::Number(1.0)], &[]).unwrap_err();
        assert!(matches!(err, ApplyError::MissingCompetitorData(_)));
    }

    #[test]
    fn mean_win_rate_competitors_follow_original_child_positions() {
        let spec = SummaryFunctionSpec::new("mean_win_rate")
            .with_param("competitors", serde_json::json!([[9.0], [0.1, 0.2]]));
        let children = [Value::Missing, Value::Number(0.5)];
        let got = default_registry().apply(&spec, &children, &[]).unwrap();
        assert_eq!(got, Value::Number(1.0));
    }

    #[test]
    fn domain_mismatch_is_reported() {
        let err = default_registry()
            .apply(&SummaryFunctionSpec::mean(), &[Value::text("oops")], &[])
            .unwrap_err();
        assert!(matches!(err, ApplyError::FunctionDomainMismatch { kind: ValueKind::Text, .. }));
    }
}
