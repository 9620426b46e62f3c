//! Observation and summary values carried by tree nodes.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Discriminant of [`Value`]; used for function domain checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Number,
    Category,
    Text,
    Vector,
    Missing,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::Number => "number",
            ValueKind::Category => "category",
            ValueKind::Text => "text",
            ValueKind::Vector => "vector",
            ValueKind::Missing => "missing",
        })
    }
}

/// A single observed or computed value.
///
/// Numbers are kept finite (NaN and infinities are rejected at every
/// ingestion boundary), `Category` labels are interpreted against an order
/// declared in function parameters, and `Missing` marks absent data.
/// `Missing` compares equal only to `Missing`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Category(String),
    Text(String),
    Vector(Vec<f64>),
    Missing,
}

/// Rejected non-finite number.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("number must be finite, got {0}")]
pub struct NonFiniteNumber(pub f64);

impl Value {
    /// Builds a `Number`, rejecting NaN and infinities.
    pub fn number(x: f64) -> Result<Self, NonFiniteNumber> {
        if x.is_finite() {
            Ok(Value::Number(x))
        } else {
            Err(NonFiniteNumber(x))
        }
    }

    pub fn category(label: impl Into<String>) -> Self {
        Value::Category(label.into())
    }

    pub fn text(text: impl Into<String>) -> Self {
        Value::Text(text.into())
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Number(_) => ValueKind::Number,
            Value::Category(_) => ValueKind::Category,
            Value::Text(_) => ValueKind::Text,
            Value::Vector(_) => ValueKind::Vector,
            Value::Missing => ValueKind::Missing,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    /// Verifies the finiteness invariant on stored numbers.
    pub(crate) fn check_finite(&self) -> Result<(), NonFiniteNumber> {
        match self {
            Value::Number(x) if !x.is_finite() => Err(NonFiniteNumber(*x)),
            Value::Vector(v) => match v.iter().find(|x| !x.is_finite()) {
                Some(x) => Err(NonFiniteNumber(*x)),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// Three-way comparison under the value ordering, `None` when the pair has
/// no defined order. Categories order by position in `category_order`;
/// without a declared order (or with an undeclared label) they are
/// incomparable. Text and vectors never order. `Missing` equals only
/// `Missing`.
pub(crate) fn order_values(a: &Value, b: &Value, category_order: Option<&[String]>) -> Option<Ordering> {
    match (a, b) {
        (Value::Missing, Value::Missing) => Some(Ordering::Equal),
        (Value::Number(x), Value::Number(y)) => x.partial_cmp(y),
        (Value::Category(x), Value::Category(y)) => {
            let order = category_order?;
            let px = order.iter().position(|l| l == x)?;
            let py = order.iter().position(|l| l == y)?;
            Some(px.cmp(&py))
        }
        _ => None,
    }
}

// Wire form: numbers and strings map directly (strings are Text), arrays of
// numbers are Vector, null is Missing, and Category is spelled
// {"category": "<label>"} to keep it distinct from Text.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Number(x) => serializer.serialize_f64(*x),
            Value::Text(t) => serializer.serialize_str(t),
            Value::Vector(v) => {
                let mut seq = serializer.serialize_seq(Some(v.len()))?;
                for x in v {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
            Value::Category(c) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("category", c)?;
                map.end()
            }
            Value::Missing => serializer.serialize_unit(),
        }
    }
}

struct ValueVisitor;

impl<'de> Visitor<'de> for ValueVisitor {
    type Value = Value;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a finite number, string, array of numbers, {\"category\": ...}, or null")
    }

    fn visit_f64<E: de::Error>(self, x: f64) -> Result<Value, E> {
        Value::number(x).map_err(|e| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, x: i64) -> Result<Value, E> {
        Ok(Value::Number(x as f64))
    }

    fn visit_u64<E: de::Error>(self, x: u64) -> Result<Value, E> {
        Ok(Value::Number(x as f64))
    }

    fn visit_str<E: de::Error>(self, s: &str) -> Result<Value, E> {
        Ok(Value::Text(s.to_owned()))
    }

    fn visit_unit<E: de::Error>(self) -> Result<Value, E> {
        Ok(Value::Missing)
    }

    fn visit_none<E: de::Error>(self) -> Result<Value, E> {
        Ok(Value::Missing)
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Value, A::Error> {
        let mut v = Vec::new();
        while let Some(x) = seq.next_element::<f64>()? {
            if !x.is_finite() {
                return Err(de::Error::custom(NonFiniteNumber(x).to_string()));
            }
            v.push(x);
        }
        Ok(Value::Vector(v))
    }

    fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Value, A::Error> {
        let mut category: Option<String> = None;
        while let Some(key) = map.next_key::<String>()? {
            if key == "category" {
                category = Some(map.next_value()?);
            } else {
                return Err(de::Error::custom(format!("unexpected key `{key}` in value object")));
            }
        }
        category
            .map(Value::Category)
            .ok_or_else(|| de::Error::custom("value object requires a `category` key"))
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Value, D::Error> {
        deserializer.deserialize_any(ValueVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_rejects_non_finite() {
        assert!(Value::number(1.5).is_ok());
        assert!(Value::number(f64::NAN).is_err());
        assert!(Value::number(f64::INFINITY).is_err());
    }

    #[test]
    fn missing_equals_only_missing() {
        assert_eq!(Value::Missing, Value::Missing);
        assert_ne!(Value::Missing, Value::Number(0.0));
        assert_ne!(Value::Missing, Value::Text(String::new()));
    }

    #[test]
    fn json_round_trip() {
        for v in [
            Value::Number(2.5),
            Value::Text("hello".into()),
            Value::Category("high".into()),
            Value::Vector(vec![1.0, 2.0]),
            Value::Missing,
        ] {
            let s = serde_json::to_string(&v).unwrap();
            let back: Value = serde_json::from_str(&s).unwrap();
            assert_eq!(v, back);
        }
    }

    #[test]
    fn category_order_comes_from_declared_list() {
        let order = vec!["low".to_string(), "high".to_string()];
        let lo = Value::Category("low".into());
        let hi = Value::Category("high".into());
        assert_eq!(order_values(&lo, &hi, Some(&order)), Some(Ordering::Less));
        assert_eq!(order_values(&lo, &hi, None), None);
        assert_eq!(order_values(&lo, &Value::Category("absent".into()), Some(&order)), None);
    }

    #[test]
    fn text_and_vectors_do_not_order() {
        assert_eq!(order_values(&Value::Text("a".into()), &Value::Text("a".into()), None), None);
        assert_eq!(
            order_values(&Value::Vector(vec![1.0]), &Value::Vector(vec![2.0]), None),
            None
        );
        assert_eq!(order_values(&Value::Missing, &Value::Number(1.0), None), None);
    }
}
