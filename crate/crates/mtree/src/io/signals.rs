//! Delimited signal tables and scale normalization.
//!
//! Instruments collect heterogeneous raw signals (annotation labels, survey
//! responses) on per-item scales. Rows declare their own scale and
//! direction; ingestion maps every raw value onto the instrument's common
//! 0–10 risk scale (higher = more risk) and groups rows into leaf bindings
//! keyed by (testing level, source, item). Ingestion is order-independent:
//! permuting rows yields the same bindings.

use std::collections::BTreeMap;
use std::fmt;

use crate::catalog::InstrumentSpec;

/// Evidence source category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TestingLevel {
    ModelTesting,
    RedTeaming,
    FieldTesting,
}

impl TestingLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            TestingLevel::ModelTesting => "MT",
            TestingLevel::RedTeaming => "RT",
            TestingLevel::FieldTesting => "FT",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "MT" => Some(TestingLevel::ModelTesting),
            "RT" => Some(TestingLevel::RedTeaming),
            "FT" => Some(TestingLevel::FieldTesting),
            _ => None,
        }
    }
}

impl fmt::Display for TestingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Who produced a signal: expert annotation or user perception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SignalSource {
    Annotation,
    Perception,
}

impl SignalSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SignalSource::Annotation => "annotation",
            SignalSource::Perception => "perception",
        }
    }

    /// Construct label used for the source node in instrument trees.
    pub fn node_label(self) -> &'static str {
        match self {
            SignalSource::Annotation => "Annotator label",
            SignalSource::Perception => "User perception",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "annotation" => Some(SignalSource::Annotation),
            "perception" => Some(SignalSource::Perception),
            _ => None,
        }
    }
}

impl fmt::Display for SignalSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Direction of a raw scale relative to risk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    HigherIsRisk,
    LowerIsRisk,
}

impl Direction {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "higher_is_risk" => Some(Direction::HigherIsRisk),
            "lower_is_risk" => Some(Direction::LowerIsRisk),
            _ => None,
        }
    }
}

/// A raw scale and its risk direction; the target range is always [0, 10].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSpec {
    raw_min: f64,
    raw_max: f64,
    direction: Direction,
}

impl ScaleSpec {
    pub fn new(raw_min: f64, raw_max: f64, direction: Direction) -> Result<Self, SignalError> {
        if !(raw_min.is_finite() && raw_max.is_finite() && raw_min < raw_max) {
            return Err(SignalError::BadScale {
                reason: format!("raw_min {raw_min} must be finite and below raw_max {raw_max}"),
            });
        }
        Ok(ScaleSpec { raw_min, raw_max, direction })
    }

    pub fn raw_min(&self) -> f64 {
        self.raw_min
    }

    pub fn raw_max(&self) -> f64 {
        self.raw_max
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }
}

/// Affine map of a raw reading onto [0, 10]:
/// `10 · (raw − raw_min) / (raw_max − raw_min)`, flipped to
/// `10 − mapped` for `lower_is_risk` scales.
pub fn normalize_scale(raw: f64, spec: &ScaleSpec) -> Result<f64, SignalError> {
    if !(raw >= spec.raw_min && raw <= spec.raw_max) {
        return Err(SignalError::ScaleViolation {
            line: None,
            raw,
            raw_min: spec.raw_min,
            raw_max: spec.raw_max,
        });
    }
    let mapped = 10.0 * (raw - spec.raw_min) / (spec.raw_max - spec.raw_min);
    Ok(match spec.direction {
        Direction::HigherIsRisk => mapped,
        Direction::LowerIsRisk => 10.0 - mapped,
    })
}

/// One collected signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalRow {
    pub session_id: String,
    pub item_id: String,
    pub level: TestingLevel,
    pub source: SignalSource,
    pub raw_value: f64,
    pub scale: ScaleSpec,
}

/// Parsed signal table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignalTable {
    pub rows: Vec<SignalRow>,
}

/// Error reading or ingesting a signal table.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SignalError {
    #[error("csv error{}: {message}", line_suffix(.line))]
    Csv { line: Option<u64>, message: String },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: bad `{column}` field: {reason}")]
    BadField { line: u64, column: String, reason: String },
    #[error("invalid scale: {reason}")]
    BadScale { reason: String },
    #[error("raw value {raw} outside [{raw_min}, {raw_max}]{}", line_suffix(.line))]
    ScaleViolation { line: Option<u64>, raw: f64, raw_min: f64, raw_max: f64 },
    #[error("unknown item `{item}` for {level}/{signal_source}")]
    UnknownItem { level: String, signal_source: String, item: String },
}

fn line_suffix(line: &Option<u64>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

const COLUMNS: [&str; 8] = [
    "session_id",
    "item_id",
    "testing_level",
    "source",
    "raw_value",
    "raw_min",
    "raw_max",
    "direction",
];

impl SignalTable {
    /// Parses delimited UTF-8 text with a header row.
    pub fn parse_csv(bytes: &[u8], delimiter: u8) -> Result<SignalTable, SignalError> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let headers = reader
            .headers()
            .map_err(|e| SignalError::Csv { line: Some(1), message: e.to_string() })?
            .clone();
        let mut index = BTreeMap::new();
        for name in COLUMNS {
            let i = headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SignalError::MissingColumn(name.to_owned()))?;
            index.insert(name, i);
        }

        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| SignalError::Csv {
                line: e.position().map(|p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let field = |name: &'static str| -> Result<&str, SignalError> {
                record.get(index[name]).ok_or(SignalError::Csv {
                    line: Some(line),
                    message: format!("row too short for column `{name}`"),
                })
            };
            let number = |name: &'static str| -> Result<f64, SignalError> {
                let s = field(name)?;
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| SignalError::BadField {
                        line,
                        column: name.to_owned(),
                        reason: format!("`{s}` is not a finite number"),
                    })
            };

            let level_str = field("testing_level")?;
            let level = TestingLevel::parse(level_str).ok_or_else(|| SignalError::BadField {
                line,
                column: "testing_level".into(),
                reason: format!("`{level_str}` is not one of MT, RT, FT"),
            })?;
            let source_str = field("source")?;
            let source = SignalSource::parse(source_str).ok_or_else(|| SignalError::BadField {
                line,
                column: "source".into(),
                reason: format!("`{source_str}` is not one of annotation, perception"),
            })?;
            let direction_str = field("direction")?;
            let direction = Direction::parse(direction_str).ok_or_else(|| SignalError::BadField {
                line,
                column: "direction".into(),
                reason: format!("`{direction_str}` is not one of higher_is_risk, lower_is_risk"),
            })?;
            let scale = ScaleSpec::new(number("raw_min")?, number("raw_max")?, direction)?;

            rows.push(SignalRow {
                session_id: field("session_id")?.to_owned(),
                item_id: field("item_id")?.to_owned(),
                level,
                source,
                raw_value: number("raw_value")?,
                scale,
            });
        }
        Ok(SignalTable { rows })
    }
}

/// Identity of a leaf-binding group.
pub type ItemKey = (TestingLevel, SignalSource, String);

/// Normalized per-item leaf bindings: for each item, the labeled session
/// values that become its leaves, sorted for order independence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LeafBindings {
    pub bindings: BTreeMap<ItemKey, Vec<(String, f64)>>,
}

/// Normalizes and groups a signal table against an instrument vocabulary.
/// Items without rows are simply absent from the result; the instrument
/// instantiates them as missing leaves.
pub fn ingest_signals(table: &SignalTable, instrument: &InstrumentSpec) -> Result<LeafBindings, SignalError> {
    let mut bindings: BTreeMap<ItemKey, Vec<(String, f64)>> = BTreeMap::new();
    for row in &table.rows {
        if !instrument.contains_item(row.level, row.source, &row.item_id) {
            return Err(SignalError::UnknownItem {
                level: row.level.to_string(),
                signal_source: row.source.to_string(),
                item: row.item_id.clone(),
            });
        }
        let normalized = normalize_scale(row.raw_value, &row.scale)?;
        bindings
            .entry((row.level, row.source, row.item_id.clone()))
            .or_default()
            .push((row.session_id.clone(), normalized));
    }
    for values in bindings.values_mut() {
        values.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        // Sibling labels must be unique; repeated sessions get a suffix.
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for (label, _) in values.iter_mut() {
            let n = counts.entry(label.clone()).or_insert(0);
            *n += 1;
            if *n > 1 {
                *label = format!("{label}#{n}");
            }
        }
    }
    Ok(LeafBindings { bindings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::corix_topology;

    #[test]
    fn normalize_endpoints_and_midpoint() {
        let up = ScaleSpec::new(1.0, 5.0, Direction::HigherIsRisk).unwrap();
        assert_eq!(normalize_scale(1.0, &up).unwrap(), 0.0);
        assert_eq!(normalize_scale(5.0, &up).unwrap(), 10.0);
        assert_eq!(normalize_scale(3.0, &up).unwrap(), 5.0);

        let down = ScaleSpec::new(1.0, 5.0, Direction::LowerIsRisk).unwrap();
        assert_eq!(normalize_scale(1.0, &down).unwrap(), 10.0);
        assert_eq!(normalize_scale(5.0, &down).unwrap(), 0.0);
        assert_eq!(normalize_scale(3.0, &down).unwrap(), 5.0);
    }

    #[test]
    fn out_of_range_raw_is_a_scale_violation() {
        let spec = ScaleSpec::new(0.0, 10.0, Direction::HigherIsRisk).unwrap();
        assert!(matches!(
            normalize_scale(10.5, &spec),
            Err(SignalError::ScaleViolation { .. })
        ));
        assert!(ScaleSpec::new(5.0, 5.0, Direction::HigherIsRisk).is_err());
    }

    const HEADER: &str = "session_id,item_id,testing_level,source,raw_value,raw_min,raw_max,direction\n";

    #[test]
    fn parses_rows_and_ingests_in_any_order() {
        let body = format!(
            "{HEADER}s1,RA 1,RT,annotation,4,0,10,higher_is_risk\n\
             s2,RA 1,RT,annotation,6,0,10,higher_is_risk\n\
             s1,QQ 1.1,FT,perception,2,1,5,lower_is_risk\n"
        );
        let table = SignalTable::parse_csv(body.as_bytes(), b',').unwrap();
        assert_eq!(table.rows.len(), 3);
        let instrument = corix_topology();
        let forward = ingest_signals(&table, &instrument).unwrap();

        let mut reversed = table.clone();
        reversed.rows.reverse();
        assert_eq!(forward, ingest_signals(&reversed, &instrument).unwrap());

        let key = (TestingLevel::FieldTesting, SignalSource::Perception, "QQ 1.1".to_string());
        let qq = &forward.bindings[&key];
        // 2 on a reversed 1–5 scale: 10 − 10·(2−1)/4 = 7.5.
        assert_eq!(qq, &vec![("s1".to_string(), 7.5)]);
    }

    #[test]
    fn unknown_items_are_rejected() {
        let body = format!("{HEADER}s1,XX 9,RT,annotation,4,0,10,higher_is_risk\n");
        let table = SignalTable::parse_csv(body.as_bytes(), b',').unwrap();
        let err = ingest_signals(&table, &corix_topology()).unwrap_err();
        assert!(matches!(err, SignalError::UnknownItem { .. }));
    }

    #[test]
    fn missing_column_is_reported() {
        let err = SignalTable::parse_csv(b"session_id,item_id\na,b\n", b',').unwrap_err();
        assert!(matches!(err, SignalError::MissingColumn(_)));
    }

    #[test]
    fn repeated_sessions_get_distinct_leaf_labels() {
        let body = format!(
            "{HEADER}s1,RA 1,RT,annotation,4,0,10,higher_is_risk\n\
             s1,RA 1,RT,annotation,6,0,10,higher_is_risk\n"
        );
        let table = SignalTable::parse_csv(body.as_bytes(), b',').unwrap();
        let got = ingest_signals(&table, &corix_topology()).unwrap();
        let key = (TestingLevel::RedTeaming, SignalSource::Annotation, "RA 1".to_string());
        let labels: Vec<&str> = got.bindings[&key].iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, vec!["s1", "s1#2"]);
    }
}
