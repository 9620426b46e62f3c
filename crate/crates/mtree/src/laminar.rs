//! Set-family validation for hierarchical clusterings.
//!
//! A valid hierarchical clustering over a ground set contains the ground set
//! itself, every singleton, only pairwise nested-or-disjoint sets, and for
//! every set with a proper subset, enough subsets to cover it exactly. The
//! checker here reports each violated clause as data rather than failing, so
//! it can run over unvalidated candidates.

use std::collections::BTreeSet;
use std::fmt;

use crate::tree::MeasurementTree;

/// One named member set of a candidate family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySet {
    pub label: String,
    pub members: BTreeSet<String>,
}

/// A candidate set family over a ground set of datapoint ids. Nothing is
/// assumed valid; run [`validate_family`] to find out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    pub universe: BTreeSet<String>,
    pub sets: Vec<FamilySet>,
}

/// A violated clause of the hierarchical-clustering definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LaminarViolation {
    /// Two sets overlap without either containing the other.
    NonNestedOverlap { a: String, b: String },
    /// A set with proper subsets is not covered by them.
    IncompletePartition { set: String, missing: BTreeSet<String> },
    /// No set equals the ground set.
    RootCoverage { missing: BTreeSet<String> },
    /// A ground-set element has no singleton set.
    MissingSingleton { element: String },
}

impl LaminarViolation {
    /// Stable class name for reporting.
    pub fn class(&self) -> &'static str {
        match self {
            LaminarViolation::NonNestedOverlap { .. } => "non-nested-overlap",
            LaminarViolation::IncompletePartition { .. } => "incomplete-partition",
            LaminarViolation::RootCoverage { .. } => "root-coverage",
            LaminarViolation::MissingSingleton { .. } => "missing-singleton",
        }
    }
}

impl fmt::Display for LaminarViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LaminarViolation::NonNestedOverlap { a, b } => {
                write!(f, "non-nested-overlap: `{a}` and `{b}` overlap without nesting")
            }
            LaminarViolation::IncompletePartition { set, missing } => {
                write!(f, "incomplete-partition: `{set}` is not covered by its subsets (missing {missing:?})")
            }
            LaminarViolation::RootCoverage { missing } => {
                write!(f, "root-coverage: no set spans the ground set (uncovered {missing:?})")
            }
            LaminarViolation::MissingSingleton { element } => {
                write!(f, "missing-singleton: element `{element}` has no singleton set")
            }
        }
    }
}

/// Validation outcome; empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaminarReport {
    pub violations: Vec<LaminarViolation>,
}

impl LaminarReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn classes(&self) -> BTreeSet<&'static str> {
        self.violations.iter().map(LaminarViolation::class).collect()
    }
}

impl fmt::Display for LaminarReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid hierarchical clustering");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Validates the set family a tree implies over its leaf datapoints.
pub fn validate_laminar(tree: &MeasurementTree) -> LaminarReport {
    tree.validate_laminar()
}

/// Checks every clause of the hierarchical-clustering definition over a
/// candidate family.
pub fn validate_family(family: &SetFamily) -> LaminarReport {
    let mut violations = Vec::new();

    // The ground set itself must be present.
    if !family.sets.iter().any(|s| s.members == family.universe) {
        let covered: BTreeSet<String> = family
            .sets
            .iter()
            .max_by_key(|s| s.members.len())
            .map(|s| s.members.clone())
            .unwrap_or_default();
        let missing: BTreeSet<String> = family.universe.difference(&covered).cloned().collect();
        violations.push(LaminarViolation::RootCoverage { missing });
    }

    // Every element must appear as a singleton.
    for element in &family.universe {
        let singleton = BTreeSet::from([element.clone()]);
        if !family.sets.iter().any(|s| s.members == singleton) {
            violations.push(LaminarViolation::MissingSingleton { element: element.clone() });
        }
    }

    // Pairwise: nested (either direction, equality allowed) or disjoint.
    for (i, a) in family.sets.iter().enumerate() {
        for b in &family.sets[i + 1..] {
            if a.members == b.members {
                continue;
            }
            let nested = a.members.is_subset(&b.members) || b.members.is_subset(&a.members);
            if !nested && a.members.intersection(&b.members).next().is_some() {
                violations.push(LaminarViolation::NonNestedOverlap { a: a.label.clone(), b: b.label.clone() });
            }
        }
    }

    // Completeness: a set with any proper subset must be the union of its
    // proper subsets (taking all of them is the maximal candidate cover).
    for set in &family.sets {
        let mut union: BTreeSet<String> = BTreeSet::new();
        let mut has_proper_subset = false;
        for other in &family.sets {
            if other.members.len() < set.members.len() && other.members.is_subset(&set.members) {
                has_proper_subset = true;
                union.extend(other.members.iter().cloned());
            }
        }
        if has_proper_subset && union != set.members {
            let missing: BTreeSet<String> = set.members.difference(&union).cloned().collect();
            violations.push(LaminarViolation::IncompletePartition { set: set.label.clone(), missing });
        }
    }

    LaminarReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(universe: &[&str], sets: &[(&str, &[&str])]) -> SetFamily {
        SetFamily {
            universe: universe.iter().map(|s| s.to_string()).collect(),
            sets: sets
                .iter()
                .map(|(label, members)| FamilySet {
                    label: label.to_string(),
                    members: members.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        }
    }

    fn valid_four() -> SetFamily {
        family(
            &["1", "2", "3", "4"],
            &[
                ("root", &["1", "2", "3", "4"]),
                ("left", &["1", "2"]),
                ("right", &["3", "4"]),
                ("s1", &["1"]),
                ("s2", &["2"]),
                ("s3", &["3"]),
                ("s4", &["4"]),
            ],
        )
    }

    #[test]
    fn valid_family_passes() {
        assert!(validate_family(&valid_four()).is_valid());
    }

    #[test]
    fn shared_leaf_under_two_constructs_is_an_overlap() {
        // Three datapoints, one of them claimed by both constructs.
        let f = family(
            &["1", "2", "3"],
            &[
                ("root", &["1", "2", "3"]),
                ("left", &["1", "2"]),
                ("right", &["2", "3"]),
                ("s1", &["1"]),
                ("s2", &["2"]),
                ("s3", &["3"]),
            ],
        );
        let report = validate_family(&f);
        assert!(report.classes().contains("non-nested-overlap"));
    }

    #[test]
    fn root_covering_three_of_four_is_flagged() {
        let f = family(
            &["1", "2", "3", "4"],
            &[
                ("root", &["1", "2", "3"]),
                ("s1", &["1"]),
                ("s2", &["2"]),
                ("s3", &["3"]),
                ("s4", &["4"]),
            ],
        );
        let report = validate_family(&f);
        assert_eq!(report.classes(), BTreeSet::from(["root-coverage"]), "{report}");
    }

    #[test]
    fn removed_singleton_breaks_partition_completeness() {
        let mut f = valid_four();
        f.sets.retain(|s| s.label != "s2");
        let report = validate_family(&f);
        assert!(report.classes().contains("incomplete-partition"), "{report}");
        assert!(report.classes().contains("missing-singleton"));
    }

    #[test]
    fn equal_sets_from_single_child_chains_are_fine() {
        let f = family(
            &["1"],
            &[("root", &["1"]), ("only", &["1"]), ("s1", &["1"])],
        );
        assert!(validate_family(&f).is_valid());
    }
}
