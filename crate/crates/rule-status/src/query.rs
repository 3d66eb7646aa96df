//! Point queries over status tables: what one node is doing at one time,
//! where a rule's status changes, and instant scans across a rule set.
//!
//! A query names a rule, a node address, a suffix start `t0`, and a time
//! `t` with `T0 <= t0 <= t <= Tf`; the answer is the exclusive status of
//! `t` in that node's quad, rendered both as machine-readable markers and
//! as a fixed-shape sentence like
//!
//! ```text
//! Rule 3.1.2 is active and satisfied (at t*=5)
//! ```
//!
//! The *diagonal* view fixes `t = t0` and drives the other two features:
//! [`interesting_times`] collects every time a rule newly becomes active
//! or violated when read from that very time, and [`scan_globals`] asks
//! each always-rule (`G` at the root) about its body at one instant, which
//! is how "which rules fired at t=34?" is answered.

use serde::Serialize;

use crate::formula::{AddressError, NodeAddress, NodeId, OperatorKind};
use crate::status::{StatusTable, TimeSet, TimesetQuad};
use crate::trace::Time;

use thiserror::Error;

/// The exclusive status of a single time within a quad.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    Active,
    ActiveAndSatisfied,
    Inactive,
    Violated,
}

impl PointStatus {
    /// Machine-readable markers, as they appear in query JSON.
    pub fn markers(self) -> &'static [&'static str] {
        match self {
            PointStatus::Active => &["active"],
            PointStatus::ActiveAndSatisfied => &["active", "satisfied"],
            PointStatus::Inactive => &["inactive"],
            PointStatus::Violated => &["violated"],
        }
    }

    /// The status as it reads in a sentence.
    pub fn phrase(self) -> &'static str {
        match self {
            PointStatus::Active => "active",
            PointStatus::ActiveAndSatisfied => "active and satisfied",
            PointStatus::Inactive => "inactive",
            PointStatus::Violated => "violated",
        }
    }

    /// Collapse satisfaction: the transition classes are active, inactive,
    /// and violated.
    fn class(self) -> PointStatus {
        match self {
            PointStatus::ActiveAndSatisfied => PointStatus::Active,
            other => other,
        }
    }
}

/// Classify time `t` within `quad`. `t` must lie in the quad's domain.
pub fn point_status(quad: &TimesetQuad, t: Time) -> PointStatus {
    if quad.is_violated() {
        PointStatus::Violated
    } else if quad.satisfied.contains(t) {
        PointStatus::ActiveAndSatisfied
    } else if quad.active.contains(t) {
        PointStatus::Active
    } else {
        PointStatus::Inactive
    }
}

/// A failed query.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error(transparent)]
    Address(#[from] AddressError),
    #[error("query times must satisfy {start} <= t0 <= t <= {end}; got t0={t0}, t={t}")]
    TimeOutOfRange {
        t0: Time,
        t: Time,
        start: Time,
        end: Time,
    },
}

/// One answered query, ready for text or JSON output.
///
/// Serializes as
/// `{"rule": 3, "node": "1.2", "t0": 2, "t": 5,
///   "status": ["active", "satisfied"], "text": "Rule 3.1.2 is ..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub rule: usize,
    pub node: String,
    pub t0: Time,
    pub t: Time,
    pub status: Vec<&'static str>,
    pub text: String,
}

/// `Rule 3` for the root, `Rule 3.1.2` for node `1.2`.
fn rule_label(rule: usize, address: &NodeAddress) -> String {
    if address.is_root() {
        format!("Rule {rule}")
    } else {
        format!("Rule {rule}.{address}")
    }
}

/// Answer one query against `table`, labeling the sentence with `rule`
/// (the rule's 1-based position in its file).
pub fn query_status(
    table: &StatusTable,
    rule: usize,
    address: &NodeAddress,
    t0: Time,
    t: Time,
) -> Result<QueryResult, QueryError> {
    let node = table
        .tree()
        .resolve(address)
        .ok_or_else(|| AddressError::NotFound(address.to_string()))?;
    let trace = table.trace();
    if t0 < trace.start_time() || t < t0 || t > trace.end_time() {
        return Err(QueryError::TimeOutOfRange {
            t0,
            t,
            start: trace.start_time(),
            end: trace.end_time(),
        });
    }
    let quad = table.quad_by_id(node, t0).expect("t0 bounds checked");
    let status = point_status(quad, t);
    Ok(QueryResult {
        rule,
        node: address.to_string(),
        t0,
        t,
        status: status.markers().to_vec(),
        text: format!(
            "{} is {} (at t*={t})",
            rule_label(rule, address),
            status.phrase()
        ),
    })
}

/// Status of `node` at time `t0` when read from `t0` itself.
pub fn diagonal_status(table: &StatusTable, node: NodeId, t0: Time) -> PointStatus {
    let quad = table.quad_by_id(node, t0).expect("t0 within the trace");
    point_status(quad, t0)
}

/// The times where the node's diagonal status newly enters "active" or
/// "violated": every change of class landing in one of those two, plus the
/// very first time if it already starts there. These are the moments worth
/// reporting; mere settling (a fall back to inactive) is not.
pub fn interesting_times(table: &StatusTable, address: &NodeAddress) -> Result<TimeSet, QueryError> {
    let node = table
        .tree()
        .resolve(address)
        .ok_or_else(|| AddressError::NotFound(address.to_string()))?;
    let trace = table.trace();
    let mut result = TimeSet::empty();
    let mut previous: Option<PointStatus> = None;
    for t0 in trace.start_time()..=trace.end_time() {
        let class = diagonal_status(table, node, t0).class();
        let noteworthy = matches!(class, PointStatus::Active | PointStatus::Violated);
        if noteworthy && previous != Some(class) {
            result.insert(t0);
        }
        previous = Some(class);
    }
    Ok(result)
}

/// One rule's contribution to a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanEntry {
    /// The rule's body, queried at the scan instant.
    Hit(QueryResult),
    /// The rule does not have `G` at the root, so "its body at time t" is
    /// not a meaningful question; the scan reports it rather than guessing.
    SkippedNonGlobal { rule: usize },
}

/// Ask every always-rule what its body is doing at instant `t`: for each
/// table whose root operator is `G`, query node "1" at `t0 = t = t`.
///
/// With `only_satisfied` set (the usual reading: "which rules fired
/// here?"), hits are restricted to bodies that are satisfied at `t`;
/// skipped-rule notices are always kept.
pub fn scan_globals(
    tables: &[StatusTable],
    t: Time,
    only_satisfied: bool,
) -> Result<Vec<ScanEntry>, QueryError> {
    let mut entries = Vec::new();
    for (i, table) in tables.iter().enumerate() {
        let rule = i + 1;
        let tree = table.tree();
        if tree.node(tree.root()).kind() != OperatorKind::Globally {
            entries.push(ScanEntry::SkippedNonGlobal { rule });
            continue;
        }
        let body = NodeAddress::root().child(1);
        let result = query_status(table, rule, &body, t, t)?;
        if !only_satisfied || result.status.contains(&"satisfied") {
            entries.push(ScanEntry::Hit(result));
        }
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FormulaTree;
    use crate::status::assess;
    use crate::trace::Trace;

    /// Steps: t=0 {p}, t=1 {}, t=2 {p,q}, t=3 {q}.
    fn sample() -> Trace {
        Trace::from_lists(0, &[&["p"], &[], &["p", "q"], &["q"]]).unwrap()
    }

    fn table(formula: &str) -> StatusTable {
        let tree = FormulaTree::parse(formula).unwrap();
        assess(&tree, &sample())
    }

    fn query(table: &StatusTable, rule: usize, address: &str, t0: Time, t: Time) -> QueryResult {
        let address = NodeAddress::parse(address).unwrap();
        query_status(table, rule, &address, t0, t).unwrap()
    }

    #[test]
    fn sentences_have_the_fixed_shape() {
        // F q from 0 is active at 0 and 1, satisfied at 2, settled at 3.
        let t = table("F q");
        assert_eq!(
            query(&t, 1, "", 0, 1).text,
            "Rule 1 is active (at t*=1)"
        );
        assert_eq!(
            query(&t, 1, "", 0, 2).text,
            "Rule 1 is active and satisfied (at t*=2)"
        );
        assert_eq!(
            query(&t, 1, "", 0, 3).text,
            "Rule 1 is inactive (at t*=3)"
        );
        let t = table("p U q");
        assert_eq!(
            query(&t, 2, "", 0, 1).text,
            "Rule 2 is violated (at t*=1)"
        );
        // Non-root nodes get dotted labels.
        let t = table("G (p -> q)");
        assert_eq!(
            query(&t, 3, "1.2", 2, 2).text,
            "Rule 3.1.2 is active and satisfied (at t*=2)"
        );
    }

    #[test]
    fn results_serialize_with_stable_fields() {
        let t = table("F q");
        let result = query(&t, 1, "", 0, 2);
        let json = serde_json::to_value(&result).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "rule": 1,
                "node": "",
                "t0": 0,
                "t": 2,
                "status": ["active", "satisfied"],
                "text": "Rule 1 is active and satisfied (at t*=2)"
            })
        );
    }

    #[test]
    fn queries_enforce_the_time_window() {
        let t = table("F q");
        let root = NodeAddress::root();
        for (t0, tt) in [(-1, 2), (0, 4), (2, 1), (4, 4)] {
            let err = query_status(&t, 1, &root, t0, tt).unwrap_err();
            assert!(
                matches!(err, QueryError::TimeOutOfRange { .. }),
                "t0={t0}, t={tt}"
            );
        }
        let missing = NodeAddress::parse("7").unwrap();
        assert!(matches!(
            query_status(&t, 1, &missing, 0, 0),
            Err(QueryError::Address(AddressError::NotFound(_)))
        ));
    }

    #[test]
    fn interesting_times_fire_on_entries_only() {
        // q's diagonal: violated, violated, active, active.
        let t = table("q");
        let root = NodeAddress::root();
        assert_eq!(
            interesting_times(&t, &root).unwrap(),
            TimeSet::from_iter([0, 2])
        );

        // X p's diagonal: violated, active, violated, violated.
        let t = table("X p");
        assert_eq!(
            interesting_times(&t, &root).unwrap(),
            TimeSet::from_iter([0, 1, 2])
        );

        // An implication reads inactive wherever its antecedent fails, and
        // inactive entries never fire. Diagonal: inactive, violated,
        // inactive, active.
        let t = table("!p -> q");
        assert_eq!(
            interesting_times(&t, &root).unwrap(),
            TimeSet::from_iter([1, 3])
        );
    }

    #[test]
    fn scan_reports_satisfied_bodies_and_skips_non_globals() {
        let tables = [table("G (p -> q)"), table("F p"), table("G q")];
        let entries = scan_globals(&tables, 2, true).unwrap();
        assert_eq!(entries.len(), 3);
        match &entries[0] {
            ScanEntry::Hit(result) => {
                assert_eq!(result.rule, 1);
                assert_eq!(result.node, "1");
                assert_eq!(result.text, "Rule 1.1 is active and satisfied (at t*=2)");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(entries[1], ScanEntry::SkippedNonGlobal { rule: 2 });
        match &entries[2] {
            ScanEntry::Hit(result) => assert_eq!(result.rule, 3),
            other => panic!("unexpected {other:?}"),
        }

        // At t=1 neither body is satisfied: the implication is vacuous
        // (inactive) and q is absent (violated). The satisfied-only scan
        // keeps just the notice; the unfiltered scan reports both.
        let entries = scan_globals(&tables, 1, true).unwrap();
        assert_eq!(entries, vec![ScanEntry::SkippedNonGlobal { rule: 2 }]);
        let entries = scan_globals(&tables, 1, false).unwrap();
        assert_eq!(entries.len(), 3);
        match &entries[0] {
            ScanEntry::Hit(result) => assert_eq!(result.status, vec!["inactive"]),
            other => panic!("unexpected {other:?}"),
        }
        match &entries[2] {
            ScanEntry::Hit(result) => assert_eq!(result.status, vec!["violated"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn scan_validates_the_instant() {
        let tables = [table("G p")];
        assert!(matches!(
            scan_globals(&tables, 9, true),
            Err(QueryError::TimeOutOfRange { .. })
        ));
    }
}
