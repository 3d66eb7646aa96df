//! Finite traces and where they come from: JSON trace files, Kripke
//! structures with runs, and plain-text step listings.
//!
//! A trace is a non-empty sequence of label sets indexed by consecutive
//! integer times starting at `start_time`. Labels obey the formula label
//! token rule (see [`crate::formula::is_valid_label`]) so anything a trace
//! records can be referenced by a rule.
//!
//! # Trace JSON
//!
//! ```json
//! { "start_time": 0, "steps": [["a1"], ["a1", "a3"], []] }
//! ```
//!
//! Steps are arrays of labels. On save, labels are written sorted; a step
//! with a duplicate label is rejected on load rather than silently deduped.
//! Saving and reloading reproduces the trace exactly.
//!
//! # Kripke JSON
//!
//! ```json
//! {
//!   "states": ["s1", "s2"],
//!   "initial": ["s1"],
//!   "transitions": [["s1", "s1"], ["s1", "s2"], ["s2", "s1"]],
//!   "labels": { "s1": ["a1"], "s2": ["a1", "a3"] }
//! }
//! ```
//!
//! Validation requires every initial state and transition endpoint to be a
//! declared state, a label entry for every state, and at least one outgoing
//! transition per state. A run through the structure must start in an
//! initial state and follow transitions; a valid run of length n induces
//! the trace `L(state_0), ..., L(state_{n-1})`.
//!
//! # Step listings
//!
//! ```text
//! # free-form comment
//! (1)  doors-closed, driver-awake
//! (2)  doors-closed, driver-awake, gas-low
//! (...)
//! (7)  doors-closed
//! ```
//!
//! Each line is `(<t>)` followed by comma-separated labels (possibly none).
//! Times must advance by exactly one unless a `(...)` line declares an
//! elided range; filling such a range with a default label set is opt-in.
//! Blank lines and `#` comments are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::is_valid_label;

/// Discrete trace time. Steps sit at consecutive integers.
pub type Time = i64;

/// The labels observed at one step.
pub type LabelSet = BTreeSet<String>;

/// A finite trace: label sets at times `start_time ..= end_time`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    start_time: Time,
    steps: Vec<LabelSet>,
}

/// Errors building or loading a trace.
#[derive(Debug, Error)]
pub enum TraceError {
    #[error("a trace needs at least one step")]
    Empty,
    #[error("step at t={t}: invalid label {label:?}")]
    InvalidLabel { t: Time, label: String },
    #[error("step at t={t}: duplicate label {label:?}")]
    DuplicateLabel { t: Time, label: String },
    #[error("malformed trace JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    start_time: Time,
    steps: Vec<Vec<String>>,
}

impl Trace {
    /// Build a trace from already-collected label sets.
    ///
    /// Rejects an empty step list and any label that fails the token rule.
    /// Duplicates cannot arise here because the sets already dedupe; use
    /// [`Trace::from_json_str`] or the listing reader when duplicate
    /// detection matters.
    pub fn new(start_time: Time, steps: Vec<LabelSet>) -> Result<Self, TraceError> {
        if steps.is_empty() {
            return Err(TraceError::Empty);
        }
        for (offset, step) in steps.iter().enumerate() {
            for label in step {
                if !is_valid_label(label) {
                    return Err(TraceError::InvalidLabel {
                        t: start_time + offset as Time,
                        label: label.clone(),
                    });
                }
            }
        }
        Ok(Trace { start_time, steps })
    }

    /// Convenience constructor for tests and examples.
    pub fn from_lists(start_time: Time, steps: &[&[&str]]) -> Result<Self, TraceError> {
        let sets = steps
            .iter()
            .map(|step| step.iter().map(|s| s.to_string()).collect())
            .collect();
        Trace::new(start_time, sets)
    }

    pub fn start_time(&self) -> Time {
        self.start_time
    }

    /// Time of the last step.
    pub fn end_time(&self) -> Time {
        self.start_time + self.steps.len() as Time - 1
    }

    /// Number of steps. Always at least one; construction rejects empty
    /// traces.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn contains_time(&self, t: Time) -> bool {
        t >= self.start_time && t <= self.end_time()
    }

    /// Labels at step `t`.
    ///
    /// # Panics
    ///
    /// Panics if `t` is outside `start_time ..= end_time`.
    pub fn labels_at(&self, t: Time) -> &LabelSet {
        assert!(
            self.contains_time(t),
            "time {t} outside trace range {}..={}",
            self.start_time,
            self.end_time()
        );
        &self.steps[(t - self.start_time) as usize]
    }

    /// True if `label` holds at step `t`.
    pub fn holds(&self, t: Time, label: &str) -> bool {
        self.labels_at(t).contains(label)
    }

    /// Parse the trace JSON format.
    pub fn from_json_str(text: &str) -> Result<Self, TraceError> {
        let file: TraceFile = serde_json::from_str(text)?;
        if file.steps.is_empty() {
            return Err(TraceError::Empty);
        }
        let mut steps = Vec::with_capacity(file.steps.len());
        for (offset, raw) in file.steps.into_iter().enumerate() {
            let t = file.start_time + offset as Time;
            let mut set = LabelSet::new();
            for label in raw {
                if !is_valid_label(&label) {
                    return Err(TraceError::InvalidLabel { t, label });
                }
                if !set.insert(label.clone()) {
                    return Err(TraceError::DuplicateLabel { t, label });
                }
            }
            steps.push(set);
        }
        Ok(Trace {
            start_time: file.start_time,
            steps,
        })
    }

    /// Render the canonical trace JSON: labels sorted, two-space indent,
    /// trailing newline. `from_json_str` inverts this exactly.
    pub fn to_json_string(&self) -> String {
        let file = TraceFile {
            start_time: self.start_time,
            steps: self
                .steps
                .iter()
                .map(|s| s.iter().cloned().collect())
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("trace serialization");
        text.push('\n');
        text
    }

    /// Load a trace JSON file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| TraceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Write the canonical trace JSON to a file.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TraceError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|source| TraceError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// A Kripke structure: states, initial states, a transition relation, and a
/// labeling that assigns each state the labels observed there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kripke {
    states: BTreeSet<String>,
    initial: BTreeSet<String>,
    transitions: BTreeSet<(String, String)>,
    labels: BTreeMap<String, LabelSet>,
}

/// Errors loading or validating a Kripke structure.
#[derive(Debug, Error)]
pub enum KripkeError {
    #[error("malformed Kripke JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid state name {0:?}: state names must be non-empty and contain no whitespace")]
    InvalidState(String),
    #[error("duplicate state {0:?}")]
    DuplicateState(String),
    #[error("initial state {0:?} is not a declared state")]
    UnknownInitial(String),
    #[error("transition endpoint {0:?} is not a declared state")]
    UnknownEndpoint(String),
    #[error("labeling mentions unknown state {0:?}")]
    UnknownLabeledState(String),
    #[error("state {0:?} has no label entry; the labeling must cover every state")]
    MissingLabels(String),
    #[error("state {0:?} has no outgoing transition")]
    NoOutgoing(String),
    #[error("state {state:?}: invalid label {label:?}")]
    InvalidLabel { state: String, label: String },
    #[error("state {state:?}: duplicate label {label:?}")]
    DuplicateLabel { state: String, label: String },
}

/// Why a run fails validation. Indexes point at the first offending
/// position in the run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunViolation {
    #[error("run is empty")]
    Empty,
    #[error("run position {index}: unknown state {state:?}")]
    UnknownState { index: usize, state: String },
    #[error("run starts in {state:?}, which is not an initial state")]
    NotInitial { state: String },
    #[error("run position {index}: no transition {from:?} -> {to:?}")]
    MissingTransition {
        index: usize,
        from: String,
        to: String,
    },
}

#[derive(Serialize, Deserialize)]
struct KripkeFile {
    states: Vec<String>,
    initial: Vec<String>,
    transitions: Vec<(String, String)>,
    labels: BTreeMap<String, Vec<String>>,
}

impl Kripke {
    /// Parse and validate the Kripke JSON format.
    pub fn from_json_str(text: &str) -> Result<Self, KripkeError> {
        let file: KripkeFile = serde_json::from_str(text)?;
        let mut states = BTreeSet::new();
        for state in file.states {
            if state.is_empty() || state.chars().any(|c| c.is_whitespace()) {
                return Err(KripkeError::InvalidState(state));
            }
            if !states.insert(state.clone()) {
                return Err(KripkeError::DuplicateState(state));
            }
        }
        let mut initial = BTreeSet::new();
        for state in file.initial {
            if !states.contains(&state) {
                return Err(KripkeError::UnknownInitial(state));
            }
            initial.insert(state);
        }
        let mut transitions = BTreeSet::new();
        for (from, to) in file.transitions {
            if !states.contains(&from) {
                return Err(KripkeError::UnknownEndpoint(from));
            }
            if !states.contains(&to) {
                return Err(KripkeError::UnknownEndpoint(to));
            }
            transitions.insert((from, to));
        }
        let mut labels = BTreeMap::new();
        for (state, raw) in file.labels {
            if !states.contains(&state) {
                return Err(KripkeError::UnknownLabeledState(state));
            }
            let mut set = LabelSet::new();
            for label in raw {
                if !is_valid_label(&label) {
                    return Err(KripkeError::InvalidLabel { state, label });
                }
                if !set.insert(label.clone()) {
                    return Err(KripkeError::DuplicateLabel { state, label });
                }
            }
            labels.insert(state, set);
        }
        for state in &states {
            if !labels.contains_key(state) {
                return Err(KripkeError::MissingLabels(state.clone()));
            }
            if !transitions.iter().any(|(from, _)| from == state) {
                return Err(KripkeError::NoOutgoing(state.clone()));
            }
        }
        Ok(Kripke {
            states,
            initial,
            transitions,
            labels,
        })
    }

    /// Load a Kripke JSON file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, KripkeError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| KripkeError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn states(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(String::as_str)
    }

    /// Labels of a state, if it exists.
    pub fn labels_of(&self, state: &str) -> Option<&LabelSet> {
        self.labels.get(state)
    }

    pub fn has_transition(&self, from: &str, to: &str) -> bool {
        self.transitions
            .contains(&(from.to_string(), to.to_string()))
    }

    /// Check that `run` is a path through the structure: non-empty, starting
    /// in an initial state, every state declared, every hop a transition.
    pub fn validate_run<S: AsRef<str>>(&self, run: &[S]) -> Result<(), RunViolation> {
        let Some(first) = run.first() else {
            return Err(RunViolation::Empty);
        };
        for (index, state) in run.iter().enumerate() {
            if !self.states.contains(state.as_ref()) {
                return Err(RunViolation::UnknownState {
                    index,
                    state: state.as_ref().to_string(),
                });
            }
        }
        if !self.initial.contains(first.as_ref()) {
            return Err(RunViolation::NotInitial {
                state: first.as_ref().to_string(),
            });
        }
        for (index, pair) in run.windows(2).enumerate() {
            let (from, to) = (pair[0].as_ref(), pair[1].as_ref());
            if !self.transitions.contains(&(from.to_string(), to.to_string())) {
                return Err(RunViolation::MissingTransition {
                    index: index + 1,
                    from: from.to_string(),
                    to: to.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Validate `run` and produce the trace it induces, starting at
    /// `start_time`: step i carries the labels of run state i.
    pub fn induce_trace<S: AsRef<str>>(
        &self,
        run: &[S],
        start_time: Time,
    ) -> Result<Trace, RunViolation> {
        self.validate_run(run)?;
        let steps = run
            .iter()
            .map(|state| self.labels[state.as_ref()].clone())
            .collect();
        Ok(Trace { start_time, steps })
    }
}

/// Parse a run file: whitespace-separated state names, `#` comments and
/// blank lines ignored.
pub fn run_from_str(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
        .map(str::to_string)
        .collect()
}

/// A failure while reading a step listing; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("listing line {line}: {message}")]
pub struct ListingError {
    pub line: usize,
    pub message: String,
}

impl ListingError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ListingError {
            line,
            message: message.into(),
        }
    }
}

/// Read a step listing into a trace.
///
/// `gap_fill`: `None` rejects `(...)` elisions; `Some(labels)` fills every
/// elided step with that label set.
pub fn trace_from_listing(text: &str, gap_fill: Option<&LabelSet>) -> Result<Trace, ListingError> {
    let mut start_time = None;
    let mut steps: Vec<LabelSet> = Vec::new();
    let mut pending_gap: Option<usize> = None;

    for (line_no, raw_line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "(...)" {
            if start_time.is_none() {
                return Err(ListingError::new(line_no, "listing starts with a gap"));
            }
            if pending_gap.is_some() {
                return Err(ListingError::new(line_no, "consecutive gap markers"));
            }
            pending_gap = Some(line_no);
            continue;
        }
        let (t, labels) = parse_listing_step(line, line_no)?;
        match start_time {
            None => {
                start_time = Some(t);
            }
            Some(start) => {
                let expected = start + steps.len() as Time;
                if let Some(gap_line) = pending_gap.take() {
                    if t <= expected {
                        return Err(ListingError::new(
                            gap_line,
                            format!("gap marker elides nothing before step ({t})"),
                        ));
                    }
                    let Some(fill) = gap_fill else {
                        return Err(ListingError::new(
                            gap_line,
                            format!(
                                "listing elides steps {}..{} and gap filling is disabled",
                                expected,
                                t - 1
                            ),
                        ));
                    };
                    for _ in expected..t {
                        steps.push(fill.clone());
                    }
                } else if t != expected {
                    return Err(ListingError::new(
                        line_no,
                        format!("expected step ({expected}), found ({t}); use (...) to mark an elision"),
                    ));
                }
            }
        }
        steps.push(labels);
    }

    if let Some(gap_line) = pending_gap {
        return Err(ListingError::new(gap_line, "listing ends with a gap marker"));
    }
    let Some(start_time) = start_time else {
        return Err(ListingError::new(1, "listing contains no steps"));
    };
    Ok(Trace { start_time, steps })
}

fn parse_listing_step(line: &str, line_no: usize) -> Result<(Time, LabelSet), ListingError> {
    let rest = line
        .strip_prefix('(')
        .ok_or_else(|| ListingError::new(line_no, "expected a step like (3) label, label"))?;
    let close = rest
        .find(')')
        .ok_or_else(|| ListingError::new(line_no, "unclosed step time; expected ')'"))?;
    let t: Time = rest[..close]
        .trim()
        .parse()
        .map_err(|_| ListingError::new(line_no, format!("invalid step time {:?}", &rest[..close])))?;
    let mut labels = LabelSet::new();
    let remainder = rest[close + 1..].trim();
    if !remainder.is_empty() {
        for part in remainder.split(',') {
            let label = part.trim();
            if label.is_empty() {
                return Err(ListingError::new(line_no, "empty label between commas"));
            }
            if !is_valid_label(label) {
                return Err(ListingError::new(line_no, format!("invalid label {label:?}")));
            }
            if !labels.insert(label.to_string()) {
                return Err(ListingError::new(line_no, format!("duplicate label {label:?}")));
            }
        }
    }
    Ok((t, labels))
}

impl fmt::Display for Trace {
    /// Listing-style rendering, handy for debugging and REPL output.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (offset, step) in self.steps.iter().enumerate() {
            let labels: Vec<&str> = step.iter().map(String::as_str).collect();
            writeln!(
                f,
                "({})\t{}",
                self.start_time + offset as Time,
                labels.join(", ")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> LabelSet {
        labels.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn trace_indexing_respects_start_time() {
        let trace = Trace::from_lists(5, &[&["a"], &["b"], &[]]).unwrap();
        assert_eq!(trace.start_time(), 5);
        assert_eq!(trace.end_time(), 7);
        assert_eq!(trace.len(), 3);
        assert!(trace.holds(5, "a"));
        assert!(trace.holds(6, "b"));
        assert!(!trace.holds(6, "a"));
        assert!(trace.labels_at(7).is_empty());
        assert!(trace.contains_time(7));
        assert!(!trace.contains_time(8));
    }

    #[test]
    #[should_panic(expected = "outside trace range")]
    fn labels_at_rejects_out_of_range_time() {
        let trace = Trace::from_lists(0, &[&["a"]]).unwrap();
        trace.labels_at(1);
    }

    #[test]
    fn empty_trace_is_rejected() {
        assert!(matches!(Trace::new(0, Vec::new()), Err(TraceError::Empty)));
        let err = Trace::from_json_str(r#"{"start_time": 0, "steps": []}"#).unwrap_err();
        assert!(matches!(err, TraceError::Empty));
    }

    #[test]
    fn invalid_and_duplicate_labels_are_rejected() {
        let err = Trace::from_json_str(r#"{"start_time": 3, "steps": [["ok"], ["9bad"]]}"#)
            .unwrap_err();
        match err {
            TraceError::InvalidLabel { t, label } => {
                assert_eq!(t, 4);
                assert_eq!(label, "9bad");
            }
            other => panic!("unexpected error {other:?}"),
        }
        let err =
            Trace::from_json_str(r#"{"start_time": 0, "steps": [["a", "a"]]}"#).unwrap_err();
        assert!(matches!(err, TraceError::DuplicateLabel { t: 0, .. }));
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let trace = Trace::from_lists(1, &[&["b", "a"], &[], &["z"]]).unwrap();
        let text = trace.to_json_string();
        // Sorted labels and a trailing newline.
        assert!(text.contains("\"a\",\n"));
        assert!(text.ends_with('\n'));
        let reloaded = Trace::from_json_str(&text).unwrap();
        assert_eq!(reloaded, trace);
        assert_eq!(reloaded.to_json_string(), text);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.json");
        let trace = Trace::from_lists(-2, &[&["x"], &["x", "y"]]).unwrap();
        trace.save(&path).unwrap();
        assert_eq!(Trace::load(&path).unwrap(), trace);
    }

    fn diamond() -> Kripke {
        Kripke::from_json_str(
            r#"{
                "states": ["s1", "s2", "s3"],
                "initial": ["s1"],
                "transitions": [
                    ["s1", "s1"], ["s1", "s2"], ["s2", "s3"], ["s3", "s3"]
                ],
                "labels": { "s1": ["p"], "s2": ["p", "q"], "s3": [] }
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn kripke_validation_catches_each_defect() {
        let missing_label = r#"{
            "states": ["s1"], "initial": ["s1"],
            "transitions": [["s1", "s1"]], "labels": {}
        }"#;
        assert!(matches!(
            Kripke::from_json_str(missing_label),
            Err(KripkeError::MissingLabels(s)) if s == "s1"
        ));

        let unknown_initial = r#"{
            "states": ["s1"], "initial": ["s9"],
            "transitions": [["s1", "s1"]], "labels": {"s1": []}
        }"#;
        assert!(matches!(
            Kripke::from_json_str(unknown_initial),
            Err(KripkeError::UnknownInitial(s)) if s == "s9"
        ));

        let unknown_endpoint = r#"{
            "states": ["s1"], "initial": ["s1"],
            "transitions": [["s1", "s9"]], "labels": {"s1": []}
        }"#;
        assert!(matches!(
            Kripke::from_json_str(unknown_endpoint),
            Err(KripkeError::UnknownEndpoint(s)) if s == "s9"
        ));

        let sink = r#"{
            "states": ["s1", "s2"], "initial": ["s1"],
            "transitions": [["s1", "s2"]], "labels": {"s1": [], "s2": []}
        }"#;
        assert!(matches!(
            Kripke::from_json_str(sink),
            Err(KripkeError::NoOutgoing(s)) if s == "s2"
        ));

        let stray_labels = r#"{
            "states": ["s1"], "initial": ["s1"],
            "transitions": [["s1", "s1"]], "labels": {"s1": [], "s9": []}
        }"#;
        assert!(matches!(
            Kripke::from_json_str(stray_labels),
            Err(KripkeError::UnknownLabeledState(s)) if s == "s9"
        ));
    }

    #[test]
    fn run_validation_reports_first_offense() {
        let k = diamond();
        assert!(k.validate_run(&["s1", "s2", "s3", "s3"]).is_ok());
        assert_eq!(k.validate_run::<&str>(&[]), Err(RunViolation::Empty));
        assert_eq!(
            k.validate_run(&["s2", "s3"]),
            Err(RunViolation::NotInitial {
                state: "s2".to_string()
            })
        );
        assert_eq!(
            k.validate_run(&["s1", "s3"]),
            Err(RunViolation::MissingTransition {
                index: 1,
                from: "s1".to_string(),
                to: "s3".to_string()
            })
        );
        assert_eq!(
            k.validate_run(&["s1", "sX"]),
            Err(RunViolation::UnknownState {
                index: 1,
                state: "sX".to_string()
            })
        );
    }

    #[test]
    fn induced_trace_reads_labels_along_the_run() {
        let k = diamond();
        let trace = k.induce_trace(&["s1", "s1", "s2", "s3"], 10).unwrap();
        assert_eq!(trace.start_time(), 10);
        assert_eq!(trace.labels_at(10), &set(&["p"]));
        assert_eq!(trace.labels_at(12), &set(&["p", "q"]));
        assert_eq!(trace.labels_at(13), &set(&[]));
    }

    #[test]
    fn run_file_parsing_skips_comments() {
        let run = run_from_str("s1 s2\n# comment\ns3 # trailing\n\ns3\n");
        assert_eq!(run, ["s1", "s2", "s3", "s3"]);
    }

    #[test]
    fn listing_reads_contiguous_steps() {
        let trace = trace_from_listing(
            "# preamble\n(4)\ta, b\n(5)\n(6)  c\n",
            None,
        )
        .unwrap();
        assert_eq!(trace.start_time(), 4);
        assert_eq!(trace.labels_at(4), &set(&["a", "b"]));
        assert!(trace.labels_at(5).is_empty());
        assert_eq!(trace.labels_at(6), &set(&["c"]));
    }

    #[test]
    fn listing_gap_requires_opt_in() {
        let text = "(1) a\n(...)\n(4) b\n";
        let err = trace_from_listing(text, None).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("elides steps 2..3"));

        let fill = set(&["idle"]);
        let trace = trace_from_listing(text, Some(&fill)).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace.labels_at(2), &fill);
        assert_eq!(trace.labels_at(3), &fill);
        assert_eq!(trace.labels_at(4), &set(&["b"]));
    }

    #[test]
    fn listing_rejects_silent_discontinuity() {
        let err = trace_from_listing("(1) a\n(3) b\n", None).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("use (...)"));
    }

    #[test]
    fn listing_rejects_degenerate_gaps() {
        let err = trace_from_listing("(1) a\n(...)\n(2) b\n", Some(&set(&[]))).unwrap_err();
        assert!(err.message.contains("elides nothing"));
        let err = trace_from_listing("(...)\n(2) b\n", None).unwrap_err();
        assert!(err.message.contains("starts with a gap"));
        let err = trace_from_listing("(1) a\n(...)\n", Some(&set(&[]))).unwrap_err();
        assert!(err.message.contains("ends with a gap"));
        let err = trace_from_listing("", None).unwrap_err();
        assert!(err.message.contains("no steps"));
    }

    #[test]
    fn listing_rejects_bad_labels() {
        let err = trace_from_listing("(1) a,, b\n", None).unwrap_err();
        assert!(err.message.contains("empty label"));
        let err = trace_from_listing("(1) a b\n", None).unwrap_err();
        assert!(err.message.contains("invalid label"));
        let err = trace_from_listing("(1) a, a\n", None).unwrap_err();
        assert!(err.message.contains("duplicate label"));
    }

    #[test]
    fn display_renders_listing_form() {
        let trace = Trace::from_lists(2, &[&["b", "a"], &[]]).unwrap();
        assert_eq!(trace.to_string(), "(2)\ta, b\n(3)\t\n");
    }
}
