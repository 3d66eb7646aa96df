//! The status engine: for every subformula and every suffix start, the
//! four time sets that say when the node is active, satisfied, inactive,
//! or violated.
//!
//! # Status quads
//!
//! Fix a trace over times `T0 ..= Tf` and a suffix start `t0`. Reading a
//! node φ from `t0` and walking forward in time, each `t` in `{t0..Tf}`
//! lands in exactly one bucket:
//!
//! - **violated**: the suffix at `t0` conclusively fails φ. Violation has
//!   no onset time, so it poisons everything: the violated set is either
//!   empty or all of `{t0..Tf}`, and then the other three are empty.
//! - **active**: at time `t`, steps up to `t` still matter to φ's verdict.
//! - **satisfied**: active, and the verdict lands (conclusively true) at
//!   `t`. Satisfaction marks the end of each active stretch.
//! - **inactive**: the verdict was already settled before `t`.
//!
//! In the non-violated case the active and inactive sets partition
//! `{t0..Tf}` and the satisfied set collects exactly the last step of each
//! active run. Every module below emits single-interval sets, so a quad is
//! always "active on `{t0..w}`, satisfied at `w`, inactive after" for some
//! witness `w`, or one of the two total shapes. [`TimesetQuad::check_invariants`]
//! verifies all of this and the engine asserts it on every quad in debug
//! builds.
//!
//! # The engine
//!
//! [`assess`] fills a [`StatusTable`]: quads for every (node, t0) pair,
//! computed bottom-up. A node's module only ever inspects its children's
//! violated flags at selected suffix starts, so parents reduce to small
//! forward scans. Atom quads are computed once per distinct label and
//! shared across leaves; `ap_count` counts those leaf evaluations
//! (distinct labels times trace length) and `op_count` counts every other
//! module's loop iterations, where invoking a loopless module costs one
//! iteration.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{FormulaTree, NodeAddress, NodeId, OperatorKind};
use crate::trace::{Time, Trace};

/// A set of trace times, stored as sorted, disjoint, non-adjacent
/// inclusive intervals.
///
/// Prints in brace notation with runs collapsed: `{2..5, 8}`, `{0}`, `{}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TimeSet {
    runs: Vec<(Time, Time)>,
}

impl TimeSet {
    pub fn empty() -> Self {
        TimeSet::default()
    }

    pub fn point(t: Time) -> Self {
        TimeSet { runs: vec![(t, t)] }
    }

    /// The inclusive range `lo ..= hi`; empty when `lo > hi`.
    pub fn range(lo: Time, hi: Time) -> Self {
        if lo > hi {
            TimeSet::empty()
        } else {
            TimeSet { runs: vec![(lo, hi)] }
        }
    }

    /// Insert one time, merging with neighbors.
    pub fn insert(&mut self, t: Time) {
        let pos = self.runs.partition_point(|&(_, hi)| hi < t - 1);
        if pos < self.runs.len() && self.runs[pos].0 <= t + 1 {
            // Touches or overlaps the run at pos.
            let (lo, hi) = self.runs[pos];
            if t >= lo && t <= hi {
                return;
            }
            self.runs[pos] = (lo.min(t), hi.max(t));
            // Inserting can bridge at most this run and the next.
            if pos + 1 < self.runs.len() && self.runs[pos + 1].0 <= self.runs[pos].1 + 1 {
                let (_, next_hi) = self.runs.remove(pos + 1);
                self.runs[pos].1 = self.runs[pos].1.max(next_hi);
            }
        } else {
            self.runs.insert(pos, (t, t));
        }
    }

    pub fn contains(&self, t: Time) -> bool {
        self.runs
            .binary_search_by(|&(lo, hi)| {
                if t < lo {
                    std::cmp::Ordering::Greater
                } else if t > hi {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of times in the set.
    pub fn count(&self) -> usize {
        self.runs
            .iter()
            .map(|&(lo, hi)| (hi - lo + 1) as usize)
            .sum()
    }

    pub fn first(&self) -> Option<Time> {
        self.runs.first().map(|&(lo, _)| lo)
    }

    pub fn last(&self) -> Option<Time> {
        self.runs.last().map(|&(_, hi)| hi)
    }

    /// The maximal runs as inclusive `(lo, hi)` pairs.
    pub fn runs(&self) -> &[(Time, Time)] {
        &self.runs
    }

    /// Iterate every time in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = Time> + '_ {
        self.runs.iter().flat_map(|&(lo, hi)| lo..=hi)
    }

    /// All times as a vector, handy for JSON output.
    pub fn times(&self) -> Vec<Time> {
        self.iter().collect()
    }

    /// `{lo..hi}` minus this set.
    pub fn complement_within(&self, lo: Time, hi: Time) -> TimeSet {
        let mut out = TimeSet::empty();
        let mut next = lo;
        for &(run_lo, run_hi) in &self.runs {
            if run_lo > hi {
                break;
            }
            if run_lo > next {
                out.runs.push((next, (run_lo - 1).min(hi)));
            }
            next = next.max(run_hi + 1);
        }
        if next <= hi {
            out.runs.push((next, hi));
        }
        out
    }
}

impl FromIterator<Time> for TimeSet {
    fn from_iter<I: IntoIterator<Item = Time>>(iter: I) -> Self {
        let mut set = TimeSet::empty();
        for t in iter {
            set.insert(t);
        }
        set
    }
}

impl fmt::Display for TimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, &(lo, hi)) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if lo == hi {
                write!(f, "{lo}")?;
            } else {
                write!(f, "{lo}..{hi}")?;
            }
        }
        f.write_str("}")
    }
}

/// The four time sets describing one node read from one suffix start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimesetQuad {
    /// The suffix start this quad describes.
    pub t0: Time,
    pub active: TimeSet,
    pub satisfied: TimeSet,
    pub inactive: TimeSet,
    pub violated: TimeSet,
}

impl TimesetQuad {
    /// True if the suffix at `t0` conclusively fails the node.
    pub fn is_violated(&self) -> bool {
        !self.violated.is_empty()
    }

    /// Verify the structural invariants over the domain `{t0..tf}`:
    /// violation is all-or-nothing and excludes the other sets; otherwise
    /// active and inactive partition the domain and satisfied marks
    /// exactly the final step of each active run.
    pub fn check_invariants(&self, tf: Time) -> Result<(), String> {
        let domain = TimeSet::range(self.t0, tf);
        if self.is_violated() {
            if self.violated != domain {
                return Err(format!(
                    "violated set {} is neither empty nor the whole domain {}",
                    self.violated, domain
                ));
            }
            if !(self.active.is_empty() && self.satisfied.is_empty() && self.inactive.is_empty())
            {
                return Err("violated quad has leftover active/satisfied/inactive times".into());
            }
            return Ok(());
        }
        for t in domain.iter() {
            match (self.active.contains(t), self.inactive.contains(t)) {
                (true, true) => {
                    return Err(format!("time {t} is both active and inactive"));
                }
                (false, false) => {
                    return Err(format!("time {t} is neither active nor inactive"));
                }
                _ => {}
            }
            let run_end = self.active.contains(t) && (t == tf || !self.active.contains(t + 1));
            if self.satisfied.contains(t) != run_end {
                return Err(format!(
                    "satisfied set {} does not mark exactly the active run ends",
                    self.satisfied
                ));
            }
        }
        if let Some(first) = self.active.first() {
            if first < self.t0 {
                return Err(format!("active set {} precedes t0={}", self.active, self.t0));
            }
        }
        Ok(())
    }
}

/// Quad for a suffix that conclusively fails the node.
fn violated_total(t0: Time, tf: Time) -> TimesetQuad {
    TimesetQuad {
        t0,
        active: TimeSet::empty(),
        satisfied: TimeSet::empty(),
        inactive: TimeSet::empty(),
        violated: TimeSet::range(t0, tf),
    }
}

/// Quad for a node whose verdict was settled before the suffix even
/// started (a vacuous implication): inactive everywhere.
fn inactive_total(t0: Time, tf: Time) -> TimesetQuad {
    TimesetQuad {
        t0,
        active: TimeSet::empty(),
        satisfied: TimeSet::empty(),
        inactive: TimeSet::range(t0, tf),
        violated: TimeSet::empty(),
    }
}

/// Quad for a node that stays active from `t0` until its verdict lands,
/// conclusively true, at `w`, and is settled afterwards. Every satisfied
/// module shape is an instance: `w = t0` for instantaneous operators,
/// `w = tf` when the node stays active through the end.
fn satisfied_at(t0: Time, w: Time, tf: Time) -> TimesetQuad {
    TimesetQuad {
        t0,
        active: TimeSet::range(t0, w),
        satisfied: TimeSet::point(w),
        inactive: TimeSet::range(w + 1, tf),
        violated: TimeSet::empty(),
    }
}

/// One child's quads across all suffix starts.
#[derive(Clone, Copy)]
struct Row<'a> {
    quads: &'a [TimesetQuad],
    start: Time,
}

impl<'a> Row<'a> {
    fn at(&self, t: Time) -> &'a TimesetQuad {
        &self.quads[(t - self.start) as usize]
    }

    fn violated_at(&self, t: Time) -> bool {
        self.at(t).is_violated()
    }
}

// ---------------------------------------------------------------------------
// Per-operator status modules.
//
// Each module maps child quads to this node's quad at suffix start t0 and
// reports how many loop iterations it spent (loopless modules cost one).
// Modules only read child violated flags: "child violated at w" means the
// suffix starting at w conclusively fails the child, which is exactly the
// information the truth definition needs at that point.
// ---------------------------------------------------------------------------

/// An atom is decided by its own step: satisfied on the spot or violated.
fn atom_module(trace: &Trace, label: &str, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let quad = if trace.holds(t0, label) {
        satisfied_at(t0, t0, tf)
    } else {
        violated_total(t0, tf)
    };
    (quad, 1)
}

/// Negation flips the child's verdict at t0.
fn not_module(child: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let quad = if child.violated_at(t0) {
        satisfied_at(t0, t0, tf)
    } else {
        violated_total(t0, tf)
    };
    (quad, 1)
}

/// Conjunction is violated as soon as either side is.
fn and_module(left: Row<'_>, right: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let quad = if left.violated_at(t0) || right.violated_at(t0) {
        violated_total(t0, tf)
    } else {
        satisfied_at(t0, t0, tf)
    };
    (quad, 1)
}

/// Disjunction survives unless both sides fail.
fn or_module(left: Row<'_>, right: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let quad = if left.violated_at(t0) && right.violated_at(t0) {
        violated_total(t0, tf)
    } else {
        satisfied_at(t0, t0, tf)
    };
    (quad, 1)
}

/// An implication with a failed antecedent never activates at all; with a
/// live antecedent it stands or falls with the consequent.
fn implies_module(left: Row<'_>, right: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let quad = if left.violated_at(t0) {
        inactive_total(t0, tf)
    } else if right.violated_at(t0) {
        violated_total(t0, tf)
    } else {
        satisfied_at(t0, t0, tf)
    };
    (quad, 1)
}

/// Next defers to the child one step later; at the final step there is no
/// later, so it is violated outright.
fn next_module(child: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let quad = if t0 < tf && !child.violated_at(t0 + 1) {
        satisfied_at(t0, t0 + 1, tf)
    } else {
        violated_total(t0, tf)
    };
    (quad, 1)
}

/// Eventually scans forward for the first suffix where the child holds.
fn eventually_module(child: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let mut w = t0;
    loop {
        if !child.violated_at(w) {
            return (satisfied_at(t0, w, tf), (w - t0 + 1) as u64);
        }
        if w == tf {
            return (violated_total(t0, tf), (w - t0 + 1) as u64);
        }
        w += 1;
    }
}

/// Globally scans forward for the first failure; surviving to the end
/// leaves the node active throughout and satisfied at the last step.
fn globally_module(child: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let mut w = t0;
    loop {
        if child.violated_at(w) {
            return (violated_total(t0, tf), (w - t0 + 1) as u64);
        }
        if w == tf {
            return (satisfied_at(t0, tf, tf), (w - t0 + 1) as u64);
        }
        w += 1;
    }
}

/// Until advances while the left side keeps the obligation alive, looking
/// for a suffix where the right side holds.
fn until_module(left: Row<'_>, right: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let mut w = t0;
    loop {
        let iterations = (w - t0 + 1) as u64;
        if !right.violated_at(w) {
            return (satisfied_at(t0, w, tf), iterations);
        }
        if left.violated_at(w) || w == tf {
            return (violated_total(t0, tf), iterations);
        }
        w += 1;
    }
}

/// Weak until runs the same scan as until but forgives the right side
/// never arriving, as long as the left side holds through the end.
fn weak_until_module(left: Row<'_>, right: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let mut w = t0;
    loop {
        let iterations = (w - t0 + 1) as u64;
        if !right.violated_at(w) {
            return (satisfied_at(t0, w, tf), iterations);
        }
        if left.violated_at(w) {
            return (violated_total(t0, tf), iterations);
        }
        if w == tf {
            return (satisfied_at(t0, tf, tf), iterations);
        }
        w += 1;
    }
}

/// Release advances while the right side holds and the left has not yet
/// released it. The right side failing before a release step is fatal; a
/// release step settles it; the right side holding to the end suffices.
fn release_module(left: Row<'_>, right: Row<'_>, t0: Time, tf: Time) -> (TimesetQuad, u64) {
    let mut w = t0;
    loop {
        let iterations = (w - t0 + 1) as u64;
        if right.violated_at(w) {
            return (violated_total(t0, tf), iterations);
        }
        if !left.violated_at(w) {
            return (satisfied_at(t0, w, tf), iterations);
        }
        if w == tf {
            return (satisfied_at(t0, tf, tf), iterations);
        }
        w += 1;
    }
}

/// Strong release is release without the hold-to-the-end escape: if the
/// left side never joins while the right side holds, the node is violated.
fn strong_release_module(
    left: Row<'_>,
    right: Row<'_>,
    t0: Time,
    tf: Time,
) -> (TimesetQuad, u64) {
    let mut w = t0;
    loop {
        let iterations = (w - t0 + 1) as u64;
        if right.violated_at(w) {
            return (violated_total(t0, tf), iterations);
        }
        if !left.violated_at(w) {
            return (satisfied_at(t0, w, tf), iterations);
        }
        if w == tf {
            return (violated_total(t0, tf), iterations);
        }
        w += 1;
    }
}

/// The complete assessment of one formula against one trace: a quad for
/// every (node, suffix start) pair, plus the work counters.
#[derive(Debug, Clone)]
pub struct StatusTable {
    tree: FormulaTree,
    trace: Trace,
    /// Indexed `[node id][t0 - start_time]`.
    quads: Vec<Vec<TimesetQuad>>,
    op_count: u64,
    ap_count: u64,
}

/// Assess `tree` against `trace`: compute the quad of every node at every
/// suffix start, children before parents.
pub fn assess(tree: &FormulaTree, trace: &Trace) -> StatusTable {
    let start = trace.start_time();
    let tf = trace.end_time();
    let steps = trace.len();
    let mut op_count: u64 = 0;
    let mut ap_count: u64 = 0;
    let mut quads: Vec<Vec<TimesetQuad>> = Vec::with_capacity(tree.node_count());
    let mut leaf_cache: BTreeMap<String, Vec<TimesetQuad>> = BTreeMap::new();

    for id in tree.post_order() {
        let node = tree.node(id);
        let row: Vec<TimesetQuad> = match node.kind() {
            OperatorKind::Atom => {
                let label = node.label().unwrap();
                leaf_cache
                    .entry(label.to_string())
                    .or_insert_with(|| {
                        (start..=tf)
                            .map(|t0| {
                                let (quad, iterations) = atom_module(trace, label, t0, tf);
                                op_count += iterations;
                                ap_count += 1;
                                quad
                            })
                            .collect()
                    })
                    .clone()
            }
            kind => {
                let child_row = |i: usize| Row {
                    quads: &quads[node.children()[i]],
                    start,
                };
                let mut row = Vec::with_capacity(steps);
                for t0 in start..=tf {
                    let (quad, iterations) = match kind {
                        OperatorKind::Atom => unreachable!(),
                        OperatorKind::Not => not_module(child_row(0), t0, tf),
                        OperatorKind::And => and_module(child_row(0), child_row(1), t0, tf),
                        OperatorKind::Or => or_module(child_row(0), child_row(1), t0, tf),
                        OperatorKind::Implies => {
                            implies_module(child_row(0), child_row(1), t0, tf)
                        }
                        OperatorKind::Next => next_module(child_row(0), t0, tf),
                        OperatorKind::Eventually => eventually_module(child_row(0), t0, tf),
                        OperatorKind::Globally => globally_module(child_row(0), t0, tf),
                        OperatorKind::Until => until_module(child_row(0), child_row(1), t0, tf),
                        OperatorKind::WeakUntil => {
                            weak_until_module(child_row(0), child_row(1), t0, tf)
                        }
                        OperatorKind::Release => {
                            release_module(child_row(0), child_row(1), t0, tf)
                        }
                        OperatorKind::StrongRelease => {
                            strong_release_module(child_row(0), child_row(1), t0, tf)
                        }
                    };
                    op_count += iterations;
                    row.push(quad);
                }
                row
            }
        };
        if cfg!(debug_assertions) {
            for quad in &row {
                if let Err(problem) = quad.check_invariants(tf) {
                    panic!(
                        "node {} at t0={}: {problem}",
                        tree.render(id),
                        quad.t0
                    );
                }
            }
        }
        quads.push(row);
    }

    StatusTable {
        tree: tree.clone(),
        trace: trace.clone(),
        quads,
        op_count,
        ap_count,
    }
}

impl StatusTable {
    pub fn tree(&self) -> &FormulaTree {
        &self.tree
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Quad of a node (by arena id) at suffix start `t0`, or `None` when
    /// `t0` falls outside the trace.
    pub fn quad_by_id(&self, node: NodeId, t0: Time) -> Option<&TimesetQuad> {
        if !self.trace.contains_time(t0) {
            return None;
        }
        self.quads
            .get(node)
            .map(|row| &row[(t0 - self.trace.start_time()) as usize])
    }

    /// Quad of the node at `address`, or `None` if the address does not
    /// resolve or `t0` falls outside the trace.
    pub fn quad(&self, address: &NodeAddress, t0: Time) -> Option<&TimesetQuad> {
        let node = self.tree.resolve(address)?;
        self.quad_by_id(node, t0)
    }

    /// Root quad at suffix start `t0`.
    pub fn root_quad(&self, t0: Time) -> Option<&TimesetQuad> {
        self.quad_by_id(self.tree.root(), t0)
    }

    /// Total module loop iterations spent by non-atom modules plus one per
    /// memoized atom evaluation.
    pub fn op_count(&self) -> u64 {
        self.op_count
    }

    /// Atom-module evaluations: distinct labels times trace length.
    pub fn ap_count(&self) -> u64 {
        self.ap_count
    }
}
