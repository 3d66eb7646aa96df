//! The reference truth definition: does a formula hold on the suffix of a
//! finite trace beginning at step t?
//!
//! [`evaluate`] is a direct transliteration of the recursive satisfaction
//! relation, quantifiers and all, with no sharing or memoization. It is
//! deliberately naive: the status engine in [`crate::status`] must agree
//! with it everywhere ("violated at t0" exactly when the suffix does not
//! satisfy the formula), and an independent, easily-audited evaluator is
//! what makes that check meaningful. Keep it boring.
//!
//! Finite-trace readings pinned down here:
//!
//! - `X φ` at the final step is false: there is no next step to satisfy φ.
//! - `F`/`G`/`U` and friends quantify over `t ..= Tf` only.
//! - `φ1 W φ2` is `φ1 U φ2`, or `G φ1` if φ2 never arrives.
//! - `φ1 R φ2` requires φ2 at every step not strictly preceded by a φ1
//!   step, so φ2 must still hold at the step where φ1 first holds.
//! - `φ1 M φ2` is `R` with the release step required to exist: some step
//!   satisfies both, and φ2 holds at every step before it.

use crate::formula::{FormulaTree, NodeId, OperatorKind};
use crate::trace::{Time, Trace};

/// True if the suffix of `trace` starting at `t` satisfies the subformula
/// rooted at `node`.
///
/// `t` must lie within the trace.
pub fn evaluate(trace: &Trace, tree: &FormulaTree, node: NodeId, t: Time) -> bool {
    debug_assert!(trace.contains_time(t), "evaluate at t={t} outside the trace");
    let n = tree.node(node);
    let child = |i: usize| n.children()[i];
    let tf = trace.end_time();
    match n.kind() {
        OperatorKind::Atom => trace.holds(t, n.label().unwrap()),
        OperatorKind::Not => !evaluate(trace, tree, child(0), t),
        OperatorKind::And => {
            evaluate(trace, tree, child(0), t) && evaluate(trace, tree, child(1), t)
        }
        OperatorKind::Or => {
            evaluate(trace, tree, child(0), t) || evaluate(trace, tree, child(1), t)
        }
        OperatorKind::Implies => {
            !evaluate(trace, tree, child(0), t) || evaluate(trace, tree, child(1), t)
        }
        OperatorKind::Next => t < tf && evaluate(trace, tree, child(0), t + 1),
        OperatorKind::Eventually => (t..=tf).any(|i| evaluate(trace, tree, child(0), i)),
        OperatorKind::Globally => (t..=tf).all(|i| evaluate(trace, tree, child(0), i)),
        OperatorKind::Until => (t..=tf).any(|i| {
            evaluate(trace, tree, child(1), i)
                && (t..i).all(|k| evaluate(trace, tree, child(0), k))
        }),
        OperatorKind::WeakUntil => {
            (t..=tf).any(|i| {
                evaluate(trace, tree, child(1), i)
                    && (t..i).all(|k| evaluate(trace, tree, child(0), k))
            }) || (t..=tf).all(|i| evaluate(trace, tree, child(0), i))
        }
        OperatorKind::Release => (t..=tf).all(|i| {
            evaluate(trace, tree, child(1), i)
                || (t..i).any(|k| evaluate(trace, tree, child(0), k))
        }),
        OperatorKind::StrongRelease => (t..=tf).any(|i| {
            evaluate(trace, tree, child(0), i)
                && evaluate(trace, tree, child(1), i)
                && (t..i).all(|k| evaluate(trace, tree, child(1), k))
        }),
    }
}

/// True if the whole trace (from its first step) satisfies the formula.
pub fn satisfies(trace: &Trace, tree: &FormulaTree) -> bool {
    evaluate(trace, tree, tree.root(), trace.start_time())
}
