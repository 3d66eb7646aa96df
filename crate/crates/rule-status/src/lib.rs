//! Status assessment for LTL rules over finite traces.
//!
//! Given a rule written in linear temporal logic and a finite trace, this
//! crate computes, for every subformula and every suffix start `t0`, the
//! partition of `{t0, ..., Tf}` into four time sets: when the rule is
//! *active* (its outcome still depends on steps up to `t`), *satisfied*
//! (active and conclusively true at `t`), *inactive* (its truth was already
//! settled earlier), and *violated* (conclusively false, which poisons the
//! whole suffix). On top of those tables sit point queries ("what is rule
//! 3's consequent doing at time 5 when read from t0=2?"), change-point
//! extraction (the times where a rule newly becomes active or violated),
//! and a scan that asks every always-rule about its body at one instant.
//!
//! The crate splits into:
//!
//! - [`formula`]: rule syntax, parsing, printing, and node addresses,
//! - [`trace`]: traces, Kripke structures with runs, and step listings,
//! - [`semantics`]: the direct recursive truth definition, used as the
//!   reference the status engine is checked against,
//! - [`status`]: time sets, status quads, and the assessment engine,
//! - [`query`]: point status, change points, scans, and report sentences,
//! - [`cli`]: the `rsa` command-line front end.

pub mod cli;
pub mod formula;
pub mod query;
pub mod semantics;
pub mod status;
pub mod trace;

pub use formula::{FormulaTree, NodeAddress, OperatorKind, ParseError};
pub use status::{assess, StatusTable, TimeSet, TimesetQuad};
pub use trace::{Kripke, LabelSet, Time, Trace};
