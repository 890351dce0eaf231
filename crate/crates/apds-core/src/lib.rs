//! Provability in alternating pushdown systems, decided by saturation, with
//! checkable certificates on both sides of the verdict.
//!
//! A system is a finite set of inference rules over configurations `P(w)`
//! (a state applied to a stack word). The decision pipeline transforms an
//! arbitrary system into a small-step one ([`normalize`]), closes it under
//! derivable rules ([`saturate`]), and drops everything but introduction
//! rules to obtain a multi-automaton on which bottom-up search terminates
//! ([`decide`]). Provable configurations get a cut-free proof replayed into
//! the original system; unprovable ones get a finite refutation in the
//! negated automaton ([`complement`]) and a depth-bounded prefix of the
//! co-inductive counterexample proof ([`certify`]).
//!
//! [`oracle`] holds deliberately naive provers used as test oracles.

pub mod atom;
pub mod certify;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod cli;
pub mod complement;
pub mod decide;
pub mod normalize;
pub mod oracle;
pub mod parse;
pub mod proof;
pub mod rule;
pub mod saturate;
pub mod sym;
pub mod system;

pub use atom::{Atom, Binding, Polarity, Word};
pub use parse::{parse_atom, parse_system, ParseError};
pub use proof::{check_proof, eliminate_cuts, find_cut, measure, replay, Measure, ProofTree};
pub use rule::{Provenance, Rule, RuleKind};
pub use saturate::{extract_multi_automaton, saturate};
pub use sym::{StackSym, StateSym};
pub use system::{serialize_system, Mode, System, SystemClass};
