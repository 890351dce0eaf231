//! Shared test fixtures: the worked examples used across module tests.

use crate::atom::Atom;
use crate::parse::{parse_atom, parse_system};
use crate::proof::ProofTree;
use crate::system::System;

pub const E1_TEXT: &str = include_str!("../tests/fixtures/e1.apds");
pub const E1S_TEXT: &str = include_str!("../tests/fixtures/e1s.apds");
pub const RSYS_TEXT: &str = include_str!("../tests/fixtures/rsys.apds");
pub const E1_PROOF_SAB: &str = include_str!("../tests/fixtures/e1_proof_sab.json");

/// The seven-rule running example (i1–i4, n1, n2, e1).
pub fn e1() -> System {
    parse_system(E1_TEXT).expect("e1 fixture parses")
}

/// Its saturation with the original rule names (n3, i5–i11 added).
pub fn e1s() -> System {
    parse_system(E1S_TEXT).expect("e1s fixture parses")
}

/// The four-rule system complemented in the worked example.
pub fn rsys() -> System {
    parse_system(RSYS_TEXT).expect("rsys fixture parses")
}

/// The displayed proof of S(a b) in e1.
pub fn e1_proof_sab() -> ProofTree {
    ProofTree::from_json(E1_PROOF_SAB).expect("proof fixture parses")
}

pub fn atom(text: &str) -> Atom {
    parse_atom(text).expect("test atom parses")
}
