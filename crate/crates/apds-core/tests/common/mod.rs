//! Shared fixtures and generators for the integration suites.

#![allow(dead_code)]

use apds_core::atom::{Atom, Word};
use apds_core::parse::{parse_atom, parse_system};
use apds_core::proof::ProofTree;
use apds_core::rule::{Provenance, Rule};
use apds_core::sym::{StackSym, StateSym};
use apds_core::system::{Mode, System};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const E1_TEXT: &str = include_str!("../fixtures/e1.apds");
pub const E1S_TEXT: &str = include_str!("../fixtures/e1s.apds");
pub const RSYS_TEXT: &str = include_str!("../fixtures/rsys.apds");
pub const E1_PROOF_SAB: &str = include_str!("../fixtures/e1_proof_sab.json");

pub fn e1() -> System {
    parse_system(E1_TEXT).unwrap()
}

pub fn e1s() -> System {
    parse_system(E1S_TEXT).unwrap()
}

pub fn rsys() -> System {
    parse_system(RSYS_TEXT).unwrap()
}

pub fn e1_proof_sab() -> ProofTree {
    ProofTree::from_json(E1_PROOF_SAB).unwrap()
}

pub fn atom(text: &str) -> Atom {
    parse_atom(text).unwrap()
}

/// All words over `syms` of length ≤ `max`, shortest first.
pub fn all_words(syms: &[StackSym], max: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for s in syms {
                let grown: Word = w.syms().iter().cloned().chain([s.clone()]).collect();
                out.push(grown.clone());
                next.push(grown);
            }
        }
        frontier = next;
    }
    out
}

/// All positive configurations over the alphabets of `s` with |word| ≤ `max`.
pub fn all_configs(s: &System, max: usize) -> Vec<Atom> {
    let words = all_words(s.stack(), max);
    s.states()
        .iter()
        .flat_map(|state| {
            words
                .iter()
                .map(move |w| Atom::closed(state.clone(), w.clone()))
        })
        .collect()
}

const STATE_POOL: [&str; 4] = ["P", "Q", "R", "S"];
const SYM_POOL: [&str; 2] = ["a", "b"];

struct Scope {
    states: Vec<StateSym>,
    syms: Vec<StackSym>,
}

impl Scope {
    fn random(rng: &mut ChaCha8Rng) -> Scope {
        let ns = rng.random_range(1..=STATE_POOL.len());
        let ng = rng.random_range(1..=SYM_POOL.len());
        Scope {
            states: STATE_POOL[..ns].iter().map(StateSym::new).collect(),
            syms: SYM_POOL[..ng].iter().map(StackSym::new).collect(),
        }
    }

    fn state(&self, rng: &mut ChaCha8Rng) -> StateSym {
        self.states[rng.random_range(0..self.states.len())].clone()
    }

    fn sym(&self, rng: &mut ChaCha8Rng) -> StackSym {
        self.syms[rng.random_range(0..self.syms.len())].clone()
    }

    fn flat(&self, rng: &mut ChaCha8Rng, max: usize) -> Vec<Atom> {
        (0..rng.random_range(0..=max))
            .map(|_| Atom::open(self.state(rng), Word::empty()))
            .collect()
    }

    fn word(&self, rng: &mut ChaCha8Rng, max_len: usize) -> Word {
        (0..rng.random_range(0..=max_len)).map(|_| self.sym(rng)).collect()
    }
}

fn assemble(name: String, scope: Scope, rules: Vec<Rule>) -> System {
    System::new(name, scope.states, scope.syms, rules, Mode::Strict).unwrap()
}

/// A random small-step system with ≤ 4 states, ≤ 2 stack symbols, and
/// ≤ 6 rules (the acceptance-criteria population shape).
pub fn random_small_step(rng: &mut ChaCha8Rng, idx: usize) -> System {
    let scope = Scope::random(rng);
    let target = rng.random_range(1..=6);
    let mut rules: Vec<Rule> = Vec::new();
    let mut attempts = 0;
    while rules.len() < target && attempts < 60 {
        attempts += 1;
        let (premises, conclusion) = match rng.random_range(0..8u8) {
            0 => (Vec::new(), Atom::closed(scope.state(rng), Word::empty())),
            1..=3 => {
                let c = Atom::open(scope.state(rng), Word::new([scope.sym(rng)]));
                (scope.flat(rng, 2), c)
            }
            4..=5 => {
                let mut premises = vec![Atom::open(scope.state(rng), Word::new([scope.sym(rng)]))];
                premises.extend(scope.flat(rng, 1));
                (premises, Atom::open(scope.state(rng), Word::empty()))
            }
            _ => (scope.flat(rng, 2), Atom::open(scope.state(rng), Word::empty())),
        };
        let rule = Rule::new(
            format!("r{}", rules.len() + 1),
            premises,
            conclusion,
            Provenance::Original,
        )
        .unwrap();
        if rules.iter().any(|r| r.same_judgment(&rule)) {
            continue;
        }
        rules.push(rule);
    }
    assemble(format!("rnd{idx}"), scope, rules)
}

/// Like `random_small_step` but also emits rules with long prefixes, for
/// exercising normalization.
pub fn random_general(rng: &mut ChaCha8Rng, idx: usize) -> System {
    let scope = Scope::random(rng);
    let target = rng.random_range(1..=5);
    let mut rules: Vec<Rule> = Vec::new();
    let mut attempts = 0;
    while rules.len() < target && attempts < 60 {
        attempts += 1;
        let (premises, conclusion) = if rng.random_bool(0.5) {
            // arbitrary-prefix rule
            let premises = (0..rng.random_range(0..=2))
                .map(|_| Atom::open(scope.state(rng), scope.word(rng, 2)))
                .collect();
            (premises, Atom::open(scope.state(rng), scope.word(rng, 2)))
        } else if rng.random_bool(0.3) {
            (Vec::new(), Atom::closed(scope.state(rng), Word::empty()))
        } else {
            (scope.flat(rng, 2), Atom::open(scope.state(rng), Word::new([scope.sym(rng)])))
        };
        let rule = Rule::new(
            format!("r{}", rules.len() + 1),
            premises,
            conclusion,
            Provenance::Original,
        )
        .unwrap();
        if rules.iter().any(|r| r.same_judgment(&rule)) {
            continue;
        }
        rules.push(rule);
    }
    assemble(format!("gen{idx}"), scope, rules)
}
