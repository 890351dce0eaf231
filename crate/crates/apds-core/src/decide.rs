//! Multi-automaton membership and the end-to-end decision pipeline.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::atom::{Atom, Polarity};
use crate::complement::{negate_automaton, NegationSystem};
use crate::normalize::{erase_proof, to_small_step, ErasureMap};
use crate::proof::{replay, ProofTree};
use crate::rule::Rule;
use crate::saturate::{extract_multi_automaton, saturate};
use crate::sym::{StackSym, StateSym};
use crate::system::{Mode, System, SystemClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MemberError {
    #[error("configuration {0} must be closed")]
    OpenAtom(Atom),
    #[error("state `{0}` is not declared")]
    UnknownState(String),
    #[error("stack symbol `{0}` is not declared")]
    UnknownStackSym(String),
    #[error("membership needs a multi-automaton, got a {0} system")]
    NotAutomaton(SystemClass),
    #[error("membership over a multi-automaton expects a positive configuration, got {0}")]
    WrongPolarity(Atom),
}

pub(crate) fn validate_configuration(s: &System, atom: &Atom) -> Result<(), MemberError> {
    if atom.is_open() {
        return Err(MemberError::OpenAtom(atom.clone()));
    }
    if !s.has_state(&atom.state) {
        return Err(MemberError::UnknownState(atom.state.to_string()));
    }
    for sym in atom.word().syms() {
        if !s.has_stack_sym(sym) {
            return Err(MemberError::UnknownStackSym(sym.to_string()));
        }
    }
    Ok(())
}

/// Intro-shaped rules of one polarity, indexed by (conclusion state,
/// pushed symbol); eps-intros under `None`. Buckets keep canonical id
/// order, so "first applicable rule" means "lexicographically smallest id".
pub(crate) struct Automaton<'a> {
    polarity: Polarity,
    idx: HashMap<(StateSym, Option<StackSym>), Vec<&'a Rule>>,
}

impl<'a> Automaton<'a> {
    pub fn new(s: &'a System, polarity: Polarity) -> Self {
        let mut idx: HashMap<(StateSym, Option<StackSym>), Vec<&Rule>> = HashMap::new();
        for r in s.rules() {
            if r.polarity() != polarity || !r.kind().is_intro_like() {
                continue;
            }
            let key = (r.conclusion().state.clone(), r.intro_symbol().cloned());
            idx.entry(key).or_default().push(r);
        }
        Automaton { polarity, idx }
    }

    pub(crate) fn rules_at(&self, state: &StateSym, sym: Option<&StackSym>) -> &[&'a Rule] {
        self.idx
            .get(&(state.clone(), sym.cloned()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Bottom-up membership; every rule strictly shortens the word upward,
    /// so recursion on (state, position) with memoization terminates in
    /// O(|word| · |rules| · max premises).
    pub fn member(&self, atom: &Atom) -> bool {
        debug_assert!(atom.is_closed() && atom.polarity == self.polarity);
        let mut memo = HashMap::new();
        self.prove(&atom.state, atom, 0, &mut memo)
    }

    fn prove(
        &self,
        state: &StateSym,
        atom: &Atom,
        pos: usize,
        memo: &mut HashMap<(StateSym, usize), bool>,
    ) -> bool {
        if let Some(&known) = memo.get(&(state.clone(), pos)) {
            return known;
        }
        let result = match atom.word().syms().get(pos) {
            // eps rules are premise-free, so existence decides
            None => !self.rules_at(state, None).is_empty(),
            Some(sym) => self.rules_at(state, Some(sym)).iter().any(|r| {
                r.premises()
                    .iter()
                    .all(|p| self.prove(&p.state, atom, pos + 1, memo))
            }),
        };
        memo.insert((state.clone(), pos), result);
        result
    }

    /// The cut-free proof picking the smallest applicable rule id at every
    /// node, or `None` if the configuration is not a member.
    pub fn proof(&self, atom: &Atom) -> Option<ProofTree> {
        debug_assert!(atom.is_closed() && atom.polarity == self.polarity);
        let mut memo = HashMap::new();
        self.build(&atom.state, atom, 0, &mut memo)
    }

    fn build(
        &self,
        state: &StateSym,
        atom: &Atom,
        pos: usize,
        memo: &mut HashMap<(StateSym, usize), Option<ProofTree>>,
    ) -> Option<ProofTree> {
        if let Some(known) = memo.get(&(state.clone(), pos)) {
            return known.clone();
        }
        let label =
            Atom::closed(state.clone(), atom.word().suffix(pos)).with_polarity(self.polarity);
        let mut result = None;
        let sym = atom.word().syms().get(pos);
        for r in self.rules_at(state, sym) {
            let children: Option<Vec<ProofTree>> = r
                .premises()
                .iter()
                .map(|p| self.build(&p.state, atom, pos + 1, memo))
                .collect();
            if let Some(children) = children {
                result = Some(ProofTree::node(label.clone(), r.id(), children));
                break;
            }
        }
        memo.insert((state.clone(), pos), result.clone());
        result
    }
}

/// Membership of a closed positive configuration in a multi-automaton.
pub fn member(m: &System, atom: &Atom) -> Result<bool, MemberError> {
    if m.class() != SystemClass::MultiAutomaton {
        return Err(MemberError::NotAutomaton(m.class()));
    }
    if atom.polarity != Polarity::Positive {
        return Err(MemberError::WrongPolarity(atom.clone()));
    }
    validate_configuration(m, atom)?;
    Ok(Automaton::new(m, Polarity::Positive).member(atom))
}

/// A proof using only intro and eps-intro rules, if the configuration is a
/// member. Deterministic: ties go to the smallest rule id.
pub fn extract_cut_free_proof(m: &System, atom: &Atom) -> Result<Option<ProofTree>, MemberError> {
    if m.class() != SystemClass::MultiAutomaton {
        return Err(MemberError::NotAutomaton(m.class()));
    }
    if atom.polarity != Polarity::Positive {
        return Err(MemberError::WrongPolarity(atom.clone()));
    }
    validate_configuration(m, atom)?;
    Ok(Automaton::new(m, Polarity::Positive).proof(atom))
}

/// Outcome of `decide`: exactly one certificate side is populated (the
/// refutation only when requested).
#[derive(Debug, Clone)]
pub struct Verdict {
    pub provable: bool,
    /// Cut-free proof replayed into the original system; present iff provable.
    pub certificate: Option<ProofTree>,
    /// Finite proof of `!A` in the negated automaton; present iff not
    /// provable and requested.
    pub refutation: Option<ProofTree>,
}

#[derive(Debug, Error)]
pub enum DecideError {
    #[error(transparent)]
    Member(#[from] MemberError),
    #[error("decide expects a strict system (relaxed systems are transform outputs)")]
    RelaxedInput,
    #[error("certificate construction failed: {0}")]
    Certificate(String),
}

/// The decision pipeline for one system, with the saturation work shared
/// across queries. Immutable after construction: concurrent `decide` calls
/// behave as if serialized.
pub struct Decider {
    original: System,
    small_step: System,
    erasure: ErasureMap,
    saturated: System,
    automaton: System,
    negation: OnceLock<NegationSystem>,
}

impl Decider {
    pub fn new(s: &System) -> Result<Decider, DecideError> {
        if s.mode() != Mode::Strict {
            return Err(DecideError::RelaxedInput);
        }
        let (small_step, erasure) = to_small_step(s);
        let saturated = saturate(&small_step);
        let automaton = extract_multi_automaton(&saturated);
        Ok(Decider {
            original: s.clone(),
            small_step,
            erasure,
            saturated,
            automaton,
            negation: OnceLock::new(),
        })
    }

    pub fn original(&self) -> &System {
        &self.original
    }

    pub fn small_step(&self) -> &System {
        &self.small_step
    }

    pub fn erasure(&self) -> &ErasureMap {
        &self.erasure
    }

    pub fn saturated(&self) -> &System {
        &self.saturated
    }

    pub fn automaton(&self) -> &System {
        &self.automaton
    }

    /// The negated automaton, built on first use.
    pub fn negation(&self) -> &NegationSystem {
        self.negation.get_or_init(|| negate_automaton(&self.automaton))
    }

    pub fn member(&self, atom: &Atom) -> Result<bool, MemberError> {
        if atom.polarity != Polarity::Positive {
            return Err(MemberError::WrongPolarity(atom.clone()));
        }
        validate_configuration(&self.original, atom)?;
        Ok(Automaton::new(&self.automaton, Polarity::Positive).member(atom))
    }

    /// The cut-free proof over the saturated system (not replayed).
    pub fn cut_free_proof(&self, atom: &Atom) -> Result<Option<ProofTree>, DecideError> {
        if atom.polarity != Polarity::Positive {
            return Err(DecideError::Member(MemberError::WrongPolarity(atom.clone())));
        }
        validate_configuration(&self.original, atom)?;
        Ok(Automaton::new(&self.automaton, Polarity::Positive).proof(atom))
    }

    pub fn decide(&self, atom: &Atom, want_refutation: bool) -> Result<Verdict, DecideError> {
        match self.cut_free_proof(atom)? {
            Some(cut_free) => {
                let over_small_step = replay(&self.saturated, &cut_free)
                    .map_err(|e| DecideError::Certificate(e.to_string()))?;
                let certificate = erase_proof(&over_small_step, &self.erasure)
                    .map_err(|e| DecideError::Certificate(e.to_string()))?;
                Ok(Verdict { provable: true, certificate: Some(certificate), refutation: None })
            }
            None => {
                let refutation = if want_refutation {
                    let neg = self.negation();
                    let proof = neg
                        .negative_proof(&atom.negated())
                        .map_err(DecideError::Member)?
                        .ok_or_else(|| {
                            DecideError::Certificate(format!(
                                "complementation is not total: no proof of {}",
                                atom.negated()
                            ))
                        })?;
                    Some(proof)
                } else {
                    None
                };
                Ok(Verdict { provable: false, certificate: None, refutation })
            }
        }
    }
}

/// One-shot decision; `Decider` amortizes saturation across queries.
pub fn decide(s: &System, atom: &Atom, want_refutation: bool) -> Result<Verdict, DecideError> {
    Decider::new(s)?.decide(atom, want_refutation)
}


#[cfg(test)]
mod concurrency {
    use super::*;

    // the contract: concurrent decide calls behave as if serialized
    #[test]
    fn decider_is_shareable_across_threads() {
        fn assert_sync<T: Sync + Send>() {}
        assert_sync::<Decider>();

        let decider = std::sync::Arc::new(Decider::new(&crate::fixtures::e1()).unwrap());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let d = decider.clone();
                std::thread::spawn(move || {
                    d.decide(&crate::fixtures::atom("S(a b)"), false).unwrap().provable
                })
            })
            .collect();
        for h in handles {
            assert!(h.join().unwrap());
        }
    }
}
