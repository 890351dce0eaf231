//! Conversion of arbitrary systems into equivalent small-step ones, and
//! erasure of proofs back to the original system.
//!
//! A rule that is neither intro, elim, nor neutral mentions atoms
//! `P(γ1..γn x)` with long prefixes. Each such atom is replaced by a fresh
//! state `P#γ1.….γn` applied to `x`, together with the intro/elim chains
//! that convert between `P(γ1..γn w)` and `P#γ1.….γn(w)` in both
//! directions. The extension is conservative: erasing `P#v(w)` to `P(v·w)`
//! turns any proof over the result into a proof over the original system.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::atom::{Atom, Word};
use crate::proof::ProofTree;
use crate::rule::{NormStep, Provenance, Rule};
use crate::sym::StateSym;
use crate::system::{Mode, System, SystemClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ResidualInfo {
    pub original_id: String,
    pub premises: Vec<Atom>,
    pub conclusion: Atom,
}

/// Maps fresh states back to (original state, split prefix) and records
/// which rules of the normalized system are chains or residues.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErasureMap {
    fresh: BTreeMap<StateSym, (StateSym, Word)>,
    chain_rules: HashSet<String>,
    residuals: BTreeMap<String, ResidualInfo>,
}

impl ErasureMap {
    pub fn identity() -> Self {
        ErasureMap::default()
    }

    pub fn is_identity(&self) -> bool {
        self.fresh.is_empty()
    }

    /// `P#v(u…) ↦ P(v·u…)`; identity on original states.
    pub fn erase_atom(&self, a: &Atom) -> Atom {
        match self.fresh.get(&a.state) {
            None => a.clone(),
            Some((orig, split)) => {
                let word = split.concat(a.prefix());
                let erased = if a.is_open() {
                    Atom::open(orig.clone(), word)
                } else {
                    Atom::closed(orig.clone(), word)
                };
                erased.with_polarity(a.polarity)
            }
        }
    }

    pub fn fresh_states(&self) -> impl Iterator<Item = (&StateSym, &StateSym, &Word)> {
        self.fresh.iter().map(|(f, (o, w))| (f, o, w))
    }

    /// Side-file listing, one `P#a.b = P(a b)` line per fresh state.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (fresh, (orig, word)) in &self.fresh {
            writeln!(out, "{fresh} = {orig}({word})").unwrap();
        }
        out
    }
}

struct Splitter {
    map: ErasureMap,
    fresh_for: BTreeMap<(StateSym, Word), StateSym>,
    new_states: Vec<StateSym>,
    taken_states: HashSet<StateSym>,
    chain_rules: Vec<Rule>,
    taken_ids: HashSet<String>,
}

impl Splitter {
    fn new(original: &System) -> Self {
        Splitter {
            map: ErasureMap::identity(),
            fresh_for: BTreeMap::new(),
            new_states: Vec::new(),
            taken_states: original.states().iter().cloned().collect(),
            chain_rules: Vec::new(),
            taken_ids: original.rules().iter().map(|r| r.id().to_string()).collect(),
        }
    }

    fn free_id(&mut self, base: String) -> String {
        let mut id = base;
        while !self.taken_ids.insert(id.clone()) {
            id.push('_');
        }
        id
    }

    /// The fresh state standing for `state` with `prefix` consumed, creating
    /// it and the whole intro/elim chain below it on first use. Fresh states
    /// are shared globally by (state, prefix).
    fn fresh_state(&mut self, state: &StateSym, prefix: &Word) -> StateSym {
        debug_assert!(!prefix.is_empty());
        for depth in 1..=prefix.len() {
            let level = prefix.prefix(depth);
            if self.fresh_for.contains_key(&(state.clone(), level.clone())) {
                continue;
            }
            let mut name = format!("{state}#");
            for (i, sym) in level.syms().iter().enumerate() {
                if i > 0 {
                    name.push('.');
                }
                name.push_str(sym.as_str());
            }
            let mut fresh = StateSym::new(&name);
            while !self.taken_states.insert(fresh.clone()) {
                name.push('_');
                fresh = StateSym::new(&name);
            }
            self.new_states.push(fresh.clone());
            self.map.fresh.insert(fresh.clone(), (state.clone(), level.clone()));
            self.fresh_for.insert((state.clone(), level.clone()), fresh.clone());

            // the one-symbol step between this level and the one below
            let below = if depth == 1 {
                Atom::open(state.clone(), Word::new([level.syms()[depth - 1].clone()]))
            } else {
                let parent = self.fresh_for[&(state.clone(), level.prefix(depth - 1))].clone();
                Atom::open(parent, Word::new([level.syms()[depth - 1].clone()]))
            };
            let here = Atom::open(fresh.clone(), Word::empty());
            let intro_id = self.free_id(format!("i:{fresh}"));
            let elim_id = self.free_id(format!("e:{fresh}"));
            self.map.chain_rules.insert(intro_id.clone());
            self.map.chain_rules.insert(elim_id.clone());
            self.chain_rules.push(
                Rule::new(
                    intro_id,
                    vec![here.clone()],
                    below.clone(),
                    Provenance::Normalization(NormStep::ChainIntro { fresh: fresh.clone() }),
                )
                .expect("chain intro is well-formed"),
            );
            self.chain_rules.push(
                Rule::new(
                    elim_id,
                    vec![below],
                    here,
                    Provenance::Normalization(NormStep::ChainElim { fresh: fresh.clone() }),
                )
                .expect("chain elim is well-formed"),
            );
        }
        self.fresh_for[&(state.clone(), prefix.clone())].clone()
    }

    fn split_atom(&mut self, a: &Atom) -> Atom {
        if a.prefix().is_empty() {
            return a.clone();
        }
        let fresh = self.fresh_state(&a.state, a.prefix());
        Atom::open(fresh, Word::empty()).with_polarity(a.polarity)
    }
}

/// Produces a small-step conservative extension of `s` and the map erasing
/// its fresh states. Already-small-step systems are returned unchanged with
/// the identity map.
///
/// Premises with nonempty prefixes are always split; a conclusion `Q(γ x)`
/// is kept (the residue is then an intro rule), longer conclusions are
/// split (neutral residue).
pub fn to_small_step(s: &System) -> (System, ErasureMap) {
    debug_assert_eq!(s.mode(), Mode::Strict, "to_small_step expects a strict system");
    if s.class() != SystemClass::General {
        return (s.clone(), ErasureMap::identity());
    }

    let mut splitter = Splitter::new(s);
    let mut rules: Vec<Rule> = Vec::new();
    for r in s.rules() {
        if r.kind().is_small_step() {
            rules.push(r.clone());
            continue;
        }
        let premises: Vec<Atom> = r.premises().iter().map(|p| splitter.split_atom(p)).collect();
        let conclusion = if r.conclusion().prefix().len() <= 1 {
            r.conclusion().clone()
        } else {
            splitter.split_atom(r.conclusion())
        };
        let id = splitter.free_id(format!("n:{}", r.id()));
        splitter.map.residuals.insert(
            id.clone(),
            ResidualInfo {
                original_id: r.id().to_string(),
                premises: r.premises().to_vec(),
                conclusion: r.conclusion().clone(),
            },
        );
        rules.push(
            Rule::new(
                id,
                premises,
                conclusion,
                Provenance::Normalization(NormStep::Residual { original: r.id().to_string() }),
            )
            .expect("residual rule is well-formed"),
        );
    }
    rules.append(&mut splitter.chain_rules);

    let mut states = s.states().to_vec();
    states.extend(splitter.new_states.iter().cloned());
    let system = System::new(s.name(), states, s.stack().to_vec(), rules, Mode::Strict)
        .expect("normalization preserves well-formedness");
    debug_assert!(system.rules().iter().all(|r| r.kind().is_small_step()));
    (system, splitter.map)
}

#[derive(Debug, Error)]
pub enum EraseError {
    #[error("proof root mentions the fresh state `{0}`, which has no original counterpart")]
    FreshRoot(StateSym),
    #[error("chain rule `{0}` applied to {1} children, expected 1")]
    MalformedChain(String, usize),
    #[error("residual rule `{rule}`: erased label {label} does not match the original conclusion")]
    ResidualMismatch { rule: String, label: Atom },
    #[error("residual rule `{rule}`: no child proves {expected}")]
    MissingChild { rule: String, expected: Atom },
}

/// Maps a proof over the normalized system back to the original one:
/// labels are erased, chain steps are contracted, and residual rules become
/// instances of the general rules they replaced. The root label (which must
/// mention only original states) is unchanged.
pub fn erase_proof(p: &ProofTree, m: &ErasureMap) -> Result<ProofTree, EraseError> {
    if let Some((fresh, _)) = m.fresh.get_key_value(&p.label().state) {
        return Err(EraseError::FreshRoot(fresh.clone()));
    }
    walk(p, m)
}

fn walk(t: &ProofTree, m: &ErasureMap) -> Result<ProofTree, EraseError> {
    match t {
        ProofTree::Hypothesis { label } => Ok(ProofTree::hypothesis(m.erase_atom(label))),
        ProofTree::Continuation { label, justification } => Ok(ProofTree::Continuation {
            label: m.erase_atom(label),
            justification: justification.clone(),
        }),
        ProofTree::Node { label, rule, children } => {
            if m.chain_rules.contains(rule) {
                if children.len() != 1 {
                    return Err(EraseError::MalformedChain(rule.clone(), children.len()));
                }
                // after erasure the chain step proves its own premise
                return walk(&children[0], m);
            }
            let erased_children: Vec<ProofTree> =
                children.iter().map(|c| walk(c, m)).collect::<Result<_, _>>()?;
            let erased_label = m.erase_atom(label);
            let Some(info) = m.residuals.get(rule) else {
                return Ok(ProofTree::node(erased_label, rule.clone(), erased_children));
            };
            let binding = info
                .conclusion
                .match_against(&erased_label)
                .ok_or_else(|| EraseError::ResidualMismatch {
                    rule: rule.clone(),
                    label: erased_label.clone(),
                })?;
            let mut used = vec![false; erased_children.len()];
            let mut ordered = Vec::with_capacity(info.premises.len());
            for premise in &info.premises {
                let expected = premise.bind(&binding);
                let idx = erased_children
                    .iter()
                    .enumerate()
                    .position(|(j, c)| !used[j] && c.label() == &expected)
                    .ok_or_else(|| EraseError::MissingChild {
                        rule: rule.clone(),
                        expected: expected.clone(),
                    })?;
                used[idx] = true;
                ordered.push(erased_children[idx].clone());
            }
            Ok(ProofTree::node(erased_label, info.original_id.clone(), ordered))
        }
    }
}
