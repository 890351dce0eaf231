//! Reconstruction of co-inductive counterexample proofs from finite
//! refutations.
//!
//! A finite proof of `!A` in the negated automaton `I'_¬` witnesses that
//! `A` is unprovable, but says nothing about why. The expansion map turns
//! it into the proof in the negation extension `I_¬` of the original
//! small-step system: for every negative rule of `I'_¬` there is a rule of
//! `I_¬` with the same conclusion whose premises are schematically provable
//! in `I'_¬` from the first rule's premises. Unfolding applies this rule
//! by rule; since the `I_¬` proof is in general infinite (its words grow),
//! it is represented by the expansion map plus depth-bounded prefixes whose
//! pending leaves carry their own `I'_¬` justification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::atom::{Atom, Binding, Polarity, Word};
use crate::complement::{build_negation_extension, negate_automaton, tilde, NegationSystem};
use crate::decide::{validate_configuration, Automaton, MemberError};
use crate::normalize::{to_small_step, ErasureMap};
use crate::proof::{graft_skeleton, ProofTree};
use crate::saturate::{cartesian, extract_multi_automaton, saturate};
use crate::sym::StateSym;
use crate::system::{Mode, System};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HittingIndexError {
    #[error("need at least one family")]
    Empty,
    #[error("hypothesis fails: the union over choice {0:?} misses S")]
    HypothesisViolated(Vec<usize>),
}

/// Given families `⟨H^i_1..H^i_{k_i}⟩` such that every union
/// `H^1_{j_1} ∪ … ∪ H^n_{j_n}` meets `S`, returns the least `l` (1-based)
/// whose sets all meet `S`. The hypothesis is checked by enumeration and
/// its violation reported, since no `l` need exist then.
pub fn hitting_index<T: Ord>(
    families: &[Vec<BTreeSet<T>>],
    s: &BTreeSet<T>,
) -> Result<usize, HittingIndexError> {
    if families.is_empty() {
        return Err(HittingIndexError::Empty);
    }
    let hits = |h: &BTreeSet<T>| h.iter().any(|e| s.contains(e));
    let bounds: Vec<usize> = families.iter().map(Vec::len).collect();
    for choice in cartesian(&bounds) {
        let union_hits = choice
            .iter()
            .zip(families)
            .any(|(&j, family)| hits(&family[j]));
        if !union_hits {
            return Err(HittingIndexError::HypothesisViolated(
                choice.iter().map(|j| j + 1).collect(),
            ));
        }
    }
    for (l, family) in families.iter().enumerate() {
        if family.iter().all(&hits) {
            return Ok(l + 1);
        }
    }
    unreachable!("an index exists whenever the enumeration hypothesis holds")
}

/// Backward search for a derivation skeleton of `goal` in the negated
/// automaton from open empty-prefix hypotheses.
///
/// Each rule application strips one symbol off the goal's prefix; the base
/// cases are a hypothesis match (open goals) or an axiom (closed goals).
/// Memoized on (state, remaining prefix).
pub fn schematic_provable(
    neg: &NegationSystem,
    goal: &Atom,
    hyps: &[Atom],
) -> Option<ProofTree> {
    debug_assert_eq!(goal.polarity, Polarity::Negative);
    debug_assert!(hyps.iter().all(|h| h.is_open() && h.prefix().is_empty()));
    let automaton = Automaton::new(neg.system(), Polarity::Negative);
    let mut memo = HashMap::new();
    search_schematic(&automaton, goal, hyps, &mut memo)
}

fn search_schematic(
    automaton: &Automaton<'_>,
    goal: &Atom,
    hyps: &[Atom],
    memo: &mut HashMap<(StateSym, Word, bool), Option<ProofTree>>,
) -> Option<ProofTree> {
    let key = (goal.state.clone(), goal.prefix().clone(), goal.is_open());
    if let Some(known) = memo.get(&key) {
        return known.clone();
    }
    let result = (|| {
        match goal.prefix().first() {
            None => {
                if goal.is_open() {
                    // nothing concludes !P(x); only a hypothesis can
                    hyps.contains(goal).then(|| ProofTree::hypothesis(goal.clone()))
                } else {
                    automaton
                        .rules_at(&goal.state, None)
                        .first()
                        .map(|r| ProofTree::node(goal.clone(), r.id(), Vec::new()))
                }
            }
            Some(sym) => {
                let rest = goal.prefix().suffix(1);
                let binding = Binding { word: rest, open: goal.is_open() };
                for r in automaton.rules_at(&goal.state, Some(sym)) {
                    let children: Option<Vec<ProofTree>> = r
                        .premises()
                        .iter()
                        .map(|p| search_schematic(automaton, &p.bind(&binding), hyps, memo))
                        .collect();
                    if let Some(children) = children {
                        return Some(ProofTree::node(goal.clone(), r.id(), children));
                    }
                }
                None
            }
        }
    })();
    memo.insert(key, result.clone());
    result
}

/// For one negative rule of `I'_¬`: the chosen rule of `I_¬` with the same
/// conclusion and the skeleton deriving each of its premises in `I'_¬`
/// from the source rule's premises.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub source: String,
    pub target: String,
    /// Aligned with the target rule's canonical premise order.
    pub skeletons: Vec<ProofTree>,
}

/// Total map from the negative rules of `I'_¬` to their expansions.
#[derive(Debug, Clone, Default)]
pub struct ExpansionMap {
    entries: BTreeMap<String, Expansion>,
}

impl ExpansionMap {
    pub fn get(&self, source_rule: &str) -> Option<&Expansion> {
        self.entries.get(source_rule)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Expansion> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One `<source> -> <target> [skeleton; ...]`-style JSON object keyed
    /// by source rule.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        for e in self.entries.values() {
            let skeletons: Vec<serde_json::Value> = e
                .skeletons
                .iter()
                .map(|t| serde_json::from_str(&t.to_json()).expect("proof JSON is valid"))
                .collect();
            obj.insert(
                e.source.clone(),
                serde_json::json!({ "rule": e.target, "premises": skeletons }),
            );
        }
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj))
            .expect("expansion map serialization cannot fail");
        s.push('\n');
        s
    }

    /// Human-readable listing, one `<source> => <target>` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in self.entries.values() {
            writeln!(out, "{} => {}", e.source, e.target).unwrap();
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum RefuteError {
    #[error(transparent)]
    Member(#[from] MemberError),
    #[error("refutation expects a strict system (relaxed systems are transform outputs)")]
    RelaxedInput,
    #[error("{0} is provable; there is nothing to refute")]
    Provable(Atom),
    #[error("no expansion for negative rule `{0}`: complement construction defect")]
    NoExpansion(String),
}

/// The full refutation machinery for one system: the normalized small-step
/// system, its saturation and automaton, both negation extensions, and the
/// expansion map between them. Immutable and shareable.
pub struct Refuter {
    original: System,
    erasure: ErasureMap,
    small_step: System,
    saturated: System,
    automaton: System,
    negated_automaton: NegationSystem,
    tilde: System,
    negation: NegationSystem,
    expansion: ExpansionMap,
}

impl Refuter {
    pub fn new(s: &System) -> Result<Refuter, RefuteError> {
        if s.mode() != Mode::Strict {
            return Err(RefuteError::RelaxedInput);
        }
        let (small_step, erasure) = to_small_step(s);
        let saturated = saturate(&small_step);
        let automaton = extract_multi_automaton(&saturated);
        let negated_automaton = negate_automaton(&automaton);
        let tilde = tilde(&small_step);
        let negation = build_negation_extension(&small_step);
        let expansion = build_map(&negated_automaton, &negation)?;
        Ok(Refuter {
            original: s.clone(),
            erasure,
            small_step,
            saturated,
            automaton,
            negated_automaton,
            tilde,
            negation,
            expansion,
        })
    }

    pub fn original(&self) -> &System {
        &self.original
    }

    pub fn erasure(&self) -> &ErasureMap {
        &self.erasure
    }

    pub fn small_step(&self) -> &System {
        &self.small_step
    }

    pub fn saturated(&self) -> &System {
        &self.saturated
    }

    pub fn automaton(&self) -> &System {
        &self.automaton
    }

    /// `I'_¬`.
    pub fn negated_automaton(&self) -> &NegationSystem {
        &self.negated_automaton
    }

    pub fn tilde(&self) -> &System {
        &self.tilde
    }

    /// `I_¬`.
    pub fn negation(&self) -> &NegationSystem {
        &self.negation
    }

    pub fn expansion(&self) -> &ExpansionMap {
        &self.expansion
    }

    /// The depth-`depth` prefix of the co-inductive `I_¬` proof of `!atom`.
    ///
    /// The root counts as depth 1; nodes at the cutoff become continuation
    /// markers carrying their pending `I'_¬` proof (depth 0 markers the
    /// root itself). Deepening extends a prefix without altering its
    /// existing nodes.
    pub fn unfold(&self, atom: &Atom, depth: usize) -> Result<ProofTree, RefuteError> {
        if atom.polarity != Polarity::Negative {
            validate_configuration(&self.original, atom)?;
        }
        let goal = if atom.polarity == Polarity::Negative { atom.clone() } else { atom.negated() };
        let justification = self
            .negated_automaton
            .negative_proof(&goal)?
            .ok_or_else(|| RefuteError::Provable(goal.negated()))?;
        Ok(self.unfold_at(&goal, justification, 1, depth.max(1)))
    }

    fn unfold_at(
        &self,
        goal: &Atom,
        justification: ProofTree,
        here: usize,
        cutoff: usize,
    ) -> ProofTree {
        if here >= cutoff {
            return ProofTree::continuation(goal.clone(), Some(justification));
        }
        let source = justification
            .rule_id()
            .expect("negative proofs consist of rule nodes")
            .to_string();
        let expansion = self
            .expansion
            .get(&source)
            .expect("the expansion map is total over negative rules");
        let target = self
            .negation
            .system()
            .rule(&expansion.target)
            .expect("expansion targets exist");
        let binding = target
            .conclusion()
            .match_against(goal)
            .expect("target concludes the same proposition as the source");
        let source_rule = self
            .negated_automaton
            .system()
            .rule(&source)
            .expect("source rule exists");
        let children = target
            .premises()
            .iter()
            .zip(&expansion.skeletons)
            .map(|(premise, skeleton)| {
                let instance = premise.bind(&binding);
                let sub = graft_skeleton(
                    skeleton,
                    &binding,
                    source_rule.premises(),
                    justification.children(),
                );
                debug_assert_eq!(sub.label(), &instance);
                self.unfold_at(&instance, sub, here + 1, cutoff)
            })
            .collect();
        ProofTree::node(goal.clone(), expansion.target.clone(), children)
    }
}

fn build_map(
    negated_automaton: &NegationSystem,
    negation: &NegationSystem,
) -> Result<ExpansionMap, RefuteError> {
    let mut entries = BTreeMap::new();
    for rho in negated_automaton.negative_rules() {
        let candidates = negation
            .negative_rules()
            .filter(|r| r.conclusion() == rho.conclusion());
        let mut found = None;
        for candidate in candidates {
            let skeletons: Option<Vec<ProofTree>> = candidate
                .premises()
                .iter()
                .map(|premise| schematic_provable(negated_automaton, premise, rho.premises()))
                .collect();
            if let Some(skeletons) = skeletons {
                found = Some(Expansion {
                    source: rho.id().to_string(),
                    target: candidate.id().to_string(),
                    skeletons,
                });
                break;
            }
        }
        let expansion = found.ok_or_else(|| RefuteError::NoExpansion(rho.id().to_string()))?;
        entries.insert(expansion.source.clone(), expansion);
    }
    Ok(ExpansionMap { entries })
}

/// Builds the expansion map for (the small-step form of) `s`.
pub fn build_expansion_map(s: &System) -> Result<ExpansionMap, RefuteError> {
    Refuter::new(s).map(|r| r.expansion)
}

/// One-shot unfolding; `Refuter` shares the construction across calls.
pub fn unfold(atom: &Atom, s: &System, depth: usize) -> Result<ProofTree, RefuteError> {
    Refuter::new(s)?.unfold(atom, depth)
}
