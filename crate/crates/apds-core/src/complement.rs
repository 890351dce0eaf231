//! Conclusion instantiation, product complementation, and the negation
//! extensions used for refutation certificates.
//!
//! Over the canonical conclusion set `C = {P(eps)} ∪ {P(γ x)}` every
//! configuration instantiates exactly one element, so a system whose
//! conclusions lie in `C` can be complemented rule-wise: for the rules
//! `r₁..rₙ` concluding `B`, pick one premise from each and negate
//! everything. A configuration is then derivable in one step from the
//! complement of a set exactly when it is not derivable in one step from
//! the set itself.

use std::collections::{BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::atom::{Atom, Binding, Polarity, Word};
use crate::decide::{validate_configuration, Automaton, MemberError};
use crate::proof::ProofTree;
use crate::rule::{CompStep, Provenance, Rule};
use crate::sym::{StackSym, StateSym};
use crate::system::{Mode, System, SystemClass};

/// The canonical conclusions `C` over the alphabets of `s`, in declared
/// state order with `P(eps)` before the `P(γ x)`.
pub fn canonical_conclusions(s: &System) -> Vec<Atom> {
    let mut out = Vec::with_capacity(s.states().len() * (s.stack().len() + 1));
    for state in s.states() {
        out.push(Atom::closed(state.clone(), Word::empty()));
        for sym in s.stack() {
            out.push(Atom::open(state.clone(), Word::new([sym.clone()])));
        }
    }
    out
}

/// Replaces every neutral and elim rule by its instance at `eps` and one
/// instance per stack symbol, so that all conclusions lie in `C`. Intro
/// and eps-intro rules are unchanged; an intro-only system is returned
/// as is.
///
/// The `eps` instances close their premises, so the output is a relaxed
/// system (e.g. `Q(eps) <= P(a)`).
pub fn tilde(s: &System) -> System {
    assert!(
        matches!(
            s.class(),
            SystemClass::SmallStep | SystemClass::Saturated | SystemClass::MultiAutomaton
        ),
        "tilde expects a small-step system, got {}",
        s.class()
    );
    if s.class() == SystemClass::MultiAutomaton {
        return s.clone();
    }
    let mut taken: HashSet<String> = s
        .rules()
        .iter()
        .filter(|r| r.kind().is_intro_like())
        .map(|r| r.id().to_string())
        .collect();
    let mut free = |base: String| {
        let mut id = base;
        while !taken.insert(id.clone()) {
            id.push('_');
        }
        id
    };
    let mut rules: Vec<Rule> = Vec::new();
    for r in s.rules() {
        if r.kind().is_intro_like() {
            rules.push(r.clone());
            continue;
        }
        let eps = Binding::closed(Word::empty());
        rules.push(
            Rule::new(
                free(format!("{}.eps", r.id())),
                r.premises().iter().map(|p| p.bind(&eps)).collect(),
                r.conclusion().bind(&eps),
                Provenance::Original,
            )
            .expect("eps instance is well-formed"),
        );
        for sym in s.stack() {
            let b = Binding::open(Word::new([sym.clone()]));
            rules.push(
                Rule::new(
                    free(format!("{}.{sym}", r.id())),
                    r.premises().iter().map(|p| p.bind(&b)).collect(),
                    r.conclusion().bind(&b),
                    Provenance::Original,
                )
                .expect("symbol instance is well-formed"),
            );
        }
    }
    System::new(s.name(), s.states().to_vec(), s.stack().to_vec(), rules, Mode::Relaxed)
        .expect("tilde preserves well-formedness")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplementError {
    #[error("conclusion {0} of rule `{1}` is outside the canonical set C")]
    ConclusionOutsideC(Atom, String),
}

fn conclusion_key(r: &Rule) -> Result<(StateSym, Option<StackSym>), ComplementError> {
    let c = r.conclusion();
    if c.is_closed() && c.word().is_empty() {
        Ok((c.state.clone(), None))
    } else if c.is_open() && c.prefix().len() == 1 {
        Ok((c.state.clone(), Some(c.prefix().first().unwrap().clone())))
    } else {
        Err(ComplementError::ConclusionOutsideC(c.clone(), r.id().to_string()))
    }
}

/// The complementation of a system whose conclusions lie in `C`: for each
/// `B ∈ C` concluded by rules `r₁..rₙ`, one negative rule per choice of one
/// premise from each `rᵢ` (none when some `rᵢ` is premise-free; the axiom
/// `!B` when n = 0). Duplicate premise sets keep the first choice vector.
pub fn complement_rules(t: &System) -> Result<Vec<Rule>, ComplementError> {
    let mut by_key: HashMap<(StateSym, Option<StackSym>), Vec<&Rule>> = HashMap::new();
    for r in t.rules() {
        by_key.entry(conclusion_key(r)?).or_default().push(r);
    }

    let mut out = Vec::new();
    for b in canonical_conclusions(t) {
        let key = if b.is_closed() {
            (b.state.clone(), None)
        } else {
            (b.state.clone(), Some(b.prefix().first().unwrap().clone()))
        };
        let key_name = format!(
            "{}.{}",
            key.0,
            key.1.as_ref().map_or_else(|| "eps".to_string(), |s| s.to_string())
        );
        let contributing = by_key.get(&key).map(Vec::as_slice).unwrap_or(&[]);
        let conclusion = b.negated();

        if contributing.is_empty() {
            let rule = Rule::new(
                format!("{key_name}~"),
                Vec::new(),
                conclusion,
                Provenance::Complementation(CompStep { choices: Vec::new() }),
            )
            .expect("complement axiom is well-formed");
            out.push(rule);
            continue;
        }
        if contributing.iter().any(|r| r.premises().is_empty()) {
            continue; // some rule needs nothing, so B is never refutable here
        }

        // One choice per contributing rule. Enumerated as a running product
        // over deduplicated premise sets, which keeps the first (lex-least)
        // choice vector per set without materializing the full product.
        type Partial = (Vec<Atom>, Vec<(String, usize)>);
        let mut partial: Vec<Partial> = vec![(Vec::new(), Vec::new())];
        for r in contributing {
            let mut next: Vec<Partial> = Vec::new();
            let mut seen: HashSet<Vec<Atom>> = HashSet::new();
            for (set, choices) in &partial {
                for (j, premise) in r.premises().iter().enumerate() {
                    let mut grown = set.clone();
                    let neg = premise.negated();
                    if let Err(pos) = grown.binary_search(&neg) {
                        grown.insert(pos, neg);
                    }
                    if seen.insert(grown.clone()) {
                        let mut ch = choices.clone();
                        ch.push((r.id().to_string(), j + 1));
                        next.push((grown, ch));
                    }
                }
            }
            partial = next;
        }
        for (premises, choices) in partial {
            let id = format!(
                "{key_name}~{}",
                choices
                    .iter()
                    .map(|(_, j)| j.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            );
            let rule = Rule::new(
                id,
                premises,
                conclusion.clone(),
                Provenance::Complementation(CompStep { choices }),
            )
            .expect("complement rule is well-formed");
            out.push(rule);
        }
    }
    Ok(out)
}

/// Which construction a negation system came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegationKind {
    /// From the instantiated system: premises may carry longer prefixes, so
    /// negative provability is co-inductive, not decided by membership.
    Tilde,
    /// From the multi-automaton: negative premises have empty prefixes, so
    /// the word strictly shrinks upward and membership decides.
    Automaton,
}

/// A base system extended with the negated complement of itself.
#[derive(Clone, Debug)]
pub struct NegationSystem {
    system: System,
    kind: NegationKind,
}

impl NegationSystem {
    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn kind(&self) -> NegationKind {
        self.kind
    }

    pub fn positive_rules(&self) -> impl Iterator<Item = &Rule> {
        self.system.rules().iter().filter(|r| r.polarity() == Polarity::Positive)
    }

    pub fn negative_rules(&self) -> impl Iterator<Item = &Rule> {
        self.system.rules().iter().filter(|r| r.polarity() == Polarity::Negative)
    }

    fn check_negative_query(&self, atom: &Atom) -> Result<(), MemberError> {
        if self.kind != NegationKind::Automaton {
            return Err(MemberError::NotAutomaton(self.system.class()));
        }
        if atom.polarity != Polarity::Negative {
            return Err(MemberError::WrongPolarity(atom.clone()));
        }
        validate_configuration(&self.system, atom)
    }

    /// Membership of `!A` in the negative fragment (`Automaton` kind only).
    pub fn negative_member(&self, atom: &Atom) -> Result<bool, MemberError> {
        self.check_negative_query(atom)?;
        Ok(Automaton::new(&self.system, Polarity::Negative).member(atom))
    }

    /// A finite proof of `!A` in the negative fragment, if one exists.
    pub fn negative_proof(&self, atom: &Atom) -> Result<Option<ProofTree>, MemberError> {
        self.check_negative_query(atom)?;
        Ok(Automaton::new(&self.system, Polarity::Negative).proof(atom))
    }
}

fn merge_with_negatives(base: &System, negatives: Vec<Rule>, kind: NegationKind) -> NegationSystem {
    let mut taken: HashSet<String> = base.rules().iter().map(|r| r.id().to_string()).collect();
    let mut rules = base.rules().to_vec();
    for r in negatives {
        let mut id = r.id().to_string();
        while !taken.insert(id.clone()) {
            id.push('_');
        }
        rules.push(
            Rule::new(id, r.premises().to_vec(), r.conclusion().clone(), r.provenance().clone())
                .expect("renamed rule stays well-formed"),
        );
    }
    let system =
        System::new(base.name(), base.states().to_vec(), base.stack().to_vec(), rules, Mode::Relaxed)
            .expect("negation extension preserves well-formedness");
    NegationSystem { system, kind }
}

/// `I_¬`: the small-step system plus the negated complement of its
/// instantiation.
pub fn build_negation_extension(s: &System) -> NegationSystem {
    let t = tilde(s);
    let negatives = complement_rules(&t).expect("tilde conclusions are in C");
    merge_with_negatives(s, negatives, NegationKind::Tilde)
}

/// `I'_¬`: the multi-automaton plus its own negated complement (negation
/// as failure). All negative premises have empty prefixes.
pub fn negate_automaton(m: &System) -> NegationSystem {
    assert_eq!(
        m.class(),
        SystemClass::MultiAutomaton,
        "negate_automaton expects a multi-automaton"
    );
    let negatives = complement_rules(m).expect("automaton conclusions are in C");
    debug_assert!(negatives
        .iter()
        .flat_map(|r| r.premises())
        .all(|p| p.prefix().is_empty()));
    merge_with_negatives(m, negatives, NegationKind::Automaton)
}

fn words_up_to(syms: &[StackSym], max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for s in syms {
                let grown = w.concat(&Word::new([s.clone()]));
                out.push(grown.clone());
                next.push(grown);
            }
        }
        frontier = next;
    }
    out
}

/// All configurations of word length ≤ `bound` derivable in one rule
/// application whose premise instances all lie in `x` (the one-step
/// operator of the system, truncated).
pub fn one_step(s: &System, x: &BTreeSet<Atom>, bound: usize) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for r in s.rules() {
        let opens: Vec<&Atom> = r.premises().iter().filter(|p| p.is_open()).collect();
        if r.premises().iter().any(|p| p.is_closed() && !x.contains(p)) {
            continue;
        }
        let candidates: Vec<Word> = match opens.first() {
            Some(p0) => x
                .iter()
                .filter(|a| a.polarity == p0.polarity && a.state == p0.state)
                .filter_map(|a| a.word().strip_prefix(p0.prefix()))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
            None if r.conclusion().is_open() => {
                let room = bound.saturating_sub(r.conclusion().prefix().len());
                words_up_to(s.stack(), room)
            }
            None => vec![Word::empty()],
        };
        for w in candidates {
            if !opens
                .iter()
                .all(|p| x.contains(&p.instantiate(&w).expect("premise is open")))
            {
                continue;
            }
            let b = if r.conclusion().is_open() {
                r.conclusion().instantiate(&w).expect("conclusion is open")
            } else {
                r.conclusion().clone()
            };
            if b.word().len() <= bound {
                out.insert(b);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{atom, e1, e1s, rsys};
    use crate::parse::parse_system;
    use crate::saturate::extract_multi_automaton;

    /// Judgments as (conclusion, sorted premises) pairs, naming ignored.
    fn judgments(rules: &[Rule]) -> BTreeSet<(String, Vec<String>)> {
        rules
            .iter()
            .map(|r| {
                (
                    r.conclusion().to_string(),
                    r.premises().iter().map(Atom::to_string).collect(),
                )
            })
            .collect()
    }

    fn expect_judgments(entries: &[(&str, &[&str])]) -> BTreeSet<(String, Vec<String>)> {
        entries
            .iter()
            .map(|(c, ps)| {
                let mut premises: Vec<Atom> = ps.iter().map(|p| atom(p)).collect();
                premises.sort();
                (
                    atom(c).to_string(),
                    premises.iter().map(Atom::to_string).collect(),
                )
            })
            .collect()
    }

    #[test]
    fn tilde_of_rsys_is_the_displayed_seven_rule_system() {
        let t = tilde(&rsys());
        let expected = expect_judgments(&[
            ("P(eps)", &["Q(eps)", "R(eps)"]),
            ("P(a x)", &["Q(a x)", "R(a x)"]),
            ("P(eps)", &["S(eps)"]),
            ("P(a x)", &["S(a x)"]),
            ("Q(eps)", &["P(a)"]),
            ("Q(a x)", &["P(a a x)"]),
            ("R(a x)", &[]),
        ]);
        assert_eq!(judgments(t.rules()), expected);
        assert_eq!(t.rules().len(), 7);
        assert_eq!(t.mode(), Mode::Relaxed);
    }

    #[test]
    fn tilde_of_an_intro_only_system_is_unchanged() {
        let m = extract_multi_automaton(&e1s());
        assert_eq!(tilde(&m), m);
    }

    #[test]
    fn tilde_instantiates_a_bare_neutral() {
        let s = parse_system("system t\nstates T\nstack a\nrule n1: => T(x)\n").unwrap();
        let t = tilde(&s);
        let expected = expect_judgments(&[("T(eps)", &[]), ("T(a x)", &[])]);
        assert_eq!(judgments(t.rules()), expected);
    }

    #[test]
    fn complement_of_tilde_rsys_is_the_displayed_nine_rule_system() {
        let negatives = complement_rules(&tilde(&rsys())).unwrap();
        let expected = expect_judgments(&[
            ("!P(eps)", &["!Q(eps)", "!S(eps)"]),
            ("!P(eps)", &["!R(eps)", "!S(eps)"]),
            ("!P(a x)", &["!Q(a x)", "!S(a x)"]),
            ("!P(a x)", &["!R(a x)", "!S(a x)"]),
            ("!Q(eps)", &["!P(a)"]),
            ("!Q(a x)", &["!P(a a x)"]),
            ("!R(eps)", &[]),
            ("!S(eps)", &[]),
            ("!S(a x)", &[]),
        ]);
        assert_eq!(judgments(&negatives), expected);
        assert_eq!(negatives.len(), 9);
    }

    #[test]
    fn unconcluded_propositions_become_axioms() {
        // no rule concludes P(eps): the complement contains the bare !P(eps)
        let s = parse_system("system t\nstates P\nstack a\nrule i1: P(x) => P(a x)\n").unwrap();
        let negatives = complement_rules(&s).unwrap();
        assert!(negatives
            .iter()
            .any(|r| r.conclusion() == &atom("!P(eps)") && r.premises().is_empty()));
    }

    #[test]
    fn premise_free_rules_suppress_their_conclusion() {
        // R(a x) is concluded by a premise-free rule: the product is empty
        let negatives = complement_rules(&rsys().derive(
            rsys().rules().to_vec(),
            Mode::Strict,
            SystemClass::Saturated,
        ))
        .err();
        // rsys itself has conclusions outside C (neutral rules), so tilde first
        assert!(negatives.is_some());
        let negatives = complement_rules(&tilde(&rsys())).unwrap();
        assert!(!negatives.iter().any(|r| r.conclusion() == &atom("!R(a x)")));
    }

    #[test]
    fn negate_automaton_of_the_example_is_seven_axioms() {
        let automaton = extract_multi_automaton(&rsys()); // rsys is saturated
        let neg = negate_automaton(&automaton);
        let negatives: Vec<Rule> = neg.negative_rules().cloned().collect();
        let expected = expect_judgments(&[
            ("!P(eps)", &[]),
            ("!P(a x)", &[]),
            ("!Q(eps)", &[]),
            ("!Q(a x)", &[]),
            ("!R(eps)", &[]),
            ("!S(eps)", &[]),
            ("!S(a x)", &[]),
        ]);
        assert_eq!(judgments(&negatives), expected);
        assert_eq!(neg.kind(), NegationKind::Automaton);
    }

    #[test]
    fn negate_empty_automaton_gives_all_axioms() {
        let m = parse_system("system m\nstates P\nstack a\n").unwrap();
        let neg = negate_automaton(&m);
        let negatives: Vec<Rule> = neg.negative_rules().cloned().collect();
        assert_eq!(
            judgments(&negatives),
            expect_judgments(&[("!P(eps)", &[]), ("!P(a x)", &[])])
        );
    }

    #[test]
    fn negate_e1_automaton_spot_checks() {
        let neg = negate_automaton(&extract_multi_automaton(&e1s()));
        // nothing concludes S(eps) in the automaton: axiom
        assert!(neg
            .negative_rules()
            .any(|r| r.conclusion() == &atom("!S(eps)") && r.premises().is_empty()));
        // i6 concludes T(a x) from nothing: no negative rule at all
        assert!(!neg.negative_rules().any(|r| r.conclusion() == &atom("!T(a x)")));
    }

    #[test]
    fn negation_extension_of_e1_spot_checks() {
        let neg = build_negation_extension(&e1());
        // ~e1 contains P(a) => S(eps) (the eps instance of the elim), so
        // !S(eps) is conditional, not an axiom
        let s_eps: Vec<&Rule> = neg
            .negative_rules()
            .filter(|r| r.conclusion() == &atom("!S(eps)"))
            .collect();
        assert_eq!(s_eps.len(), 1);
        assert_eq!(s_eps[0].premises(), &[atom("!P(a)")]);
        assert_eq!(neg.kind(), NegationKind::Tilde);
        // positive part is e1 itself
        assert_eq!(neg.positive_rules().count(), 7);
    }

    #[test]
    fn negative_membership_decides_the_negated_automaton() {
        let neg = negate_automaton(&extract_multi_automaton(&rsys()));
        assert!(neg.negative_member(&atom("!P(a)")).unwrap());
        let proof = neg.negative_proof(&atom("!P(a)")).unwrap().unwrap();
        assert!(proof.children().is_empty());
        assert!(!neg.negative_member(&atom("!R(a)")).unwrap());
        // positive queries are rejected here
        assert!(neg.negative_member(&atom("P(a)")).is_err());
    }

    #[test]
    fn negative_membership_is_refused_on_the_tilde_extension() {
        let neg = build_negation_extension(&rsys());
        assert!(neg.negative_member(&atom("!P(a)")).is_err());
    }

    #[test]
    fn one_step_from_a_singleton() {
        let x: BTreeSet<Atom> = [atom("T(eps)")].into();
        let got = one_step(&e1(), &x, 1);
        let expected: BTreeSet<Atom> = [
            atom("P(b)"),
            atom("R(a)"),
            atom("R(b)"),
            atom("T(eps)"),
            atom("T(a)"),
            atom("T(b)"),
        ]
        .into();
        assert_eq!(got, expected);
    }

    #[test]
    fn one_step_from_the_empty_set_fires_premise_free_rules() {
        let got = one_step(&e1(), &BTreeSet::new(), 1);
        let expected: BTreeSet<Atom> = [
            atom("R(b)"),
            atom("T(eps)"),
            atom("T(a)"),
            atom("T(b)"),
        ]
        .into();
        assert_eq!(got, expected);
    }

    #[test]
    fn one_step_of_an_empty_system_is_empty() {
        let s = parse_system("system m\nstates P\nstack a\n").unwrap();
        let x: BTreeSet<Atom> = [atom("P(a)")].into();
        assert!(one_step(&s, &x, 3).is_empty());
    }
}
