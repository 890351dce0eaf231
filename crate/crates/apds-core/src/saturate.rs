//! Saturation: closing a small-step system under derivable intro and
//! neutral rules, with provenance sufficient to rebuild each derivation.
//!
//! Three closure cases:
//! 1. intro `P₁(x)..Pₘ(x) => Q(γ x)` + elim `Q(γ x), Q₂(x)..Qₙ(x) => R(x)`
//!    adds the neutral `P₁(x)..Pₘ(x), Q₂(x)..Qₙ(x) => R(x)`;
//! 2. one intro at `γ` per premise of a neutral `Q₁(x)..Qₙ(x) => R(x)`
//!    adds the intro at `γ` with the union of their premise sets
//!    (for n = 0 this adds `=> R(γ x)` for every `γ`);
//! 3. likewise with eps-intros, adding `=> R(eps)`.
//!
//! The rule universe is finite (conclusions range over `|S|·(|Γ|+1)` forms
//! and premise sets over subsets of states), so the worklist terminates.

use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::atom::{Atom, Binding, Word};
use crate::proof::{graft_skeleton, ProofTree};
use crate::rule::{Provenance, Rule, RuleKind, SatStep};
use crate::sym::{StackSym, StateSym};
use crate::system::{System, SystemClass};

/// Iterates all index vectors below the given bounds, odometer order.
pub(crate) fn cartesian(bounds: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = bounds.iter().product();
    let empty_slot = bounds.contains(&0);
    (0..if empty_slot { 0 } else { total }).map(move |mut n| {
        let mut idx = vec![0; bounds.len()];
        for (i, &b) in bounds.iter().enumerate().rev() {
            idx[i] = n % b;
            n /= b;
        }
        idx
    })
}

struct Engine {
    stack: Vec<StackSym>,
    rules: Vec<Rule>,
    judgments: HashSet<(Atom, Vec<Atom>)>,
    ids: HashSet<String>,
    intro_idx: HashMap<(StateSym, StackSym), Vec<usize>>,
    eps_idx: HashMap<StateSym, Vec<usize>>,
    elim_idx: HashMap<(StateSym, StackSym), Vec<usize>>,
    neutral_idx: Vec<usize>,
    queue: VecDeque<usize>,
    counter: usize,
    added: usize,
}

impl Engine {
    fn new(s: &System) -> Engine {
        let mut e = Engine {
            stack: s.stack().to_vec(),
            rules: Vec::new(),
            judgments: HashSet::new(),
            ids: HashSet::new(),
            intro_idx: HashMap::new(),
            eps_idx: HashMap::new(),
            elim_idx: HashMap::new(),
            neutral_idx: Vec::new(),
            queue: VecDeque::new(),
            counter: 0,
            added: 0,
        };
        for r in s.rules() {
            e.insert(r.clone());
        }
        e
    }

    fn insert(&mut self, r: Rule) {
        let idx = self.rules.len();
        self.judgments.insert(r.judgment_key());
        self.ids.insert(r.id().to_string());
        match r.kind() {
            RuleKind::Intro => {
                let key = (r.conclusion().state.clone(), r.intro_symbol().unwrap().clone());
                self.intro_idx.entry(key).or_default().push(idx);
            }
            RuleKind::EpsIntro => {
                self.eps_idx.entry(r.conclusion().state.clone()).or_default().push(idx);
            }
            RuleKind::Elim => {
                let head = &r.premises()[r.elim_head().unwrap()];
                let key = (head.state.clone(), head.prefix().first().unwrap().clone());
                self.elim_idx.entry(key).or_default().push(idx);
            }
            RuleKind::Neutral => self.neutral_idx.push(idx),
            RuleKind::General => unreachable!("saturation runs on small-step systems"),
        }
        self.queue.push_back(idx);
        self.rules.push(r);
    }

    fn try_add(&mut self, premises: Vec<Atom>, conclusion: Atom, step: SatStep) -> bool {
        let mut premises = premises;
        premises.sort();
        premises.dedup();
        if self.judgments.contains(&(conclusion.clone(), premises.clone())) {
            return false;
        }
        self.counter += 1;
        let mut id = format!("sat{}", self.counter);
        while self.ids.contains(&id) {
            self.counter += 1;
            id = format!("sat{}", self.counter);
        }
        let rule = Rule::new(id, premises, conclusion, Provenance::Saturation(step))
            .expect("saturation builds well-formed rules");
        self.insert(rule);
        self.added += 1;
        true
    }

    /// Case 1 for a given (intro, elim) pair.
    fn case1(&mut self, intro: usize, elim: usize) {
        let i = &self.rules[intro];
        let e = &self.rules[elim];
        let head = e.elim_head().unwrap();
        let mut premises = i.premises().to_vec();
        premises.extend(e.premises().iter().enumerate().filter(|(j, _)| *j != head).map(|(_, a)| a.clone()));
        let conclusion = e.conclusion().clone();
        let step = SatStep::IntroElim { intro: i.id().to_string(), elim: e.id().to_string() };
        self.try_add(premises, conclusion, step);
    }

    /// Case 2 for one neutral and one symbol: all intro choices, optionally
    /// constrained to tuples that use rule `must_use`.
    fn case2(&mut self, neutral: usize, symbol: &StackSym, must_use: Option<usize>) {
        let n = &self.rules[neutral];
        let neutral_id = n.id().to_string();
        let conclusion = n
            .conclusion()
            .bind(&Binding::open(Word::new([symbol.clone()])));
        let slots: Vec<Vec<usize>> = n
            .premises()
            .iter()
            .map(|p| {
                self.intro_idx
                    .get(&(p.state.clone(), symbol.clone()))
                    .cloned()
                    .unwrap_or_default()
            })
            .collect();
        if n.premises().is_empty() {
            let step = SatStep::IntroNeutral {
                symbol: symbol.clone(),
                neutral: neutral_id,
                intros: Vec::new(),
            };
            self.try_add(Vec::new(), conclusion, step);
            return;
        }
        let bounds: Vec<usize> = slots.iter().map(Vec::len).collect();
        for choice in cartesian(&bounds).collect::<Vec<_>>() {
            let picked: Vec<usize> = choice.iter().zip(&slots).map(|(&c, s)| s[c]).collect();
            if must_use.is_some_and(|m| !picked.contains(&m)) {
                continue;
            }
            let mut premises = Vec::new();
            for &p in &picked {
                premises.extend(self.rules[p].premises().iter().cloned());
            }
            let step = SatStep::IntroNeutral {
                symbol: symbol.clone(),
                neutral: neutral_id.clone(),
                intros: picked.iter().map(|&p| self.rules[p].id().to_string()).collect(),
            };
            self.try_add(premises, conclusion.clone(), step);
        }
    }

    /// Case 3 for one neutral: all eps-intro choices.
    fn case3(&mut self, neutral: usize, must_use: Option<usize>) {
        let n = &self.rules[neutral];
        let neutral_id = n.id().to_string();
        let conclusion = n.conclusion().bind(&Binding::closed(Word::empty()));
        if n.premises().is_empty() {
            let step = SatStep::EpsNeutral { neutral: neutral_id, eps_intros: Vec::new() };
            self.try_add(Vec::new(), conclusion, step);
            return;
        }
        let slots: Vec<Vec<usize>> = n
            .premises()
            .iter()
            .map(|p| self.eps_idx.get(&p.state).cloned().unwrap_or_default())
            .collect();
        let bounds: Vec<usize> = slots.iter().map(Vec::len).collect();
        for choice in cartesian(&bounds).collect::<Vec<_>>() {
            let picked: Vec<usize> = choice.iter().zip(&slots).map(|(&c, s)| s[c]).collect();
            if must_use.is_some_and(|m| !picked.contains(&m)) {
                continue;
            }
            let step = SatStep::EpsNeutral {
                neutral: neutral_id.clone(),
                eps_intros: picked.iter().map(|&p| self.rules[p].id().to_string()).collect(),
            };
            // eps-intros have no premises, so the union is empty
            self.try_add(Vec::new(), conclusion.clone(), step);
        }
    }

    fn process(&mut self, idx: usize) {
        match self.rules[idx].kind() {
            RuleKind::Intro => {
                let r = &self.rules[idx];
                let key = (r.conclusion().state.clone(), r.intro_symbol().unwrap().clone());
                let symbol = key.1.clone();
                let state = key.0.clone();
                for elim in self.elim_idx.get(&key).cloned().unwrap_or_default() {
                    self.case1(idx, elim);
                }
                for neutral in self.neutral_idx.clone() {
                    if self.rules[neutral].premises().iter().any(|p| p.state == state) {
                        self.case2(neutral, &symbol.clone(), Some(idx));
                    }
                }
            }
            RuleKind::EpsIntro => {
                let state = self.rules[idx].conclusion().state.clone();
                for neutral in self.neutral_idx.clone() {
                    if self.rules[neutral].premises().iter().any(|p| p.state == state) {
                        self.case3(neutral, Some(idx));
                    }
                }
            }
            RuleKind::Elim => {
                let r = &self.rules[idx];
                let head = &r.premises()[r.elim_head().unwrap()];
                let key = (head.state.clone(), head.prefix().first().unwrap().clone());
                for intro in self.intro_idx.get(&key).cloned().unwrap_or_default() {
                    self.case1(intro, idx);
                }
            }
            RuleKind::Neutral => {
                for symbol in self.stack.clone() {
                    self.case2(idx, &symbol, None);
                }
                self.case3(idx, None);
            }
            RuleKind::General => unreachable!(),
        }
    }

    fn run(&mut self) {
        while let Some(idx) = self.queue.pop_front() {
            self.process(idx);
        }
    }
}

/// Whether the three saturation cases add nothing to `s`.
pub fn is_closed(s: &System) -> bool {
    let mut engine = Engine::new(s);
    let seeds: Vec<usize> = (0..engine.rules.len()).collect();
    for idx in seeds {
        engine.process(idx);
        if engine.added > 0 {
            return false;
        }
    }
    true
}

/// Closes `s` under the saturation cases. Added rules get ids `sat1`,
/// `sat2`, ... in deterministic worklist order and carry provenance
/// recording their parents.
///
/// Expects a small-step (or already saturated) system.
pub fn saturate(s: &System) -> System {
    assert!(
        matches!(
            s.class(),
            SystemClass::SmallStep | SystemClass::Saturated | SystemClass::MultiAutomaton
        ),
        "saturate expects a small-step system, got {}",
        s.class()
    );
    let mut engine = Engine::new(s);
    engine.run();
    let class = if engine.added == 0 && s.class() == SystemClass::MultiAutomaton {
        SystemClass::MultiAutomaton
    } else {
        SystemClass::Saturated
    };
    s.derive(engine.rules, s.mode(), class)
}

/// Keeps exactly the intro and eps-intro rules of a saturated system.
pub fn extract_multi_automaton(s: &System) -> System {
    assert!(
        matches!(s.class(), SystemClass::Saturated | SystemClass::MultiAutomaton),
        "extract_multi_automaton expects a saturated system, got {}",
        s.class()
    );
    let rules: Vec<Rule> = s
        .rules()
        .iter()
        .filter(|r| r.kind().is_intro_like())
        .cloned()
        .collect();
    s.derive(rules, s.mode(), SystemClass::MultiAutomaton)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    #[error("unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("rule {rule}: missing provenance parent `{parent}`")]
    MissingParent { rule: String, parent: String },
}

/// The derivation of a saturated rule in the pre-saturation system: an open
/// proof tree whose hypothesis leaves are the rule's premises and whose
/// root is the rule's conclusion, using no saturation-added rules.
///
/// An original rule expands to the one-node skeleton applying itself.
pub fn expand_saturated_rule(s: &System, rule_id: &str) -> Result<ProofTree, ExpandError> {
    let r = s
        .rule(rule_id)
        .ok_or_else(|| ExpandError::UnknownRule(rule_id.to_string()))?;
    let parent = |id: &str| {
        s.rule(id).ok_or_else(|| ExpandError::MissingParent {
            rule: rule_id.to_string(),
            parent: id.to_string(),
        })
    };
    let Provenance::Saturation(step) = r.provenance() else {
        let children = r.premises().iter().cloned().map(ProofTree::hypothesis).collect();
        return Ok(ProofTree::node(r.conclusion().clone(), rule_id, children));
    };
    Ok(match step {
        SatStep::IntroElim { intro, elim } => {
            // elims are never saturation-added, so the root node is original
            let e = parent(elim)?;
            let head = e.elim_head().expect("case-1 parent is an elim");
            let intro_skeleton = expand_saturated_rule(s, intro)?;
            let children = e
                .premises()
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    if j == head {
                        intro_skeleton.clone()
                    } else {
                        ProofTree::hypothesis(p.clone())
                    }
                })
                .collect();
            ProofTree::node(e.conclusion().clone(), elim.clone(), children)
        }
        // the parent neutral may itself be saturation-added: expand it too,
        // instantiate at the symbol, and graft the intro skeletons onto its
        // hypothesis leaves
        SatStep::IntroNeutral { symbol, neutral, intros } => {
            let n = parent(neutral)?;
            let neutral_skeleton = expand_saturated_rule(s, neutral)?;
            let binding = Binding::open(Word::new([symbol.clone()]));
            let intro_skeletons: Vec<ProofTree> = intros
                .iter()
                .map(|i| expand_saturated_rule(s, i))
                .collect::<Result<_, _>>()?;
            graft_skeleton(&neutral_skeleton, &binding, n.premises(), &intro_skeletons)
        }
        SatStep::EpsNeutral { neutral, eps_intros } => {
            let n = parent(neutral)?;
            let neutral_skeleton = expand_saturated_rule(s, neutral)?;
            let binding = Binding::closed(Word::empty());
            let eps_skeletons: Vec<ProofTree> = eps_intros
                .iter()
                .map(|i| expand_saturated_rule(s, i))
                .collect::<Result<_, _>>()?;
            graft_skeleton(&neutral_skeleton, &binding, n.premises(), &eps_skeletons)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{atom, e1, e1s, rsys};
    use crate::parse::parse_system;
    use crate::proof::{check_proof, ProofTree};

    fn find_by_judgment<'a>(s: &'a System, conclusion: &str, premises: &[&str]) -> Option<&'a Rule> {
        let conclusion = atom(conclusion);
        let mut premises: Vec<Atom> = premises.iter().map(|p| atom(p)).collect();
        premises.sort();
        s.rules()
            .iter()
            .find(|r| r.conclusion() == &conclusion && r.premises() == premises.as_slice())
    }

    #[test]
    fn e1_saturation_adds_the_example_rules() {
        let sat = saturate(&e1());
        // n3, i5..i11 of the worked example, up to rule naming
        let expected: &[(&str, &[&str])] = &[
            ("S(x)", &["Q(x)"]),
            ("T(eps)", &[]),
            ("T(a x)", &[]),
            ("Q(a x)", &["Q(x)", "T(x)"]),
            ("S(a x)", &["Q(x)", "T(x)"]),
            ("T(b x)", &[]),
            ("Q(b x)", &["T(x)"]),
            ("S(b x)", &["T(x)"]),
        ];
        for (conclusion, premises) in expected {
            assert!(
                find_by_judgment(&sat, conclusion, premises).is_some(),
                "missing saturated rule {premises:?} => {conclusion}"
            );
        }
        assert_eq!(sat.rules().len(), 15);
        assert_eq!(sat.class(), SystemClass::Saturated);
    }

    #[test]
    fn saturation_is_a_fixpoint() {
        let sat = saturate(&e1());
        assert_eq!(saturate(&sat), sat);
    }

    #[test]
    fn e1s_fixture_is_already_saturated() {
        let s = e1s();
        assert_eq!(s.class(), SystemClass::Saturated);
        assert_eq!(saturate(&s), s);
    }

    #[test]
    fn rsys_is_already_saturated() {
        let s = rsys();
        assert_eq!(s.class(), SystemClass::Saturated);
        assert_eq!(saturate(&s), s);
    }

    #[test]
    fn premise_free_neutral_spawns_intros_at_every_symbol() {
        let s = parse_system("system t\nstates R\nstack a b\nrule n1: => R(x)\n").unwrap();
        let sat = saturate(&s);
        assert!(find_by_judgment(&sat, "R(a x)", &[]).is_some());
        assert!(find_by_judgment(&sat, "R(b x)", &[]).is_some());
        assert!(find_by_judgment(&sat, "R(eps)", &[]).is_some());
        assert_eq!(sat.rules().len(), 4);
    }

    #[test]
    fn elim_without_matching_intro_contributes_nothing() {
        let s = parse_system("system t\nstates P Q\nstack a\nrule e1: P(a x) => Q(x)\n").unwrap();
        assert_eq!(saturate(&s).rules().len(), 1);
    }

    #[test]
    fn expand_case2_rule_rebuilds_the_derivation() {
        let sat = saturate(&e1());
        // the i7 analogue: Q(x), T(x) => Q(a x), from i1, i3, and n1
        let r = find_by_judgment(&sat, "Q(a x)", &["Q(x)", "T(x)"]).unwrap();
        let sk = expand_saturated_rule(&sat, r.id()).unwrap();
        assert_eq!(sk.label(), &atom("Q(a x)"));
        assert_eq!(sk.rule_id(), Some("n1"));
        assert_eq!(sk.children().len(), 2);
        assert_eq!(sk.children()[0].rule_id(), Some("i1"));
        assert_eq!(sk.children()[1].rule_id(), Some("i3"));
        assert_eq!(
            sk.hypotheses(),
            vec![&atom("Q(x)"), &atom("T(x)")],
        );
        check_proof(&e1(), &sk, true).expect("skeleton checks against e1 with hypotheses");
    }

    #[test]
    fn expand_recurses_into_saturated_parents() {
        let sat = saturate(&e1());
        // the i8 analogue combines the i7 skeleton under the n3 one
        let r = find_by_judgment(&sat, "S(a x)", &["Q(x)", "T(x)"]).unwrap();
        let sk = expand_saturated_rule(&sat, r.id()).unwrap();
        assert_eq!(sk.label(), &atom("S(a x)"));
        // root is the n3 analogue expanded: e1 over i1
        assert_eq!(sk.rule_id(), Some("e1"));
        check_proof(&e1(), &sk, true).expect("skeleton checks against e1");
        let mut hyps: Vec<Atom> = sk.hypotheses().into_iter().cloned().collect();
        hyps.sort();
        hyps.dedup();
        assert_eq!(hyps, vec![atom("Q(x)"), atom("T(x)")]);
    }

    #[test]
    fn expand_original_rule_is_the_one_node_skeleton() {
        let s = e1();
        let sk = expand_saturated_rule(&s, "i1").unwrap();
        assert_eq!(
            sk,
            ProofTree::node(atom("P(a x)"), "i1", vec![ProofTree::hypothesis(atom("Q(x)"))])
        );
    }

    #[test]
    fn every_saturated_rule_expands_to_a_checking_skeleton() {
        let base = e1();
        let sat = saturate(&base);
        for r in sat.rules() {
            let sk = expand_saturated_rule(&sat, r.id()).unwrap();
            assert_eq!(sk.label(), r.conclusion());
            check_proof(&base, &sk, true)
                .unwrap_or_else(|e| panic!("skeleton of {} fails: {:?}", r.id(), e));
        }
    }

    #[test]
    fn extract_keeps_exactly_the_intro_rules() {
        let aut = extract_multi_automaton(&e1s());
        let ids: Vec<&str> = aut.rules().iter().map(Rule::id).collect();
        assert_eq!(
            ids,
            vec!["i1", "i10", "i11", "i2", "i3", "i4", "i5", "i6", "i7", "i8", "i9"]
        );
        assert_eq!(aut.class(), SystemClass::MultiAutomaton);
        // idempotent on automata
        assert_eq!(extract_multi_automaton(&aut), aut);
    }

    #[test]
    fn extract_of_intro_free_system_is_empty() {
        let s = parse_system("system t\nstates P Q\nstack a\nrule n1: P(x) => Q(x)\n").unwrap();
        let aut = extract_multi_automaton(&saturate(&s));
        assert!(aut.rules().is_empty());
        assert_eq!(aut.class(), SystemClass::MultiAutomaton);
    }
}
