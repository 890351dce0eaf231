//! Systems: named finite rule sets over declared alphabets.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::atom::{Atom, Binding, Polarity};
use crate::rule::{Rule, RuleKind};
use crate::saturate;
use crate::sym::{StackSym, StateSym};

/// Class marker, computed from the rules rather than trusted from input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemClass {
    General,
    SmallStep,
    Saturated,
    MultiAutomaton,
    NegationExtended,
}

impl fmt::Display for SystemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemClass::General => "general",
            SystemClass::SmallStep => "small-step",
            SystemClass::Saturated => "saturated",
            SystemClass::MultiAutomaton => "multi-automaton",
            SystemClass::NegationExtended => "negation-extended",
        })
    }
}

/// Well-formedness mode.
///
/// Strict is the pushdown-system input grammar: positive rules, open
/// premises, conclusions open or exactly `Q(eps)` with no premises.
/// Relaxed additionally admits negative atoms, closed premises, and closed
/// conclusions with premises — the shapes produced by conclusion
/// instantiation and complementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Strict,
    Relaxed,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("rule {rule}: undeclared state `{state}`")]
    UndeclaredState { rule: String, state: String },
    #[error("rule {rule}: undeclared stack symbol `{symbol}`")]
    UndeclaredStackSym { rule: String, symbol: String },
    #[error("rule {rule}: closed premise {premise} (forbidden outside relaxed mode)")]
    ClosedPremise { rule: String, premise: Atom },
    #[error("rule {rule}: conclusion {conclusion} must be open or `Q(eps)` with no premises")]
    BadConclusion { rule: String, conclusion: Atom },
    #[error("rule {rule}: negative atoms are forbidden outside relaxed mode")]
    NegativeAtom { rule: String },
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate stack symbol `{0}`")]
    DuplicateStackSym(String),
}

/// A named, finite rule set over interned alphabets.
///
/// Rules are stored sorted by id; premises are canonical within each rule.
/// Systems are immutable after construction.
#[derive(Clone)]
pub struct System {
    name: String,
    states: Vec<StateSym>,
    stack: Vec<StackSym>,
    rules: Vec<Rule>,
    class: SystemClass,
    mode: Mode,
}

impl System {
    /// Validates and builds a system. The class marker is computed; a
    /// small-step system closed under saturation is marked saturated.
    pub fn new(
        name: impl Into<String>,
        states: Vec<StateSym>,
        stack: Vec<StackSym>,
        rules: Vec<Rule>,
        mode: Mode,
    ) -> Result<System, SystemError> {
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.clone()) {
                return Err(SystemError::DuplicateState(s.to_string()));
            }
        }
        let mut seen = HashSet::new();
        for s in &stack {
            if !seen.insert(s.clone()) {
                return Err(SystemError::DuplicateStackSym(s.to_string()));
            }
        }

        let state_set: HashSet<&StateSym> = states.iter().collect();
        let sym_set: HashSet<&StackSym> = stack.iter().collect();
        let mut ids = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id().to_string()) {
                return Err(SystemError::DuplicateRuleId(r.id().to_string()));
            }
            for a in r.premises().iter().chain(std::iter::once(r.conclusion())) {
                if !state_set.contains(&a.state) {
                    return Err(SystemError::UndeclaredState {
                        rule: r.id().to_string(),
                        state: a.state.to_string(),
                    });
                }
                for sym in a.prefix().syms() {
                    if !sym_set.contains(sym) {
                        return Err(SystemError::UndeclaredStackSym {
                            rule: r.id().to_string(),
                            symbol: sym.to_string(),
                        });
                    }
                }
            }
            if mode == Mode::Strict {
                if r.polarity() == Polarity::Negative {
                    return Err(SystemError::NegativeAtom { rule: r.id().to_string() });
                }
                if let Some(p) = r.premises().iter().find(|p| p.is_closed()) {
                    return Err(SystemError::ClosedPremise {
                        rule: r.id().to_string(),
                        premise: p.clone(),
                    });
                }
                let c = r.conclusion();
                if c.is_closed() && !(c.word().is_empty() && r.premises().is_empty()) {
                    return Err(SystemError::BadConclusion {
                        rule: r.id().to_string(),
                        conclusion: c.clone(),
                    });
                }
            }
        }

        let mut rules = rules;
        rules.sort_by(|a, b| a.id().cmp(b.id()));
        let mut sys = System {
            name: name.into(),
            states,
            stack,
            rules,
            class: SystemClass::General,
            mode,
        };
        sys.class = sys.compute_class();
        if sys.class == SystemClass::SmallStep && saturate::is_closed(&sys) {
            sys.class = SystemClass::Saturated;
        }
        Ok(sys)
    }

    /// Builds a system whose class the caller already knows, skipping the
    /// saturation-closure probe. The rules must still be well-formed.
    pub(crate) fn with_class(
        name: impl Into<String>,
        states: Vec<StateSym>,
        stack: Vec<StackSym>,
        mut rules: Vec<Rule>,
        mode: Mode,
        class: SystemClass,
    ) -> System {
        rules.sort_by(|a, b| a.id().cmp(b.id()));
        let sys = System { name: name.into(), states, stack, rules, class, mode };
        debug_assert_eq!(
            {
                let shape = sys.compute_class();
                match (shape, class) {
                    (SystemClass::SmallStep, SystemClass::Saturated) => class,
                    _ => shape,
                }
            },
            class,
            "class marker inconsistent with rule shapes"
        );
        sys
    }

    fn compute_class(&self) -> SystemClass {
        if self.rules.iter().any(|r| r.polarity() == Polarity::Negative) {
            return SystemClass::NegationExtended;
        }
        let kinds: Vec<RuleKind> = self.rules.iter().map(Rule::kind).collect();
        if kinds.iter().all(|k| k.is_intro_like()) {
            SystemClass::MultiAutomaton
        } else if kinds.iter().all(|k| k.is_small_step()) {
            SystemClass::SmallStep
        } else {
            SystemClass::General
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[StateSym] {
        &self.states
    }

    pub fn stack(&self) -> &[StackSym] {
        &self.stack
    }

    /// Rules in canonical (id-sorted) order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules
            .binary_search_by(|r| r.id().cmp(id))
            .ok()
            .map(|i| &self.rules[i])
    }

    pub fn class(&self) -> SystemClass {
        self.class
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn has_state(&self, s: &StateSym) -> bool {
        self.states.contains(s)
    }

    pub fn has_stack_sym(&self, s: &StackSym) -> bool {
        self.stack.contains(s)
    }

    /// Checks that every symbol of `a` is declared.
    pub fn declares_atom(&self, a: &Atom) -> bool {
        self.has_state(&a.state) && a.prefix().syms().iter().all(|s| self.has_stack_sym(s))
    }

    /// The rules whose conclusion `label` instantiates, with the witnessing
    /// binding. Finite by prefix matching.
    pub fn rules_concluding<'a>(
        &'a self,
        label: &'a Atom,
    ) -> impl Iterator<Item = (&'a Rule, Binding)> + 'a {
        self.rules
            .iter()
            .filter_map(move |r| r.conclusion().match_against(label).map(|b| (r, b)))
    }

    /// A sibling system over the same alphabets.
    pub(crate) fn derive(
        &self,
        rules: Vec<Rule>,
        mode: Mode,
        class: SystemClass,
    ) -> System {
        System::with_class(
            self.name.clone(),
            self.states.clone(),
            self.stack.clone(),
            rules,
            mode,
            class,
        )
    }

    /// Serializes to the canonical textual format: rules sorted by id,
    /// premises in canonical order. `parse_system` round-trips it.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("system {}\n", self.name));
        if self.mode == Mode::Relaxed {
            out.push_str("mode relaxed\n");
        }
        out.push_str("states");
        for s in &self.states {
            out.push_str(&format!(" {s}"));
        }
        out.push('\n');
        out.push_str("stack");
        for s in &self.stack {
            out.push_str(&format!(" {s}"));
        }
        out.push('\n');
        for r in &self.rules {
            out.push_str(&format!("rule {r}\n"));
        }
        out
    }

}

impl PartialEq for System {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.states == other.states
            && self.stack == other.stack
            && self.rules == other.rules
            && self.class == other.class
            && self.mode == other.mode
    }
}

impl Eq for System {}

impl fmt::Debug for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "System({}, {} rules, {})",
            self.name,
            self.rules.len(),
            self.class
        )
    }
}

/// Serializes a system to its canonical text.
pub fn serialize_system(s: &System) -> String {
    s.to_text()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{atom, e1, e1s, rsys};

    #[test]
    fn class_markers_are_computed() {
        assert_eq!(e1().class(), SystemClass::SmallStep);
        assert_eq!(e1s().class(), SystemClass::Saturated);
        assert_eq!(rsys().class(), SystemClass::Saturated);
        let m = crate::saturate::extract_multi_automaton(&e1s());
        assert_eq!(m.class(), SystemClass::MultiAutomaton);
        let neg = crate::complement::negate_automaton(&m);
        assert_eq!(neg.system().class(), SystemClass::NegationExtended);
    }

    #[test]
    fn serialized_e1s_has_fifteen_rule_lines() {
        let lines = e1s().to_text();
        assert_eq!(lines.lines().filter(|l| l.starts_with("rule ")).count(), 15);
    }

    #[test]
    fn rules_concluding_uses_prefix_matching() {
        let s = e1();
        let label = atom("S(a b)");
        let ids: Vec<&str> = s.rules_concluding(&label).map(|(r, _)| r.id()).collect();
        assert_eq!(ids, vec!["e1"]); // conclusion S(x) matches any S word
        let label = atom("P(a b)");
        let ids: Vec<&str> = s.rules_concluding(&label).map(|(r, _)| r.id()).collect();
        assert_eq!(ids, vec!["i1"]); // P(a x) matches, P(b x) does not
        assert_eq!(s.rules_concluding(&atom("T(eps)")).count(), 1); // n2 at eps
    }

    #[test]
    fn lookup_by_id_is_exact() {
        let s = e1();
        assert!(s.rule("i1").is_some());
        assert!(s.rule("i99").is_none());
    }
}
