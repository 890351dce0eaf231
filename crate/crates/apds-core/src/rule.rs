//! Inference rules, their shape classification, and provenance records.

use std::fmt;

use thiserror::Error;

use crate::atom::{Atom, Polarity};
use crate::sym::{StackSym, StateSym};

/// Shape of a rule, read off its conclusion and premises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// `P1(x) ... Pn(x) => Q(γ x)` — pushes one symbol.
    Intro,
    /// `=> Q(eps)` — the axiom form.
    EpsIntro,
    /// `P1(γ x), P2(x) ... Pn(x) => Q(x)`, n ≥ 1 — pops one symbol.
    Elim,
    /// `P1(x) ... Pn(x) => Q(x)` — keeps the word unchanged.
    Neutral,
    /// Anything else.
    General,
}

impl RuleKind {
    pub fn is_small_step(self) -> bool {
        !matches!(self, RuleKind::General)
    }

    pub fn is_intro_like(self) -> bool {
        matches!(self, RuleKind::Intro | RuleKind::EpsIntro)
    }
}

/// How a normalization-generated rule relates to the system it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormStep {
    /// `P#v(x) => P#u(γ x)` rebuilding one symbol of a split prefix.
    ChainIntro { fresh: StateSym },
    /// `P#u(γ x) => P#v(x)` consuming one symbol into a split prefix.
    ChainElim { fresh: StateSym },
    /// The small-step residue of a general rule.
    Residual { original: String },
}

/// Which saturation case produced a rule, and from which parents.
///
/// Parent ids are recorded in enough detail to rebuild the derivation of the
/// added rule inside the pre-saturation system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatStep {
    /// Case 1: an intro feeding the head premise of an elim.
    IntroElim { intro: String, elim: String },
    /// Case 2: one intro at `symbol` per premise of a neutral rule,
    /// aligned with the neutral's canonical premise order.
    IntroNeutral { symbol: StackSym, neutral: String, intros: Vec<String> },
    /// Case 3: one eps-intro per premise of a neutral rule.
    EpsNeutral { neutral: String, eps_intros: Vec<String> },
}

/// A complementation choice: one premise index (1-based) per rule of the
/// instantiated system that concludes the same proposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompStep {
    pub choices: Vec<(String, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Original,
    Normalization(NormStep),
    Saturation(SatStep),
    Complementation(CompStep),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule {id}: premises and conclusion mix polarities")]
    MixedPolarity { id: String },
    #[error("rule {id}: closed conclusion {conclusion} with open premise {premise}")]
    OpenPremiseUnderClosedConclusion { id: String, conclusion: Atom, premise: Atom },
}

/// An inference rule with a canonical (sorted, deduplicated) premise set.
#[derive(Clone)]
pub struct Rule {
    id: String,
    premises: Vec<Atom>,
    conclusion: Atom,
    provenance: Provenance,
}

impl Rule {
    /// Builds a rule, canonicalizing its premises.
    ///
    /// Rejects mixed polarities and open premises under a closed conclusion
    /// (the substitution would be undetermined). Shape restrictions beyond
    /// that depend on the system's well-formedness mode and are checked at
    /// system construction.
    pub fn new(
        id: impl Into<String>,
        premises: Vec<Atom>,
        conclusion: Atom,
        provenance: Provenance,
    ) -> Result<Rule, RuleError> {
        let id = id.into();
        let mut premises = premises;
        premises.sort();
        premises.dedup();
        for p in &premises {
            if p.polarity != conclusion.polarity {
                return Err(RuleError::MixedPolarity { id });
            }
            if conclusion.is_closed() && p.is_open() {
                return Err(RuleError::OpenPremiseUnderClosedConclusion {
                    id,
                    conclusion,
                    premise: p.clone(),
                });
            }
        }
        Ok(Rule { id, premises, conclusion, provenance })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Premises in canonical order.
    pub fn premises(&self) -> &[Atom] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Atom {
        &self.conclusion
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn polarity(&self) -> Polarity {
        self.conclusion.polarity
    }

    /// Classifies the rule shape. Total and deterministic.
    pub fn kind(&self) -> RuleKind {
        let c = &self.conclusion;
        if c.is_closed() {
            if c.word().is_empty() && self.premises.is_empty() {
                return RuleKind::EpsIntro;
            }
            return RuleKind::General;
        }
        let flat = |a: &Atom| a.is_open() && a.prefix().is_empty();
        match c.prefix().len() {
            0 => {
                if self.premises.iter().all(flat) {
                    return RuleKind::Neutral;
                }
                let heads: Vec<&Atom> =
                    self.premises.iter().filter(|p| !flat(p)).collect();
                if heads.len() == 1 && heads[0].is_open() && heads[0].prefix().len() == 1 {
                    RuleKind::Elim
                } else {
                    RuleKind::General
                }
            }
            1 => {
                if self.premises.iter().all(flat) {
                    RuleKind::Intro
                } else {
                    RuleKind::General
                }
            }
            _ => RuleKind::General,
        }
    }

    /// For an elim rule, the canonical index of its head premise `P(γ x)`.
    pub fn elim_head(&self) -> Option<usize> {
        if self.kind() != RuleKind::Elim {
            return None;
        }
        self.premises.iter().position(|p| !p.prefix().is_empty())
    }

    /// For intro-shaped rules, the pushed symbol (`None` for eps-intros).
    pub fn intro_symbol(&self) -> Option<&StackSym> {
        self.conclusion.prefix().first()
    }

    /// Equality as a judgment: same conclusion and same premise set,
    /// regardless of id and provenance.
    pub fn same_judgment(&self, other: &Rule) -> bool {
        self.conclusion == other.conclusion && self.premises == other.premises
    }

    pub(crate) fn judgment_key(&self) -> (Atom, Vec<Atom>) {
        (self.conclusion.clone(), self.premises.clone())
    }
}

// Provenance is bookkeeping, not part of what the rule says.
impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.premises == other.premises
            && self.conclusion == other.conclusion
    }
}

impl Eq for Rule {}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.id)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        if !self.premises.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "=> {}", self.conclusion)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({self})")
    }
}
