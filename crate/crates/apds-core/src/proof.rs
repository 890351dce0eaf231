//! Proof trees, the proof checker, cut detection and elimination, and
//! replay of saturated rules into their underlying derivations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atom::{Atom, Binding};
use crate::parse::parse_atom;
use crate::rule::{Provenance, RuleKind};
use crate::saturate::{self, ExpandError};
use crate::system::System;

/// A finite rule-instance tree.
///
/// Closed proofs consist of `Node`s only. Derivation skeletons additionally
/// use `Hypothesis` leaves (open atoms proved elsewhere). Prefixes of
/// co-inductive proofs use `Continuation` leaves: a pending goal together
/// with the finite proof that guarantees it can be expanded further.
#[derive(Clone, PartialEq, Eq)]
pub enum ProofTree {
    Node { label: Atom, rule: String, children: Vec<ProofTree> },
    Hypothesis { label: Atom },
    Continuation { label: Atom, justification: Option<Box<ProofTree>> },
}

impl ProofTree {
    pub fn node(label: Atom, rule: impl Into<String>, children: Vec<ProofTree>) -> Self {
        ProofTree::Node { label, rule: rule.into(), children }
    }

    pub fn hypothesis(label: Atom) -> Self {
        ProofTree::Hypothesis { label }
    }

    pub fn continuation(label: Atom, justification: Option<ProofTree>) -> Self {
        ProofTree::Continuation { label, justification: justification.map(Box::new) }
    }

    pub fn label(&self) -> &Atom {
        match self {
            ProofTree::Node { label, .. }
            | ProofTree::Hypothesis { label }
            | ProofTree::Continuation { label, .. } => label,
        }
    }

    pub fn rule_id(&self) -> Option<&str> {
        match self {
            ProofTree::Node { rule, .. } => Some(rule),
            _ => None,
        }
    }

    pub fn children(&self) -> &[ProofTree] {
        match self {
            ProofTree::Node { children, .. } => children,
            _ => &[],
        }
    }

    pub fn subtree(&self, path: &[usize]) -> Option<&ProofTree> {
        let mut cur = self;
        for &i in path {
            cur = cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Number of tree nodes, all variants included.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(ProofTree::size).sum::<usize>()
    }

    pub fn hypotheses(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a ProofTree, out: &mut Vec<&'a Atom>) {
            match t {
                ProofTree::Hypothesis { label } => out.push(label),
                ProofTree::Node { children, .. } => {
                    children.iter().for_each(|c| walk(c, out))
                }
                ProofTree::Continuation { .. } => {}
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn continuations(&self) -> Vec<&ProofTree> {
        let mut out = Vec::new();
        fn walk<'a>(t: &'a ProofTree, out: &mut Vec<&'a ProofTree>) {
            match t {
                ProofTree::Continuation { .. } => out.push(t),
                ProofTree::Node { children, .. } => {
                    children.iter().for_each(|c| walk(c, out))
                }
                ProofTree::Hypothesis { .. } => {}
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&JsonTree::from(self))
            .expect("proof serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<ProofTree, ProofJsonError> {
        let raw: JsonTree = serde_json::from_str(text)?;
        raw.try_into()
    }
}

impl fmt::Debug for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofTree::Node { label, rule, children } => {
                write!(f, "{label}[{rule}]")?;
                if !children.is_empty() {
                    write!(f, "{children:?}")?;
                }
                Ok(())
            }
            ProofTree::Hypothesis { label } => write!(f, "hyp {label}"),
            ProofTree::Continuation { label, .. } => write!(f, "... {label}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonTree {
    Node { atom: String, rule: String, children: Vec<JsonTree> },
    Hyp { hyp: String },
    Continue {
        #[serde(rename = "continue")]
        pending: String,
    },
}

impl From<&ProofTree> for JsonTree {
    fn from(t: &ProofTree) -> Self {
        match t {
            ProofTree::Node { label, rule, children } => JsonTree::Node {
                atom: label.to_string(),
                rule: rule.clone(),
                children: children.iter().map(JsonTree::from).collect(),
            },
            ProofTree::Hypothesis { label } => JsonTree::Hyp { hyp: label.to_string() },
            ProofTree::Continuation { label, .. } => {
                JsonTree::Continue { pending: label.to_string() }
            }
        }
    }
}

impl TryFrom<JsonTree> for ProofTree {
    type Error = ProofJsonError;

    fn try_from(raw: JsonTree) -> Result<Self, Self::Error> {
        Ok(match raw {
            JsonTree::Node { atom, rule, children } => ProofTree::Node {
                label: parse_atom(&atom)?,
                rule,
                children: children
                    .into_iter()
                    .map(ProofTree::try_from)
                    .collect::<Result<_, _>>()?,
            },
            JsonTree::Hyp { hyp } => ProofTree::Hypothesis { label: parse_atom(&hyp)? },
            JsonTree::Continue { pending } => {
                ProofTree::Continuation { label: parse_atom(&pending)?, justification: None }
            }
        })
    }
}

#[derive(Debug, Error)]
pub enum ProofJsonError {
    #[error("bad proof JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Atom(#[from] crate::parse::AtomParseError),
}

/// The cut-elimination termination measure: (elim nodes, neutral nodes),
/// compared lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure(pub usize, pub usize);

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Counts elim-kind and neutral-kind rule nodes of `p` in `s`.
pub fn measure(s: &System, p: &ProofTree) -> Measure {
    let mut m = Measure(0, 0);
    fn walk(s: &System, t: &ProofTree, m: &mut Measure) {
        if let ProofTree::Node { rule, children, .. } = t {
            match s.rule(rule).map(|r| r.kind()) {
                Some(RuleKind::Elim) => m.0 += 1,
                Some(RuleKind::Neutral) => m.1 += 1,
                _ => {}
            }
            children.iter().for_each(|c| walk(s, c, m));
        }
    }
    walk(s, p, &mut m);
    m
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckIssue {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub kind: CheckIssueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckIssueKind {
    #[error("unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("label {label} is not an instance of the conclusion of rule {rule}")]
    ConclusionMismatch { label: Atom, rule: String },
    #[error("rule {rule} expects {expected} premises, found {found} children")]
    PremiseCount { rule: String, expected: usize, found: usize },
    #[error("child proves {found}, expected premise instance {expected}")]
    PremiseMismatch { expected: Atom, found: Atom },
    #[error("hypothesis leaf {0} not admitted")]
    HypothesisNotAdmitted(Atom),
    #[error("continuation marker {0} not admitted")]
    ContinuationNotAdmitted(Atom),
}

impl fmt::Display for CheckIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?}: {}", self.path, self.kind)
    }
}

/// Checks that every node of `p` is an instance of a rule of `s` whose
/// premise instances are exactly the children's labels.
///
/// With `admit_hypotheses`, hypothesis and continuation leaves are accepted
/// (that is how derivation skeletons and co-inductive prefixes are checked).
pub fn check_proof(
    s: &System,
    p: &ProofTree,
    admit_hypotheses: bool,
) -> Result<(), Vec<CheckIssue>> {
    let mut issues = Vec::new();
    walk_check(s, p, admit_hypotheses, &mut Vec::new(), &mut issues);
    if issues.is_empty() {
        Ok(())
    } else {
        Err(issues)
    }
}

fn walk_check(
    s: &System,
    t: &ProofTree,
    admit: bool,
    path: &mut Vec<usize>,
    issues: &mut Vec<CheckIssue>,
) {
    match t {
        ProofTree::Hypothesis { label } => {
            if !admit {
                issues.push(CheckIssue {
                    path: path.clone(),
                    kind: CheckIssueKind::HypothesisNotAdmitted(label.clone()),
                });
            }
        }
        ProofTree::Continuation { label, .. } => {
            if !admit {
                issues.push(CheckIssue {
                    path: path.clone(),
                    kind: CheckIssueKind::ContinuationNotAdmitted(label.clone()),
                });
            }
        }
        ProofTree::Node { label, rule, children } => {
            match s.rule(rule) {
                None => issues.push(CheckIssue {
                    path: path.clone(),
                    kind: CheckIssueKind::UnknownRule(rule.clone()),
                }),
                Some(r) => match r.conclusion().match_against(label) {
                    None => issues.push(CheckIssue {
                        path: path.clone(),
                        kind: CheckIssueKind::ConclusionMismatch {
                            label: label.clone(),
                            rule: rule.clone(),
                        },
                    }),
                    Some(binding) => {
                        if children.len() != r.premises().len() {
                            issues.push(CheckIssue {
                                path: path.clone(),
                                kind: CheckIssueKind::PremiseCount {
                                    rule: rule.clone(),
                                    expected: r.premises().len(),
                                    found: children.len(),
                                },
                            });
                        } else {
                            // a wrong child label means the rule application
                            // *here* is invalid, so report at this node
                            for (premise, child) in r.premises().iter().zip(children) {
                                let expected = premise.bind(&binding);
                                if child.label() != &expected {
                                    issues.push(CheckIssue {
                                        path: path.clone(),
                                        kind: CheckIssueKind::PremiseMismatch {
                                            expected,
                                            found: child.label().clone(),
                                        },
                                    });
                                }
                            }
                        }
                    }
                },
            }
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                walk_check(s, c, admit, path, issues);
                path.pop();
            }
        }
    }
}

/// The three cut shapes of saturated systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutShape {
    /// An intro feeding the head premise of an elim.
    IntroElim,
    /// A neutral at `R(γ w)` whose children all end with intros.
    IntroNeutral,
    /// A neutral at `R(eps)` whose children all end with eps-intros.
    EpsNeutral,
}

impl fmt::Display for CutShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutShape::IntroElim => "intro-elim",
            CutShape::IntroNeutral => "intro-neutral",
            CutShape::EpsNeutral => "eps-neutral",
        })
    }
}

fn ends_with_kind(s: &System, t: &ProofTree, kind: RuleKind) -> bool {
    matches!(t, ProofTree::Node { rule, .. } if s.rule(rule).is_some_and(|r| r.kind() == kind))
}

fn cut_shape(s: &System, t: &ProofTree) -> Option<CutShape> {
    let ProofTree::Node { label, rule, children } = t else {
        return None;
    };
    let r = s.rule(rule)?;
    match r.kind() {
        RuleKind::Elim => {
            let head = r.elim_head()?;
            ends_with_kind(s, children.get(head)?, RuleKind::Intro)
                .then_some(CutShape::IntroElim)
        }
        RuleKind::Neutral => {
            if !label.prefix().is_empty() {
                children
                    .iter()
                    .all(|c| ends_with_kind(s, c, RuleKind::Intro))
                    .then_some(CutShape::IntroNeutral)
            } else if label.is_closed() {
                children
                    .iter()
                    .all(|c| ends_with_kind(s, c, RuleKind::EpsIntro))
                    .then_some(CutShape::EpsNeutral)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Position of the leftmost-innermost cut, if any.
pub fn find_cut(s: &System, p: &ProofTree) -> Option<Vec<usize>> {
    fn walk(s: &System, t: &ProofTree, path: &mut Vec<usize>) -> Option<Vec<usize>> {
        for (i, c) in t.children().iter().enumerate() {
            path.push(i);
            if let Some(found) = walk(s, c, path) {
                return Some(found);
            }
            path.pop();
        }
        cut_shape(s, t).map(|_| path.clone())
    }
    walk(s, p, &mut Vec::new())
}

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("no subtree at position {0:?}")]
    InvalidPosition(Vec<usize>),
    #[error("subtree at {0:?} is not a cut")]
    NotACut(Vec<usize>),
    #[error("system is not saturated: no rule concludes {conclusion} from {premises:?}")]
    MissingSaturatedRule { conclusion: Atom, premises: Vec<Atom> },
    #[error("proof does not check: no child proves {0}")]
    MalformedProof(Atom),
}

/// Rewrites the cut at `pos` into a single instance of the matching
/// saturated rule. The root label is preserved and the measure strictly
/// decreases.
pub fn reduce_cut(s: &System, p: &ProofTree, pos: &[usize]) -> Result<ProofTree, ReduceError> {
    let sub = p
        .subtree(pos)
        .ok_or_else(|| ReduceError::InvalidPosition(pos.to_vec()))?;
    let shape = cut_shape(s, sub).ok_or_else(|| ReduceError::NotACut(pos.to_vec()))?;
    let ProofTree::Node { label, rule, children } = sub else {
        unreachable!("cuts are nodes");
    };
    let r = s.rule(rule).expect("cut_shape resolved the rule");

    let replacement = match shape {
        CutShape::IntroElim => {
            let head = r.elim_head().expect("shape checked");
            let ProofTree::Node { rule: intro_id, children: intro_subs, .. } = &children[head]
            else {
                unreachable!("head child of an intro-elim cut is a node");
            };
            let intro = s.rule(intro_id).expect("cut_shape resolved the child rule");
            let mut premises: Vec<Atom> = intro.premises().to_vec();
            premises.extend(
                r.premises()
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != head)
                    .map(|(_, a)| a.clone()),
            );
            let pool: Vec<&ProofTree> = intro_subs
                .iter()
                .chain(children.iter().enumerate().filter(|(j, _)| *j != head).map(|(_, c)| c))
                .collect();
            build_reduced_node(s, label, r.conclusion().clone(), premises, &pool)?
        }
        CutShape::IntroNeutral => {
            let symbol = label.prefix().first().expect("shape checked").clone();
            let mut premises: Vec<Atom> = Vec::new();
            let mut pool: Vec<&ProofTree> = Vec::new();
            for c in children {
                let ProofTree::Node { rule: intro_id, children: subs, .. } = c else {
                    unreachable!("children of an intro-neutral cut are nodes");
                };
                let intro = s.rule(intro_id).expect("cut_shape resolved the child rule");
                premises.extend(intro.premises().iter().cloned());
                pool.extend(subs.iter());
            }
            let conclusion = Atom::open(
                r.conclusion().state.clone(),
                crate::atom::Word::new([symbol]),
            )
            .with_polarity(r.conclusion().polarity);
            build_reduced_node(s, label, conclusion, premises, &pool)?
        }
        CutShape::EpsNeutral => {
            let conclusion = Atom::closed(r.conclusion().state.clone(), crate::atom::Word::empty())
                .with_polarity(r.conclusion().polarity);
            build_reduced_node(s, label, conclusion, Vec::new(), &[])?
        }
    };

    Ok(replace_at(p, pos, replacement))
}

/// Looks up the saturated rule with exactly this judgment and rebuilds the
/// node, matching premise instances to subproofs from `pool` by label.
fn build_reduced_node(
    s: &System,
    label: &Atom,
    conclusion: Atom,
    premises: Vec<Atom>,
    pool: &[&ProofTree],
) -> Result<ProofTree, ReduceError> {
    let mut premises = premises;
    premises.sort();
    premises.dedup();
    let found = s
        .rules()
        .iter()
        .find(|r| r.conclusion() == &conclusion && r.premises() == premises.as_slice())
        .ok_or(ReduceError::MissingSaturatedRule { conclusion, premises: premises.clone() })?;
    let binding = found
        .conclusion()
        .match_against(label)
        .expect("reduced rule concludes the cut label");
    let mut used = vec![false; pool.len()];
    let mut new_children = Vec::with_capacity(found.premises().len());
    for premise in found.premises() {
        let expected = premise.bind(&binding);
        let idx = pool
            .iter()
            .enumerate()
            .position(|(j, c)| !used[j] && c.label() == &expected)
            .ok_or(ReduceError::MalformedProof(expected))?;
        used[idx] = true;
        new_children.push(pool[idx].clone());
    }
    Ok(ProofTree::node(label.clone(), found.id(), new_children))
}

fn replace_at(p: &ProofTree, pos: &[usize], new: ProofTree) -> ProofTree {
    match pos.split_first() {
        None => new,
        Some((&i, rest)) => {
            let ProofTree::Node { label, rule, children } = p else {
                unreachable!("path was validated");
            };
            let mut children = children.clone();
            children[i] = replace_at(&children[i], rest, new);
            ProofTree::Node { label: label.clone(), rule: rule.clone(), children }
        }
    }
}

/// One step of a reduction trace.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub position: Vec<usize>,
    pub shape: CutShape,
    /// The saturated rule the redex was replaced with.
    pub rule: String,
    pub measure_after: Measure,
}

/// Iterates leftmost-innermost cut reduction to a cut-free proof of the
/// same root label. Terminates because the measure strictly decreases.
pub fn eliminate_cuts(
    s: &System,
    p: &ProofTree,
) -> Result<(ProofTree, Vec<ReductionStep>), ReduceError> {
    let mut current = p.clone();
    let mut trace = Vec::new();
    let mut last = measure(s, &current);
    while let Some(pos) = find_cut(s, &current) {
        let shape = cut_shape(s, current.subtree(&pos).unwrap()).unwrap();
        current = reduce_cut(s, &current, &pos)?;
        let now = measure(s, &current);
        debug_assert!(now < last, "measure must decrease: {last} -> {now}");
        last = now;
        let rule = current
            .subtree(&pos)
            .and_then(ProofTree::rule_id)
            .unwrap_or_default()
            .to_string();
        trace.push(ReductionStep { position: pos, shape, rule, measure_after: now });
    }
    Ok((current, trace))
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("unknown rule id `{0}`")]
    UnknownRule(String),
    #[error("label {label} does not match rule {rule}")]
    Mismatch { label: Atom, rule: String },
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

/// Replaces every saturation-provenance rule node by the derivation of that
/// rule in the pre-saturation system, grafting the node's subproofs onto
/// the derivation's hypothesis leaves.
pub fn replay(s: &System, p: &ProofTree) -> Result<ProofTree, ReplayError> {
    match p {
        ProofTree::Hypothesis { .. } | ProofTree::Continuation { .. } => Ok(p.clone()),
        ProofTree::Node { label, rule, children } => {
            let replayed: Vec<ProofTree> = children
                .iter()
                .map(|c| replay(s, c))
                .collect::<Result<_, _>>()?;
            let r = s
                .rule(rule)
                .ok_or_else(|| ReplayError::UnknownRule(rule.clone()))?;
            if !matches!(r.provenance(), Provenance::Saturation(_)) {
                return Ok(ProofTree::node(label.clone(), rule.clone(), replayed));
            }
            let skeleton = saturate::expand_saturated_rule(s, rule)?;
            let binding = r
                .conclusion()
                .match_against(label)
                .ok_or_else(|| ReplayError::Mismatch { label: label.clone(), rule: rule.clone() })?;
            Ok(graft_skeleton(&skeleton, &binding, r.premises(), &replayed))
        }
    }
}

/// Instantiates a skeleton at `binding` and replaces each hypothesis leaf by
/// the subproof of the corresponding premise (`hyp_premises[i]` ↦ `subs[i]`).
pub(crate) fn graft_skeleton(
    skeleton: &ProofTree,
    binding: &Binding,
    hyp_premises: &[Atom],
    subs: &[ProofTree],
) -> ProofTree {
    match skeleton {
        ProofTree::Hypothesis { label } => {
            let i = hyp_premises
                .iter()
                .position(|p| p == label)
                .expect("skeleton hypotheses are among the rule's premises");
            subs[i].clone()
        }
        ProofTree::Node { label, rule, children } => ProofTree::Node {
            label: label.bind(binding),
            rule: rule.clone(),
            children: children
                .iter()
                .map(|c| graft_skeleton(c, binding, hyp_premises, subs))
                .collect(),
        },
        ProofTree::Continuation { .. } => skeleton.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{atom, e1, e1_proof_sab, e1s};
    use crate::saturate::{extract_multi_automaton, saturate};

    fn i7_skeleton() -> ProofTree {
        ProofTree::node(
            atom("Q(a x)"),
            "n1",
            vec![
                ProofTree::node(atom("P(a x)"), "i1", vec![ProofTree::hypothesis(atom("Q(x)"))]),
                ProofTree::node(atom("R(a x)"), "i3", vec![ProofTree::hypothesis(atom("T(x)"))]),
            ],
        )
    }

    /// The endpoint of the worked reduction sequence.
    fn cut_free_sab() -> ProofTree {
        ProofTree::node(
            atom("S(a b)"),
            "i8",
            vec![
                ProofTree::node(
                    atom("Q(b)"),
                    "i10",
                    vec![ProofTree::node(atom("T(eps)"), "i5", vec![])],
                ),
                ProofTree::node(atom("T(b)"), "i9", vec![]),
            ],
        )
    }

    #[test]
    fn the_displayed_proof_checks() {
        check_proof(&e1(), &e1_proof_sab(), false).expect("Example proof checks");
    }

    #[test]
    fn relabeled_root_fails_at_the_root() {
        let ProofTree::Node { rule, children, .. } = e1_proof_sab() else { unreachable!() };
        let bad = ProofTree::Node { label: atom("S(b a)"), rule, children };
        let issues = check_proof(&e1(), &bad, false).unwrap_err();
        assert!(issues.iter().any(|i| i.path.is_empty()));
    }

    #[test]
    fn skeleton_checks_only_with_hypotheses_admitted() {
        let sk = i7_skeleton();
        check_proof(&e1(), &sk, true).expect("admitted skeleton checks");
        let issues = check_proof(&e1(), &sk, false).unwrap_err();
        assert!(issues
            .iter()
            .any(|i| matches!(i.kind, CheckIssueKind::HypothesisNotAdmitted(_))));
    }

    #[test]
    fn unknown_rule_is_reported() {
        let p = ProofTree::node(atom("T(eps)"), "nope", vec![]);
        let issues = check_proof(&e1(), &p, false).unwrap_err();
        assert!(matches!(issues[0].kind, CheckIssueKind::UnknownRule(_)));
    }

    #[test]
    fn measure_counts_elims_and_neutrals() {
        let s = e1();
        assert_eq!(measure(&s, &e1_proof_sab()), Measure(1, 4));
        assert_eq!(measure(&e1s(), &cut_free_sab()), Measure(0, 0));
        assert_eq!(measure(&s, &i7_skeleton()), Measure(0, 1));
    }

    #[test]
    fn measure_order_is_lexicographic() {
        assert!(Measure(0, 5) < Measure(1, 0));
        assert!(Measure(1, 0) < Measure(1, 1));
    }

    #[test]
    fn find_cut_locates_the_innermost_eps_cut() {
        let s = e1s();
        let p = e1_proof_sab();
        let pos = find_cut(&s, &p).expect("the displayed proof has a cut");
        assert_eq!(pos, vec![0, 0, 0, 0, 0, 0]);
        let sub = p.subtree(&pos).unwrap();
        assert_eq!(sub.label(), &atom("T(eps)"));
        assert_eq!(sub.rule_id(), Some("n2"));
    }

    #[test]
    fn cut_free_proofs_have_no_cut() {
        assert_eq!(find_cut(&e1s(), &cut_free_sab()), None);
        let single = ProofTree::node(atom("T(eps)"), "i5", vec![]);
        assert_eq!(find_cut(&e1s(), &single), None);
    }

    #[test]
    fn reduce_eps_cut_to_eps_intro() {
        let s = e1s();
        let p = e1_proof_sab();
        let pos = vec![0, 0, 0, 0, 0, 0];
        let reduced = reduce_cut(&s, &p, &pos).unwrap();
        assert_eq!(
            reduced.subtree(&pos).unwrap(),
            &ProofTree::node(atom("T(eps)"), "i5", vec![])
        );
        assert!(measure(&s, &reduced) < measure(&s, &p));
    }

    #[test]
    fn reduce_intro_elim_cut_at_the_root() {
        let s = e1s();
        let p = e1_proof_sab();
        // the root e1 over i1 is an intro-elim cut; reducing it applies n3
        let reduced = reduce_cut(&s, &p, &[]).unwrap();
        assert_eq!(reduced.label(), &atom("S(a b)"));
        assert_eq!(reduced.rule_id(), Some("n3"));
        assert_eq!(reduced.children().len(), 1);
        assert_eq!(reduced.children()[0].label(), &atom("Q(a b)"));
        check_proof(&s, &reduced, false).expect("reduced proof checks");
    }

    #[test]
    fn reduce_intro_neutral_cut_to_saturated_intro() {
        let s = e1s();
        let p = e1_proof_sab();
        // Q(b) by n1 over i2, i4 is an intro-neutral cut; reducing applies i10
        let pos = vec![0, 0, 0, 0];
        assert_eq!(p.subtree(&pos).unwrap().label(), &atom("Q(b)"));
        let reduced = reduce_cut(&s, &p, &pos).unwrap();
        let sub = reduced.subtree(&pos).unwrap();
        assert_eq!(sub.rule_id(), Some("i10"));
        assert_eq!(sub.children().len(), 1);
        assert_eq!(sub.children()[0].label(), &atom("T(eps)"));
        check_proof(&s, &reduced, false).expect("reduced proof checks");
    }

    #[test]
    fn reducing_a_non_cut_fails() {
        let s = e1s();
        let p = cut_free_sab();
        assert!(matches!(reduce_cut(&s, &p, &[]), Err(ReduceError::NotACut(_))));
        assert!(matches!(reduce_cut(&s, &p, &[9]), Err(ReduceError::InvalidPosition(_))));
    }

    #[test]
    fn missing_saturated_rule_is_reported() {
        // over the unsaturated system the eps cut has no replacement
        let s = e1();
        let p = e1_proof_sab();
        let pos = find_cut(&s, &p).unwrap();
        assert!(matches!(
            reduce_cut(&s, &p, &pos),
            Err(ReduceError::MissingSaturatedRule { .. })
        ));
    }

    #[test]
    fn eliminate_cuts_reaches_the_displayed_normal_form() {
        let s = e1s();
        let p = e1_proof_sab();
        assert_eq!(measure(&s, &p), Measure(1, 4));
        let (result, trace) = eliminate_cuts(&s, &p).unwrap();
        assert_eq!(result, cut_free_sab());
        assert_eq!(trace.len(), 6);
        // strict lexicographic descent along the whole trace
        let mut last = Measure(1, 4);
        for step in &trace {
            assert!(step.measure_after < last, "{} !< {last}", step.measure_after);
            last = step.measure_after;
        }
        assert_eq!(find_cut(&s, &result), None);
        check_proof(&s, &result, false).expect("normal form checks");
        // cut-free and closed over a saturated system: intro rules only
        fn all_intro(s: &crate::system::System, t: &ProofTree) -> bool {
            t.rule_id()
                .and_then(|id| s.rule(id))
                .is_some_and(|r| r.kind().is_intro_like())
                && t.children().iter().all(|c| all_intro(s, c))
        }
        assert!(all_intro(&s, &result));
    }

    #[test]
    fn cut_free_input_is_unchanged() {
        let s = e1s();
        let p = cut_free_sab();
        let (result, trace) = eliminate_cuts(&s, &p).unwrap();
        assert_eq!(result, p);
        assert!(trace.is_empty());
    }

    #[test]
    fn replay_expands_saturated_rules_into_original_derivations() {
        let base = e1();
        let sat = saturate(&base);
        let automaton = extract_multi_automaton(&sat);
        let cut_free = crate::decide::extract_cut_free_proof(&automaton, &atom("S(a b)"))
            .unwrap()
            .expect("S(a b) is provable");
        let replayed = replay(&sat, &cut_free).unwrap();
        assert_eq!(replayed.label(), &atom("S(a b)"));
        check_proof(&base, &replayed, false).expect("replayed proof checks against e1");
    }

    #[test]
    fn replay_keeps_original_rules_untouched() {
        let sat = saturate(&e1());
        let p = e1_proof_sab();
        assert_eq!(replay(&sat, &p).unwrap(), p);
    }

    #[test]
    fn replay_of_an_eps_intro_reveals_the_neutral_instance() {
        let sat = saturate(&e1());
        let id = sat
            .rules()
            .iter()
            .find(|r| r.conclusion() == &atom("T(eps)"))
            .unwrap()
            .id()
            .to_string();
        let p = ProofTree::node(atom("T(eps)"), id, vec![]);
        let replayed = replay(&sat, &p).unwrap();
        assert_eq!(replayed, ProofTree::node(atom("T(eps)"), "n2", vec![]));
    }

    #[test]
    fn json_roundtrip_with_all_leaf_kinds() {
        let p = ProofTree::node(
            atom("S(a b)"),
            "i8",
            vec![
                ProofTree::hypothesis(atom("Q(x)")),
                ProofTree::continuation(atom("!P(a a)"), None),
            ],
        );
        let back = ProofTree::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(p.to_json().contains("\"hyp\": \"Q(x)\""));
        assert!(p.to_json().contains("\"continue\": \"!P(a a)\""));
    }
}
