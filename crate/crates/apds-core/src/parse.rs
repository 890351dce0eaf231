//! Parser for the line-oriented textual system format.
//!
//! ```text
//! system e1
//! states P Q R S T
//! stack a b
//! rule i1: Q(x) => P(a x)
//! rule n2: => T(x)
//! rule ax: => Q(eps)
//! ```
//!
//! `#` starts a comment at the beginning of a line or after whitespace (a
//! `#` inside a token is part of the token, as in the state `P#a.b`).
//! Systems carrying closed premises or negative atoms declare
//! `mode relaxed` after the `system` line.

use thiserror::Error;

use crate::atom::{Atom, Polarity, Word};
use crate::rule::{Provenance, Rule};
use crate::sym::{StackSym, StateSym};
use crate::system::{Mode, System, SystemError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("undeclared stack symbol `{0}`")]
    UndeclaredStackSym(String),
    #[error("closed premise")]
    ClosedPremise,
    #[error("premise/conclusion polarity mixed")]
    MixedPolarity,
    #[error("negative atom outside relaxed mode")]
    NegativeAtom,
    #[error("conclusion must be open or `Q(eps)` with no premises")]
    BadConclusion,
    #[error("duplicate rule id `{0}`")]
    DuplicateRuleId(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate stack symbol `{0}`")]
    DuplicateStackSym(String),
    #[error("`{0}` is reserved and cannot be declared")]
    ReservedWord(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, col, kind }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("bad atom `{text}`: {msg}")]
pub struct AtomParseError {
    pub text: String,
    pub msg: String,
}

fn is_sym_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '#' | '.' | '~'))
}

fn is_rule_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '#' | '.' | '~' | ':'))
}

/// Strips a `#` comment: at line start, or where `#` follows whitespace.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

/// Parses a standalone atom, e.g. `P(a b x)`, `!Q(eps)`, `S(a b)`.
///
/// Symbols are not checked against any alphabet here.
pub fn parse_atom(text: &str) -> Result<Atom, AtomParseError> {
    parse_atom_inner(text.trim()).map_err(|msg| AtomParseError {
        text: text.trim().to_string(),
        msg,
    })
}

fn parse_atom_inner(frag: &str) -> Result<Atom, String> {
    let (polarity, rest) = match frag.strip_prefix('!') {
        Some(rest) => (Polarity::Negative, rest),
        None => (Polarity::Positive, frag),
    };
    let open_paren = rest.find('(').ok_or("missing `(`")?;
    let state_tok = &rest[..open_paren];
    if !is_sym_token(state_tok) {
        return Err(format!("bad state token `{state_tok}`"));
    }
    let after = &rest[open_paren + 1..];
    let close = after.rfind(')').ok_or("missing `)`")?;
    if !after[close + 1..].trim().is_empty() {
        return Err("trailing input after `)`".into());
    }
    let inner: Vec<&str> = after[..close].split_whitespace().collect();
    let state = StateSym::new(state_tok);

    let (tokens, open) = match inner.split_last() {
        None => return Err("empty atom body; write `eps` for the empty word".into()),
        Some((&"x", rest)) => (rest, true),
        Some(_) => (&inner[..], false),
    };
    if tokens == ["eps"] && !open {
        return Ok(Atom::closed(state, Word::empty()).with_polarity(polarity));
    }
    let mut syms = Vec::with_capacity(tokens.len());
    for t in tokens {
        if *t == "x" || *t == "eps" {
            return Err(format!("`{t}` can only appear alone at the end of an atom"));
        }
        if !is_sym_token(t) {
            return Err(format!("bad stack symbol token `{t}`"));
        }
        syms.push(StackSym::new(*t));
    }
    let word = Word::new(syms);
    let atom = if open { Atom::open(state, word) } else { Atom::closed(state, word) };
    Ok(atom.with_polarity(polarity))
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_meaningful(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.iter.by_ref() {
            let line = strip_comment(raw);
            if !line.trim().is_empty() {
                return Some((i + 1, line));
            }
        }
        None
    }
}

/// Parses and validates a system. The class marker is computed from the
/// rules, never trusted from the input.
pub fn parse_system(text: &str) -> Result<System, ParseError> {
    let mut lines = Lines { iter: text.lines().enumerate() };
    let syntax = |line: usize, msg: &str| {
        ParseError::new(line, 1, ParseErrorKind::Syntax(msg.to_string()))
    };

    let (lno, header) = lines
        .next_meaningful()
        .ok_or_else(|| syntax(1, "empty input; expected `system <name>`"))?;
    let name = match header.trim().strip_prefix("system") {
        Some(rest) if !rest.trim().is_empty() => rest.trim().to_string(),
        _ => return Err(syntax(lno, "expected `system <name>`")),
    };
    if !is_sym_token(&name) {
        return Err(syntax(lno, &format!("bad system name `{name}`")));
    }

    let (mut lno, mut line) = lines
        .next_meaningful()
        .ok_or_else(|| syntax(lno, "expected `states ...`"))?;
    let mode = if line.trim() == "mode relaxed" {
        let (l, s) = lines
            .next_meaningful()
            .ok_or_else(|| syntax(lno, "expected `states ...`"))?;
        lno = l;
        line = s;
        Mode::Relaxed
    } else {
        Mode::Strict
    };

    let states = parse_decl_line(lno, line, "states", ParseErrorKind::DuplicateState)?
        .into_iter()
        .map(StateSym::new)
        .collect::<Vec<_>>();

    let (lno, line) = lines
        .next_meaningful()
        .ok_or_else(|| syntax(lno, "expected `stack ...`"))?;
    let stack = parse_decl_line(lno, line, "stack", ParseErrorKind::DuplicateStackSym)?
        .into_iter()
        .map(StackSym::new)
        .collect::<Vec<_>>();

    let mut rules: Vec<Rule> = Vec::new();
    while let Some((lno, line)) = lines.next_meaningful() {
        let rule = parse_rule_line(lno, line, &states, &stack, mode)?;
        if rules.iter().any(|r| r.id() == rule.id()) {
            return Err(ParseError::new(
                lno,
                6,
                ParseErrorKind::DuplicateRuleId(rule.id().to_string()),
            ));
        }
        rules.push(rule);
    }

    System::new(name, states, stack, rules, mode).map_err(|e| {
        // alphabet and id errors were caught above with positions; anything
        // left is a construction-level defect reported without one
        let kind = match e {
            SystemError::DuplicateRuleId(id) => ParseErrorKind::DuplicateRuleId(id),
            other => ParseErrorKind::Syntax(other.to_string()),
        };
        ParseError::new(0, 0, kind)
    })
}

fn parse_decl_line(
    lno: usize,
    line: &str,
    keyword: &str,
    dup: fn(String) -> ParseErrorKind,
) -> Result<Vec<String>, ParseError> {
    let rest = line
        .trim()
        .strip_prefix(keyword)
        .ok_or_else(|| {
            ParseError::new(
                lno,
                1,
                ParseErrorKind::Syntax(format!("expected `{keyword} ...`")),
            )
        })?;
    if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
        return Err(ParseError::new(
            lno,
            1,
            ParseErrorKind::Syntax(format!("expected `{keyword} ...`")),
        ));
    }
    let mut out: Vec<String> = Vec::new();
    for tok in rest.split_whitespace() {
        if tok == "x" || tok == "eps" {
            return Err(ParseError::new(lno, 1, ParseErrorKind::ReservedWord(tok.into())));
        }
        if !is_sym_token(tok) {
            return Err(ParseError::new(
                lno,
                1,
                ParseErrorKind::Syntax(format!("bad token `{tok}`")),
            ));
        }
        if out.iter().any(|t| t == tok) {
            return Err(ParseError::new(lno, 1, dup(tok.to_string())));
        }
        out.push(tok.to_string());
    }
    Ok(out)
}

fn parse_rule_line(
    lno: usize,
    line: &str,
    states: &[StateSym],
    stack: &[StackSym],
    mode: Mode,
) -> Result<Rule, ParseError> {
    let err = |col: usize, kind: ParseErrorKind| ParseError::new(lno, col, kind);
    let syntax = |col: usize, msg: String| err(col, ParseErrorKind::Syntax(msg));

    let trimmed = line.trim();
    let body = trimmed
        .strip_prefix("rule")
        .filter(|r| r.starts_with(char::is_whitespace))
        .ok_or_else(|| syntax(1, format!("expected `rule <id>: ... => <atom>`, got `{trimmed}`")))?
        .trim();

    let (lhs, rhs) = body
        .split_once("=>")
        .ok_or_else(|| syntax(1, "missing `=>` in rule".into()))?;
    // premises contain no `:`, so the last colon before `=>` ends the id
    let colon = lhs
        .rfind(':')
        .ok_or_else(|| syntax(1, "missing `:` after rule id".into()))?;
    let id = lhs[..colon].trim();
    if !is_rule_id(id) {
        return Err(syntax(1, format!("bad rule id `{id}`")));
    }

    let check_atom = |frag: &str, col: usize| -> Result<Atom, ParseError> {
        let atom = parse_atom_inner(frag.trim())
            .map_err(|msg| syntax(col, format!("bad atom `{}`: {msg}", frag.trim())))?;
        if !states.contains(&atom.state) {
            return Err(err(col, ParseErrorKind::UndeclaredState(atom.state.to_string())));
        }
        for s in atom.prefix().syms() {
            if !stack.contains(s) {
                return Err(err(col, ParseErrorKind::UndeclaredStackSym(s.to_string())));
            }
        }
        if mode == Mode::Strict && atom.polarity == Polarity::Negative {
            return Err(err(col, ParseErrorKind::NegativeAtom));
        }
        Ok(atom)
    };

    let premise_text = lhs[colon + 1..].trim();
    let mut premises = Vec::new();
    if !premise_text.is_empty() {
        for frag in premise_text.split(',') {
            let col = frag.as_ptr() as usize - line.as_ptr() as usize + 1;
            let atom = check_atom(frag, col)?;
            if mode == Mode::Strict && atom.is_closed() {
                return Err(err(col, ParseErrorKind::ClosedPremise));
            }
            premises.push(atom);
        }
    }

    let concl_col = rhs.as_ptr() as usize - line.as_ptr() as usize + 1;
    let conclusion = check_atom(rhs, concl_col)?;
    if mode == Mode::Strict
        && conclusion.is_closed()
        && !(conclusion.word().is_empty() && premises.is_empty())
    {
        return Err(err(concl_col, ParseErrorKind::BadConclusion));
    }
    if premises.iter().any(|p| p.polarity != conclusion.polarity) {
        return Err(err(concl_col, ParseErrorKind::MixedPolarity));
    }

    Rule::new(id, premises, conclusion, Provenance::Original).map_err(|e| {
        err(1, ParseErrorKind::Syntax(e.to_string()))
    })
}
