//! Words, atoms, and tail-variable bindings.
//!
//! An atom is a possibly negated monadic proposition over a single implicit
//! tail variable `x`: `P(a b x)` is open, `P(a b)` and `P(eps)` are closed
//! (the latter is the configuration with the empty word).

use std::fmt;

use thiserror::Error;

use crate::sym::{StackSym, StateSym};

/// A finite sequence of stack symbols; the empty word is `eps`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<StackSym>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(syms: impl IntoIterator<Item = StackSym>) -> Self {
        Word(syms.into_iter().collect())
    }

    /// Convenience constructor from tokens, e.g. `Word::parse_tokens(["a", "b"])`.
    pub fn from_tokens<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Self {
        Word(tokens.into_iter().map(StackSym::new).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn syms(&self) -> &[StackSym] {
        &self.0
    }

    pub fn first(&self) -> Option<&StackSym> {
        self.0.first()
    }

    /// The concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut syms = self.0.clone();
        syms.extend(other.0.iter().cloned());
        Word(syms)
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Strips `prefix` from the front, if present.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        if self.starts_with(prefix) {
            Some(Word(self.0[prefix.len()..].to_vec()))
        } else {
            None
        }
    }

    /// The suffix starting at position `pos`.
    pub fn suffix(&self, pos: usize) -> Word {
        Word(self.0[pos..].to_vec())
    }

    /// The prefix of the first `len` symbols.
    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (i, sym) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{sym}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromIterator<StackSym> for Word {
    fn from_iter<T: IntoIterator<Item = StackSym>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn negated(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A possibly negated, possibly open atomic proposition.
///
/// `prefix` is the word before the tail variable; a closed atom has no tail
/// variable and `prefix` is its whole word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub polarity: Polarity,
    pub state: StateSym,
    prefix: Word,
    open: bool,
}

/// A substitution for the single tail variable: `x ↦ word` (closed) or
/// `x ↦ word·x` (open).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub word: Word,
    pub open: bool,
}

impl Binding {
    pub fn closed(word: Word) -> Self {
        Binding { word, open: false }
    }

    pub fn open(word: Word) -> Self {
        Binding { word, open: true }
    }

    /// The identity substitution `x ↦ x`.
    pub fn identity() -> Self {
        Binding { word: Word::empty(), open: true }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot instantiate the closed atom {0}")]
pub struct AlreadyClosed(pub Atom);

impl Atom {
    pub fn open(state: StateSym, prefix: Word) -> Self {
        Atom { polarity: Polarity::Positive, state, prefix, open: true }
    }

    pub fn closed(state: StateSym, word: Word) -> Self {
        Atom { polarity: Polarity::Positive, state, prefix: word, open: false }
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    pub fn negated(&self) -> Atom {
        let mut a = self.clone();
        a.polarity = a.polarity.negated();
        a
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn is_closed(&self) -> bool {
        !self.open
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }

    /// The word before the tail variable (the whole word for closed atoms).
    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    /// The word of a closed atom (configuration).
    pub fn word(&self) -> &Word {
        debug_assert!(!self.open, "word() on an open atom");
        &self.prefix
    }

    /// Substitutes the closed word `w` for the tail variable.
    pub fn instantiate(&self, w: &Word) -> Result<Atom, AlreadyClosed> {
        if !self.open {
            return Err(AlreadyClosed(self.clone()));
        }
        Ok(Atom {
            polarity: self.polarity,
            state: self.state.clone(),
            prefix: self.prefix.concat(w),
            open: false,
        })
    }

    /// Applies a tail binding. Closed atoms are unchanged.
    pub fn bind(&self, b: &Binding) -> Atom {
        if !self.open {
            return self.clone();
        }
        Atom {
            polarity: self.polarity,
            state: self.state.clone(),
            prefix: self.prefix.concat(&b.word),
            open: b.open,
        }
    }

    /// The binding under which `self` (a rule conclusion) yields `label`,
    /// if any: prefix matching for open conclusions, exact equality for
    /// closed ones.
    pub fn match_against(&self, label: &Atom) -> Option<Binding> {
        if self.polarity != label.polarity || self.state != label.state {
            return None;
        }
        if self.open {
            let rest = label.prefix.strip_prefix(&self.prefix)?;
            Some(Binding { word: rest, open: label.open })
        } else if label == self {
            Some(Binding::closed(Word::empty()))
        } else {
            None
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.polarity == Polarity::Negative {
            f.write_str("!")?;
        }
        write!(f, "{}(", self.state)?;
        match (self.prefix.is_empty(), self.open) {
            (true, true) => f.write_str("x")?,
            (true, false) => f.write_str("eps")?,
            (false, true) => write!(f, "{} x", self.prefix)?,
            (false, false) => write!(f, "{}", self.prefix)?,
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Atom({self})")
    }
}
