//! Interned state and stack-symbol identifiers.
//!
//! States and stack symbols live in disjoint namespaces: the same token may
//! name a state in one and a stack symbol in the other without the two ever
//! comparing equal, because the types are distinct.

use std::fmt;
use std::sync::Arc;

macro_rules! symbol_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            /// Creates a symbol from a nonempty token.
            pub fn new(token: impl AsRef<str>) -> Self {
                let token = token.as_ref();
                assert!(!token.is_empty(), "symbol token must be nonempty");
                Self(Arc::from(token))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), &*self.0)
            }
        }

        impl From<&str> for $name {
            fn from(token: &str) -> Self {
                Self::new(token)
            }
        }
    };
}

symbol_type! {
    /// A state (monadic predicate symbol), e.g. `P` in `P(a b)`.
    StateSym
}

symbol_type! {
    /// A stack symbol (monadic function symbol), e.g. `a` in `P(a b)`.
    StackSym
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_is_by_identifier() {
        assert_eq!(StateSym::new("P"), StateSym::new("P"));
        assert_ne!(StateSym::new("P"), StateSym::new("Q"));
        assert_eq!(StackSym::new("a").as_str(), "a");
    }

    #[test]
    fn ordering_is_by_identifier() {
        assert!(StateSym::new("P") < StateSym::new("Q"));
        assert!(StackSym::new("a") < StackSym::new("b"));
    }

    #[test]
    #[should_panic]
    fn empty_token_rejected() {
        let _ = StateSym::new("");
    }
}
