//! Names, killer labels and the small enumerations shared by every calculus.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A channel/action name.
///
/// Parser-produced names carry only `text` (an identifier matching
/// `[a-zA-Z][a-zA-Z0-9_]*`). Machine-generated names additionally carry a
/// `fresh` index so they can never collide with user input:
///
/// * `Name { text: "", fresh: Some(i) }` prints as `#i` — canonical bound
///   names assigned by alpha-canonicalization;
/// * `Name { text: "~", fresh: Some(i) }` prints as `~i` — candidate names
///   for early input instantiation;
/// * `Name { text: t, fresh: Some(i) }` prints as `t#i` — capture-avoiding
///   renames produced during substitution.
///
/// Two names are equal iff both `text` and `fresh` are equal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Name {
    pub text: String,
    pub fresh: Option<u32>,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name {
            text: text.into(),
            fresh: None,
        }
    }

    /// Canonical bound name `#i`.
    pub fn canonical(i: u32) -> Self {
        Name {
            text: String::new(),
            fresh: Some(i),
        }
    }

    /// Input-instantiation candidate `~i`.
    pub fn input_candidate(i: u32) -> Self {
        Name {
            text: "~".into(),
            fresh: Some(i),
        }
    }

    /// Smallest fresh variant of `base` avoiding every name in `avoid`.
    pub fn freshen(base: &Name, avoid: &BTreeSet<Name>) -> Name {
        let mut i = base.fresh.map_or(0, |i| i + 1);
        loop {
            let candidate = Name {
                text: base.text.clone(),
                fresh: Some(i),
            };
            if !avoid.contains(&candidate) {
                return candidate;
            }
            i += 1;
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fresh {
            None => write!(f, "{}", self.text),
            Some(i) if self.text.is_empty() => write!(f, "#{i}"),
            Some(i) if self.text == "~" => write!(f, "~{i}"),
            Some(i) => write!(f, "{}#{i}", self.text),
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A kill-scope label. Killer labels live in their own namespace: they never
/// unify with a [`Name`] and are never exchanged in communications.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KillerLabel {
    pub text: String,
}

impl KillerLabel {
    pub fn new(text: impl Into<String>) -> Self {
        KillerLabel { text: text.into() }
    }
}

impl fmt::Display for KillerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text)
    }
}

impl fmt::Debug for KillerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Action priority level: exactly two levels exist.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum PriorityLevel {
    Ordinary,
    /// Underlined (written `_a` in the surface syntax).
    Prioritized,
}

impl PriorityLevel {
    pub fn is_prioritized(self) -> bool {
        matches!(self, PriorityLevel::Prioritized)
    }
}

/// Polarity of a CCS-style action: `a` is an input, `'a` its co-action.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Polarity {
    Input,
    Output,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Input => Polarity::Output,
            Polarity::Output => Polarity::Input,
        }
    }
}
