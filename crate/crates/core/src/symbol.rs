//! Event symbols and words.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single event label.
///
/// Usually one Latin letter, but any short token without whitespace or
/// commas is accepted so alphabets can grow past 52 symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Symbol(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("symbol must not be empty")]
    Empty,
    #[error("symbol {0:?} contains whitespace, a comma or a control character")]
    IllegalCharacter(String),
}

impl Symbol {
    pub fn new(token: impl AsRef<str>) -> Result<Self, SymbolError> {
        let token = token.as_ref();
        if token.is_empty() {
            return Err(SymbolError::Empty);
        }
        if token
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || c == ',')
        {
            return Err(SymbolError::IllegalCharacter(token.to_owned()));
        }
        Ok(Symbol(Arc::from(token)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the token is exactly one character.
    pub fn is_char(&self) -> bool {
        let mut chars = self.0.chars();
        chars.next().is_some() && chars.next().is_none()
    }
}

impl TryFrom<String> for Symbol {
    type Error = SymbolError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Symbol::new(value)
    }
}

impl TryFrom<char> for Symbol {
    type Error = SymbolError;

    fn try_from(value: char) -> Result<Self, Self::Error> {
        Symbol::new(value.to_string())
    }
}

impl From<Symbol> for String {
    fn from(value: Symbol) -> Self {
        value.0.to_string()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Parses a word.
///
/// Text containing whitespace or commas is split on them into tokens;
/// otherwise every character is one symbol. `"abc"` and `"a b c"` parse to
/// the same word.
pub fn parse_word(text: &str) -> Result<Vec<Symbol>, SymbolError> {
    let text = text.trim();
    if text.contains(|c: char| c.is_whitespace() || c == ',') {
        text.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(Symbol::new)
            .collect()
    } else {
        text.chars().map(Symbol::try_from).collect()
    }
}

/// Renders a word so that [`parse_word`] reads it back unchanged.
///
/// Single-character alphabets are concatenated, anything else is joined
/// with spaces.
pub fn format_word(word: &[Symbol]) -> String {
    if word.iter().all(Symbol::is_char) {
        word.iter().map(Symbol::as_str).collect()
    } else {
        word.iter()
            .map(Symbol::as_str)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Symbols for each letter of `letters`. Test fixtures only.
#[cfg(test)]
pub(crate) fn latin(letters: &str) -> Vec<Symbol> {
    letters
        .chars()
        .map(|c| Symbol::try_from(c).expect("latin letter"))
        .collect()
}

/// Serde adapter storing a word as a single string (see [`format_word`]).
pub mod word_string {
    use super::{format_word, parse_word, Symbol};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(word: &[Symbol], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_word(word))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Symbol>, D::Error> {
        let text = String::deserialize(d)?;
        parse_word(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`word_string`] for an optional word.
pub mod opt_word_string {
    use super::{format_word, parse_word, Symbol};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(word: &Option<Vec<Symbol>>, s: S) -> Result<S::Ok, S::Error> {
        match word {
            Some(w) => s.serialize_some(&format_word(w)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Symbol>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|text| parse_word(&text).map_err(serde::de::Error::custom))
            .transpose()
    }
}
