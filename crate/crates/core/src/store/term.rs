use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::error::{Error, Result};
use crate::ns::{rdf, xsd};

/// Absolute resource identifier.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self> {
        let value = value.as_ref();
        if value.is_empty() {
            return Err(Error::validation("invalid_iri", "invalid IRI: empty value"));
        }
        oxrdf::NamedNode::new(value)
            .map_err(|e| Error::validation("invalid_iri", format!("invalid IRI `{value}`: {e}")))?;
        Ok(Iri(Arc::from(value)))
    }

    /// Builds an IRI from a constant that is known to be valid.
    pub(crate) fn known(value: &str) -> Self {
        debug_assert!(oxrdf::NamedNode::new(value).is_ok(), "{value}");
        Iri(Arc::from(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

// Ordering follows the N-Triples serialization `<value>`, so the closing
// bracket takes part in the comparison.
impl Ord for Iri {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .bytes()
            .chain(std::iter::once(b'>'))
            .cmp(other.0.bytes().chain(std::iter::once(b'>')))
    }
}

impl PartialOrd for Iri {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq<str> for Iri {
    fn eq(&self, other: &str) -> bool {
        &*self.0 == other
    }
}

impl PartialEq<&str> for Iri {
    fn eq(&self, other: &&str) -> bool {
        &*self.0 == *other
    }
}

impl serde::Serialize for Iri {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> serde::Deserialize<'de> for Iri {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Iri::new(&raw).map_err(serde::de::Error::custom)
    }
}

/// Datatypes whose lexical space contains the empty string.
const EMPTY_PERMITTED: &[&str] = &[
    "http://www.w3.org/2001/XMLSchema#hexBinary",
    "http://www.w3.org/2001/XMLSchema#base64Binary",
    "http://www.w3.org/2001/XMLSchema#anyURI",
    "http://www.w3.org/2001/XMLSchema#normalizedString",
    "http://www.w3.org/2001/XMLSchema#token",
];

/// Literal value, optionally language-tagged or datatyped (never both).
///
/// Language tags are stored lowercase. `xsd:string` is the implicit
/// datatype of a plain literal and is not stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: String,
    language: Option<String>,
    datatype: Option<Iri>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Result<Self> {
        let lexical = lexical.into();
        if lexical.is_empty() {
            return Err(Error::validation(
                "invalid_literal",
                "plain literal must not be empty",
            ));
        }
        Ok(Literal {
            lexical,
            language: None,
            datatype: None,
        })
    }

    pub fn lang(lexical: impl Into<String>, language: &str) -> Result<Self> {
        let lexical = lexical.into();
        if lexical.is_empty() {
            return Err(Error::validation(
                "invalid_literal",
                "language-tagged literal must not be empty",
            ));
        }
        let language = normalize_language(language)?;
        Ok(Literal {
            lexical,
            language: Some(language),
            datatype: None,
        })
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self> {
        let lexical = lexical.into();
        if datatype == xsd::STRING {
            return Literal::simple(lexical);
        }
        if datatype == rdf::LANG_STRING {
            return Err(Error::validation(
                "invalid_literal",
                "rdf:langString literal requires a language tag",
            ));
        }
        if lexical.is_empty() && !EMPTY_PERMITTED.contains(&datatype.as_str()) {
            return Err(Error::validation(
                "invalid_literal",
                format!("empty lexical form not permitted for datatype {datatype}"),
            ));
        }
        Ok(Literal {
            lexical,
            language: None,
            datatype: Some(datatype),
        })
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            language: None,
            datatype: Some(Iri::known(xsd::INTEGER)),
        }
    }

    pub fn date_time(value: DateTime<Utc>) -> Self {
        Literal {
            lexical: value.to_rfc3339_opts(SecondsFormat::Micros, true),
            language: None,
            datatype: Some(Iri::known(xsd::DATE_TIME)),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn as_integer(&self) -> Option<i64> {
        match &self.datatype {
            Some(dt) if dt == xsd::INTEGER => self.lexical.parse().ok(),
            _ => None,
        }
    }

    pub fn as_date_time(&self) -> Option<DateTime<Utc>> {
        match &self.datatype {
            Some(dt) if dt == xsd::DATE_TIME => DateTime::parse_from_rfc3339(&self.lexical)
                .ok()
                .map(|d| d.with_timezone(&Utc)),
            _ => None,
        }
    }
}

fn normalize_language(tag: &str) -> Result<String> {
    let valid = !tag.is_empty()
        && tag.split('-').all(|part| {
            !part.is_empty() && part.len() <= 8 && part.bytes().all(|b| b.is_ascii_alphanumeric())
        })
        && tag.split('-').next().is_some_and(|p| p.bytes().all(|b| b.is_ascii_alphabetic()));
    if !valid {
        return Err(Error::validation(
            "invalid_language",
            format!("invalid language tag `{tag}`"),
        ));
    }
    Ok(tag.to_ascii_lowercase())
}

pub(crate) fn write_quoted(out: &mut impl fmt::Write, value: &str) -> fmt::Result {
    out.write_char('"')?;
    for c in value.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            '\u{08}' => out.write_str("\\b")?,
            '\u{0C}' => out.write_str("\\f")?,
            c if (c as u32) < 0x20 || c == '\u{7F}' => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    out.write_char('"')
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_quoted(f, &self.lexical)?;
        if let Some(language) = &self.language {
            write!(f, "@{language}")
        } else if let Some(datatype) = &self.datatype {
            write!(f, "^^{datatype}")
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Object position of a triple.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(literal) => Some(literal),
            Term::Iri(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(literal: Literal) -> Self {
        Term::Literal(literal)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => fmt::Display::fmt(iri, f),
            Term::Literal(literal) => fmt::Display::fmt(literal, f),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// `"` sorts before `<`, so literals precede IRIs in serialization order.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) => a.cmp(b),
            (Term::Literal(a), Term::Literal(b)) => a.cmp(b),
            (Term::Literal(_), Term::Iri(_)) => Ordering::Less,
            (Term::Iri(_), Term::Literal(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Atomic graph fact. Ordered by subject, predicate, object serialization.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

impl fmt::Debug for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
