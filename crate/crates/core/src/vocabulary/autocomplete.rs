use std::collections::BTreeSet;

use serde::Serialize;

use super::{all_labels, fold};
use crate::error::{Error, Result};
use crate::store::{label_of, Dataset, Iri};

/// Number of alternatives shown when the caller does not ask for a limit.
pub const DEFAULT_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    /// Preferred label in the user's language (with fallback).
    pub label: String,
    /// The label that matched the typed text.
    pub matched_label: String,
    pub concept: Iri,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Rank {
    infix: bool,
    length: usize,
    folded: String,
    label: String,
}

/// Ranked suggestions among `candidates` whose labels contain `query`.
///
/// Labels in `language`, in English and without a language tag are
/// searched, ignoring case and diacritics. Prefix matches rank before
/// infix matches, then shorter labels, then lexicographic order. Each
/// concept appears once, under its best-ranked label.
pub fn autocomplete(
    ds: &Dataset,
    candidates: &BTreeSet<Iri>,
    query: &str,
    language: &str,
    limit: usize,
) -> Result<Vec<Suggestion>> {
    if limit == 0 {
        return Err(Error::validation("invalid_limit", "limit must be at least 1"));
    }
    let needle = fold(query.trim());
    if needle.is_empty() {
        return Ok(Vec::new());
    }
    let language = language.to_ascii_lowercase();
    let mut ranked: Vec<(Rank, &Iri)> = Vec::new();
    for concept in candidates {
        let best = all_labels(ds, concept)
            .into_iter()
            .filter(|l| matches!(l.language(), None | Some("en")) || l.language() == Some(language.as_str()))
            .filter_map(|l| {
                let folded = fold(l.lexical());
                let at = folded.find(&needle)?;
                Some(Rank {
                    infix: at != 0,
                    length: l.lexical().chars().count(),
                    folded,
                    label: l.lexical().to_owned(),
                })
            })
            .min();
        if let Some(rank) = best {
            ranked.push((rank, concept));
        }
    }
    ranked.sort();
    Ok(ranked
        .into_iter()
        .take(limit)
        .map(|(rank, concept)| Suggestion {
            label: label_of(ds, concept, &language).unwrap_or_else(|| rank.label.clone()),
            matched_label: rank.label,
            concept: concept.clone(),
        })
        .collect())
}
