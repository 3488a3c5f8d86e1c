//! Keyword search that reaches objects through titles, subject concepts
//! and contributed annotations, grouping results by how they were reached.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::annotation::Status;
use crate::assignment::concept_edges;
use crate::error::Result;
use crate::ns::{curio, dc, oa, rdf, rdfs, skos};
use crate::store::{annotation_graph, collection_graph, vocabulary_graph, Dataset, Iri, Literal};
use crate::vocabulary::{fold, narrower};
use crate::collection;

pub const DEFAULT_MAX_PATH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    pub object: Iri,
    pub title: Option<String>,
    pub path_length: usize,
    pub matched_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub key: String,
    pub objects: Vec<SearchHit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub query: String,
    pub clusters: Vec<Cluster>,
}

impl SearchResult {
    pub fn objects(&self) -> BTreeSet<Iri> {
        self.clusters
            .iter()
            .flat_map(|c| c.objects.iter().map(|h| h.object.clone()))
            .collect()
    }
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

/// Folded words of `text`. Hyphens inside a word keep it whole, so
/// "owls" does not match inside "eagle-owls".
fn words(text: &str) -> Vec<String> {
    fold(text)
        .split(|c: char| !(c.is_alphanumeric() || c == '-'))
        .map(|w| w.trim_matches('-'))
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Whole-word phrase match, ignoring case, diacritics and punctuation.
fn phrase_matches(needle: &[String], text: &str) -> bool {
    let hay = words(text);
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}

fn matching_literals<'a>(
    ds: &'a Dataset,
    graph: &'a Iri,
    predicates: &'a [&str],
    needle: &'a [String],
) -> impl Iterator<Item = (Iri, Literal)> + 'a {
    predicates.iter().flat_map(move |p| {
        ds.query_pattern(Some(graph), None, Some(&iri(p)), None)
            .into_iter()
            .filter_map(|t| {
                let literal = t.object.as_literal()?.clone();
                phrase_matches(needle, literal.lexical()).then_some((t.subject, literal))
            })
    })
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Reach {
    length: usize,
    key: &'static str,
    label: String,
}

/// Finds objects related to `query` within `max_path` edges.
///
/// Labels in every language are matched, so a concept is found by any of
/// its labels. Titles and descriptions reach their object directly,
/// subject concepts in one edge and annotation bodies in two; each
/// narrower step from a matched concept adds one. Rejected annotations do
/// not count. Each object is reported once, under its shortest path.
pub fn search_with(ds: &Dataset, query: &str, language: &str, domain: Option<&str>, max_path: usize) -> Result<SearchResult> {
    let scope: Option<BTreeSet<Iri>> = match domain {
        Some(d) => Some(collection::objects_in_domain(ds, d)?.into_iter().collect()),
        None => None,
    };
    let needle = words(query);
    let mut best: BTreeMap<Iri, Reach> = BTreeMap::new();
    let mut offer = |object: Iri, length: usize, key: &'static str, label: &str| {
        if length > max_path || scope.as_ref().is_some_and(|s| !s.contains(&object)) {
            return;
        }
        let reach = Reach { length, key, label: label.to_owned() };
        match best.get(&object) {
            Some(current) if *current <= reach => {}
            _ => {
                best.insert(object, reach);
            }
        }
    };

    if !needle.is_empty() {
        let collection_graph = collection_graph();
        for (key, predicate) in [("matched-title", dc::TITLE), ("matched-description", dc::DESCRIPTION)] {
            for (object, literal) in matching_literals(ds, &collection_graph, &[predicate], &needle) {
                if collection::is_object(ds, &object) {
                    offer(object, 0, key, literal.lexical());
                }
            }
        }

        let vocab = vocabulary_graph();
        let label_predicates = [skos::PREF_LABEL, skos::ALT_LABEL, rdfs::LABEL];
        let mut frontier: BTreeMap<Iri, String> = BTreeMap::new();
        for (concept, literal) in matching_literals(ds, &vocab, &label_predicates, &needle) {
            frontier.entry(concept).or_insert_with(|| literal.lexical().to_owned());
        }
        let mut seen: BTreeSet<Iri> = BTreeSet::new();
        let mut steps = 0;
        while !frontier.is_empty() && steps < max_path {
            let mut next = BTreeMap::new();
            for (concept, label) in &frontier {
                if !seen.insert(concept.clone()) {
                    continue;
                }
                for (object, hop) in concept_edges(ds, concept) {
                    let key = match (hop, steps) {
                        (1, 0) => "subject-concept",
                        (1, _) => "subject-concept-narrower",
                        (_, 0) => "annotation-body",
                        _ => "annotation-body-narrower",
                    };
                    offer(object, steps + hop, key, label);
                }
                for child in narrower(ds, concept) {
                    if !seen.contains(&child) {
                        next.entry(child).or_insert_with(|| label.clone());
                    }
                }
            }
            frontier = next;
            steps += 1;
        }

        let annotations = annotation_graph();
        let rejected = Literal::simple(Status::Rejected.as_str()).expect("non-empty");
        for (body, literal) in matching_literals(ds, &annotations, &[rdf::VALUE], &needle) {
            for annotation in ds.subjects(Some(&annotations), &iri(oa::HAS_BODY), &body.clone().into()) {
                if ds.object_literals(Some(&annotations), &annotation, &iri(curio::STATUS)).contains(&rejected) {
                    continue;
                }
                for target in ds.object_iris(Some(&annotations), &annotation, &iri(oa::HAS_TARGET)) {
                    if collection::is_object(ds, &target) {
                        offer(target, 2, "annotation-text", literal.lexical());
                    }
                }
            }
        }
    }

    let mut clusters: BTreeMap<&'static str, Vec<SearchHit>> = BTreeMap::new();
    for (object, reach) in best {
        clusters.entry(reach.key).or_default().push(SearchHit {
            title: collection::title(ds, &object, language),
            object,
            path_length: reach.length,
            matched_label: reach.label,
        });
    }
    let mut clusters: Vec<Cluster> = clusters
        .into_iter()
        .map(|(key, mut objects)| {
            objects.sort_by(|a, b| {
                (a.path_length, &a.title, &a.object).cmp(&(b.path_length, &b.title, &b.object))
            });
            Cluster { key: key.to_owned(), objects }
        })
        .collect();
    clusters.sort_by(|a, b| (a.objects[0].path_length, &a.key).cmp(&(b.objects[0].path_length, &b.key)));
    Ok(SearchResult {
        query: query.to_owned(),
        clusters,
    })
}

pub fn search(ds: &Dataset, query: &str, language: &str, domain: Option<&str>) -> Result<SearchResult> {
    search_with(ds, query, language, domain, DEFAULT_MAX_PATH)
}
