//! Concept schemes: loading, hierarchy traversal, branch subsets and
//! autocomplete over concept labels.

mod autocomplete;
mod fold;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

pub use autocomplete::{autocomplete, Suggestion, DEFAULT_LIMIT};
pub use fold::fold;

use crate::error::{Error, Result};
use crate::ns::{rdf, skos};
use crate::store::{rdf_io, vocabulary_graph, Dataset, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Concept {
    pub id: Iri,
    /// Keyed by language tag; untagged labels use the empty key.
    pub preferred_labels: BTreeMap<String, String>,
    pub alternative_labels: BTreeMap<String, Vec<String>>,
    pub broader: BTreeSet<Iri>,
    pub scheme: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptScheme {
    pub id: Iri,
    pub concepts: BTreeSet<Iri>,
    pub roots: BTreeSet<Iri>,
}

/// A branch of a scheme: the seed concept and everything narrower than it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabularySubset {
    pub scheme: Iri,
    pub seed: Iri,
    pub members: BTreeSet<Iri>,
}

#[derive(Debug)]
pub struct LoadReport {
    pub scheme: ConceptScheme,
    pub added: usize,
    pub warnings: Vec<String>,
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

/// Loads SKOS-shaped Turtle/N-Triples text as concepts of `scheme`.
///
/// Concepts are the subjects declared `skos:inScheme` the scheme, plus
/// `skos:Concept`s without any scheme (those are assigned to it).
/// `skos:narrower` statements are stored as the inverse `skos:broader`.
/// Nothing is written unless the whole file validates.
pub fn load_scheme(ds: &mut Dataset, source: &[u8], scheme: &Iri) -> Result<LoadReport> {
    let parsed = rdf_io::parse_turtle(source)?;
    let in_scheme = iri(skos::IN_SCHEME);
    let broader_p = iri(skos::BROADER);
    let narrower_p = iri(skos::NARROWER);
    let rdf_type = iri(rdf::TYPE);
    let concept_class = Term::Iri(iri(skos::CONCEPT));
    let scheme_term = Term::Iri(scheme.clone());

    let mut triples: Vec<Triple> = Vec::with_capacity(parsed.len() + 1);
    for t in parsed {
        if t.predicate == narrower_p {
            let Term::Iri(narrower) = t.object else {
                return Err(Error::load(format!("skos:narrower of {} must be an IRI", t.subject)));
            };
            triples.push(Triple::new(narrower, broader_p.clone(), t.subject));
        } else {
            triples.push(t);
        }
    }

    let declared: BTreeSet<Iri> = triples
        .iter()
        .filter(|t| t.predicate == in_scheme)
        .map(|t| t.subject.clone())
        .collect();
    let mut file_concepts: BTreeSet<Iri> = triples
        .iter()
        .filter(|t| t.predicate == in_scheme && t.object == scheme_term)
        .map(|t| t.subject.clone())
        .collect();
    let untyped_scheme: Vec<Iri> = triples
        .iter()
        .filter(|t| t.predicate == rdf_type && t.object == concept_class && !declared.contains(&t.subject))
        .map(|t| t.subject.clone())
        .collect();
    for concept in untyped_scheme {
        triples.push(Triple::new(concept.clone(), in_scheme.clone(), scheme.clone()));
        file_concepts.insert(concept);
    }
    triples.push(Triple::new(scheme.clone(), rdf_type, iri(skos::CONCEPT_SCHEME)));

    // Validate against the union of what is stored and what is being loaded.
    let mut staged = Dataset::new();
    let vocab = vocabulary_graph();
    for t in ds.query_pattern(Some(&vocab), None, None, None) {
        staged.insert(&vocab, t);
    }
    staged.insert_triples(&vocab, triples.iter().cloned());
    let all = scheme_concepts(&staged, scheme);

    let pref = iri(skos::PREF_LABEL);
    for concept in &file_concepts {
        if staged.object_literals(Some(&vocab), concept, &pref).is_empty() {
            return Err(Error::load(format!("concept {concept} has no skos:prefLabel")));
        }
    }
    if let Some(cycle) = find_cycle(&staged, &all) {
        let path = cycle.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(" -> ");
        return Err(Error::load(format!("broader cycle detected: {path}")));
    }

    let mut warnings = Vec::new();
    for concept in &file_concepts {
        for target in staged.object_iris(Some(&vocab), concept, &broader_p) {
            if !all.contains(&target) {
                let message = format!("{concept}: broader target {target} is not in scheme {scheme}; kept as external link");
                log::warn!("{message}");
                warnings.push(message);
            }
        }
    }

    let added = ds.insert_triples(&vocab, triples);
    Ok(LoadReport {
        scheme: concept_scheme(ds, scheme)?,
        added,
        warnings,
    })
}

/// Finds one broader cycle among `concepts`, returned as a closed path.
fn find_cycle(ds: &Dataset, concepts: &BTreeSet<Iri>) -> Option<Vec<Iri>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let vocab = vocabulary_graph();
    let broader_p = iri(skos::BROADER);
    let mut marks: BTreeMap<Iri, Mark> = BTreeMap::new();
    for start in concepts {
        if marks.contains_key(start) {
            continue;
        }
        // Iterative DFS; the stack holds (node, remaining parents).
        let mut stack: Vec<(Iri, Vec<Iri>)> = vec![(start.clone(), parents(ds, &vocab, &broader_p, start, concepts))];
        marks.insert(start.clone(), Mark::Active);
        while let Some((node, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(next) => match marks.get(&next) {
                    Some(Mark::Active) => {
                        let from = stack.iter().position(|(n, _)| *n == next).unwrap_or(0);
                        let mut cycle: Vec<Iri> = stack[from..].iter().map(|(n, _)| n.clone()).collect();
                        cycle.push(next);
                        return Some(cycle);
                    }
                    Some(Mark::Done) => {}
                    None => {
                        marks.insert(next.clone(), Mark::Active);
                        let up = parents(ds, &vocab, &broader_p, &next, concepts);
                        stack.push((next, up));
                    }
                },
                None => {
                    marks.insert(node.clone(), Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    None
}

fn parents(ds: &Dataset, vocab: &Iri, broader_p: &Iri, node: &Iri, within: &BTreeSet<Iri>) -> Vec<Iri> {
    ds.object_iris(Some(vocab), node, broader_p)
        .into_iter()
        .filter(|p| within.contains(p))
        .collect()
}

pub fn scheme_concepts(ds: &Dataset, scheme: &Iri) -> BTreeSet<Iri> {
    ds.subjects(Some(&vocabulary_graph()), &iri(skos::IN_SCHEME), &Term::Iri(scheme.clone()))
        .into_iter()
        .collect()
}

pub fn scheme_exists(ds: &Dataset, scheme: &Iri) -> bool {
    ds.contains(
        Some(&vocabulary_graph()),
        &Triple::new(scheme.clone(), iri(rdf::TYPE), iri(skos::CONCEPT_SCHEME)),
    ) || !scheme_concepts(ds, scheme).is_empty()
}

pub fn concept_scheme(ds: &Dataset, scheme: &Iri) -> Result<ConceptScheme> {
    if !scheme_exists(ds, scheme) {
        return Err(Error::not_found("concept scheme", scheme.as_str()));
    }
    let concepts = scheme_concepts(ds, scheme);
    let roots = concepts
        .iter()
        .filter(|c| broader(ds, c).iter().all(|b| !concepts.contains(b)))
        .cloned()
        .collect();
    Ok(ConceptScheme {
        id: scheme.clone(),
        concepts,
        roots,
    })
}

pub fn in_scheme(ds: &Dataset, scheme: &Iri, concept: &Iri) -> bool {
    ds.contains(
        Some(&vocabulary_graph()),
        &Triple::new(concept.clone(), iri(skos::IN_SCHEME), scheme.clone()),
    )
}

/// Whether `concept` is a concept of any loaded scheme.
pub fn is_concept(ds: &Dataset, concept: &Iri) -> bool {
    !ds.object_iris(Some(&vocabulary_graph()), concept, &iri(skos::IN_SCHEME)).is_empty()
}

pub fn broader(ds: &Dataset, concept: &Iri) -> Vec<Iri> {
    ds.object_iris(Some(&vocabulary_graph()), concept, &iri(skos::BROADER))
}

pub fn narrower(ds: &Dataset, concept: &Iri) -> Vec<Iri> {
    ds.subjects(Some(&vocabulary_graph()), &iri(skos::BROADER), &Term::Iri(concept.clone()))
}

fn labels_by_language(literals: Vec<Literal>) -> BTreeMap<String, Vec<String>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for l in literals {
        map.entry(l.language().unwrap_or_default().to_owned())
            .or_default()
            .push(l.lexical().to_owned());
    }
    map
}

pub fn concept(ds: &Dataset, id: &Iri) -> Result<Concept> {
    let vocab = vocabulary_graph();
    let scheme = ds
        .object_iris(Some(&vocab), id, &iri(skos::IN_SCHEME))
        .into_iter()
        .next()
        .ok_or_else(|| Error::not_found("concept", id.as_str()))?;
    let preferred_labels = labels_by_language(ds.object_literals(Some(&vocab), id, &iri(skos::PREF_LABEL)))
        .into_iter()
        .filter_map(|(lang, mut values)| {
            values.sort();
            values.into_iter().next().map(|v| (lang, v))
        })
        .collect();
    let alternative_labels = labels_by_language(ds.object_literals(Some(&vocab), id, &iri(skos::ALT_LABEL)));
    Ok(Concept {
        id: id.clone(),
        preferred_labels,
        alternative_labels,
        broader: broader(ds, id).into_iter().collect(),
        scheme,
    })
}

/// Every label literal (preferred and alternative) of a concept.
pub fn all_labels(ds: &Dataset, concept: &Iri) -> Vec<Literal> {
    let vocab = vocabulary_graph();
    let mut labels = ds.object_literals(Some(&vocab), concept, &iri(skos::PREF_LABEL));
    labels.extend(ds.object_literals(Some(&vocab), concept, &iri(skos::ALT_LABEL)));
    labels
}

/// The seed plus its narrower-closure within the scheme.
pub fn branch_subset(ds: &Dataset, scheme: &Iri, seed: &Iri) -> Result<VocabularySubset> {
    if !in_scheme(ds, scheme, seed) {
        return Err(Error::not_found("concept in scheme", format!("{} in {}", seed.as_str(), scheme.as_str())));
    }
    let mut members = BTreeSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed.clone()]);
    while let Some(current) = queue.pop_front() {
        for child in narrower(ds, &current) {
            if in_scheme(ds, scheme, &child) && members.insert(child.clone()) {
                queue.push_back(child);
            }
        }
    }
    Ok(VocabularySubset {
        scheme: scheme.clone(),
        seed: seed.clone(),
        members,
    })
}

/// Length of the shortest broader chain from `from` up to `to`.
pub fn generalization_steps(ds: &Dataset, scheme: &Iri, from: &Iri, to: &Iri) -> Result<Option<usize>> {
    for c in [from, to] {
        if !in_scheme(ds, scheme, c) {
            return Err(Error::not_found("concept in scheme", format!("{} in {}", c.as_str(), scheme.as_str())));
        }
    }
    let mut seen = BTreeSet::from([from.clone()]);
    let mut queue = VecDeque::from([(from.clone(), 0usize)]);
    while let Some((current, depth)) = queue.pop_front() {
        if current == *to {
            return Ok(Some(depth));
        }
        for parent in broader(ds, &current) {
            if seen.insert(parent.clone()) {
                queue.push_back((parent, depth + 1));
            }
        }
    }
    Ok(None)
}

/// One entry of a literal value list attached to a field definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ListValue {
    Plain(String),
    Labelled {
        #[serde(default)]
        id: Option<Iri>,
        labels: BTreeMap<String, String>,
    },
}

/// Materializes a value list as a single-level scheme so the same
/// autocomplete and validation path serves lists and vocabularies.
/// Plain values are labelled in `default_language`.
pub fn value_list_triples(scheme: &Iri, values: &[ListValue], default_language: &str) -> Result<(Vec<Triple>, Vec<Iri>)> {
    let mut triples = vec![Triple::new(scheme.clone(), iri(rdf::TYPE), iri(skos::CONCEPT_SCHEME))];
    let mut members = Vec::new();
    let mut used = BTreeSet::new();
    for value in values {
        let (id, labels) = match value {
            ListValue::Plain(text) => {
                let labels = BTreeMap::from([(default_language.to_owned(), text.clone())]);
                (None, labels)
            }
            ListValue::Labelled { id, labels } => (id.clone(), labels.clone()),
        };
        if labels.is_empty() {
            return Err(Error::load(format!("value in list {scheme} has no label")));
        }
        let id = match id {
            Some(id) => id,
            None => {
                let first = labels.get(default_language).or_else(|| labels.values().next()).expect("non-empty");
                let base = slug(first);
                let mut candidate = base.clone();
                let mut n = 2;
                while used.contains(&candidate) {
                    candidate = format!("{base}-{n}");
                    n += 1;
                }
                Iri::new(format!("{}:{}", scheme.as_str(), candidate))?
            }
        };
        used.insert(id.as_str().rsplit(':').next().unwrap_or_default().to_owned());
        triples.push(Triple::new(id.clone(), iri(rdf::TYPE), iri(skos::CONCEPT)));
        triples.push(Triple::new(id.clone(), iri(skos::IN_SCHEME), scheme.clone()));
        for (lang, label) in &labels {
            let literal = if lang.is_empty() {
                Literal::simple(label.clone())?
            } else {
                Literal::lang(label.clone(), lang)?
            };
            triples.push(Triple::new(id.clone(), iri(skos::PREF_LABEL), literal));
        }
        members.push(id);
    }
    Ok((triples, members))
}

fn slug(text: &str) -> String {
    let folded = fold(text);
    let mut out = String::new();
    for c in folded.chars() {
        if c.is_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    let out = out.trim_end_matches('-').to_owned();
    if out.is_empty() {
        "value".to_owned()
    } else {
        out
    }
}
