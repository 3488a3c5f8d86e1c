use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::annotation::{Annotation, BodyKind};
use crate::error::{Error, Result};
use crate::ns::{curio, skos};
use crate::store::{gold_graph, Dataset, Iri, Literal, Term, Triple};
use crate::vocabulary::{generalization_steps, in_scheme, scheme_exists};

/// Professional annotations: per (object, field) the set of correct concepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldStandard {
    pub scheme: Iri,
    pub entries: BTreeMap<(Iri, String), BTreeSet<Iri>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchKind {
    Exact,
    Generalized,
    NoMatch,
    NotEvaluable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchVerdict {
    pub annotation: Iri,
    pub kind: MatchKind,
    /// Broader steps from the nearest gold concept up to the annotation's concept.
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldSummary {
    pub total: usize,
    pub evaluable: usize,
    pub exact: usize,
    pub generalized: usize,
    pub no_match: usize,
    pub not_evaluable: usize,
    /// Percentages of the evaluable annotations, summing to 100.
    pub exact_percent: u32,
    pub generalized_percent: u32,
    pub no_match_percent: u32,
    /// Annotations whose concept is any proper ancestor of a gold concept.
    /// Only computed on request; not part of the percentages.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub any_ancestor: Option<usize>,
}

impl fmt::Display for GoldSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "evaluable annotations: {} of {}", self.evaluable, self.total)?;
        writeln!(f, "exact:       {:>6} ({}%)", self.exact, self.exact_percent)?;
        writeln!(f, "generalized: {:>6} ({}%)", self.generalized, self.generalized_percent)?;
        writeln!(f, "no match:    {:>6} ({}%)", self.no_match, self.no_match_percent)?;
        write!(f, "not evaluable: {}", self.not_evaluable)?;
        if let Some(n) = self.any_ancestor {
            write!(f, "\nany-ancestor matches: {n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldReport {
    pub verdicts: Vec<MatchVerdict>,
    pub summary: GoldSummary,
}

/// Nearest-integer percentage with halves rounded up.
pub fn round_half_up_percent(count: usize, total: usize) -> u32 {
    if total == 0 {
        return 0;
    }
    let scaled = (200 * count + total) / (2 * total);
    u32::try_from(scaled).unwrap_or(u32::MAX)
}

/// Integer percentages of `counts` that sum to exactly 100: each share is
/// floored and the leftover points go to the largest remainders (earlier
/// entries first on equal remainders).
pub fn largest_remainder_percentages(counts: &[usize]) -> Vec<u32> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut shares: Vec<usize> = counts.iter().map(|c| c * 100 / total).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(counts[i] * 100 % total));
    let missing = 100 - shares.iter().sum::<usize>();
    for &i in order.iter().take(missing) {
        shares[i] += 1;
    }
    shares.into_iter().map(|s| s as u32).collect()
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

/// Rows of a gold-standard CSV with header `object_id,field,concept_iri`.
pub fn parse_gold_csv(input: &[u8]) -> Result<Vec<(Iri, String, Iri)>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| Error::load(format!("gold standard: {e}")))?;
    if header.iter().collect::<Vec<_>>() != ["object_id", "field", "concept_iri"] {
        return Err(Error::load("gold standard: header must be `object_id,field,concept_iri`"));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::load(format!("gold standard line {line}: {e}")))?;
        let at = |e: Error| Error::load(format!("gold standard line {line}: {e}"));
        let field = record[1].trim().to_owned();
        if field.is_empty() {
            return Err(Error::load(format!("gold standard line {line}: empty field")));
        }
        rows.push((Iri::new(record[0].trim()).map_err(at)?, field, Iri::new(record[2].trim()).map_err(at)?));
    }
    Ok(rows)
}

fn entry_node(object: &Iri, field: &str) -> Iri {
    let mut hasher = Sha256::new();
    hasher.update(object.as_str().as_bytes());
    hasher.update([0]);
    hasher.update(field.as_bytes());
    let digest = hex::encode(hasher.finalize());
    Iri::new(format!("urn:curio:gold:{}", &digest[..24])).expect("hex suffix")
}

/// Loads a gold standard whose concepts all belong to `scheme`, replacing
/// the entries for the (object, field) pairs it mentions.
pub fn load_gold(ds: &mut Dataset, input: &[u8], scheme: &Iri) -> Result<GoldStandard> {
    if !scheme_exists(ds, scheme) {
        return Err(Error::load(format!("gold standard refers to scheme {} which is not loaded", scheme.as_str())));
    }
    let rows = parse_gold_csv(input)?;
    for (i, (_, _, concept)) in rows.iter().enumerate() {
        if !in_scheme(ds, scheme, concept) {
            return Err(Error::load(format!(
                "gold standard line {}: {} is not a concept of {}",
                i + 2,
                concept.as_str(),
                scheme.as_str()
            )));
        }
    }
    let graph = gold_graph();
    let nodes: BTreeSet<Iri> = rows.iter().map(|(o, f, _)| entry_node(o, f)).collect();
    for node in &nodes {
        ds.remove_matching(&graph, Some(node), None, None);
    }
    for (object, field, concept) in rows {
        let node = entry_node(&object, &field);
        ds.insert_triples(
            &graph,
            [
                Triple::new(node.clone(), iri(curio::GOLD_OBJECT), object),
                Triple::new(node.clone(), iri(curio::FIELD), Literal::simple(field)?),
                Triple::new(node.clone(), iri(skos::IN_SCHEME), scheme.clone()),
                Triple::new(node, iri(curio::GOLD_CONCEPT), concept),
            ],
        );
    }
    read_gold(ds)
}

/// The stored gold standard.
pub fn read_gold(ds: &Dataset) -> Result<GoldStandard> {
    let graph = gold_graph();
    let mut scheme: Option<Iri> = None;
    let mut entries: BTreeMap<(Iri, String), BTreeSet<Iri>> = BTreeMap::new();
    for t in ds.query_pattern(Some(&graph), None, Some(&iri(curio::GOLD_OBJECT)), None) {
        let node = &t.subject;
        let Term::Iri(object) = t.object else { continue };
        let field = ds.object_literals(Some(&graph), node, &iri(curio::FIELD));
        let node_scheme = ds.object_iris(Some(&graph), node, &iri(skos::IN_SCHEME));
        let (Some(field), Some(node_scheme)) = (field.first(), node_scheme.first()) else {
            return Err(Error::load(format!("incomplete gold entry {}", node.as_str())));
        };
        match &scheme {
            None => scheme = Some(node_scheme.clone()),
            Some(s) if s != node_scheme => {
                return Err(Error::load("gold standard mixes concept schemes"));
            }
            _ => {}
        }
        entries
            .entry((object, field.lexical().to_owned()))
            .or_default()
            .extend(ds.object_iris(Some(&graph), node, &iri(curio::GOLD_CONCEPT)));
    }
    match scheme {
        Some(scheme) => Ok(GoldStandard { scheme, entries }),
        None => Err(Error::not_found("gold standard", "no entries loaded")),
    }
}

fn verdict(ds: &Dataset, a: &Annotation, gold: &GoldStandard) -> MatchVerdict {
    let not_evaluable = |reason: &str| MatchVerdict {
        annotation: a.id.clone(),
        kind: MatchKind::NotEvaluable,
        steps: None,
        reason: Some(reason.to_owned()),
    };
    let Some(correct) = gold.entries.get(&(a.object.clone(), a.field.clone())) else {
        return not_evaluable("object and field not in gold standard");
    };
    let (BodyKind::Concept, Some(concept)) = (a.body.kind, &a.body.concept) else {
        return not_evaluable("text body");
    };
    if !in_scheme(ds, &gold.scheme, concept) {
        return not_evaluable("concept outside the gold standard's scheme");
    }
    let steps = correct
        .iter()
        .filter_map(|g| generalization_steps(ds, &gold.scheme, g, concept).ok().flatten())
        .min();
    let kind = match steps {
        Some(0) => MatchKind::Exact,
        Some(1) => MatchKind::Generalized,
        _ => MatchKind::NoMatch,
    };
    MatchVerdict {
        annotation: a.id.clone(),
        kind,
        steps,
        reason: None,
    }
}

/// Scores `annotations` against the gold standard. An annotation matches
/// exactly when its concept is a gold concept for the same object and
/// field, and is generalized when it is exactly one broader step above
/// one. With `any_ancestor`, the summary also counts annotations at any
/// proper ancestor of a gold concept.
pub fn evaluate_gold(ds: &Dataset, annotations: &[Annotation], gold: &GoldStandard, any_ancestor: bool) -> GoldReport {
    let verdicts: Vec<MatchVerdict> = annotations.iter().map(|a| verdict(ds, a, gold)).collect();
    let count = |k: MatchKind| verdicts.iter().filter(|v| v.kind == k).count();
    let (exact, generalized, no_match) = (count(MatchKind::Exact), count(MatchKind::Generalized), count(MatchKind::NoMatch));
    let percents = largest_remainder_percentages(&[exact, generalized, no_match]);
    let summary = GoldSummary {
        total: verdicts.len(),
        evaluable: exact + generalized + no_match,
        exact,
        generalized,
        no_match,
        not_evaluable: count(MatchKind::NotEvaluable),
        exact_percent: percents[0],
        generalized_percent: percents[1],
        no_match_percent: percents[2],
        any_ancestor: any_ancestor.then(|| verdicts.iter().filter(|v| v.steps.is_some_and(|s| s >= 1)).count()),
    };
    GoldReport { verdicts, summary }
}
