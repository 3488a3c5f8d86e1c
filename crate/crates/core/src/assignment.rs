//! Choosing which objects a contributor sees next.
//!
//! Ranked mode draws from the least-annotated objects first. Sub-domain
//! mode applies the same rule inside a chosen part of the domain tree.
//! Recommendation mode walks the graph from the contributor's strongest
//! expertise topics to related objects and scores them by path length.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotation::{annotators_of, objects_annotated_by, Status};
use crate::domain::{self, get_domain};
use crate::error::{Error, Result};
use crate::ns::{curio, dc, oa};
use crate::store::{annotation_graph, collection_graph, Dataset, Iri, Literal, Term};
use crate::users::{self, UserProfile, LEVEL_RANGE};
use crate::{collection, vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskCandidate {
    pub object: Iri,
    pub annotator_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecommendParams {
    pub top_k: usize,
    pub max_depth: usize,
    pub decay: f64,
}

impl Default for RecommendParams {
    fn default() -> Self {
        RecommendParams {
            top_k: 3,
            max_depth: 4,
            decay: 0.5,
        }
    }
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::validation("invalid_count", "n must be at least 1"));
    }
    Ok(())
}

/// Stores expertise levels for topics inside the domain's expertise branch.
pub fn set_expertise(ds: &mut Dataset, user: &str, domain_id: &str, levels: &BTreeMap<Iri, u8>) -> Result<UserProfile> {
    if !users::user_exists(ds, user) {
        return Err(Error::not_found("user", user));
    }
    let domain = get_domain(ds, domain_id)?;
    let Some(topics) = &domain.expertise_topics else {
        return Err(Error::validation(
            "no_expertise_topics",
            format!("domain `{domain_id}` does not define expertise topics"),
        ));
    };
    let branch = vocabulary::branch_subset(ds, &topics.scheme, &topics.seed)?;
    for (topic, level) in levels {
        if !branch.members.contains(topic) {
            return Err(Error::validation(
                "topic_outside_branch",
                format!("{} is not an expertise topic of domain `{domain_id}`", topic.as_str()),
            ));
        }
        if !LEVEL_RANGE.contains(level) {
            return Err(Error::validation(
                "invalid_level",
                format!("level {level} is outside {}..={}", LEVEL_RANGE.start(), LEVEL_RANGE.end()),
            ));
        }
    }
    users::store_expertise(ds, user, levels)?;
    users::get_user(ds, user)
}

fn ranked_from(ds: &Dataset, user: &str, objects: Vec<Iri>, n: usize, seed: u64) -> Vec<TaskCandidate> {
    let done = objects_annotated_by(ds, user);
    let mut strata: BTreeMap<usize, Vec<Iri>> = BTreeMap::new();
    for object in objects.into_iter().filter(|o| !done.contains(o)) {
        strata.entry(annotators_of(ds, &object).len()).or_default().push(object);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for (count, mut stratum) in strata {
        if out.len() == n {
            break;
        }
        stratum.sort();
        stratum.shuffle(&mut rng);
        out.extend(stratum.into_iter().take(n - out.len()).map(|object| TaskCandidate {
            object,
            annotator_count: count,
            score: None,
        }));
    }
    out
}

/// Up to `n` objects from the domain the user has not annotated, taken
/// from the lowest distinct-annotator stratum first, shuffled by `seed`.
pub fn assign_ranked(ds: &Dataset, user: &str, domain_id: &str, n: usize, seed: u64) -> Result<Vec<TaskCandidate>> {
    check_n(n)?;
    let objects = collection::objects_in_domain(ds, domain_id)?;
    Ok(ranked_from(ds, user, objects, n, seed))
}

/// Ranked assignment restricted to `chosen`, which must lie in the
/// campaign's domain tree.
pub fn assign_subdomain(ds: &Dataset, user: &str, campaign: &str, chosen: &str, n: usize, seed: u64) -> Result<Vec<TaskCandidate>> {
    let all = domain::registry(ds)?;
    if !all.contains_key(campaign) {
        return Err(Error::not_found("domain", campaign));
    }
    if !domain::descendants(&all, campaign).iter().any(|d| d == chosen) {
        return Err(Error::not_found("sub-domain", format!("{chosen} under {campaign}")));
    }
    assign_ranked(ds, user, chosen, n, seed)
}

/// The `k` strongest topics: level descending, then IRI.
pub fn top_topics(expertise: &BTreeMap<Iri, u8>, k: usize) -> Vec<(Iri, u8)> {
    let mut topics: Vec<(Iri, u8)> = expertise.iter().map(|(t, l)| (t.clone(), *l)).collect();
    topics.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    topics.truncate(k);
    topics
}

/// Objects linked to `concept` with the length of that last hop: direct
/// subjects count one edge, annotation bodies two (body to annotation to
/// object). Rejected annotations are ignored.
pub(crate) fn concept_edges(ds: &Dataset, concept: &Iri) -> Vec<(Iri, usize)> {
    let mut out: Vec<(Iri, usize)> = ds
        .subjects(Some(&collection_graph()), &iri(dc::SUBJECT), &Term::Iri(concept.clone()))
        .into_iter()
        .map(|o| (o, 1))
        .collect();
    let graph = annotation_graph();
    let rejected = Term::Literal(Literal::simple(Status::Rejected.as_str()).expect("non-empty"));
    for annotation in ds.subjects(Some(&graph), &iri(oa::HAS_BODY), &Term::Iri(concept.clone())) {
        let status = ds.objects(Some(&graph), &annotation, &iri(curio::STATUS));
        if status.contains(&rejected) {
            continue;
        }
        for target in ds.object_iris(Some(&graph), &annotation, &iri(oa::HAS_TARGET)) {
            if !target.as_str().ends_with("#target") {
                out.push((target, 2));
            }
        }
    }
    out
}

/// Sum over all paths from `topic` of `level * decay^length`, where a path
/// is zero or more narrower steps followed by one subject or annotation edge.
pub fn topic_scores(ds: &Dataset, topic: &Iri, level: u8, params: &RecommendParams) -> BTreeMap<Iri, f64> {
    let mut scores = BTreeMap::new();
    let mut stack = vec![(topic.clone(), 0usize, vec![topic.clone()])];
    while let Some((concept, steps, path)) = stack.pop() {
        for (object, hop) in concept_edges(ds, &concept) {
            let length = steps + hop;
            if length <= params.max_depth {
                let exponent = i32::try_from(length).unwrap_or(i32::MAX);
                *scores.entry(object).or_insert(0.0) += f64::from(level) * params.decay.powi(exponent);
            }
        }
        if steps + 2 <= params.max_depth {
            for child in vocabulary::narrower(ds, &concept) {
                if !path.contains(&child) {
                    let mut next = path.clone();
                    next.push(child.clone());
                    stack.push((child, steps + 1, next));
                }
            }
        }
    }
    scores
}

/// Expertise-driven assignment with the default parameters.
pub fn assign_recommend(ds: &Dataset, user: &str, domain_id: &str, n: usize, seed: u64) -> Result<Vec<TaskCandidate>> {
    assign_recommend_with(ds, user, domain_id, n, seed, &RecommendParams::default())
}

/// Objects reached from the user's top topics, best score first; ties go
/// to fewer annotators, then to the seeded shuffle. Falls back to ranked
/// assignment when the user has no expertise.
pub fn assign_recommend_with(
    ds: &Dataset,
    user: &str,
    domain_id: &str,
    n: usize,
    seed: u64,
    params: &RecommendParams,
) -> Result<Vec<TaskCandidate>> {
    check_n(n)?;
    let in_domain: BTreeSet<Iri> = collection::objects_in_domain(ds, domain_id)?.into_iter().collect();
    let topics = top_topics(&users::expertise(ds, user), params.top_k);
    if topics.is_empty() {
        return Ok(ranked_from(ds, user, in_domain.into_iter().collect(), n, seed));
    }
    let done = objects_annotated_by(ds, user);
    let mut totals: BTreeMap<Iri, f64> = BTreeMap::new();
    for (topic, level) in &topics {
        for (object, score) in topic_scores(ds, topic, *level, params) {
            if in_domain.contains(&object) && !done.contains(&object) {
                *totals.entry(object).or_insert(0.0) += score;
            }
        }
    }
    let mut candidates: Vec<TaskCandidate> = totals
        .into_iter()
        .map(|(object, score)| TaskCandidate {
            annotator_count: annotators_of(ds, &object).len(),
            object,
            score: Some(score),
        })
        .collect();
    candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    candidates.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.annotator_count.cmp(&b.annotator_count))
    });
    candidates.truncate(n);
    Ok(candidates)
}
