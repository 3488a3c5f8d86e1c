use std::collections::BTreeSet;
use std::str::FromStr;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use super::vote::{majority_vote, VoteOutcome};
use crate::annotation::{read_annotation, set_status, user_iri, Status};
use crate::error::{Error, Result};
use crate::ns::{curio, dcterms};
use crate::store::{annotation_graph, Dataset, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Incorrect,
    Unable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Correct => "correct",
            Verdict::Incorrect => "incorrect",
            Verdict::Unable => "unable",
        }
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correct" => Ok(Verdict::Correct),
            "incorrect" => Ok(Verdict::Incorrect),
            "unable" => Ok(Verdict::Unable),
            other => Err(Error::validation("invalid_verdict", format!("unknown verdict `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    SingleReviewer,
    Majority,
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single-reviewer" | "single" => Ok(Policy::SingleReviewer),
            "majority" => Ok(Policy::Majority),
            other => Err(Error::Usage(format!("unknown review policy `{other}` (expected single-reviewer or majority)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReviewDecision {
    pub annotation: Iri,
    pub reviewer: String,
    pub verdict: Verdict,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FinalizeReport {
    pub accepted: Vec<Iri>,
    pub rejected: Vec<Iri>,
    /// Reviewed annotations left at `submitted`.
    pub undecided: Vec<Iri>,
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

fn review_node(annotation: &Iri, reviewer: &str) -> Iri {
    Iri::new(format!("{}#review-{reviewer}", annotation.as_str())).expect("login characters keep IRI valid")
}

/// Records one reviewer's verdict on a submitted annotation.
pub fn review(ds: &mut Dataset, annotation: &Iri, reviewer: &str, verdict: Verdict, now: DateTime<Utc>) -> Result<ReviewDecision> {
    let reviewer_iri = user_iri(reviewer)?;
    let current = read_annotation(ds, annotation)?;
    if current.status != Status::Submitted {
        return Err(Error::Conflict(format!(
            "annotation {} is already {}",
            annotation.as_str(),
            current.status
        )));
    }
    let graph = annotation_graph();
    let node = review_node(annotation, reviewer);
    if !ds.object_iris(Some(&graph), &node, &iri(curio::REVIEW_OF)).is_empty() {
        return Err(Error::Conflict(format!(
            "{reviewer} already reviewed annotation {}",
            annotation.as_str()
        )));
    }
    let created_at = now.trunc_subsecs(6);
    ds.insert_triples(
        &graph,
        [
            Triple::new(node.clone(), iri(curio::REVIEW_OF), annotation.clone()),
            Triple::new(node.clone(), iri(curio::REVIEWER), reviewer_iri),
            Triple::new(node.clone(), iri(curio::VERDICT), Literal::simple(verdict.as_str())?),
            Triple::new(node, iri(dcterms::CREATED), Literal::date_time(created_at)),
        ],
    );
    Ok(ReviewDecision {
        annotation: annotation.clone(),
        reviewer: reviewer.to_owned(),
        verdict,
        created_at,
    })
}

/// Decisions on one annotation, earliest first.
pub fn decisions_for(ds: &Dataset, annotation: &Iri) -> Result<Vec<ReviewDecision>> {
    let graph = annotation_graph();
    let mut out = Vec::new();
    for node in ds.subjects(Some(&graph), &iri(curio::REVIEW_OF), &Term::Iri(annotation.clone())) {
        let reviewer = ds
            .object_iris(Some(&graph), &node, &iri(curio::REVIEWER))
            .into_iter()
            .find_map(|u| u.as_str().strip_prefix(curio::USER_PREFIX).map(str::to_owned))
            .ok_or_else(|| Error::load(format!("review {} has no reviewer", node.as_str())))?;
        let literal = |p: &str| ds.object_literals(Some(&graph), &node, &iri(p)).into_iter().next();
        let verdict = literal(curio::VERDICT)
            .ok_or_else(|| Error::load(format!("review {} has no verdict", node.as_str())))?
            .lexical()
            .parse()?;
        let created_at = literal(dcterms::CREATED).and_then(|l| l.as_date_time()).unwrap_or_default();
        out.push(ReviewDecision {
            annotation: annotation.clone(),
            reviewer,
            verdict,
            created_at,
        });
    }
    out.sort_by(|a, b| (a.created_at, &a.reviewer).cmp(&(b.created_at, &b.reviewer)));
    Ok(out)
}

/// Outcome of one annotation's decisions under `policy`, if decided.
pub fn decide(decisions: &[ReviewDecision], policy: Policy) -> Option<Status> {
    let to_status = |v: Verdict| match v {
        Verdict::Correct => Some(Status::Accepted),
        Verdict::Incorrect => Some(Status::Rejected),
        Verdict::Unable => None,
    };
    match policy {
        Policy::SingleReviewer => decisions.first().and_then(|d| to_status(d.verdict)),
        Policy::Majority => {
            let votes: Vec<Verdict> = decisions
                .iter()
                .map(|d| d.verdict)
                .filter(|v| *v != Verdict::Unable)
                .collect();
            match majority_vote(&votes) {
                VoteOutcome::Winner(v) => to_status(v),
                VoteOutcome::Inconclusive(_) => None,
            }
        }
    }
}

/// Applies `policy` to every reviewed annotation still at `submitted`.
///
/// Single-reviewer takes the earliest decision; majority ignores `unable`
/// and needs a strict winner. Undecided annotations stay submitted.
pub fn finalize_reviews(ds: &mut Dataset, policy: Policy) -> Result<FinalizeReport> {
    let graph = annotation_graph();
    let reviewed: BTreeSet<Iri> = ds
        .query_pattern(Some(&graph), None, Some(&iri(curio::REVIEW_OF)), None)
        .into_iter()
        .filter_map(|t| t.object.as_iri().cloned())
        .collect();
    let mut report = FinalizeReport::default();
    for annotation in reviewed {
        if read_annotation(ds, &annotation)?.status != Status::Submitted {
            continue;
        }
        match decide(&decisions_for(ds, &annotation)?, policy) {
            Some(status) => {
                set_status(ds, &annotation, status)?;
                match status {
                    Status::Accepted => report.accepted.push(annotation),
                    _ => report.rejected.push(annotation),
                }
            }
            None => report.undecided.push(annotation),
        }
    }
    Ok(report)
}
