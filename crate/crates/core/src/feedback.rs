//! Free-form contributor feedback, kept for the evaluation stage.

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

use crate::annotation::user_iri;
use crate::error::{Error, Result};
use crate::ns::{curio, dcterms};
use crate::store::{feedback_graph, Dataset, Iri, Literal, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub text: String,
    #[serde(default)]
    pub domain: Option<String>,
    #[serde(default)]
    pub object: Option<Iri>,
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

/// Stores a feedback message and returns its id.
pub fn record_feedback(ds: &mut Dataset, user: &str, feedback: &Feedback, now: DateTime<Utc>) -> Result<Iri> {
    if feedback.text.trim().is_empty() {
        return Err(Error::validation("empty_text", "feedback text must not be empty"));
    }
    let id = Iri::new(format!("urn:curio:feedback:{}", uuid::Uuid::new_v4()))?;
    let mut triples = vec![
        Triple::new(id.clone(), iri(curio::FEEDBACK_TEXT), Literal::simple(feedback.text.clone())?),
        Triple::new(id.clone(), iri(dcterms::CREATOR), user_iri(user)?),
        Triple::new(id.clone(), iri(dcterms::CREATED), Literal::date_time(now.trunc_subsecs(6))),
    ];
    if let Some(domain) = &feedback.domain {
        triples.push(Triple::new(id.clone(), iri(curio::CONFIG), crate::domain::get_domain(ds, domain)?.iri()));
    }
    if let Some(object) = &feedback.object {
        triples.push(Triple::new(id.clone(), iri(dcterms::IS_PART_OF), object.clone()));
    }
    ds.insert_triples(&feedback_graph(), triples);
    Ok(id)
}
