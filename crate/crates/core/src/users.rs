//! Contributor accounts and expertise profiles, kept in the users graph.

use std::collections::BTreeMap;

use argon2::password_hash::{PasswordHash, PasswordHasher, PasswordVerifier, SaltString};
use argon2::Argon2;
use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annotation::user_iri;
use crate::error::{Error, Result};
use crate::ns::{curio, foaf, rdf};
use crate::store::{users_graph, Dataset, Iri, Literal, Triple};

pub const MIN_CREDENTIAL_LEN: usize = 8;
pub const LEVEL_RANGE: std::ops::RangeInclusive<u8> = 1..=5;

const PERSON: &str = "http://xmlns.com/foaf/0.1/Person";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserProfile {
    pub id: String,
    pub display_name: String,
    pub language: String,
    pub expertise: BTreeMap<Iri, u8>,
    pub registered_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Registration {
    pub login: String,
    pub display_name: String,
    #[serde(default = "default_language")]
    pub language: String,
    pub credential: String,
}

fn default_language() -> String {
    "en".into()
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

/// Argon2id hash in PHC string format.
fn hash_credential(credential: &str) -> Result<String> {
    let mut salt = [0u8; 16];
    rand::fill(&mut salt);
    let salt = SaltString::encode_b64(&salt).map_err(|e| Error::load(e.to_string()))?;
    Argon2::default()
        .hash_password(credential.as_bytes(), &salt)
        .map(|h| h.to_string())
        .map_err(|e| Error::load(e.to_string()))
}

pub fn user_exists(ds: &Dataset, login: &str) -> bool {
    user_iri(login).is_ok_and(|u| {
        ds.contains(Some(&users_graph()), &Triple::new(u, iri(rdf::TYPE), iri(PERSON)))
    })
}

/// Creates an account. Display names may repeat; logins may not.
pub fn register(ds: &mut Dataset, reg: Registration, now: DateTime<Utc>) -> Result<UserProfile> {
    let user = user_iri(&reg.login)?;
    let display_name = reg.display_name.trim();
    if display_name.is_empty() {
        return Err(Error::validation("invalid_name", "display name must not be empty"));
    }
    if reg.credential.chars().count() < MIN_CREDENTIAL_LEN {
        return Err(Error::validation(
            "weak_credential",
            format!("credential must have at least {MIN_CREDENTIAL_LEN} characters"),
        ));
    }
    let language = Literal::lang("x", &reg.language)
        .map_err(|_| Error::validation("invalid_language", format!("invalid language tag `{}`", reg.language)))?
        .language()
        .unwrap_or("en")
        .to_owned();
    if user_exists(ds, &reg.login) {
        return Err(Error::Conflict(format!("login `{}` is already taken", reg.login)));
    }
    let stored = hash_credential(&reg.credential)?;
    let registered_at = now.trunc_subsecs(6);
    ds.insert_triples(
        &users_graph(),
        [
            Triple::new(user.clone(), iri(rdf::TYPE), iri(PERSON)),
            Triple::new(user.clone(), iri(curio::LOGIN), Literal::simple(reg.login.clone())?),
            Triple::new(user.clone(), iri(foaf::NAME), Literal::simple(display_name)?),
            Triple::new(user.clone(), iri(curio::LANGUAGE), Literal::simple(language.clone())?),
            Triple::new(user.clone(), iri(curio::CREDENTIAL), Literal::simple(stored)?),
            Triple::new(user, iri(curio::REGISTERED), Literal::date_time(registered_at)),
        ],
    );
    Ok(UserProfile {
        id: reg.login,
        display_name: display_name.to_owned(),
        language,
        expertise: BTreeMap::new(),
        registered_at,
    })
}

/// Checks a login/credential pair.
pub fn authenticate(ds: &Dataset, login: &str, credential: &str) -> Result<UserProfile> {
    let denied = || Error::Unauthorized("unknown login or wrong credential".into());
    let user = user_iri(login).map_err(|_| denied())?;
    let stored = ds
        .object_literals(Some(&users_graph()), &user, &iri(curio::CREDENTIAL))
        .into_iter()
        .next()
        .ok_or_else(denied)?;
    let hash = PasswordHash::new(stored.lexical()).map_err(|_| denied())?;
    Argon2::default()
        .verify_password(credential.as_bytes(), &hash)
        .map_err(|_| denied())?;
    get_user(ds, login)
}

pub fn get_user(ds: &Dataset, login: &str) -> Result<UserProfile> {
    if !user_exists(ds, login) {
        return Err(Error::not_found("user", login));
    }
    let graph = users_graph();
    let user = user_iri(login)?;
    let text = |p: &str| {
        ds.object_literals(Some(&graph), &user, &iri(p))
            .into_iter()
            .next()
            .map(|l| l.lexical().to_owned())
            .unwrap_or_default()
    };
    let registered_at = ds
        .object_literals(Some(&graph), &user, &iri(curio::REGISTERED))
        .into_iter()
        .find_map(|l| l.as_date_time())
        .unwrap_or_default();
    Ok(UserProfile {
        id: login.to_owned(),
        display_name: text(foaf::NAME),
        language: text(curio::LANGUAGE),
        expertise: expertise(ds, login),
        registered_at,
    })
}

fn expertise_node(user: &Iri, topic: &Iri) -> Iri {
    let digest = hex::encode(Sha256::digest(topic.as_str().as_bytes()));
    Iri::new(format!("{}/expertise/{}", user.as_str(), &digest[..16])).expect("hex suffix keeps IRI valid")
}

/// The user's expertise levels by topic concept.
pub fn expertise(ds: &Dataset, login: &str) -> BTreeMap<Iri, u8> {
    let graph = users_graph();
    let Ok(user) = user_iri(login) else { return BTreeMap::new() };
    ds.object_iris(Some(&graph), &user, &iri(curio::HAS_EXPERTISE))
        .into_iter()
        .filter_map(|node| {
            let topic = ds.object_iris(Some(&graph), &node, &iri(curio::TOPIC)).into_iter().next()?;
            let level = ds
                .object_literals(Some(&graph), &node, &iri(curio::LEVEL))
                .into_iter()
                .find_map(|l| l.as_integer())?;
            Some((topic, u8::try_from(level).ok()?))
        })
        .collect()
}

/// Writes expertise levels, overwriting earlier levels for the same topics.
/// Callers validate topics and levels.
pub(crate) fn store_expertise(ds: &mut Dataset, login: &str, levels: &BTreeMap<Iri, u8>) -> Result<()> {
    let graph = users_graph();
    let user = user_iri(login)?;
    for (topic, level) in levels {
        let node = expertise_node(&user, topic);
        ds.remove_matching(&graph, Some(&node), None, None);
        ds.insert_triples(
            &graph,
            [
                Triple::new(user.clone(), iri(curio::HAS_EXPERTISE), node.clone()),
                Triple::new(node.clone(), iri(curio::TOPIC), topic.clone()),
                Triple::new(node, iri(curio::LEVEL), Literal::integer(i64::from(*level))),
            ],
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::ts;

    fn reg(login: &str, name: &str) -> Registration {
        Registration {
            login: login.into(),
            display_name: name.into(),
            language: "nl".into(),
            credential: "correct horse".into(),
        }
    }

    #[test]
    fn register_and_login() {
        let mut ds = Dataset::new();
        let now = ts("2015-06-01T08:00:00Z");
        let profile = register(&mut ds, reg("birder", "Birder"), now).unwrap();
        assert_eq!(profile.language, "nl");
        assert!(matches!(register(&mut ds, reg("birder", "Other"), now), Err(Error::Conflict(_))));
        register(&mut ds, reg("birder2", "Birder"), now).unwrap();
        assert_eq!(register(&mut ds, reg("x", " "), now).unwrap_err().code(), "invalid_name");
        assert_eq!(authenticate(&ds, "birder", "correct horse").unwrap(), profile);
        assert!(matches!(authenticate(&ds, "birder", "wrong horse"), Err(Error::Unauthorized(_))));
        assert!(matches!(authenticate(&ds, "nobody", "correct horse"), Err(Error::Unauthorized(_))));
        let raw: String = crate::store::snapshot_text(&ds);
        assert!(!raw.contains("correct horse"));
    }

    #[test]
    fn short_credential_rejected() {
        let mut ds = Dataset::new();
        let mut r = reg("a", "A");
        r.credential = "short".into();
        assert_eq!(register(&mut ds, r, Utc::now()).unwrap_err().code(), "weak_credential");
    }
}
