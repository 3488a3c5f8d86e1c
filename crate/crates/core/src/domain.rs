//! Domain definitions: annotation fields, vocabulary bindings, sub-domain
//! hierarchy, expertise topics, branding and event windows.
//!
//! Configs are JSON documents. A file holds either one domain or
//! `{"domains": [...]}`; sub-domain references resolve against the same
//! file and against domains loaded earlier. Validated configs are kept in
//! the config graph as `rdf:JSON` literals so they travel with snapshots.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::collection;
use crate::error::{Error, Result};
use crate::ns::{curio, rdf};
use crate::store::{config_graph, vocabulary_graph, Dataset, Iri, Literal, Term, Triple};
use crate::vocabulary::{self, ListValue};

pub type LangMap = BTreeMap<String, String>;

/// Text from a language map: `language`, then `fallback`, then English,
/// then the smallest key.
pub fn pick_text<'a>(map: &'a LangMap, language: &str, fallback: &str) -> Option<&'a str> {
    let language = language.to_ascii_lowercase();
    [language.as_str(), fallback, "en"]
        .iter()
        .find_map(|l| map.get(*l))
        .or_else(|| map.values().next())
        .map(String::as_str)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldType {
    Radio,
    Checkbox,
    Text,
    AutocompleteText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    #[default]
    WholeObject,
    Region,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetRef {
    pub scheme: Iri,
    pub seed: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    Subset(SubsetRef),
    Values(Vec<ListValue>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub id: String,
    pub name: LangMap,
    pub instruction: LangMap,
    #[serde(rename = "type")]
    pub field_type: FieldType,
    #[serde(default)]
    pub scope: Scope,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<FieldSource>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentMode {
    #[default]
    Ranked,
    Subdomain,
    Recommendation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl EventWindow {
    /// Half-open: the start instant is inside, the end instant is not.
    pub fn contains(&self, at: DateTime<Utc>) -> bool {
        self.start <= at && at < self.end
    }
}

fn default_language() -> String {
    "en".to_owned()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub id: String,
    #[serde(default = "default_language")]
    pub default_language: String,
    pub display: LangMap,
    #[serde(default)]
    pub tagline: LangMap,
    #[serde(default)]
    pub brand_images: Vec<String>,
    #[serde(default)]
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub subdomains: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expertise_topics: Option<SubsetRef>,
    #[serde(default)]
    pub event_windows: Vec<EventWindow>,
    #[serde(default)]
    pub assignment_mode: AssignmentMode,
}

impl DomainConfig {
    pub fn iri(&self) -> Iri {
        domain_iri(&self.id)
    }

    pub fn field(&self, id: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.id == id)
    }

    pub fn in_event(&self, at: DateTime<Utc>) -> bool {
        self.event_windows.iter().any(|w| w.contains(at))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Many { domains: Vec<DomainConfig> },
    One(Box<DomainConfig>),
}

pub fn domain_iri(id: &str) -> Iri {
    Iri::new(format!("{}{id}", curio::DOMAIN_PREFIX)).expect("validated domain id")
}

/// Scheme IRI holding the value list of a field.
pub fn value_list_scheme(domain: &str, field: &str) -> Iri {
    Iri::new(format!("urn:curio:list:{domain}:{field}")).expect("validated ids")
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 64
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

/// Parses, validates and registers the domains in a config file.
/// Nothing is written unless every domain in the file validates.
pub fn load_domains(ds: &mut Dataset, source: &[u8]) -> Result<Vec<DomainConfig>> {
    let file: ConfigFile =
        serde_json::from_slice(source).map_err(|e| Error::load(format!("domain config: {e}")))?;
    let batch = match file {
        ConfigFile::Many { domains } => domains,
        ConfigFile::One(domain) => vec![*domain],
    };

    let mut merged = registry(ds)?;
    let mut seen = BTreeSet::new();
    for domain in &batch {
        if !seen.insert(domain.id.clone()) {
            return Err(Error::load(format!("domain `{}` defined twice in one file", domain.id)));
        }
        merged.insert(domain.id.clone(), domain.clone());
    }
    for domain in &batch {
        validate(ds, domain, &merged)?;
    }
    if let Some(cycle) = subdomain_cycle(&merged) {
        return Err(Error::load(format!("sub-domain cycle: {}", cycle.join(" -> "))));
    }

    let config = config_graph();
    let config_p = iri(curio::CONFIG);
    for domain in &batch {
        let subject = domain.iri();
        let json = serde_json::to_string(domain).expect("config serializes");
        let literal = Literal::typed(json, iri(rdf::JSON))?;
        let current = Triple::new(subject.clone(), config_p.clone(), literal);
        if !ds.contains(Some(&config), &current) {
            ds.remove_matching(&config, Some(&subject), Some(&config_p), None);
            ds.insert(&config, current);
        }
        for field in &domain.fields {
            if let Some(FieldSource::Values(values)) = &field.source {
                let scheme = value_list_scheme(&domain.id, &field.id);
                let (triples, _) = vocabulary::value_list_triples(&scheme, values, &domain.default_language)?;
                ds.insert_triples(&vocabulary_graph(), triples);
            }
        }
    }
    Ok(batch)
}

fn validate(ds: &Dataset, domain: &DomainConfig, all: &BTreeMap<String, DomainConfig>) -> Result<()> {
    let at = |what: String| Error::load(format!("domain `{}`: {what}", domain.id));
    if !valid_id(&domain.id) {
        return Err(at("id must be 1-64 characters of [A-Za-z0-9_-]".into()));
    }
    if !domain.display.contains_key(&domain.default_language) {
        return Err(at(format!("display name missing for default language `{}`", domain.default_language)));
    }
    for (i, window) in domain.event_windows.iter().enumerate() {
        if window.start >= window.end {
            return Err(at(format!("event_windows[{i}]: start must precede end")));
        }
    }
    for sub in &domain.subdomains {
        if !all.contains_key(sub) {
            return Err(at(format!("sub-domain `{sub}` is not defined")));
        }
    }
    match (&domain.expertise_topics, domain.assignment_mode) {
        (None, AssignmentMode::Recommendation) => {
            return Err(at("recommendation mode requires expertise_topics".into()));
        }
        (Some(topics), _) => check_subset(ds, topics).map_err(|e| at(format!("expertise_topics: {e}")))?,
        (None, _) => {}
    }

    let mut ids = BTreeSet::new();
    for (i, field) in domain.fields.iter().enumerate() {
        let at = |what: String| at(format!("fields[{i}] (`{}`): {what}", field.id));
        if !valid_id(&field.id) {
            return Err(at("id must be 1-64 characters of [A-Za-z0-9_-]".into()));
        }
        if !ids.insert(field.id.as_str()) {
            return Err(at("duplicate field id".into()));
        }
        for (what, map) in [("name", &field.name), ("instruction", &field.instruction)] {
            if !map.contains_key(&domain.default_language) {
                return Err(at(format!("{what} missing for default language `{}`", domain.default_language)));
            }
        }
        match (field.field_type, &field.source) {
            (FieldType::Radio | FieldType::Checkbox, Some(FieldSource::Values(values))) if !values.is_empty() => {}
            (FieldType::Radio | FieldType::Checkbox, _) => {
                return Err(at("radio and checkbox fields need a non-empty value list".into()));
            }
            (FieldType::AutocompleteText, None) => {
                return Err(at("autocomplete-text fields need a vocabulary subset or value list".into()));
            }
            (_, Some(FieldSource::Values(values))) if values.is_empty() => {
                return Err(at("value list is empty".into()));
            }
            _ => {}
        }
        if let Some(FieldSource::Subset(subset)) = &field.source {
            check_subset(ds, subset).map_err(|e| at(e.to_string()))?;
        }
    }
    Ok(())
}

fn check_subset(ds: &Dataset, subset: &SubsetRef) -> Result<()> {
    if !vocabulary::scheme_exists(ds, &subset.scheme) {
        return Err(Error::load(format!("vocabulary {} is not loaded", subset.scheme.as_str())));
    }
    if !vocabulary::in_scheme(ds, &subset.scheme, &subset.seed) {
        return Err(Error::load(format!(
            "seed {} is not a concept of {}",
            subset.seed.as_str(),
            subset.scheme.as_str()
        )));
    }
    Ok(())
}

fn subdomain_cycle(all: &BTreeMap<String, DomainConfig>) -> Option<Vec<String>> {
    fn visit(
        id: &str,
        all: &BTreeMap<String, DomainConfig>,
        path: &mut Vec<String>,
        done: &mut BTreeSet<String>,
    ) -> Option<Vec<String>> {
        if let Some(pos) = path.iter().position(|p| p == id) {
            let mut cycle = path[pos..].to_vec();
            cycle.push(id.to_owned());
            return Some(cycle);
        }
        if done.contains(id) {
            return None;
        }
        path.push(id.to_owned());
        for sub in all.get(id).map(|d| d.subdomains.as_slice()).unwrap_or_default() {
            if let Some(cycle) = visit(sub, all, path, done) {
                return Some(cycle);
            }
        }
        path.pop();
        done.insert(id.to_owned());
        None
    }
    let mut done = BTreeSet::new();
    all.keys().find_map(|id| visit(id, all, &mut Vec::new(), &mut done))
}

/// All registered domains by id.
pub fn registry(ds: &Dataset) -> Result<BTreeMap<String, DomainConfig>> {
    let mut out = BTreeMap::new();
    for t in ds.query_pattern(Some(&config_graph()), None, Some(&iri(curio::CONFIG)), None) {
        let Term::Literal(json) = &t.object else { continue };
        let config: DomainConfig = serde_json::from_str(json.lexical())
            .map_err(|e| Error::load(format!("stored config of {} is corrupt: {e}", t.subject)))?;
        out.insert(config.id.clone(), config);
    }
    Ok(out)
}

pub fn get_domain(ds: &Dataset, id: &str) -> Result<DomainConfig> {
    if !valid_id(id) {
        return Err(Error::not_found("domain", id));
    }
    let literal = ds
        .object_literals(Some(&config_graph()), &domain_iri(id), &iri(curio::CONFIG))
        .into_iter()
        .next()
        .ok_or_else(|| Error::not_found("domain", id))?;
    serde_json::from_str(literal.lexical()).map_err(|e| Error::load(format!("stored config of `{id}` is corrupt: {e}")))
}

/// Domains that list `id` as a sub-domain.
pub fn parents(all: &BTreeMap<String, DomainConfig>, id: &str) -> Vec<String> {
    all.values()
        .filter(|d| d.subdomains.iter().any(|s| s == id))
        .map(|d| d.id.clone())
        .collect()
}

/// `id` and all its descendants, in preorder.
pub fn descendants(all: &BTreeMap<String, DomainConfig>, id: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![id.to_owned()];
    while let Some(current) = stack.pop() {
        if !seen.insert(current.clone()) {
            continue;
        }
        if let Some(d) = all.get(&current) {
            stack.extend(d.subdomains.iter().rev().cloned());
        }
        out.push(current);
    }
    out
}

/// Field definition for `field` seen from `domain`: the domain's own
/// definition, else the nearest ancestor's (breadth-first, ties by id).
/// Returns the id of the defining domain with the spec.
pub fn resolve_field(ds: &Dataset, domain: &str, field: &str) -> Result<(String, FieldSpec)> {
    let all = registry(ds)?;
    if !all.contains_key(domain) {
        return Err(Error::not_found("domain", domain));
    }
    let mut seen = BTreeSet::from([domain.to_owned()]);
    let mut queue = VecDeque::from([domain.to_owned()]);
    while let Some(current) = queue.pop_front() {
        if let Some(spec) = all.get(&current).and_then(|d| d.field(field)) {
            return Ok((current, spec.clone()));
        }
        for parent in parents(&all, &current) {
            if seen.insert(parent.clone()) {
                queue.push_back(parent);
            }
        }
    }
    Err(Error::not_found("field", format!("{field} in domain {domain}")))
}

/// Concept IRIs a field accepts as concept bodies, with the scheme they
/// belong to. `None` for fields without a source.
pub fn field_candidates(ds: &Dataset, defining_domain: &str, field: &FieldSpec) -> Result<Option<(Iri, BTreeSet<Iri>)>> {
    match &field.source {
        None => Ok(None),
        Some(FieldSource::Subset(subset)) => {
            let branch = vocabulary::branch_subset(ds, &subset.scheme, &subset.seed)?;
            Ok(Some((subset.scheme.clone(), branch.members)))
        }
        Some(FieldSource::Values(_)) => {
            let scheme = value_list_scheme(defining_domain, &field.id);
            Ok(Some((scheme.clone(), vocabulary::scheme_concepts(ds, &scheme))))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    pub id: String,
    pub depth: usize,
    pub object_count: usize,
}

/// Preorder listing of a domain and its sub-domains with object counts.
pub fn subdomain_tree(ds: &Dataset, root: &str) -> Result<Vec<TreeNode>> {
    let all = registry(ds)?;
    if !all.contains_key(root) {
        return Err(Error::not_found("domain", root));
    }
    let mut out = Vec::new();
    let mut stack = vec![(root.to_owned(), 0usize, vec![root.to_owned()])];
    while let Some((id, depth, path)) = stack.pop() {
        let object_count = collection::objects_in_domain(ds, &id)?.len();
        if let Some(d) = all.get(&id) {
            for sub in d.subdomains.iter().rev() {
                if !path.contains(sub) {
                    let mut next = path.clone();
                    next.push(sub.clone());
                    stack.push((sub.clone(), depth + 1, next));
                }
            }
        }
        out.push(TreeNode { id, depth, object_count });
    }
    Ok(out)
}
