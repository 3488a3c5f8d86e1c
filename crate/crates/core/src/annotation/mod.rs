//! Contributor annotations stored in the Web Annotation shape: the
//! annotation node targets the object (and, for region fields, a specific
//! resource on the image with a media-fragment selector), its body is a
//! concept or a textual body, and creator, creation time, field, typed
//! text and review status hang off the annotation node.

mod export;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Serialize};

pub use export::{export_annotations, import_annotations, parse_export, ExportFormat, CSV_HEADER};

use crate::collection;
use crate::domain::{self, FieldType, Scope};
use crate::error::{Error, Result};
use crate::ns::{curio, dcterms, oa, rdf};
use crate::store::{annotation_graph, label_of, Dataset, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

/// Rectangle on an image, in native image pixels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSelector {
    pub image: Iri,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl RegionSelector {
    pub fn fragment(&self) -> String {
        format!("xywh={},{},{},{}", self.x, self.y, self.w, self.h)
    }

    fn parse_fragment(image: Iri, value: &str) -> Option<Self> {
        let coords: Vec<u32> = value
            .strip_prefix("xywh=")?
            .strip_prefix("pixel:")
            .unwrap_or(value.strip_prefix("xywh=")?)
            .split(',')
            .map(|v| v.trim().parse().ok())
            .collect::<Option<_>>()?;
        let [x, y, w, h] = coords[..] else { return None };
        Some(RegionSelector { image, x, y, w, h })
    }

    /// Checks the rectangle against image bounds.
    pub fn check(&self, width: u32, height: u32) -> Result<()> {
        let fits = self.w >= 1
            && self.h >= 1
            && u64::from(self.x) + u64::from(self.w) <= u64::from(width)
            && u64::from(self.y) + u64::from(self.h) <= u64::from(height);
        if fits {
            Ok(())
        } else {
            Err(Error::validation(
                "region_out_of_bounds",
                format!(
                    "region x={} y={} w={} h={} does not fit a {}x{} image (width and height must be at least 1)",
                    self.x, self.y, self.w, self.h, width, height
                ),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Concept,
    Text,
}

impl BodyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BodyKind::Concept => "concept",
            BodyKind::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotationBody {
    pub kind: BodyKind,
    pub concept: Option<Iri>,
    pub text: Option<String>,
    /// What the contributor typed, kept even when a concept was chosen.
    pub entered_text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Submitted,
    Accepted,
    Rejected,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Submitted => "submitted",
            Status::Accepted => "accepted",
            Status::Rejected => "rejected",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "submitted" => Ok(Status::Submitted),
            "accepted" => Ok(Status::Accepted),
            "rejected" => Ok(Status::Rejected),
            other => Err(Error::validation("invalid_status", format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub id: Iri,
    pub object: Iri,
    pub region: Option<RegionSelector>,
    pub field: String,
    pub body: AnnotationBody,
    pub user: String,
    pub created_at: DateTime<Utc>,
    pub status: Status,
}

/// Body as sent by a client.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BodyInput {
    Concept {
        concept: Iri,
        #[serde(default)]
        entered_text: String,
    },
    Text {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionInput {
    /// Representation the rectangle is drawn on; defaults to the primary image.
    #[serde(default)]
    pub image: Option<Iri>,
    #[serde(flatten)]
    pub rect: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewAnnotation {
    pub user: String,
    pub object: Iri,
    pub field: String,
    pub body: BodyInput,
    #[serde(default)]
    pub region: Option<RegionInput>,
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

pub fn user_iri(user: &str) -> Result<Iri> {
    if user.is_empty()
        || user.len() > 64
        || !user.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.'))
    {
        return Err(Error::validation("invalid_user", format!("invalid user id `{user}`")));
    }
    Iri::new(format!("{}{user}", curio::USER_PREFIX))
}

fn user_of(creator: &Iri) -> Option<String> {
    creator.as_str().strip_prefix(curio::USER_PREFIX).map(str::to_owned)
}

fn part(annotation: &Iri, name: &str) -> Iri {
    Iri::new(format!("{}#{name}", annotation.as_str())).expect("fragment keeps IRI valid")
}

/// Resolves the field for an object: the first domain (by id) that holds
/// the object directly and defines or inherits the field.
pub fn field_for_object(ds: &Dataset, object: &Iri, field: &str) -> Result<(String, domain::FieldSpec)> {
    let mut domains = collection::direct_domains(ds, object);
    domains.sort();
    for d in &domains {
        if let Ok(found) = domain::resolve_field(ds, d, field) {
            return Ok(found);
        }
    }
    Err(Error::not_found("field", format!("{field} for object {}", object.as_str())))
}

/// Validates and stores a new annotation with status `submitted`.
pub fn submit_annotation(ds: &mut Dataset, request: NewAnnotation, now: DateTime<Utc>) -> Result<Annotation> {
    let creator = user_iri(&request.user)?;
    if !collection::is_object(ds, &request.object) {
        return Err(Error::not_found("object", request.object.as_str()));
    }
    let (defining_domain, spec) = field_for_object(ds, &request.object, &request.field)?;

    let region = match (spec.scope, request.region) {
        (Scope::Region, None) => {
            return Err(Error::validation(
                "region_required",
                format!("field `{}` annotates an image region; a region is required", spec.id),
            ));
        }
        (Scope::WholeObject, Some(_)) => {
            return Err(Error::validation(
                "region_not_allowed",
                format!("field `{}` is about the whole object; no region may be given", spec.id),
            ));
        }
        (Scope::WholeObject, None) => None,
        (Scope::Region, Some(input)) => {
            let image = match input.image {
                Some(image) => collection::representation(ds, &image)
                    .filter(|r| r.object == request.object)
                    .ok_or_else(|| Error::not_found("image of object", image.as_str()))?,
                None => collection::primary_representation(ds, &request.object)
                    .ok_or_else(|| Error::not_found("image of object", request.object.as_str()))?,
            };
            let selector = RegionSelector {
                image: image.id.clone(),
                x: input.rect.x,
                y: input.rect.y,
                w: input.rect.w,
                h: input.rect.h,
            };
            selector.check(image.width_px, image.height_px)?;
            Some(selector)
        }
    };

    let candidates = domain::field_candidates(ds, &defining_domain, &spec)?;
    let body = match request.body {
        BodyInput::Concept { concept, entered_text } => {
            if spec.field_type == FieldType::Text {
                return Err(Error::validation(
                    "body_kind",
                    format!("field `{}` takes free text only", spec.id),
                ));
            }
            let (scheme, members) = candidates.ok_or_else(|| {
                Error::validation("body_kind", format!("field `{}` has no vocabulary", spec.id))
            })?;
            if !members.contains(&concept) {
                let subset = match &spec.source {
                    Some(domain::FieldSource::Subset(s)) => format!("branch {} of {}", s.seed.as_str(), s.scheme.as_str()),
                    _ => format!("value list {}", scheme.as_str()),
                };
                return Err(Error::validation(
                    "concept_outside_subset",
                    format!("concept {} is not in the {subset} allowed for field `{}`", concept.as_str(), spec.id),
                ));
            }
            let entered_text = if entered_text.trim().is_empty() {
                label_of(ds, &concept, "en").unwrap_or_default()
            } else {
                entered_text
            };
            AnnotationBody {
                kind: BodyKind::Concept,
                concept: Some(concept),
                text: None,
                entered_text,
            }
        }
        BodyInput::Text { text } => {
            if matches!(spec.field_type, FieldType::Radio | FieldType::Checkbox) {
                return Err(Error::validation(
                    "body_kind",
                    format!("field `{}` takes one of its listed values", spec.id),
                ));
            }
            if text.trim().is_empty() {
                return Err(Error::validation("empty_text", "annotation text must not be empty"));
            }
            AnnotationBody {
                kind: BodyKind::Text,
                concept: None,
                text: Some(text.clone()),
                entered_text: text,
            }
        }
    };

    let annotation = Annotation {
        id: Iri::new(format!("{}{}", curio::ANNOTATION_PREFIX, uuid::Uuid::new_v4()))?,
        object: request.object,
        region,
        field: spec.id,
        body,
        user: request.user,
        created_at: now.trunc_subsecs(6),
        status: Status::Submitted,
    };
    debug_assert_eq!(user_iri(&annotation.user).ok(), Some(creator));
    ds.insert_triples(&annotation_graph(), annotation_triples(&annotation)?);
    Ok(annotation)
}

/// Stores an annotation as given, bypassing field validation. Used for
/// re-importing exports and building evaluation fixtures.
pub fn store_annotation(ds: &mut Dataset, annotation: &Annotation) -> Result<()> {
    ds.insert_triples(&annotation_graph(), annotation_triples(annotation)?);
    Ok(())
}

pub fn annotation_triples(a: &Annotation) -> Result<Vec<Triple>> {
    let id = &a.id;
    let mut triples = vec![
        Triple::new(id.clone(), iri(rdf::TYPE), iri(oa::ANNOTATION)),
        Triple::new(id.clone(), iri(oa::MOTIVATED_BY), iri(oa::TAGGING)),
        Triple::new(id.clone(), iri(oa::HAS_TARGET), a.object.clone()),
        Triple::new(id.clone(), iri(curio::FIELD), Literal::simple(a.field.clone())?),
        Triple::new(id.clone(), iri(dcterms::CREATOR), user_iri(&a.user)?),
        Triple::new(id.clone(), iri(dcterms::CREATED), Literal::date_time(a.created_at)),
        Triple::new(id.clone(), iri(curio::STATUS), Literal::simple(a.status.as_str())?),
    ];
    if !a.body.entered_text.is_empty() {
        triples.push(Triple::new(id.clone(), iri(curio::ENTERED_TEXT), Literal::simple(a.body.entered_text.clone())?));
    }
    if let Some(region) = &a.region {
        let target = part(id, "target");
        let selector = part(id, "selector");
        triples.extend([
            Triple::new(id.clone(), iri(oa::HAS_TARGET), target.clone()),
            Triple::new(target.clone(), iri(rdf::TYPE), iri(oa::SPECIFIC_RESOURCE)),
            Triple::new(target.clone(), iri(oa::HAS_SOURCE), region.image.clone()),
            Triple::new(target, iri(oa::HAS_SELECTOR), selector.clone()),
            Triple::new(selector.clone(), iri(rdf::TYPE), iri(oa::FRAGMENT_SELECTOR)),
            Triple::new(selector.clone(), iri(dcterms::CONFORMS_TO), iri(oa::MEDIA_FRAGMENTS)),
            Triple::new(selector, iri(rdf::VALUE), Literal::simple(region.fragment())?),
        ]);
    }
    match (&a.body.kind, &a.body.concept, &a.body.text) {
        (BodyKind::Concept, Some(concept), _) => {
            triples.push(Triple::new(id.clone(), iri(oa::HAS_BODY), concept.clone()));
        }
        (BodyKind::Text, _, Some(text)) => {
            let body = part(id, "body");
            triples.extend([
                Triple::new(id.clone(), iri(oa::HAS_BODY), body.clone()),
                Triple::new(body.clone(), iri(rdf::TYPE), iri(oa::TEXTUAL_BODY)),
                Triple::new(body, iri(rdf::VALUE), Literal::simple(text.clone())?),
            ]);
        }
        _ => return Err(Error::validation("invalid_body", "body kind does not match its content")),
    }
    Ok(triples)
}

/// Subjects owned by an annotation (the node and its parts).
pub(crate) fn owned_subjects(id: &Iri) -> [Iri; 4] {
    [id.clone(), part(id, "target"), part(id, "selector"), part(id, "body")]
}

fn single_literal(ds: &Dataset, graph: &Iri, s: &Iri, p: &str) -> Option<Literal> {
    ds.object_literals(Some(graph), s, &iri(p)).into_iter().next()
}

/// Reads an annotation back from `graph`.
pub fn read_annotation_in(ds: &Dataset, graph: &Iri, id: &Iri) -> Result<Annotation> {
    let malformed = |what: &str| Error::load(format!("annotation {id}: {what}"));
    if !ds.contains(Some(graph), &Triple::new(id.clone(), iri(rdf::TYPE), iri(oa::ANNOTATION))) {
        return Err(Error::not_found("annotation", id.as_str()));
    }
    let targets = ds.object_iris(Some(graph), id, &iri(oa::HAS_TARGET));
    let target_part = part(id, "target");
    let object = targets
        .iter()
        .find(|t| **t != target_part)
        .cloned()
        .ok_or_else(|| malformed("no object target"))?;
    let region = if targets.contains(&target_part) {
        let image = ds
            .object_iris(Some(graph), &target_part, &iri(oa::HAS_SOURCE))
            .into_iter()
            .next()
            .ok_or_else(|| malformed("target without source"))?;
        let selector = ds
            .object_iris(Some(graph), &target_part, &iri(oa::HAS_SELECTOR))
            .into_iter()
            .next()
            .ok_or_else(|| malformed("target without selector"))?;
        let value = single_literal(ds, graph, &selector, rdf::VALUE).ok_or_else(|| malformed("selector without value"))?;
        Some(RegionSelector::parse_fragment(image, value.lexical()).ok_or_else(|| malformed("bad selector value"))?)
    } else {
        None
    };
    let body_node = ds
        .object_iris(Some(graph), id, &iri(oa::HAS_BODY))
        .into_iter()
        .next()
        .ok_or_else(|| malformed("no body"))?;
    let entered = single_literal(ds, graph, id, curio::ENTERED_TEXT).map(|l| l.lexical().to_owned());
    let body = if body_node == part(id, "body") {
        let text = single_literal(ds, graph, &body_node, rdf::VALUE)
            .ok_or_else(|| malformed("textual body without value"))?
            .lexical()
            .to_owned();
        AnnotationBody {
            kind: BodyKind::Text,
            concept: None,
            entered_text: entered.unwrap_or_else(|| text.clone()),
            text: Some(text),
        }
    } else {
        AnnotationBody {
            kind: BodyKind::Concept,
            concept: Some(body_node),
            text: None,
            entered_text: entered.unwrap_or_default(),
        }
    };
    let creator = ds
        .object_iris(Some(graph), id, &iri(dcterms::CREATOR))
        .into_iter()
        .next()
        .ok_or_else(|| malformed("no creator"))?;
    Ok(Annotation {
        id: id.clone(),
        object,
        region,
        field: single_literal(ds, graph, id, curio::FIELD)
            .ok_or_else(|| malformed("no field"))?
            .lexical()
            .to_owned(),
        body,
        user: user_of(&creator).ok_or_else(|| malformed("creator is not a platform user"))?,
        created_at: single_literal(ds, graph, id, dcterms::CREATED)
            .and_then(|l| l.as_date_time())
            .ok_or_else(|| malformed("no creation time"))?,
        status: single_literal(ds, graph, id, curio::STATUS)
            .ok_or_else(|| malformed("no status"))?
            .lexical()
            .parse()?,
    })
}

pub fn read_annotation(ds: &Dataset, id: &Iri) -> Result<Annotation> {
    read_annotation_in(ds, &annotation_graph(), id)
}

pub(crate) fn annotation_ids_in(ds: &Dataset, graph: &Iri) -> Vec<Iri> {
    ds.subjects(Some(graph), &iri(rdf::TYPE), &Term::Iri(iri(oa::ANNOTATION)))
}

/// Annotation ids whose target is `object`.
pub fn annotations_on(ds: &Dataset, object: &Iri) -> Vec<Iri> {
    let graph = annotation_graph();
    ds.subjects(Some(&graph), &iri(oa::HAS_TARGET), &Term::Iri(object.clone()))
}

/// Distinct users who annotated `object`.
pub fn annotators_of(ds: &Dataset, object: &Iri) -> BTreeSet<String> {
    let graph = annotation_graph();
    annotations_on(ds, object)
        .iter()
        .flat_map(|a| ds.object_iris(Some(&graph), a, &iri(dcterms::CREATOR)))
        .filter_map(|c| user_of(&c))
        .collect()
}

/// Objects `user` has annotated.
pub fn objects_annotated_by(ds: &Dataset, user: &str) -> BTreeSet<Iri> {
    let graph = annotation_graph();
    let Ok(creator) = user_iri(user) else { return BTreeSet::new() };
    let target_suffix = "#target";
    ds.subjects(Some(&graph), &iri(dcterms::CREATOR), &Term::Iri(creator))
        .iter()
        .flat_map(|a| ds.object_iris(Some(&graph), a, &iri(oa::HAS_TARGET)))
        .filter(|t| !t.as_str().ends_with(target_suffix))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationFilter {
    pub object: Option<Iri>,
    pub user: Option<String>,
    pub field: Option<String>,
    pub status: Option<Status>,
    /// Inclusive lower bound on creation time.
    pub from: Option<DateTime<Utc>>,
    /// Exclusive upper bound on creation time.
    pub to: Option<DateTime<Utc>>,
}

impl AnnotationFilter {
    pub fn matches(&self, a: &Annotation) -> bool {
        self.object.as_ref().is_none_or(|o| *o == a.object)
            && self.user.as_ref().is_none_or(|u| *u == a.user)
            && self.field.as_ref().is_none_or(|f| *f == a.field)
            && self.status.is_none_or(|s| s == a.status)
            && self.from.is_none_or(|from| a.created_at >= from)
            && self.to.is_none_or(|to| a.created_at < to)
    }
}

/// Annotations matching every given filter, ordered by creation time then id.
pub fn list_annotations(ds: &Dataset, filter: &AnnotationFilter) -> Result<Vec<Annotation>> {
    let graph = annotation_graph();
    let ids = match &filter.object {
        Some(object) => annotations_on(ds, object),
        None => annotation_ids_in(ds, &graph),
    };
    let mut out = Vec::new();
    for id in ids {
        let a = read_annotation_in(ds, &graph, &id)?;
        if filter.matches(&a) {
            out.push(a);
        }
    }
    out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}

/// Moves a submitted annotation to accepted or rejected.
pub fn set_status(ds: &mut Dataset, id: &Iri, status: Status) -> Result<()> {
    let current = read_annotation(ds, id)?;
    if current.status == status {
        return Ok(());
    }
    if current.status != Status::Submitted || status == Status::Submitted {
        return Err(Error::Conflict(format!(
            "annotation {} is {} and cannot become {}",
            id.as_str(),
            current.status,
            status
        )));
    }
    let graph = annotation_graph();
    ds.remove_matching(&graph, Some(id), Some(&iri(curio::STATUS)), None);
    ds.insert(&graph, Triple::new(id.clone(), iri(curio::STATUS), Literal::simple(status.as_str())?));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{bird_campaign, fashion_campaign, ioc, object, ts};

    fn species(user: &str, concept: &str, rect: Option<Rect>) -> NewAnnotation {
        NewAnnotation {
            user: user.into(),
            object: object("bird-01"),
            field: "scientific_name".into(),
            body: BodyInput::Concept {
                concept: ioc(concept),
                entered_text: "Bubo bubo".into(),
            },
            region: rect.map(|rect| RegionInput { image: None, rect }),
        }
    }

    const RECT: Rect = Rect { x: 10, y: 20, w: 100, h: 120 };

    #[test]
    fn region_concept_annotation_is_stored() {
        let mut ds = bird_campaign();
        let a = submit_annotation(&mut ds, species("alice", "bubo-bubo", Some(RECT)), ts("2015-06-13T10:00:00Z")).unwrap();
        assert_eq!(a.status, Status::Submitted);
        assert_eq!(a.body.concept, Some(ioc("bubo-bubo")));
        assert_eq!(a.body.entered_text, "Bubo bubo");
        let region = a.region.clone().unwrap();
        assert_eq!((region.x, region.y, region.w, region.h), (10, 20, 100, 120));
        assert_eq!(read_annotation(&ds, &a.id).unwrap(), a);
        assert_eq!(collection::get_object(&ds, &object("bird-01"), "en").unwrap().annotation_count, 1);
    }

    #[test]
    fn text_body_on_fashion_technique() {
        let mut ds = fashion_campaign();
        let req = NewAnnotation {
            user: "bob".into(),
            object: object("fashion-lace-1"),
            field: "technique".into(),
            body: BodyInput::Text { text: "handgemaakt kant".into() },
            region: None,
        };
        let a = submit_annotation(&mut ds, req, ts("2016-03-12T11:00:00Z")).unwrap();
        assert_eq!(a.body.kind, BodyKind::Text);
        assert_eq!(a.body.text.as_deref(), Some("handgemaakt kant"));
        assert_eq!(a.body.entered_text, "handgemaakt kant");
    }

    #[test]
    fn invalid_submissions() {
        let mut ds = bird_campaign();
        let now = ts("2015-06-13T10:00:00Z");
        let zero = Rect { w: 0, ..RECT };
        let err = submit_annotation(&mut ds, species("alice", "bubo-bubo", Some(zero)), now).unwrap_err();
        assert_eq!(err.code(), "region_out_of_bounds");
        let wide = Rect { x: 700, w: 101, ..RECT };
        assert_eq!(submit_annotation(&mut ds, species("alice", "bubo-bubo", Some(wide)), now).unwrap_err().code(), "region_out_of_bounds");
        let edge = Rect { x: 700, w: 100, y: 1080, h: 120 };
        assert!(submit_annotation(&mut ds, species("alice", "bubo-bubo", Some(edge)), now).is_ok());

        assert_eq!(submit_annotation(&mut ds, species("alice", "bubo-bubo", None), now).unwrap_err().code(), "region_required");

        let mut outside = species("alice", "bubo-bubo", Some(RECT));
        outside.body = BodyInput::Concept {
            concept: Iri::new("http://example.org/fashion/filigree").unwrap(),
            entered_text: String::new(),
        };
        let err = submit_annotation(&mut ds, outside, now).unwrap_err();
        assert_eq!(err.code(), "concept_outside_subset");
        assert!(err.to_string().contains("http://example.org/ioc/aves"), "{err}");

        let mut unknown = species("alice", "bubo-bubo", Some(RECT));
        unknown.field = "wingspan".into();
        assert!(matches!(submit_annotation(&mut ds, unknown, now), Err(Error::NotFound { .. })));

        let mut text_on_radio = species("alice", "bubo-bubo", Some(RECT));
        text_on_radio.field = "gender".into();
        text_on_radio.body = BodyInput::Text { text: "female".into() };
        assert_eq!(submit_annotation(&mut ds, text_on_radio, now).unwrap_err().code(), "body_kind");

        let mut region_on_whole = species("alice", "bubo-bubo", Some(RECT));
        region_on_whole.field = "iconography".into();
        region_on_whole.body = BodyInput::Text { text: "wisdom".into() };
        assert_eq!(submit_annotation(&mut ds, region_on_whole, now).unwrap_err().code(), "region_not_allowed");

        let mut missing = species("alice", "bubo-bubo", Some(RECT));
        missing.object = object("bird-99");
        assert!(matches!(submit_annotation(&mut ds, missing, now), Err(Error::NotFound { .. })));
    }

    #[test]
    fn gender_list_value_is_a_concept_body() {
        let mut ds = bird_campaign();
        let female = Iri::new("urn:curio:list:bird:gender:female").unwrap();
        let req = NewAnnotation {
            user: "carol".into(),
            object: object("bird-02"),
            field: "gender".into(),
            body: BodyInput::Concept { concept: female.clone(), entered_text: String::new() },
            region: Some(RegionInput { image: None, rect: RECT }),
        };
        let a = submit_annotation(&mut ds, req, ts("2015-06-14T10:00:00Z")).unwrap();
        assert_eq!(a.body.concept, Some(female));
        assert_eq!(a.body.entered_text, "female");
    }

    #[test]
    fn listing_and_status() {
        let mut ds = bird_campaign();
        assert!(list_annotations(&ds, &AnnotationFilter { object: Some(object("nope")), ..Default::default() }).unwrap().is_empty());
        let times = ["2015-06-13T12:00:00Z", "2015-06-13T10:00:00Z", "2015-06-13T11:00:00Z"];
        for t in times {
            submit_annotation(&mut ds, species("u", "bubo-bubo", Some(RECT)), ts(t)).unwrap();
        }
        submit_annotation(&mut ds, species("v", "bubo", Some(RECT)), ts("2015-06-13T09:30:00Z")).unwrap();
        let mine = list_annotations(&ds, &AnnotationFilter { user: Some("u".into()), ..Default::default() }).unwrap();
        assert_eq!(mine.len(), 3);
        assert!(mine.windows(2).all(|w| w[0].created_at <= w[1].created_at));
        let accepted = AnnotationFilter { status: Some(Status::Accepted), ..Default::default() };
        assert!(list_annotations(&ds, &accepted).unwrap().is_empty());

        set_status(&mut ds, &mine[0].id, Status::Accepted).unwrap();
        assert_eq!(list_annotations(&ds, &accepted).unwrap().len(), 1);
        assert!(matches!(set_status(&mut ds, &mine[0].id, Status::Rejected), Err(Error::Conflict(_))));
        assert!(matches!(set_status(&mut ds, &mine[0].id, Status::Submitted), Err(Error::Conflict(_))));

        let window = AnnotationFilter {
            from: Some(ts("2015-06-13T10:00:00Z")),
            to: Some(ts("2015-06-13T12:00:00Z")),
            ..Default::default()
        };
        assert_eq!(list_annotations(&ds, &window).unwrap().len(), 2);
        assert_eq!(annotators_of(&ds, &object("bird-01")).len(), 2);
        assert_eq!(objects_annotated_by(&ds, "u"), BTreeSet::from([object("bird-01")]));
    }
}
