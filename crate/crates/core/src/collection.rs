//! Collection objects, their image representations and the aggregations
//! linking the two.
//!
//! Input is JSON Lines, one object per line:
//!
//! ```json
//! {"id": "http://example.org/object/1", "title": {"en": "Eagle owl"},
//!  "description": {"en": "..."}, "subjects": ["http://..."], "creator": "...",
//!  "image": "images/1.jpg", "image_width": 800, "image_height": 1200,
//!  "views": [{"image": "images/1b.jpg", "width": 800, "height": 600}],
//!  "source_collection": "http://example.org/collection/prints"}
//! ```
//!
//! Language keys may be empty for untagged text.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::annotation;
use crate::domain;
use crate::error::{Error, Result};
use crate::ns::{curio, dc, dcterms, edm, exif, ore, rdf};
use crate::store::{collection_graph, config_graph, label_of, literal_in_language, Dataset, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectionObject {
    pub id: Iri,
    pub title: BTreeMap<String, String>,
    pub description: BTreeMap<String, String>,
    pub subjects: BTreeSet<Iri>,
    pub creator: Option<String>,
    pub source_collection: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageRepresentation {
    pub id: Iri,
    pub object: Iri,
    pub url_or_path: String,
    pub width_px: u32,
    pub height_px: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Aggregation {
    pub id: Iri,
    pub aggregated_object: Iri,
    /// Primary representation first.
    pub representations: Vec<Iri>,
}

#[derive(Debug, Deserialize)]
struct ViewRecord {
    image: String,
    width: u32,
    height: u32,
}

#[derive(Debug, Deserialize)]
struct Record {
    id: Option<String>,
    #[serde(default)]
    title: BTreeMap<String, String>,
    #[serde(default)]
    description: BTreeMap<String, String>,
    #[serde(default)]
    subjects: Vec<String>,
    creator: Option<String>,
    image: Option<String>,
    image_width: Option<u32>,
    image_height: Option<u32>,
    #[serde(default)]
    views: Vec<ViewRecord>,
    source_collection: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRecord {
    pub line: usize,
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestReport {
    pub ingested: usize,
    pub skipped: Vec<SkippedRecord>,
    pub source_collections: BTreeSet<Iri>,
}

fn iri(value: &str) -> Iri {
    Iri::new(value).expect("namespace constant")
}

pub fn aggregation_iri(object: &Iri) -> Iri {
    Iri::new(format!("{}/aggregation", object.as_str())).expect("suffix keeps IRI valid")
}

fn representation_iri(object: &Iri, index: usize) -> Iri {
    let suffix = if index == 0 { "/image".to_owned() } else { format!("/image-{}", index + 1) };
    Iri::new(format!("{}{suffix}", object.as_str())).expect("suffix keeps IRI valid")
}

fn lang_literal(text: &str, language: &str) -> Result<Literal> {
    if language.is_empty() {
        Literal::simple(text)
    } else {
        Literal::lang(text, language)
    }
}

fn record_triples(record: Record) -> std::result::Result<(Iri, Iri, Vec<Triple>), String> {
    let id = record.id.ok_or("missing id")?;
    let object = Iri::new(&id).map_err(|e| e.to_string())?;
    let image = record.image.filter(|s| !s.trim().is_empty()).ok_or("missing image")?;
    let (width, height) = match (record.image_width, record.image_height) {
        (Some(w), Some(h)) if w > 0 && h > 0 => (w, h),
        _ => return Err("image dimensions missing or zero".into()),
    };
    if record.title.values().all(|t| t.trim().is_empty()) {
        return Err("missing title".into());
    }
    let source = record.source_collection.ok_or("missing source_collection")?;
    let source = Iri::new(&source).map_err(|e| e.to_string())?;

    let mut triples = vec![
        Triple::new(object.clone(), iri(rdf::TYPE), iri(edm::PROVIDED_CHO)),
        Triple::new(object.clone(), iri(dcterms::IS_PART_OF), source.clone()),
    ];
    for (language, text) in record.title.iter().filter(|(_, t)| !t.trim().is_empty()) {
        triples.push(Triple::new(object.clone(), iri(dc::TITLE), lang_literal(text, language).map_err(|e| e.to_string())?));
    }
    for (language, text) in record.description.iter().filter(|(_, t)| !t.trim().is_empty()) {
        triples.push(Triple::new(
            object.clone(),
            iri(dc::DESCRIPTION),
            lang_literal(text, language).map_err(|e| e.to_string())?,
        ));
    }
    for subject in &record.subjects {
        let subject = Iri::new(subject).map_err(|e| e.to_string())?;
        triples.push(Triple::new(object.clone(), iri(dc::SUBJECT), subject));
    }
    if let Some(creator) = record.creator.filter(|c| !c.trim().is_empty()) {
        triples.push(Triple::new(object.clone(), iri(dc::CREATOR), Literal::simple(creator).map_err(|e| e.to_string())?));
    }

    let aggregation = aggregation_iri(&object);
    triples.push(Triple::new(aggregation.clone(), iri(rdf::TYPE), iri(ore::AGGREGATION)));
    triples.push(Triple::new(aggregation.clone(), iri(edm::AGGREGATED_CHO), object.clone()));
    let views = std::iter::once((image, width, height)).chain(
        record
            .views
            .into_iter()
            .filter(|v| v.width > 0 && v.height > 0)
            .map(|v| (v.image, v.width, v.height)),
    );
    for (index, (path, w, h)) in views.enumerate() {
        let rep = representation_iri(&object, index);
        let link = if index == 0 { edm::IS_SHOWN_BY } else { edm::HAS_VIEW };
        triples.push(Triple::new(aggregation.clone(), iri(link), rep.clone()));
        triples.push(Triple::new(rep.clone(), iri(rdf::TYPE), iri(edm::WEB_RESOURCE)));
        triples.push(Triple::new(rep.clone(), iri(curio::LOCATION), Literal::simple(path).map_err(|e| e.to_string())?));
        triples.push(Triple::new(rep.clone(), iri(exif::WIDTH), Literal::integer(w.into())));
        triples.push(Triple::new(rep, iri(exif::HEIGHT), Literal::integer(h.into())));
    }
    Ok((object, source, triples))
}

/// Ingests a JSON Lines collection file into the collection graph.
///
/// Records lacking an id, title, image, image dimensions or source
/// collection are skipped and reported. A line that is not JSON aborts the
/// whole ingest before anything is written. Re-ingesting an object replaces
/// its earlier description.
pub fn ingest_objects(ds: &mut Dataset, source: &[u8]) -> Result<IngestReport> {
    let text = std::str::from_utf8(source).map_err(|e| Error::load(format!("collection file is not UTF-8: {e}")))?;
    let mut report = IngestReport::default();
    let mut staged: Vec<(Iri, Vec<Triple>)> = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(line).map_err(|e| Error::load(format!("collection file line {line_no}: {e}")))?;
        let id = record.id.clone();
        match record_triples(record) {
            Ok((object, source, triples)) => {
                report.source_collections.insert(source);
                staged.push((object, triples));
            }
            Err(reason) => {
                log::warn!("skipping collection record on line {line_no}: {reason}");
                report.skipped.push(SkippedRecord {
                    line: line_no,
                    id,
                    reason,
                });
            }
        }
    }

    let graph = collection_graph();
    for (object, triples) in staged {
        let mut owned = vec![object.clone(), aggregation_iri(&object)];
        owned.extend(
            ds.object_iris(Some(&graph), &aggregation_iri(&object), &iri(edm::IS_SHOWN_BY))
                .into_iter()
                .chain(ds.object_iris(Some(&graph), &aggregation_iri(&object), &iri(edm::HAS_VIEW))),
        );
        let replaced: BTreeSet<Triple> = triples.iter().cloned().collect();
        for subject in &owned {
            for t in ds.query_pattern(Some(&graph), Some(subject), None, None) {
                if !replaced.contains(&t) {
                    ds.remove(&graph, &t);
                }
            }
        }
        ds.insert_triples(&graph, triples);
        report.ingested += 1;
    }
    Ok(report)
}

/// Binds source collections to a domain so their objects belong to it.
pub fn bind_to_domain(ds: &mut Dataset, domain_id: &str, sources: &BTreeSet<Iri>) -> Result<usize> {
    let domain = domain::get_domain(ds, domain_id)?;
    let triples = sources
        .iter()
        .map(|s| Triple::new(domain.iri(), iri(curio::OBJECT_SET), s.clone()));
    Ok(ds.insert_triples(&config_graph(), triples))
}

pub fn is_object(ds: &Dataset, id: &Iri) -> bool {
    ds.contains(
        Some(&collection_graph()),
        &Triple::new(id.clone(), iri(rdf::TYPE), iri(edm::PROVIDED_CHO)),
    )
}

pub fn all_objects(ds: &Dataset) -> Vec<Iri> {
    ds.subjects(Some(&collection_graph()), &iri(rdf::TYPE), &Term::Iri(iri(edm::PROVIDED_CHO)))
}

fn lang_map(literals: Vec<Literal>) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for l in literals {
        map.entry(l.language().unwrap_or_default().to_owned())
            .or_insert_with(|| l.lexical().to_owned());
    }
    map
}

pub fn get(ds: &Dataset, id: &Iri) -> Result<CollectionObject> {
    if !is_object(ds, id) {
        return Err(Error::not_found("object", id.as_str()));
    }
    let graph = collection_graph();
    let source_collection = ds
        .object_iris(Some(&graph), id, &iri(dcterms::IS_PART_OF))
        .into_iter()
        .next()
        .ok_or_else(|| Error::load(format!("object {id} has no source collection")))?;
    Ok(CollectionObject {
        id: id.clone(),
        title: lang_map(ds.object_literals(Some(&graph), id, &iri(dc::TITLE))),
        description: lang_map(ds.object_literals(Some(&graph), id, &iri(dc::DESCRIPTION))),
        subjects: ds.object_iris(Some(&graph), id, &iri(dc::SUBJECT)).into_iter().collect(),
        creator: ds
            .object_literals(Some(&graph), id, &iri(dc::CREATOR))
            .into_iter()
            .next()
            .map(|l| l.lexical().to_owned()),
        source_collection,
    })
}

pub fn aggregation(ds: &Dataset, object: &Iri) -> Option<Aggregation> {
    let graph = collection_graph();
    let id = aggregation_iri(object);
    let mut representations = ds.object_iris(Some(&graph), &id, &iri(edm::IS_SHOWN_BY));
    if representations.is_empty() {
        return None;
    }
    representations.extend(ds.object_iris(Some(&graph), &id, &iri(edm::HAS_VIEW)));
    Some(Aggregation {
        id,
        aggregated_object: object.clone(),
        representations,
    })
}

pub fn representation(ds: &Dataset, id: &Iri) -> Option<ImageRepresentation> {
    let graph = collection_graph();
    let int = |p: &str| {
        ds.object_literals(Some(&graph), id, &iri(p))
            .into_iter()
            .find_map(|l| l.as_integer())
            .and_then(|v| u32::try_from(v).ok())
    };
    let aggregation = ds
        .subjects(Some(&graph), &iri(edm::IS_SHOWN_BY), &Term::Iri(id.clone()))
        .into_iter()
        .chain(ds.subjects(Some(&graph), &iri(edm::HAS_VIEW), &Term::Iri(id.clone())))
        .next()?;
    let object = ds.object_iris(Some(&graph), &aggregation, &iri(edm::AGGREGATED_CHO)).into_iter().next()?;
    Some(ImageRepresentation {
        id: id.clone(),
        object,
        url_or_path: ds
            .object_literals(Some(&graph), id, &iri(curio::LOCATION))
            .into_iter()
            .next()?
            .lexical()
            .to_owned(),
        width_px: int(exif::WIDTH)?,
        height_px: int(exif::HEIGHT)?,
    })
}

pub fn primary_representation(ds: &Dataset, object: &Iri) -> Option<ImageRepresentation> {
    aggregation(ds, object).and_then(|a| representation(ds, &a.representations[0]))
}

/// Title in `language`, falling back to English, then any language.
pub fn title(ds: &Dataset, object: &Iri, language: &str) -> Option<String> {
    literal_in_language(ds, object, dc::TITLE, language)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubjectView {
    pub concept: Iri,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObjectView {
    pub id: Iri,
    pub title: Option<String>,
    pub description: Option<String>,
    pub creator: Option<String>,
    pub image: Option<ImageRepresentation>,
    pub subjects: Vec<SubjectView>,
    pub annotation_count: usize,
}

/// Display view of an object with labels resolved for `language`.
pub fn get_object(ds: &Dataset, id: &Iri, language: &str) -> Result<ObjectView> {
    let object = get(ds, id)?;
    Ok(ObjectView {
        id: id.clone(),
        title: title(ds, id, language),
        description: literal_in_language(ds, id, dc::DESCRIPTION, language),
        creator: object.creator,
        image: primary_representation(ds, id),
        subjects: object
            .subjects
            .into_iter()
            .map(|concept| SubjectView {
                label: label_of(ds, &concept, language),
                concept,
            })
            .collect(),
        annotation_count: annotation::annotations_on(ds, id).len(),
    })
}

/// Objects whose source collection is bound to `domain` or to any of its
/// sub-domains, sorted.
pub fn objects_in_domain(ds: &Dataset, domain_id: &str) -> Result<Vec<Iri>> {
    let all = domain::registry(ds)?;
    if !all.contains_key(domain_id) {
        return Err(Error::not_found("domain", domain_id));
    }
    let config = config_graph();
    let collection = collection_graph();
    let mut objects = BTreeSet::new();
    for id in domain::descendants(&all, domain_id) {
        for source in ds.object_iris(Some(&config), &domain::domain_iri(&id), &iri(curio::OBJECT_SET)) {
            for object in ds.subjects(Some(&collection), &iri(dcterms::IS_PART_OF), &Term::Iri(source)) {
                if is_object(ds, &object) {
                    objects.insert(object);
                }
            }
        }
    }
    Ok(objects.into_iter().collect())
}

/// Domains whose own object sets (not inherited) contain the object.
pub fn direct_domains(ds: &Dataset, object: &Iri) -> Vec<String> {
    let Ok(record) = get(ds, object) else { return Vec::new() };
    ds.subjects(
        Some(&config_graph()),
        &iri(curio::OBJECT_SET),
        &Term::Iri(record.source_collection),
    )
    .into_iter()
    .filter_map(|d| d.as_str().strip_prefix(curio::DOMAIN_PREFIX).map(str::to_owned))
    .collect()
}
