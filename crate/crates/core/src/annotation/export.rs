use std::str::FromStr;

use chrono::SecondsFormat;

use super::{annotation_ids_in, annotation_triples, list_annotations, owned_subjects, read_annotation_in, Annotation, AnnotationFilter};
use crate::error::{Error, Result};
use crate::store::rdf_io::{parse_ntriples, write_ntriples};
use crate::store::{annotation_graph, label_of, Dataset};

pub const CSV_HEADER: &str =
    "annotation_id,object_id,field,body_kind,concept_iri,label,entered_text,x,y,w,h,user,created_at,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    NTriples,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "ntriples" | "n-triples" | "nt" | "rdf" => Ok(ExportFormat::NTriples),
            other => Err(Error::Usage(format!("unknown export format `{other}` (expected csv or nt)"))),
        }
    }
}

/// Serializes the annotations selected by `filter`. Concept labels in the
/// CSV are given in `language`.
pub fn export_annotations(ds: &Dataset, filter: &AnnotationFilter, format: ExportFormat, language: &str) -> Result<String> {
    let annotations = list_annotations(ds, filter)?;
    match format {
        ExportFormat::NTriples => {
            let mut triples = Vec::new();
            for a in &annotations {
                triples.extend(annotation_triples(a)?);
            }
            triples.sort();
            Ok(write_ntriples(&triples))
        }
        ExportFormat::Csv => to_csv(ds, &annotations, language),
    }
}

fn to_csv(ds: &Dataset, annotations: &[Annotation], language: &str) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let io = |e: csv::Error| Error::load(e.to_string());
    writer.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for a in annotations {
        let num = |f: fn(&super::RegionSelector) -> u32| a.region.as_ref().map(|r| f(r).to_string()).unwrap_or_default();
        let (concept, label) = match &a.body.concept {
            Some(c) => (c.as_str().to_owned(), label_of(ds, c, language).unwrap_or_default()),
            None => (String::new(), a.body.text.clone().unwrap_or_default()),
        };
        writer
            .write_record([
                a.id.as_str().to_owned(),
                a.object.as_str().to_owned(),
                a.field.clone(),
                a.body.kind.as_str().to_owned(),
                concept,
                label,
                a.body.entered_text.clone(),
                num(|r| r.x),
                num(|r| r.y),
                num(|r| r.w),
                num(|r| r.h),
                a.user.clone(),
                a.created_at.to_rfc3339_opts(SecondsFormat::Micros, true),
                a.status.as_str().to_owned(),
            ])
            .map_err(io)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::load(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::load(e.to_string()))
}

/// Reads annotations back from an N-Triples export.
pub fn parse_export(input: &[u8]) -> Result<Vec<Annotation>> {
    let graph = annotation_graph();
    let mut scratch = Dataset::new();
    scratch.insert_triples(&graph, parse_ntriples(input)?);
    let mut out = annotation_ids_in(&scratch, &graph)
        .iter()
        .map(|id| read_annotation_in(&scratch, &graph, id))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}

/// Loads an N-Triples export into the store, replacing annotations with
/// the same ids. Nothing is written if the input is malformed.
pub fn import_annotations(ds: &mut Dataset, input: &[u8]) -> Result<usize> {
    let annotations = parse_export(input)?;
    let graph = annotation_graph();
    for a in &annotations {
        for s in owned_subjects(&a.id) {
            ds.remove_matching(&graph, Some(&s), None, None);
        }
        ds.insert_triples(&graph, annotation_triples(a)?);
    }
    Ok(annotations.len())
}
