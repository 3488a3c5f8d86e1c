use chrono::{DateTime, Utc};

use crate::store::{Dataset, Iri};
use crate::{collection, domain, vocabulary};

pub fn fixture(rel: &str) -> Vec<u8> {
    let path = format!("{}/../../fixtures/{rel}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn ioc(slug: &str) -> Iri {
    Iri::new(format!("http://example.org/ioc/{slug}")).unwrap()
}

pub fn object(slug: &str) -> Iri {
    Iri::new(format!("http://example.org/object/{slug}")).unwrap()
}

pub fn ts(text: &str) -> DateTime<Utc> {
    DateTime::parse_from_rfc3339(text).unwrap().with_timezone(&Utc)
}

fn load_scheme(ds: &mut Dataset, rel: &str, scheme: &str) {
    vocabulary::load_scheme(ds, &fixture(rel), &Iri::new(scheme).unwrap()).unwrap();
}

fn load_collection(ds: &mut Dataset, rel: &str, domain: &str) {
    let report = collection::ingest_objects(ds, &fixture(rel)).unwrap();
    assert!(report.skipped.is_empty(), "{:?}", report.skipped);
    collection::bind_to_domain(ds, domain, &report.source_collections).unwrap();
}

/// Bird campaign: IOC and Iconclass subsets, twelve prints, one domain.
pub fn bird_campaign() -> Dataset {
    let mut ds = Dataset::new();
    load_scheme(&mut ds, "bird/mini-ioc.ttl", "http://example.org/ioc");
    load_scheme(&mut ds, "mini-iconclass.ttl", "http://example.org/iconclass");
    domain::load_domains(&mut ds, &fixture("bird/domain.json")).unwrap();
    load_collection(&mut ds, "bird/collection.jsonl", "bird");
    ds
}

/// Fashion root domain with jewelry and lace sub-domains populated.
pub fn fashion_campaign() -> Dataset {
    let mut ds = Dataset::new();
    load_scheme(&mut ds, "fashion/mini-fashion.ttl", "http://example.org/fashion");
    domain::load_domains(&mut ds, &fixture("fashion/domain.json")).unwrap();
    load_collection(&mut ds, "fashion/jewelry.jsonl", "jewelry");
    load_collection(&mut ds, "fashion/lace.jsonl", "lace");
    ds
}
