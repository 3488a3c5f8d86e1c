//! Well-known predicate and class IRIs.

pub mod rdf {
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const VALUE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#value";
    pub const JSON: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#JSON";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
}

pub mod xsd {
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
}

pub mod skos {
    pub const CONCEPT: &str = "http://www.w3.org/2004/02/skos/core#Concept";
    pub const CONCEPT_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#ConceptScheme";
    pub const PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";
    pub const ALT_LABEL: &str = "http://www.w3.org/2004/02/skos/core#altLabel";
    pub const BROADER: &str = "http://www.w3.org/2004/02/skos/core#broader";
    pub const NARROWER: &str = "http://www.w3.org/2004/02/skos/core#narrower";
    pub const IN_SCHEME: &str = "http://www.w3.org/2004/02/skos/core#inScheme";
}

pub mod dc {
    pub const TITLE: &str = "http://purl.org/dc/elements/1.1/title";
    pub const DESCRIPTION: &str = "http://purl.org/dc/elements/1.1/description";
    pub const SUBJECT: &str = "http://purl.org/dc/elements/1.1/subject";
    pub const CREATOR: &str = "http://purl.org/dc/elements/1.1/creator";
}

pub mod dcterms {
    pub const CREATED: &str = "http://purl.org/dc/terms/created";
    pub const CREATOR: &str = "http://purl.org/dc/terms/creator";
    pub const IS_PART_OF: &str = "http://purl.org/dc/terms/isPartOf";
    pub const CONFORMS_TO: &str = "http://purl.org/dc/terms/conformsTo";
}

pub mod edm {
    pub const PROVIDED_CHO: &str = "http://www.europeana.eu/schemas/edm/ProvidedCHO";
    pub const WEB_RESOURCE: &str = "http://www.europeana.eu/schemas/edm/WebResource";
    pub const AGGREGATED_CHO: &str = "http://www.europeana.eu/schemas/edm/aggregatedCHO";
    pub const IS_SHOWN_BY: &str = "http://www.europeana.eu/schemas/edm/isShownBy";
    pub const HAS_VIEW: &str = "http://www.europeana.eu/schemas/edm/hasView";
}

pub mod ore {
    pub const AGGREGATION: &str = "http://www.openarchives.org/ore/terms/Aggregation";
}

pub mod oa {
    pub const ANNOTATION: &str = "http://www.w3.org/ns/oa#Annotation";
    pub const SPECIFIC_RESOURCE: &str = "http://www.w3.org/ns/oa#SpecificResource";
    pub const FRAGMENT_SELECTOR: &str = "http://www.w3.org/ns/oa#FragmentSelector";
    pub const TEXTUAL_BODY: &str = "http://www.w3.org/ns/oa#TextualBody";
    pub const HAS_TARGET: &str = "http://www.w3.org/ns/oa#hasTarget";
    pub const HAS_BODY: &str = "http://www.w3.org/ns/oa#hasBody";
    pub const HAS_SOURCE: &str = "http://www.w3.org/ns/oa#hasSource";
    pub const HAS_SELECTOR: &str = "http://www.w3.org/ns/oa#hasSelector";
    pub const MOTIVATED_BY: &str = "http://www.w3.org/ns/oa#motivatedBy";
    pub const TAGGING: &str = "http://www.w3.org/ns/oa#tagging";
    pub const MEDIA_FRAGMENTS: &str = "http://www.w3.org/TR/media-frags/";
}

pub mod exif {
    pub const WIDTH: &str = "http://www.w3.org/2003/12/exif/ns#width";
    pub const HEIGHT: &str = "http://www.w3.org/2003/12/exif/ns#height";
}

pub mod foaf {
    pub const NAME: &str = "http://xmlns.com/foaf/0.1/name";
}

/// Platform-local vocabulary.
pub mod curio {
    pub const FIELD: &str = "urn:curio:ns:field";
    pub const ENTERED_TEXT: &str = "urn:curio:ns:enteredText";
    pub const STATUS: &str = "urn:curio:ns:status";
    pub const LOCATION: &str = "urn:curio:ns:location";
    pub const CONFIG: &str = "urn:curio:ns:config";
    pub const OBJECT_SET: &str = "urn:curio:ns:objectSet";
    pub const LOGIN: &str = "urn:curio:ns:login";
    pub const LANGUAGE: &str = "urn:curio:ns:language";
    pub const CREDENTIAL: &str = "urn:curio:ns:credential";
    pub const REGISTERED: &str = "urn:curio:ns:registered";
    pub const HAS_EXPERTISE: &str = "urn:curio:ns:hasExpertise";
    pub const TOPIC: &str = "urn:curio:ns:topic";
    pub const LEVEL: &str = "urn:curio:ns:level";
    pub const REVIEW_OF: &str = "urn:curio:ns:reviewOf";
    pub const REVIEWER: &str = "urn:curio:ns:reviewer";
    pub const VERDICT: &str = "urn:curio:ns:verdict";
    pub const GOLD_OBJECT: &str = "urn:curio:ns:goldObject";
    pub const GOLD_CONCEPT: &str = "urn:curio:ns:goldConcept";
    pub const FEEDBACK_TEXT: &str = "urn:curio:ns:feedbackText";

    pub const USER_PREFIX: &str = "urn:curio:user:";
    pub const DOMAIN_PREFIX: &str = "urn:curio:domain:";
    pub const ANNOTATION_PREFIX: &str = "urn:curio:annotation:";
}

/// Named graphs partitioning the store.
pub mod graph {
    pub const COLLECTION: &str = "urn:curio:graph:collection";
    pub const VOCABULARY: &str = "urn:curio:graph:vocabulary";
    pub const ANNOTATIONS: &str = "urn:curio:graph:annotations";
    pub const USERS: &str = "urn:curio:graph:users";
    pub const CONFIG: &str = "urn:curio:graph:config";
    pub const GOLD: &str = "urn:curio:graph:gold";
    pub const FEEDBACK: &str = "urn:curio:graph:feedback";
}
