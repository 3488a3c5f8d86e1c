//! Indexed in-memory triple store with named graphs and snapshot files.
//!
//! A [`Store`] is a cheap-to-clone handle over one [`Dataset`] guarded by a
//! reader/writer lock: many readers, one writer, and a writer waits until
//! every in-flight read has finished.

mod dataset;
pub mod rdf_io;
mod term;

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use parking_lot::{RwLock, RwLockReadGuard, RwLockWriteGuard};

pub use dataset::Dataset;
pub use term::{Iri, Literal, Term, Triple};

use crate::error::{Error, Result};
use crate::ns::{graph, skos};

/// First line of every snapshot file.
pub const SNAPSHOT_HEADER: &str = "# curio-store snapshot v1";
const SNAPSHOT_MAGIC: &str = "# curio-store snapshot v";

#[derive(Clone, Default)]
pub struct Store {
    inner: Arc<RwLock<Dataset>>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_dataset(dataset: Dataset) -> Self {
        Store {
            inner: Arc::new(RwLock::new(dataset)),
        }
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Dataset> {
        self.inner.read()
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, Dataset> {
        self.inner.write()
    }

    pub fn insert_triples(&self, graph: &Iri, triples: impl IntoIterator<Item = Triple>) -> usize {
        self.write().insert_triples(graph, triples)
    }

    pub fn query_pattern(&self, graph: Option<&Iri>, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        self.read().query_pattern(graph, s, p, o)
    }

    pub fn label_of(&self, resource: &Iri, language: &str) -> Option<String> {
        label_of(&self.read(), resource, language)
    }

    /// Writes the whole store as sorted N-Quads.
    pub fn snapshot(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = snapshot_text(&self.read());
        let path = path.as_ref();
        let tmp = path.with_extension("tmp");
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(text.as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Replaces the store contents with a snapshot file. On any error the
    /// current contents are left untouched.
    pub fn restore(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = fs::read(path)
            .map_err(|e| Error::load(format!("cannot read snapshot {}: {e}", path.display())))?;
        let dataset = parse_snapshot(&bytes)?;
        *self.write() = dataset;
        Ok(())
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let store = Store::new();
        store.restore(path)?;
        Ok(store)
    }
}

pub fn snapshot_text(dataset: &Dataset) -> String {
    let quads: Vec<(&Iri, Triple)> = dataset.quads().collect();
    let mut text = String::from(SNAPSHOT_HEADER);
    text.push('\n');
    text.push_str(&rdf_io::write_nquads(quads.iter().map(|(g, t)| (*g, t))));
    text
}

pub fn parse_snapshot(bytes: &[u8]) -> Result<Dataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::load(format!("snapshot is not UTF-8: {e}")))?;
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    if header != SNAPSHOT_HEADER {
        return Err(match header.strip_prefix(SNAPSHOT_MAGIC) {
            Some(version) => Error::load(format!("unsupported snapshot version {version}, expected 1")),
            None => Error::load("not a curio snapshot file (missing header)"),
        });
    }
    let mut dataset = Dataset::new();
    for (g, t) in rdf_io::parse_nquads(body.as_bytes())? {
        dataset.insert(&g, t);
    }
    Ok(dataset)
}

/// Picks the literal in `language`, else English, else the one with the
/// smallest language tag (untagged sorts first). Ties within a language go
/// to the lexicographically smallest value.
pub fn pick_language<'a>(literals: impl IntoIterator<Item = &'a Literal>, language: &str) -> Option<&'a Literal> {
    let language = language.to_ascii_lowercase();
    let rank = |l: &Literal| match l.language() {
        Some(tag) if tag == language => (0, String::new()),
        Some("en") => (1, String::new()),
        Some(tag) => (2, tag.to_owned()),
        None => (2, String::new()),
    };
    literals
        .into_iter()
        .min_by(|a, b| rank(a).cmp(&rank(b)).then_with(|| a.lexical().cmp(b.lexical())))
}

/// Value of `predicate` on `resource` chosen by [`pick_language`].
pub fn literal_in_language(dataset: &Dataset, resource: &Iri, predicate: &str, language: &str) -> Option<String> {
    let literals = dataset.object_literals(None, resource, &Iri::known(predicate));
    pick_language(&literals, language).map(|l| l.lexical().to_owned())
}

/// Preferred label with language fallback.
pub fn label_of(dataset: &Dataset, resource: &Iri, language: &str) -> Option<String> {
    literal_in_language(dataset, resource, skos::PREF_LABEL, language)
}

pub(crate) fn graph_iri(name: &str) -> Iri {
    Iri::known(name)
}

pub fn collection_graph() -> Iri {
    graph_iri(graph::COLLECTION)
}

pub fn vocabulary_graph() -> Iri {
    graph_iri(graph::VOCABULARY)
}

pub fn annotation_graph() -> Iri {
    graph_iri(graph::ANNOTATIONS)
}

pub fn users_graph() -> Iri {
    graph_iri(graph::USERS)
}

pub fn config_graph() -> Iri {
    graph_iri(graph::CONFIG)
}

pub fn gold_graph() -> Iri {
    graph_iri(graph::GOLD)
}

pub fn feedback_graph() -> Iri {
    graph_iri(graph::FEEDBACK)
}
