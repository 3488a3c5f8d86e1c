use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};
use parking_lot::Mutex;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionLogEntry {
    pub timestamp: DateTime<Utc>,
    pub user: Option<String>,
    pub method: String,
    pub route: String,
    pub outcome: u16,
    pub latency_ms: f64,
}

/// Append-only record of mutating requests, optionally mirrored to a
/// JSON Lines file.
#[derive(Default)]
pub struct InteractionLog {
    entries: Mutex<Vec<InteractionLogEntry>>,
    file: Option<Mutex<File>>,
}

impl InteractionLog {
    pub fn with_file(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(InteractionLog {
            entries: Mutex::default(),
            file: Some(Mutex::new(file)),
        })
    }

    pub fn append(&self, entry: InteractionLogEntry) {
        if let Some(file) = &self.file {
            let line = serde_json::to_string(&entry).expect("log entries serialize");
            if let Err(e) = writeln!(file.lock(), "{line}") {
                log::warn!("cannot write interaction log: {e}");
            }
        }
        self.entries.lock().push(entry);
    }

    pub fn entries(&self) -> Vec<InteractionLogEntry> {
        self.entries.lock().clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
