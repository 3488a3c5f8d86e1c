use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::annotation::{annotations_on, read_annotation, Annotation, BodyKind};
use crate::collection::objects_in_domain;
use crate::domain::{self, EventWindow};
use crate::error::Result;
use crate::store::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Context {
    Event,
    Online,
}

impl Context {
    pub fn as_str(self) -> &'static str {
        match self {
            Context::Event => "event",
            Context::Online => "online",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsCell {
    pub field: String,
    pub body_kind: BodyKind,
    pub context: Context,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserCounts {
    pub user: String,
    pub event: usize,
    pub online: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignStats {
    pub total: usize,
    pub event: usize,
    pub online: usize,
    pub cells: Vec<StatsCell>,
    pub event_contributors: usize,
    pub online_contributors: usize,
    /// Event annotations per event contributor, to one decimal.
    pub event_average: f64,
    pub online_average: f64,
    pub per_user: Vec<UserCounts>,
}

fn one_decimal(count: usize, people: usize) -> f64 {
    if people == 0 {
        return 0.0;
    }
    // Integer arithmetic keeps .x5 boundaries exact: round half up at one decimal.
    let tenths = (20 * count + people) / (2 * people);
    tenths as f64 / 10.0
}

/// Counts annotations by field, body kind and context. An annotation is
/// in the event context when its creation time falls inside any window.
pub fn compute_stats(windows: &[EventWindow], annotations: &[Annotation]) -> CampaignStats {
    let mut cells: BTreeMap<(String, BodyKind, Context), usize> = BTreeMap::new();
    let mut users: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for a in annotations {
        let context = if windows.iter().any(|w| w.contains(a.created_at)) {
            Context::Event
        } else {
            Context::Online
        };
        *cells.entry((a.field.clone(), a.body.kind, context)).or_insert(0) += 1;
        let entry = users.entry(a.user.clone()).or_default();
        match context {
            Context::Event => entry.0 += 1,
            Context::Online => entry.1 += 1,
        }
    }
    let event: usize = users.values().map(|u| u.0).sum();
    let online: usize = users.values().map(|u| u.1).sum();
    let event_contributors = users.values().filter(|u| u.0 > 0).count();
    let online_contributors = users.values().filter(|u| u.1 > 0).count();
    CampaignStats {
        total: annotations.len(),
        event,
        online,
        cells: cells
            .into_iter()
            .map(|((field, body_kind, context), count)| StatsCell { field, body_kind, context, count })
            .collect(),
        event_contributors,
        online_contributors,
        event_average: one_decimal(event, event_contributors),
        online_average: one_decimal(online, online_contributors),
        per_user: users
            .into_iter()
            .map(|(user, (event, online))| UserCounts { user, event, online })
            .collect(),
    }
}

/// Event windows for a domain: its own, else those of the nearest ancestor.
fn windows_for(ds: &Dataset, domain_id: &str) -> Result<Vec<EventWindow>> {
    let all = domain::registry(ds)?;
    let mut queue = std::collections::VecDeque::from([domain_id.to_owned()]);
    let mut seen = BTreeSet::new();
    while let Some(id) = queue.pop_front() {
        if !seen.insert(id.clone()) {
            continue;
        }
        let config = all.get(&id).ok_or_else(|| crate::Error::not_found("domain", id.clone()))?;
        if !config.event_windows.is_empty() {
            return Ok(config.event_windows.clone());
        }
        queue.extend(domain::parents(&all, &id));
    }
    Ok(Vec::new())
}

/// Statistics over every annotation on the domain's objects.
pub fn domain_stats(ds: &Dataset, domain_id: &str) -> Result<CampaignStats> {
    let windows = windows_for(ds, domain_id)?;
    let mut annotations = Vec::new();
    for object in objects_in_domain(ds, domain_id)? {
        for id in annotations_on(ds, &object) {
            annotations.push(read_annotation(ds, &id)?);
        }
    }
    Ok(compute_stats(&windows, &annotations))
}

impl CampaignStats {
    /// Rows `section,field,body_kind,context,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,field,body_kind,context,value\r\n");
        for c in &self.cells {
            let _ = write!(out, "cell,{},{},{},{}\r\n", csv_field(&c.field), c.body_kind.as_str(), c.context.as_str(), c.count);
        }
        let _ = write!(out, "total,,,event,{}\r\n", self.event);
        let _ = write!(out, "total,,,online,{}\r\n", self.online);
        let _ = write!(out, "total,,,all,{}\r\n", self.total);
        let _ = write!(out, "contributors,,,event,{}\r\n", self.event_contributors);
        let _ = write!(out, "contributors,,,online,{}\r\n", self.online_contributors);
        let _ = write!(out, "average,,,event,{:.1}\r\n", self.event_average);
        let _ = write!(out, "average,,,online,{:.1}\r\n", self.online_average);
        out
    }

    /// Human-readable table with aligned columns.
    pub fn to_table(&self) -> String {
        let width = self.cells.iter().map(|c| c.field.chars().count()).max().unwrap_or(0).max(5);
        let mut out = format!("{:<width$}  {:<7}  {:<7}  {:>7}\n", "field", "input", "context", "count");
        for c in &self.cells {
            let _ = writeln!(out, "{:<width$}  {:<7}  {:<7}  {:>7}", c.field, c.body_kind.as_str(), c.context.as_str(), c.count);
        }
        let _ = writeln!(out, "{:<width$}  {:<7}  {:<7}  {:>7}", "total", "", "event", self.event);
        let _ = writeln!(out, "{:<width$}  {:<7}  {:<7}  {:>7}", "total", "", "online", self.online);
        let _ = writeln!(out, "{:<width$}  {:<7}  {:<7}  {:>7}", "total", "", "all", self.total);
        let _ = writeln!(
            out,
            "event contributors: {}, average {:.1} annotations each",
            self.event_contributors, self.event_average
        );
        let _ = writeln!(
            out,
            "online contributors: {}, average {:.1} annotations each",
            self.online_contributors, self.online_average
        );
        out
    }
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_owned()
    }
}
