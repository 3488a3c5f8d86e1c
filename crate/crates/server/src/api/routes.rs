use std::collections::{BTreeMap, BTreeSet, VecDeque};

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use curio_core::annotation::{self, AnnotationFilter, BodyInput, ExportFormat, NewAnnotation, RegionInput, Status};
use curio_core::assignment::{self, TaskCandidate};
use curio_core::domain::{self, pick_text, AssignmentMode, DomainConfig, EventWindow, FieldSource, FieldType, Scope, TreeNode};
use curio_core::feedback::{record_feedback, Feedback};
use curio_core::quality::{self, Policy, Verdict};
use curio_core::store::label_of;
use curio_core::users::{self, Registration, UserProfile};
use curio_core::{collection, search as graph_search, vocabulary, Dataset, Iri};

use super::{ApiError, ApiResult, AppState, Auth, Body, Params};

fn default_lang() -> String {
    "en".into()
}

#[derive(Deserialize)]
pub struct LangQuery {
    #[serde(default = "default_lang")]
    lang: String,
}

#[derive(Serialize)]
pub struct UserView {
    id: String,
    display_name: String,
    language: String,
}

impl From<UserProfile> for UserView {
    fn from(p: UserProfile) -> Self {
        UserView {
            id: p.id,
            display_name: p.display_name,
            language: p.language,
        }
    }
}

pub async fn register(State(state): State<AppState>, Body(reg): Body<Registration>) -> ApiResult<impl IntoResponse> {
    let profile = users::register(&mut state.store.write(), reg, Utc::now())?;
    state.persist()?;
    Ok((StatusCode::CREATED, Json(UserView::from(profile))))
}

#[derive(Deserialize)]
pub struct LoginRequest {
    login: String,
    credential: String,
}

#[derive(Serialize)]
pub struct LoginResponse {
    token: String,
    user: UserView,
    expires_at: DateTime<Utc>,
}

pub async fn login(State(state): State<AppState>, Body(req): Body<LoginRequest>) -> ApiResult<Json<LoginResponse>> {
    let profile = users::authenticate(&state.store.read(), &req.login, &req.credential)?;
    let session = state.sessions.create(&profile.id);
    Ok(Json(LoginResponse {
        token: session.token,
        user: profile.into(),
        expires_at: session.expires_at,
    }))
}

#[derive(Serialize)]
pub struct ProfileView {
    id: String,
    display_name: String,
    language: String,
    expertise: BTreeMap<Iri, u8>,
    registered_at: DateTime<Utc>,
}

impl From<UserProfile> for ProfileView {
    fn from(p: UserProfile) -> Self {
        ProfileView {
            id: p.id,
            display_name: p.display_name,
            language: p.language,
            expertise: p.expertise,
            registered_at: p.registered_at,
        }
    }
}

pub async fn me(State(state): State<AppState>, Auth(session): Auth) -> ApiResult<Json<ProfileView>> {
    Ok(Json(users::get_user(&state.store.read(), &session.user)?.into()))
}

#[derive(Serialize)]
pub struct DomainSummary {
    id: String,
    display: Option<String>,
    tagline: Option<String>,
    brand_images: Vec<String>,
    assignment_mode: AssignmentMode,
    subdomains: Vec<String>,
    parents: Vec<String>,
}

fn summary(all: &BTreeMap<String, DomainConfig>, d: &DomainConfig, lang: &str) -> DomainSummary {
    DomainSummary {
        id: d.id.clone(),
        display: pick_text(&d.display, lang, &d.default_language).map(str::to_owned),
        tagline: pick_text(&d.tagline, lang, &d.default_language).map(str::to_owned),
        brand_images: d.brand_images.clone(),
        assignment_mode: d.assignment_mode,
        subdomains: d.subdomains.clone(),
        parents: domain::parents(all, &d.id),
    }
}

pub async fn list_domains(State(state): State<AppState>, Params(q): Params<LangQuery>) -> ApiResult<Json<Vec<DomainSummary>>> {
    let ds = state.store.read();
    let all = domain::registry(&ds)?;
    Ok(Json(all.values().map(|d| summary(&all, d, &q.lang)).collect()))
}

#[derive(Serialize)]
pub struct ConceptView {
    concept: Iri,
    label: Option<String>,
}

fn concept_view(ds: &Dataset, concept: Iri, lang: &str) -> ConceptView {
    ConceptView {
        label: label_of(ds, &concept, lang),
        concept,
    }
}

#[derive(Serialize)]
pub struct FieldView {
    id: String,
    name: Option<String>,
    instruction: Option<String>,
    #[serde(rename = "type")]
    field_type: FieldType,
    scope: Scope,
    defined_in: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<ConceptView>>,
}

#[derive(Serialize)]
pub struct ExpertiseTopics {
    scheme: Iri,
    topics: Vec<ConceptView>,
}

#[derive(Serialize)]
pub struct DomainDetail {
    #[serde(flatten)]
    summary: DomainSummary,
    fields: Vec<FieldView>,
    tree: Vec<TreeNode>,
    event_windows: Vec<EventWindow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expertise_topics: Option<ExpertiseTopics>,
}

/// Field ids visible from a domain: its own, then inherited ones.
fn effective_field_ids(all: &BTreeMap<String, DomainConfig>, id: &str) -> Vec<String> {
    let mut ids = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([id.to_owned()]);
    let mut visited = BTreeSet::new();
    while let Some(current) = queue.pop_front() {
        if !visited.insert(current.clone()) {
            continue;
        }
        if let Some(d) = all.get(&current) {
            for f in &d.fields {
                if seen.insert(f.id.clone()) {
                    ids.push(f.id.clone());
                }
            }
        }
        queue.extend(domain::parents(all, &current));
    }
    ids
}

pub async fn domain_detail(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Params(q): Params<LangQuery>,
) -> ApiResult<Json<DomainDetail>> {
    let ds = state.store.read();
    let all = domain::registry(&ds)?;
    let d = all.get(&id).ok_or_else(|| curio_core::Error::not_found("domain", id.clone()))?;
    let mut fields = Vec::new();
    for field_id in effective_field_ids(&all, &id) {
        let (defined_in, spec) = domain::resolve_field(&ds, &id, &field_id)?;
        let owner = &all[&defined_in];
        let values = match &spec.source {
            Some(FieldSource::Values(_)) => domain::field_candidates(&ds, &defined_in, &spec)?
                .map(|(_, members)| members.into_iter().map(|c| concept_view(&ds, c, &q.lang)).collect()),
            _ => None,
        };
        fields.push(FieldView {
            name: pick_text(&spec.name, &q.lang, &owner.default_language).map(str::to_owned),
            instruction: pick_text(&spec.instruction, &q.lang, &owner.default_language).map(str::to_owned),
            field_type: spec.field_type,
            scope: spec.scope,
            id: spec.id,
            defined_in,
            values,
        });
    }
    let expertise_topics = match &d.expertise_topics {
        Some(t) => {
            let mut topics = vec![t.seed.clone()];
            topics.extend(vocabulary::narrower(&ds, &t.seed));
            Some(ExpertiseTopics {
                scheme: t.scheme.clone(),
                topics: topics.into_iter().map(|c| concept_view(&ds, c, &q.lang)).collect(),
            })
        }
        None => None,
    };
    Ok(Json(DomainDetail {
        summary: summary(&all, d, &q.lang),
        fields,
        tree: domain::subdomain_tree(&ds, &id)?,
        event_windows: d.event_windows.clone(),
        expertise_topics,
    }))
}

#[derive(Deserialize)]
pub struct TaskQuery {
    domain: String,
    #[serde(default)]
    mode: Option<AssignmentMode>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    /// Campaign root for sub-domain mode; defaults to `domain` itself.
    #[serde(default)]
    campaign: Option<String>,
    #[serde(default = "default_lang")]
    lang: String,
}

#[derive(Serialize)]
pub struct TaskView {
    object: Iri,
    title: Option<String>,
    annotator_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

#[derive(Serialize)]
pub struct TaskResponse {
    domain: String,
    mode: AssignmentMode,
    tasks: Vec<TaskView>,
}

pub async fn next_tasks(
    State(state): State<AppState>,
    Auth(session): Auth,
    Params(q): Params<TaskQuery>,
) -> ApiResult<Json<TaskResponse>> {
    let seed = match q.seed {
        Some(_) if !state.config.allow_seed => {
            return Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "seed_not_allowed",
                "this server does not accept a seed",
            ));
        }
        Some(seed) => seed,
        None => rand::random(),
    };
    let ds = state.store.read();
    let config = domain::get_domain(&ds, &q.domain)?;
    let mode = q.mode.unwrap_or(config.assignment_mode);
    let n = q.n.unwrap_or(5);
    let tasks: Vec<TaskCandidate> = match mode {
        AssignmentMode::Ranked => assignment::assign_ranked(&ds, &session.user, &q.domain, n, seed)?,
        AssignmentMode::Subdomain => {
            let campaign = q.campaign.as_deref().unwrap_or(&q.domain);
            assignment::assign_subdomain(&ds, &session.user, campaign, &q.domain, n, seed)?
        }
        AssignmentMode::Recommendation => assignment::assign_recommend(&ds, &session.user, &q.domain, n, seed)?,
    };
    let tasks = tasks
        .into_iter()
        .map(|t| TaskView {
            title: collection::title(&ds, &t.object, &q.lang),
            object: t.object,
            annotator_count: t.annotator_count,
            score: t.score,
        })
        .collect();
    Ok(Json(TaskResponse {
        domain: q.domain,
        mode,
        tasks,
    }))
}

pub async fn object_view(
    State(state): State<AppState>,
    Auth(_): Auth,
    Path(id): Path<String>,
    Params(q): Params<LangQuery>,
) -> ApiResult<Json<collection::ObjectView>> {
    let id = Iri::new(&id)?;
    Ok(Json(collection::get_object(&state.store.read(), &id, &q.lang)?))
}

#[derive(Deserialize)]
pub struct AnnotationRequest {
    object: Iri,
    field: String,
    body: BodyInput,
    #[serde(default)]
    region: Option<RegionInput>,
}

pub async fn create_annotation(
    State(state): State<AppState>,
    Auth(session): Auth,
    Body(req): Body<AnnotationRequest>,
) -> ApiResult<impl IntoResponse> {
    let request = NewAnnotation {
        user: session.user,
        object: req.object,
        field: req.field,
        body: req.body,
        region: req.region,
    };
    let created = annotation::submit_annotation(&mut state.store.write(), request, Utc::now())?;
    state.persist()?;
    Ok((StatusCode::CREATED, Json(created)))
}

#[derive(Deserialize)]
pub struct AnnotationQuery {
    #[serde(default)]
    object: Option<Iri>,
    #[serde(default)]
    user: Option<String>,
    #[serde(default)]
    field: Option<String>,
    #[serde(default)]
    status: Option<Status>,
    #[serde(default)]
    from: Option<DateTime<Utc>>,
    #[serde(default)]
    to: Option<DateTime<Utc>>,
}

impl From<AnnotationQuery> for AnnotationFilter {
    fn from(q: AnnotationQuery) -> Self {
        AnnotationFilter {
            object: q.object,
            user: q.user,
            field: q.field,
            status: q.status,
            from: q.from,
            to: q.to,
        }
    }
}

pub async fn list(
    State(state): State<AppState>,
    Auth(_): Auth,
    Params(q): Params<AnnotationQuery>,
) -> ApiResult<Json<Vec<annotation::Annotation>>> {
    Ok(Json(annotation::list_annotations(&state.store.read(), &q.into())?))
}

#[derive(Deserialize)]
pub struct AutocompleteQuery {
    domain: String,
    field: String,
    q: String,
    #[serde(default = "default_lang")]
    lang: String,
    #[serde(default)]
    limit: Option<usize>,
}

pub async fn autocomplete(
    State(state): State<AppState>,
    Auth(_): Auth,
    Params(q): Params<AutocompleteQuery>,
) -> ApiResult<Json<Vec<vocabulary::Suggestion>>> {
    let ds = state.store.read();
    let (defined_in, spec) = domain::resolve_field(&ds, &q.domain, &q.field)?;
    let Some((_, members)) = domain::field_candidates(&ds, &defined_in, &spec)? else {
        return Err(curio_core::Error::validation("no_vocabulary", format!("field `{}` has no vocabulary", q.field)).into());
    };
    let limit = q.limit.unwrap_or(vocabulary::DEFAULT_LIMIT);
    Ok(Json(vocabulary::autocomplete(&ds, &members, &q.q, &q.lang, limit)?))
}

#[derive(Deserialize)]
pub struct ExpertiseRequest {
    domain: String,
    levels: BTreeMap<Iri, u8>,
}

pub async fn set_expertise(
    State(state): State<AppState>,
    Auth(session): Auth,
    Body(req): Body<ExpertiseRequest>,
) -> ApiResult<Json<ProfileView>> {
    let profile = assignment::set_expertise(&mut state.store.write(), &session.user, &req.domain, &req.levels)?;
    state.persist()?;
    Ok(Json(profile.into()))
}

#[derive(Deserialize)]
pub struct SearchQuery {
    q: String,
    #[serde(default = "default_lang")]
    lang: String,
    #[serde(default)]
    domain: Option<String>,
}

pub async fn search(State(state): State<AppState>, Params(q): Params<SearchQuery>) -> ApiResult<Json<graph_search::SearchResult>> {
    Ok(Json(graph_search::search(&state.store.read(), &q.q, &q.lang, q.domain.as_deref())?))
}

#[derive(Deserialize)]
pub struct ReviewRequest {
    annotation: Iri,
    verdict: Verdict,
}

pub async fn create_review(
    State(state): State<AppState>,
    Auth(session): Auth,
    Body(req): Body<ReviewRequest>,
) -> ApiResult<impl IntoResponse> {
    let decision = quality::review(&mut state.store.write(), &req.annotation, &session.user, req.verdict, Utc::now())?;
    state.persist()?;
    Ok((StatusCode::CREATED, Json(decision)))
}

#[derive(Deserialize)]
pub struct FinalizeRequest {
    policy: Policy,
}

pub async fn finalize(
    State(state): State<AppState>,
    Auth(_): Auth,
    Body(req): Body<FinalizeRequest>,
) -> ApiResult<Json<quality::FinalizeReport>> {
    let report = quality::finalize_reviews(&mut state.store.write(), req.policy)?;
    state.persist()?;
    Ok(Json(report))
}

#[derive(Deserialize)]
pub struct ExportQuery {
    #[serde(default = "default_format")]
    format: String,
    #[serde(default = "default_lang")]
    lang: String,
    #[serde(flatten)]
    filter: AnnotationQuery,
}

fn default_format() -> String {
    "csv".into()
}

pub async fn export(State(state): State<AppState>, Auth(_): Auth, Params(q): Params<ExportQuery>) -> ApiResult<Response> {
    let format: ExportFormat = q.format.parse()?;
    let text = annotation::export_annotations(&state.store.read(), &q.filter.into(), format, &q.lang)?;
    let content_type = match format {
        ExportFormat::Csv => "text/csv; charset=utf-8",
        ExportFormat::NTriples => "application/n-triples",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], text).into_response())
}

#[derive(Deserialize)]
pub struct StatsQuery {
    domain: String,
    #[serde(default)]
    format: Option<String>,
}

pub async fn stats(State(state): State<AppState>, Auth(_): Auth, Params(q): Params<StatsQuery>) -> ApiResult<Response> {
    let stats = quality::domain_stats(&state.store.read(), &q.domain)?;
    Ok(match q.format.as_deref().unwrap_or("json") {
        "json" => Json(stats).into_response(),
        "csv" => ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], stats.to_csv()).into_response(),
        "table" | "text" => ([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], stats.to_table()).into_response(),
        other => {
            return Err(curio_core::Error::Usage(format!("unknown stats format `{other}` (expected json, csv or table)")).into());
        }
    })
}

pub async fn feedback(
    State(state): State<AppState>,
    Auth(session): Auth,
    Body(fb): Body<Feedback>,
) -> ApiResult<impl IntoResponse> {
    let id = record_feedback(&mut state.store.write(), &session.user, &fb, Utc::now())?;
    state.persist()?;
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "id": id }))))
}
