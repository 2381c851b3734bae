//! Read-only HTTP facade over one loaded corpus: statistics, field value
//! enumeration and filter preview/apply for the filter builder.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;

use cantus_core::filter::config_digest;
use cantus_core::{apply_filter, export_filter, parse_filter, stats, ChantField, Corpus, Entity, SourceField};

pub const SAMPLE_SIZE: usize = 20;

#[derive(Clone)]
struct AppState {
    corpus: Option<Arc<Corpus>>,
}

/// Chant columns shown in a preview sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleChant {
    pub chantlink: String,
    pub incipit: String,
    pub cantus_id: String,
    pub genre: Option<String>,
    pub db: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreviewResult {
    pub chant_count: usize,
    pub source_count: usize,
    pub sample_chants: Vec<SampleChant>,
    pub config_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplyResult {
    /// Canonical filter text; feeding it back reproduces the CSVs.
    pub config: String,
    pub config_digest: String,
    pub history: String,
    pub chants_csv: String,
    pub sources_csv: String,
}

enum ApiError {
    NoCorpus,
    NotFound(String),
    BadRequest(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::NoCorpus => (StatusCode::SERVICE_UNAVAILABLE, "no corpus loaded".to_string()),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
        };
        (status, Json(json!({ "error": message }))).into_response()
    }
}

impl AppState {
    fn corpus(&self) -> Result<&Corpus, ApiError> {
        self.corpus.as_deref().ok_or(ApiError::NoCorpus)
    }
}

/// Builds the router. `corpus` is `None` when nothing was loaded; every
/// endpoint then answers 503.
pub fn router(corpus: Option<Arc<Corpus>>, allow_cross_origin: bool) -> Router {
    let app = Router::new()
        .route("/stats", get(get_stats))
        .route("/fields/:entity/:field/values", get(field_values))
        .route("/filter/preview", post(preview))
        .route("/filter/apply", post(apply))
        .with_state(AppState { corpus });
    if allow_cross_origin {
        app.layer(CorsLayer::permissive())
    } else {
        app
    }
}

pub async fn serve(app: Router, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await
}

fn wants(headers: &HeaderMap, mime: &str) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains(mime))
}

async fn get_stats(State(state): State<AppState>, headers: HeaderMap) -> Result<Response, ApiError> {
    let report = stats::corpus_stats(state.corpus()?);
    Ok(if wants(&headers, "text/csv") {
        ([(header::CONTENT_TYPE, "text/csv")], report.to_csv()).into_response()
    } else if wants(&headers, "text/plain") {
        ([(header::CONTENT_TYPE, "text/plain")], report.to_text()).into_response()
    } else {
        Json(report).into_response()
    })
}

/// Distinct populated values of one column with their counts, sorted by value.
pub fn value_counts(corpus: &Corpus, entity: Entity, field: &str) -> Option<Vec<(String, usize)>> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    match entity {
        Entity::Chant => {
            let f: ChantField = field.parse().ok()?;
            for c in corpus.chants() {
                if let Some(v) = c.get(f) {
                    *counts.entry(v.to_string()).or_default() += 1;
                }
            }
        }
        Entity::Source => {
            let f: SourceField = field.parse().ok()?;
            for s in corpus.sources() {
                if let Some(v) = s.get(f) {
                    *counts.entry(v.into_owned()).or_default() += 1;
                }
            }
        }
    }
    Some(counts.into_iter().collect())
}

async fn field_values(
    State(state): State<AppState>,
    Path((entity, field)): Path<(String, String)>,
) -> Result<Json<Vec<(String, usize)>>, ApiError> {
    let corpus = state.corpus()?;
    let entity: Entity = entity
        .parse()
        .map_err(|_| ApiError::NotFound(format!("unknown entity `{entity}`")))?;
    value_counts(corpus, entity, &field)
        .map(Json)
        .ok_or_else(|| ApiError::NotFound(format!("unknown field `{field}`")))
}

fn filtered(state: &AppState, body: &str) -> Result<(Corpus, cantus_core::FilterConfig), ApiError> {
    let corpus = state.corpus()?;
    let config = parse_filter(body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let out = apply_filter(corpus, &config).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    Ok((out, config))
}

async fn preview(State(state): State<AppState>, body: String) -> Result<Json<PreviewResult>, ApiError> {
    let (out, config) = filtered(&state, &body)?;
    let sample_chants = out
        .chants()
        .iter()
        .take(SAMPLE_SIZE)
        .map(|c| SampleChant {
            chantlink: c.chantlink.clone(),
            incipit: c.incipit.clone(),
            cantus_id: c.cantus_id.clone(),
            genre: c.genre.clone(),
            db: c.db.clone(),
        })
        .collect();
    Ok(Json(PreviewResult {
        chant_count: out.chants().len(),
        source_count: out.sources().len(),
        sample_chants,
        config_digest: config_digest(&config),
    }))
}

async fn apply(State(state): State<AppState>, body: String) -> Result<Json<ApplyResult>, ApiError> {
    let (out, config) = filtered(&state, &body)?;
    let (chants_csv, sources_csv) = out.export_csv();
    Ok(Json(ApplyResult {
        config: export_filter(&config),
        config_digest: config_digest(&config),
        history: out.export_history(),
        chants_csv: String::from_utf8_lossy(&chants_csv).into_owned(),
        sources_csv: String::from_utf8_lossy(&sources_csv).into_owned(),
    }))
}
