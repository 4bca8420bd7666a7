use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dst_core::nis::{McmcConfig, PriorConfig};
use dst_core::query::query_targets;
use dst_core::query::Targets;
use dst_core::LockSet;
use serde::Serialize;

use crate::api::{self, JobState, JobStatus, NewScenario, RefitRequest, VERSION_HEADER};
use crate::error::{ApiError, ErrorCode};
use crate::state::AppState;
use crate::store::StoredScenario;

type AppResult = Result<Response, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/model", get(get_model))
        .route("/api/query", post(post_query))
        .route("/api/compare", post(post_compare))
        .route("/api/scenarios", get(list_scenarios).post(create_scenario))
        .route("/api/scenarios/{id}", get(get_scenario).delete(delete_scenario))
        .route("/api/routes", get(get_routes))
        .route("/api/species", get(get_species))
        .route("/api/nis/refit", post(post_refit))
        .route("/api/nis/refit/{id}", get(get_refit))
        .layer(middleware::from_fn_with_state(state.clone(), tag_version))
        .with_state(state)
}

fn versioned<T: Serialize>(status: StatusCode, version: &str, body: &T) -> Response {
    let mut res = (status, Json(body)).into_response();
    if let Ok(v) = HeaderValue::from_str(version) {
        res.headers_mut().insert(VERSION_HEADER, v);
    }
    res
}

/// Adds the current model version to responses that did not set one.
async fn tag_version(State(st): State<Arc<AppState>>, req: Request, next: Next) -> Response {
    let mut res = next.run(req).await;
    if !res.headers().contains_key(VERSION_HEADER) {
        if let Ok(v) = HeaderValue::from_str(&st.snapshot().version) {
            res.headers_mut().insert(VERSION_HEADER, v);
        }
    }
    res
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    b.map(|Json(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))
}

async fn get_model(State(st): State<Arc<AppState>>) -> Response {
    let m = st.snapshot();
    let mut res = (
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        m.catalog.clone(),
    )
        .into_response();
    if let Ok(v) = HeaderValue::from_str(&m.version) {
        res.headers_mut().insert(VERSION_HEADER, v);
    }
    res
}

async fn post_query(State(st): State<Arc<AppState>>, b: Result<Json<LockSet>, JsonRejection>) -> AppResult {
    let locks = body(b)?;
    let m = st.snapshot();
    let r = {
        let m = m.clone();
        blocking(move || api::query_response(&m.bundle, &m.version, &locks)).await??
    };
    Ok(versioned(StatusCode::OK, &m.version, &r))
}

async fn post_compare(
    State(st): State<Arc<AppState>>,
    b: Result<Json<api::CompareRequest>, JsonRejection>,
) -> AppResult {
    let req = body(b)?;
    let m = st.snapshot();
    let r = {
        let m = m.clone();
        blocking(move || api::compare_response(&m.bundle, &m.version, &req.scenarios)).await??
    };
    Ok(versioned(StatusCode::OK, &m.version, &r))
}

async fn list_scenarios(State(st): State<Arc<AppState>>) -> AppResult {
    let list = st.store.lock().expect("store lock poisoned").list().to_vec();
    Ok(Json(list).into_response())
}

async fn get_scenario(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> AppResult {
    let store = st.store.lock().expect("store lock poisoned");
    let s = store
        .get(&id)
        .ok_or_else(|| ApiError::not_found(format!("no scenario with id `{id}`")))?;
    Ok(Json(s).into_response())
}

async fn create_scenario(State(st): State<Arc<AppState>>, b: Result<Json<NewScenario>, JsonRejection>) -> AppResult {
    let req = body(b)?;
    let m = st.snapshot();
    let check = {
        let (m, locks) = (m.clone(), req.locks.clone());
        blocking(move || query_targets(&m.bundle.network, &locks, &Targets::Only(Default::default()))).await??
    };
    if !check.consistent {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::Inconsistent,
            check.reason.unwrap_or_else(|| "scenario is inconsistent".into()),
        ));
    }
    let name = match req.name.trim() {
        "" => "untitled".to_string(),
        n => n.to_string(),
    };
    let s = StoredScenario {
        id: uuid::Uuid::new_v4().to_string(),
        name,
        locks: req.locks,
        created_at: now(),
        note: req.note,
    };
    st.store
        .lock()
        .expect("store lock poisoned")
        .insert(s.clone())
        .map_err(|e| ApiError::internal(format!("scenario store: {e}")))?;
    Ok(versioned(StatusCode::CREATED, &m.version, &s))
}

async fn delete_scenario(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> AppResult {
    let removed = st
        .store
        .lock()
        .expect("store lock poisoned")
        .remove(&id)
        .map_err(|e| ApiError::internal(format!("scenario store: {e}")))?;
    if !removed {
        return Err(ApiError::not_found(format!("no scenario with id `{id}`")));
    }
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn get_routes(State(st): State<Arc<AppState>>) -> AppResult {
    let m = st.snapshot();
    Ok(versioned(StatusCode::OK, &m.version, &api::route_catalog(&m.bundle)))
}

async fn get_species(State(st): State<Arc<AppState>>) -> AppResult {
    let m = st.snapshot();
    Ok(versioned(StatusCode::OK, &m.version, &m.bundle.species))
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

async fn post_refit(State(st): State<Arc<AppState>>, b: Option<Json<RefitRequest>>) -> AppResult {
    let req = b.map(|Json(r)| r).unwrap_or_default();
    let mcmc = req.mcmc.unwrap_or_else(McmcConfig::desk);
    let prior = req.prior.unwrap_or_else(PriorConfig::default);
    mcmc.check()?;
    prior.check()?;
    let rule = req.rule.unwrap_or_default();
    let status = {
        let mut jobs = st.jobs.lock().expect("jobs lock poisoned");
        if let Some(id) = &jobs.running {
            return Err(ApiError::conflict(format!("refit job {id} is still running"))
                .with_detail(serde_json::json!({ "job": id })));
        }
        let status = JobStatus {
            id: uuid::Uuid::new_v4().to_string(),
            state: JobState::Running,
            started_at: now(),
            finished_at: None,
            mcmc: mcmc.clone(),
            error: None,
            model_version: None,
            max_rhat: None,
            draws: None,
        };
        jobs.running = Some(status.id.clone());
        jobs.all.insert(status.id.clone(), status.clone());
        status
    };
    let id = status.id.clone();
    let task_state = st.clone();
    tokio::spawn(async move {
        let base = task_state.snapshot();
        let outcome = tokio::task::spawn_blocking(move || base.bundle.refit_nis(&prior, &mcmc, rule)).await;
        let mut jobs = task_state.jobs.lock().expect("jobs lock poisoned");
        let job = jobs.all.get_mut(&id).expect("job registered");
        job.finished_at = Some(now());
        match outcome {
            Ok(Ok((bundle, post))) => {
                job.max_rhat = Some(post.diagnostics.max_rhat());
                job.draws = Some(post.draws.len());
                job.model_version = Some(task_state.install(bundle));
                job.state = JobState::Done;
            }
            Ok(Err(e)) => {
                job.state = JobState::Failed;
                job.error = Some(e.to_string());
            }
            Err(e) => {
                job.state = JobState::Failed;
                job.error = Some(format!("refit worker failed: {e}"));
            }
        }
        jobs.running = None;
    });
    Ok((StatusCode::ACCEPTED, Json(status)).into_response())
}

async fn get_refit(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> AppResult {
    let jobs = st.jobs.lock().expect("jobs lock poisoned");
    let job = jobs
        .all
        .get(&id)
        .ok_or_else(|| ApiError::not_found(format!("no refit job with id `{id}`")))?;
    Ok(Json(job).into_response())
}
