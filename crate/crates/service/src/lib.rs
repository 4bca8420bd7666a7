//! HTTP service over the biofouling decision model.
//!
//! All endpoints live under `/api` and speak JSON. Every response carries
//! the version of the model that produced it in the `x-model-version`
//! header; query and compare bodies repeat it as `model_version`.

pub mod api;
pub mod error;
mod routes;
pub mod state;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::Router;
use dst_core::ModelBundle;
use tower_http::services::ServeDir;

pub use api::{QueryResponse, VERSION_HEADER};
pub use error::{ApiError, ErrorCode};
pub use routes::router;
pub use state::{AppState, LoadedModel};
pub use store::{ScenarioStore, StoredScenario};

/// Default scenario store file name inside the model directory.
pub const STORE_FILE: &str = "scenarios.jsonl";

#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub model_dir: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
    /// Scenario store file; defaults to `scenarios.jsonl` in the model
    /// directory, or in the working directory without one.
    pub store: Option<PathBuf>,
}

/// The API router, plus static files from `ui_dir` when it exists.
pub fn app(state: Arc<AppState>, ui_dir: Option<&std::path::Path>) -> Router {
    let api = router(state);
    match ui_dir {
        Some(dir) if dir.is_dir() => api.fallback_service(ServeDir::new(dir)),
        Some(dir) => {
            log::warn!("ui directory {} not found; serving the API only", dir.display());
            api
        }
        None => api,
    }
}

pub fn load_state(cfg: &ServeConfig) -> Result<Arc<AppState>, Box<dyn std::error::Error + Send + Sync>> {
    let bundle = match &cfg.model_dir {
        Some(dir) => ModelBundle::load(dir)?,
        None => ModelBundle::default_bundle()?,
    };
    let store_path = cfg.store.clone().unwrap_or_else(|| match &cfg.model_dir {
        Some(dir) => dir.join(STORE_FILE),
        None => PathBuf::from(STORE_FILE),
    });
    let store = ScenarioStore::open(&store_path)?;
    Ok(AppState::new(bundle, store))
}

/// Loads the model and serves until Ctrl-C.
pub async fn serve(cfg: ServeConfig) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let state = load_state(&cfg)?;
    let listener = tokio::net::TcpListener::bind(cfg.addr).await?;
    log::info!(
        "serving model {} on http://{}",
        state.snapshot().version,
        listener.local_addr()?
    );
    axum::serve(listener, app(state, cfg.ui_dir.as_deref()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
