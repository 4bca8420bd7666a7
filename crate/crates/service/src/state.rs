use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, RwLock};

use dst_core::ModelBundle;

use crate::api::{self, JobStatus};
use crate::store::ScenarioStore;

/// A model together with its version tag and cached catalog body.
#[derive(Debug)]
pub struct LoadedModel {
    pub version: String,
    pub bundle: ModelBundle,
    pub catalog: String,
}

impl LoadedModel {
    pub fn new(bundle: ModelBundle) -> Self {
        let version = api::model_version(&bundle);
        let catalog = serde_json::to_string(&api::model_catalog(&bundle, &version)).expect("catalog serializes");
        LoadedModel {
            version,
            bundle,
            catalog,
        }
    }
}

#[derive(Debug, Default)]
pub(crate) struct Jobs {
    pub running: Option<String>,
    pub all: BTreeMap<String, JobStatus>,
}

/// Shared server state. Readers clone the current model pointer and work
/// on that snapshot; installing a model replaces the pointer in one step.
#[derive(Debug)]
pub struct AppState {
    model: RwLock<Arc<LoadedModel>>,
    pub(crate) store: Mutex<ScenarioStore>,
    pub(crate) jobs: Mutex<Jobs>,
}

impl AppState {
    pub fn new(bundle: ModelBundle, store: ScenarioStore) -> Arc<AppState> {
        Arc::new(AppState {
            model: RwLock::new(Arc::new(LoadedModel::new(bundle))),
            store: Mutex::new(store),
            jobs: Mutex::new(Jobs::default()),
        })
    }

    pub fn snapshot(&self) -> Arc<LoadedModel> {
        self.model.read().expect("model lock poisoned").clone()
    }

    /// Swaps in a new model and returns its version.
    pub fn install(&self, bundle: ModelBundle) -> String {
        let loaded = Arc::new(LoadedModel::new(bundle));
        let version = loaded.version.clone();
        *self.model.write().expect("model lock poisoned") = loaded;
        log::info!("installed model {version}");
        version
    }

    pub fn jobs_running(&self) -> bool {
        self.jobs.lock().expect("jobs lock poisoned").running.is_some()
    }

    /// Swaps in an already prepared model.
    pub fn install_loaded(&self, loaded: Arc<LoadedModel>) {
        *self.model.write().expect("model lock poisoned") = loaded;
    }
}
