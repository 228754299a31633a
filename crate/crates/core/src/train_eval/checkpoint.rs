use std::path::Path;

use super::{Model, TrainError};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(serde::Serialize, serde::Deserialize)]
struct CheckpointFile {
    version: u32,
    model: Model,
}

impl Model {
    pub fn to_json(&self) -> Result<String, TrainError> {
        serde_json::to_string(&CheckpointFile {
            version: CHECKPOINT_VERSION,
            model: self.clone(),
        })
        .map_err(|e| TrainError::Checkpoint(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, TrainError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| TrainError::Checkpoint(e.to_string()))?;
        let found = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| TrainError::Checkpoint("missing version".into()))? as u32;
        if found != CHECKPOINT_VERSION {
            return Err(TrainError::Version {
                found,
                expected: CHECKPOINT_VERSION,
            });
        }
        let file: CheckpointFile =
            serde_json::from_value(value).map_err(|e| TrainError::Checkpoint(e.to_string()))?;
        let mut model = file.model;
        model.store.reindex()?;
        model.relink()?;
        if model.schedule.is_empty() {
            return Err(TrainError::Checkpoint("empty curvature schedule".into()));
        }
        Ok(model)
    }

    /// Write atomically via a temporary sibling file.
    pub fn checkpoint(&self, path: &Path) -> Result<(), TrainError> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json()?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

pub fn restore(path: &Path) -> Result<Model, TrainError> {
    Model::from_json(&std::fs::read_to_string(path)?)
}
