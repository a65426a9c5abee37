use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;
use crate::timeseries::{FeatureLayout, NormStats};

use super::params::LstmParams;
use super::train::TrainConfig;

pub const MODEL_FORMAT: &str = "occupancy-lstm/1";

/// A trained model as stored on disk (JSON). Normalization statistics live in
/// a `.norm` sidecar next to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub room_id: String,
    pub hidden: usize,
    pub inputs: usize,
    pub feature_layout: FeatureLayout,
    pub norm_sidecar: String,
    pub train_config: TrainConfig,
    pub params: LstmParams,
}

/// `model_w30.json` -> `model_w30.norm`
pub fn sidecar_path(model_path: &Path) -> PathBuf {
    model_path.with_extension("norm")
}

impl ModelFile {
    pub fn new(
        room_id: &str,
        layout: FeatureLayout,
        train_config: TrainConfig,
        params: LstmParams,
        sidecar_name: &str,
    ) -> Self {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            room_id: room_id.to_string(),
            hidden: params.hidden,
            inputs: params.inputs,
            feature_layout: layout,
            norm_sidecar: sidecar_name.to_string(),
            train_config,
            params,
        }
    }

    /// Writes the model JSON and its normalization sidecar.
    pub fn save(&self, path: &Path, stats: &NormStats) -> Result<()> {
        let json = serde_json::to_string(self)
            .map_err(|e| Error::Model(format!("cannot serialize model: {e}")))?;
        let sidecar = path.with_file_name(&self.norm_sidecar);
        stats.save(&sidecar)?;
        fsutil::write_atomic(path, json.as_bytes())
    }

    pub fn load(path: &Path) -> Result<(Self, NormStats)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: ModelFile = serde_json::from_str(&text)
            .map_err(|e| Error::Model(format!("{}: {e}", path.display())))?;
        if model.format != MODEL_FORMAT {
            return Err(Error::Model(format!(
                "{}: unsupported format `{}`",
                path.display(),
                model.format
            )));
        }
        if model.params.hidden != model.hidden
            || model.params.inputs != model.inputs
            || model.feature_layout.dim() != model.inputs
        {
            return Err(Error::Model(format!(
                "{}: inconsistent dimensions",
                path.display()
            )));
        }
        model.params.validate()?;
        let stats = NormStats::load(&path.with_file_name(&model.norm_sidecar))?;
        if stats.names != model.feature_layout.names {
            return Err(Error::Model(format!(
                "{}: sidecar feature list does not match the model",
                path.display()
            )));
        }
        Ok((model, stats))
    }
}
