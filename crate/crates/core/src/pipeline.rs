//! Per-room experiment steps shared by the CLI and the test suites:
//! split, normalize, train, predict, score and estimate savings.

use crate::energy::{align_predictions, estimate_savings, simulate_rbc, EnergyConfig, RoomSavings};
use crate::error::{Error, Result};
use crate::lstm::{predict_series, train, ModelFile, TrainConfig, TrainingLog, PROB_EPS};
use crate::metrics::{evaluate, MetricsReport};
use crate::timeseries::{
    engineer_features, split_index, split_train_test, window_targets, Dataset, FeatureLayout,
    Features, NormStats, WindowSpec,
};

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub train_fraction: f64,
    pub include_occupancy: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train: TrainConfig::default(),
            train_fraction: DEFAULT_TRAIN_FRACTION,
            include_occupancy: false,
        }
    }
}

/// A fitted model together with its train-time normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: ModelFile,
    pub stats: NormStats,
}

impl TrainedModel {
    pub fn window(&self) -> u32 {
        self.model.train_config.window
    }

    /// Normalized features for a whole dataset using the train-time statistics.
    pub fn features(&self, d: &Dataset) -> Result<Features> {
        self.stats
            .apply(&engineer_features(d, &self.model.feature_layout))
    }

    /// One prediction per record, from a single pass over the whole series.
    pub fn predict(&self, d: &Dataset) -> Result<Vec<f64>> {
        predict_series(&self.model.params, &self.features(d)?)
    }
}

/// Fits normalization on the chronological train split and trains one model
/// for `cfg.train.window`. Targets come from the train split alone, so no
/// label crosses into the test period.
pub fn train_room(d: &Dataset, cfg: &ExperimentConfig) -> Result<(TrainedModel, TrainingLog)> {
    cfg.train.validate()?;
    let (train_set, _) = split_train_test(d, cfg.train_fraction)?;
    if train_set.len() < 2 {
        return Err(Error::DegenerateSplit(format!(
            "room {}: train split has {} record(s), need at least 2",
            d.room_id(),
            train_set.len()
        )));
    }
    let layout = FeatureLayout::standard(cfg.include_occupancy);
    let raw = engineer_features(&train_set, &layout);
    let stats = NormStats::fit(&raw, format!("{}:train", d.room_id()))?;
    let z = stats.apply(&raw)?;
    let targets = window_targets(&train_set, WindowSpec::new(cfg.train.window)?);
    let inputs = z.slice(0, targets.len());
    let (params, log) = train(&inputs, &targets, &cfg.train)?;
    let sidecar = format!("model_w{}.norm", cfg.train.window);
    let model = ModelFile::new(d.room_id(), layout, cfg.train.clone(), params, &sidecar);
    Ok((TrainedModel { model, stats }, log))
}

/// Windowed targets as near-certain probabilities, one per record. The last
/// record has no future; it gets 0.5 and is never scored.
pub fn oracle_predictions(d: &Dataset, w: WindowSpec) -> Vec<f64> {
    let mut preds: Vec<f64> = window_targets(d, w)
        .into_iter()
        .map(|y| if y == 1 { 1.0 - PROB_EPS } else { PROB_EPS })
        .collect();
    preds.push(0.5);
    preds
}

/// Test-split metrics from full-series predictions.
pub fn evaluate_room(
    preds: &[f64],
    d: &Dataset,
    w: WindowSpec,
    train_fraction: f64,
) -> Result<MetricsReport> {
    if preds.len() != d.len() {
        return Err(Error::Shape(format!(
            "room {}: {} predictions for {} records",
            d.room_id(),
            preds.len(),
            d.len()
        )));
    }
    let (_, test) = split_train_test(d, train_fraction)?;
    let start = split_index(d.len(), train_fraction);
    evaluate(&preds[start..], &test, w)
}

/// Rule-based baseline energy over the test split and the share of it spent
/// in minutes the predictions mark unoccupied.
pub fn savings_room(
    preds: &[f64],
    d: &Dataset,
    train_fraction: f64,
    cfg: &EnergyConfig,
) -> Result<RoomSavings> {
    if preds.len() != d.len() {
        return Err(Error::Shape(format!(
            "room {}: {} predictions for {} records",
            d.room_id(),
            preds.len(),
            d.len()
        )));
    }
    let (_, test) = split_train_test(d, train_fraction)?;
    let start = split_index(d.len(), train_fraction);
    let series = simulate_rbc(&test, cfg)?;
    let aligned = align_predictions(preds, start, test.len())?;
    let s = estimate_savings(&series, &aligned, cfg)?;
    RoomSavings::new(d.room_id(), series.total, s.saved)
}
