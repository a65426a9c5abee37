//! Single-layer LSTM occupancy model: forward cell, sigmoid head, truncated
//! BPTT, Adam, training and inference loops, and the on-disk model format.

mod adam;
mod backward;
mod cell;
mod model;
mod params;
mod train;

pub use adam::{adam_update, AdamConfig, AdamState};
pub use backward::{backward_segment, forward_segment, segment_loss};
pub use cell::{bce_loss, lstm_step, predict_head, sigmoid, LstmState, StepCache, PROB_EPS};
pub use model::{sidecar_path, ModelFile, MODEL_FORMAT};
pub use params::{Gate, LstmParams, Matrix, TENSOR_NAMES};
pub use train::{predict_from, predict_series, train, TrainConfig, TrainingLog};
