use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{Features, WindowSpec};

use super::adam::{adam_update, AdamConfig, AdamState};
use super::backward::{backward_segment, forward_segment};
use super::cell::{bce_loss, lstm_step, predict_head, LstmState};
use super::params::LstmParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Steps per truncated-BPTT segment; one optimizer update per segment.
    pub tbptt_segment: usize,
    pub window: u32,
    pub seed: u64,
    #[serde(default)]
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: 256,
            epochs: 10,
            learning_rate: 0.001,
            tbptt_segment: 100,
            window: 30,
            seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.epochs == 0 || self.tbptt_segment == 0 {
            return Err(Error::Config(
                "hidden, epochs and tbptt_segment must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        WindowSpec::supported(self.window)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    /// Mean per-step BCE for each epoch, in order.
    pub epoch_loss: Vec<f64>,
    pub updates: u64,
}

impl TrainingLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mean_loss\n");
        for (e, l) in self.epoch_loss.iter().enumerate() {
            out.push_str(&format!("{},{l:.10}\n", e + 1));
        }
        out
    }
}

/// Trains on one chronological series with truncated BPTT.
///
/// `features.row(t)` is the input at step `t` and `targets[t]` the label the
/// prediction made at `t` is scored against. The recurrent state starts at
/// zero each epoch and is carried (detached) across segment boundaries.
pub fn train(
    features: &Features,
    targets: &[u8],
    cfg: &TrainConfig,
) -> Result<(LstmParams, TrainingLog)> {
    cfg.validate()?;
    let n = targets.len();
    if n == 0 || features.len() != n {
        return Err(Error::Shape(format!(
            "training needs one target per feature row, got {} rows and {n} targets",
            features.len()
        )));
    }
    let rows: Vec<&[f64]> = features.rows().collect();
    let mut params = LstmParams::init(cfg.hidden, features.dim(), cfg.seed);
    let mut adam = AdamState::new(&params, cfg.adam);
    let mut log = TrainingLog::default();

    for epoch in 0..cfg.epochs {
        let mut state = LstmState::zeros(cfg.hidden);
        let mut total = 0.0;
        for start in (0..n).step_by(cfg.tbptt_segment) {
            let end = (start + cfg.tbptt_segment).min(n);
            let (caches, preds, next) = forward_segment(&params, &state, &rows[start..end])
                .map_err(|e| match e {
                    Error::NonFinite { step, message } => Error::NonFinite {
                        step: start + step,
                        message,
                    },
                    other => other,
                })?;
            for (k, (&p, &y)) in preds.iter().zip(&targets[start..end]).enumerate() {
                let l = bce_loss(p, y);
                if !l.is_finite() {
                    return Err(Error::NonFinite {
                        step: start + k,
                        message: format!("epoch {}: loss {l} (prediction {p})", epoch + 1),
                    });
                }
                total += l;
            }
            let grads = backward_segment(&params, &caches, &targets[start..end], &preds)?;
            adam_update(&mut params, &grads, &mut adam, cfg.learning_rate)?;
            log.updates += 1;
            if !params.is_finite() {
                return Err(Error::NonFinite {
                    step: end - 1,
                    message: format!("epoch {}: parameters diverged", epoch + 1),
                });
            }
            state = next;
        }
        let mean = total / n as f64;
        log::info!("epoch {}/{}: mean loss {mean:.6}", epoch + 1, cfg.epochs);
        log.epoch_loss.push(mean);
    }
    Ok((params, log))
}

/// Predictions for every row, continuing from `state`.
pub fn predict_from(
    params: &LstmParams,
    state: &LstmState,
    features: &Features,
) -> Result<(Vec<f64>, LstmState)> {
    if features.dim() != params.inputs {
        return Err(Error::Shape(format!(
            "model expects {} inputs, features have {}",
            params.inputs,
            features.dim()
        )));
    }
    let mut state = state.clone();
    let mut preds = Vec::with_capacity(features.len());
    for (t, x) in features.rows().enumerate() {
        let (next, _) = lstm_step(params, &state, x).map_err(|e| match e {
            Error::NonFinite { message, .. } => Error::NonFinite { step: t, message },
            other => other,
        })?;
        preds.push(predict_head(params, &next.h));
        state = next;
    }
    Ok((preds, state))
}

/// One chronological pass from the zero state.
pub fn predict_series(params: &LstmParams, features: &Features) -> Result<Vec<f64>> {
    predict_from(params, &LstmState::zeros(params.hidden), features).map(|(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::FeatureLayout;

    fn toy_features(n: usize) -> Features {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|t| {
                (0..12)
                    .map(|j| ((t * 7 + j * 3) % 11) as f64 / 5.0 - 1.0)
                    .collect()
            })
            .collect();
        Features::from_rows(FeatureLayout::standard(false), &rows).unwrap()
    }

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            hidden: 8,
            epochs: 2,
            seed: 11,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig {
            window: 7,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            learning_rate: -1.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn trailing_partial_segment_still_updates() {
        let f = toy_features(250);
        let targets: Vec<u8> = (0..250).map(|t| (t % 3 == 0) as u8).collect();
        let (_, log) = train(&f, &targets, &small_cfg()).unwrap();
        assert_eq!(log.updates, 2 * 3);
        assert_eq!(log.epoch_loss.len(), 2);
    }

    #[test]
    fn misaligned_targets_rejected() {
        let f = toy_features(10);
        assert!(matches!(
            train(&f, &[0; 9], &small_cfg()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn non_finite_input_aborts_with_step() {
        let mut rows: Vec<Vec<f64>> = toy_features(30).rows().map(|r| r.to_vec()).collect();
        rows[17][2] = f64::INFINITY;
        let f = Features::from_rows(FeatureLayout::standard(false), &rows).unwrap();
        match train(&f, &[1; 30], &small_cfg()) {
            Err(Error::NonFinite { step, .. }) => assert_eq!(step, 17),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn untrained_zero_model_predicts_one_half() {
        let p = LstmParams::zeros(4, 12);
        let preds = predict_series(&p, &toy_features(20)).unwrap();
        assert_eq!(preds.len(), 20);
        assert!(preds.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn predict_rejects_wrong_width() {
        let p = LstmParams::zeros(4, 5);
        assert!(matches!(
            predict_series(&p, &toy_features(3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn loss_log_csv() {
        let log = TrainingLog {
            epoch_loss: vec![0.5, 0.25],
            updates: 2,
        };
        assert_eq!(
            log.to_csv(),
            "epoch,mean_loss\n1,0.5000000000\n2,0.2500000000\n"
        );
    }
}
