use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::params::LstmParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment accumulators shaped like the parameters they track.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: LstmParams,
    pub v: LstmParams,
    pub step: u64,
    pub config: AdamConfig,
}

impl AdamState {
    pub fn new(like: &LstmParams, config: AdamConfig) -> Self {
        AdamState {
            m: LstmParams::zeros(like.hidden, like.inputs),
            v: LstmParams::zeros(like.hidden, like.inputs),
            step: 0,
            config,
        }
    }
}

/// One bias-corrected Adam step, applied in place.
pub fn adam_update(
    params: &mut LstmParams,
    grads: &LstmParams,
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if (params.hidden, params.inputs) != (grads.hidden, grads.inputs)
        || (params.hidden, params.inputs) != (state.m.hidden, state.m.inputs)
    {
        return Err(Error::Shape(format!(
            "adam: params {}x{}, grads {}x{}, state {}x{}",
            params.hidden,
            params.inputs,
            grads.hidden,
            grads.inputs,
            state.m.hidden,
            state.m.inputs
        )));
    }
    state.step += 1;
    let AdamConfig { beta1, beta2, eps } = state.config;
    let t = state.step as i32;
    let bc1 = 1.0 - beta1.powi(t);
    let bc2 = 1.0 - beta2.powi(t);

    let g = grads.tensors();
    let m = state.m.tensors_mut();
    let v = state.v.tensors_mut();
    for (((theta, g), m), v) in params.tensors_mut().into_iter().zip(g).zip(m).zip(v) {
        for k in 0..theta.len() {
            m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
            v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
            let m_hat = m[k] / bc1;
            let v_hat = v[k] / bc2;
            theta[k] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
