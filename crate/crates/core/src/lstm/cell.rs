use crate::error::{Error, Result};

use super::params::{Gate, LstmParams};

/// Lower/upper clamp applied to probabilities before taking logs.
pub const PROB_EPS: f64 = 1e-7;

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Recurrent state `(h, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        LstmState {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// Everything the backward pass needs from one forward step.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub o: Vec<f64>,
    pub ctilde: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One LSTM step on the concatenated input `[h_prev, x]`.
pub fn lstm_step(
    params: &LstmParams,
    state: &LstmState,
    x: &[f64],
) -> Result<(LstmState, StepCache)> {
    let hdim = params.hidden;
    if x.len() != params.inputs || state.h.len() != hdim || state.c.len() != hdim {
        return Err(Error::Shape(format!(
            "step expects x of length {} and state of length {hdim}, got {} and ({}, {})",
            params.inputs,
            x.len(),
            state.h.len(),
            state.c.len()
        )));
    }
    if let Some(j) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            step: 0,
            message: format!("input component {j} is {}", x[j]),
        });
    }

    let mut z = Vec::with_capacity(hdim + params.inputs);
    z.extend_from_slice(&state.h);
    z.extend_from_slice(x);

    let mut acts: [Vec<f64>; 4] = Default::default();
    for (g, out) in Gate::ALL.into_iter().zip(acts.iter_mut()) {
        let (w, b) = params.gate(g);
        *out = (0..hdim)
            .map(|r| {
                let a = dot(w.row(r), &z) + b[r];
                match g {
                    Gate::Candidate => a.tanh(),
                    _ => sigmoid(a),
                }
            })
            .collect();
    }
    let [f, i, o, ctilde] = acts;

    let c: Vec<f64> = (0..hdim)
        .map(|k| f[k] * state.c[k] + i[k] * ctilde[k])
        .collect();
    let h: Vec<f64> = (0..hdim).map(|k| o[k] * c[k].tanh()).collect();

    let next = LstmState {
        h: h.clone(),
        c: c.clone(),
    };
    let cache = StepCache {
        x: x.to_vec(),
        h_prev: state.h.clone(),
        c_prev: state.c.clone(),
        f,
        i,
        o,
        ctilde,
        c,
        h,
    };
    Ok((next, cache))
}

/// Output head: `sigmoid(w_fc . h + b_fc)`.
pub fn predict_head(params: &LstmParams, h: &[f64]) -> f64 {
    sigmoid(dot(&params.w_fc, h) + params.b_fc)
}

/// Binary cross-entropy with the prediction clamped to `[1e-7, 1 - 1e-7]`.
pub fn bce_loss(yhat: f64, y: u8) -> f64 {
    let p = yhat.clamp(PROB_EPS, 1.0 - PROB_EPS);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}
