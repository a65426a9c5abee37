use crate::error::{Error, Result};

use super::cell::{bce_loss, lstm_step, predict_head, LstmState, StepCache};
use super::params::{Gate, LstmParams};

/// Exact gradients of the mean per-step BCE over one truncated segment.
///
/// `caches[t]`, `targets[t]` and `preds[t]` describe step `t`; the state that
/// entered `caches[0]` is treated as a constant, so no gradient leaves the
/// segment.
pub fn backward_segment(
    params: &LstmParams,
    caches: &[StepCache],
    targets: &[u8],
    preds: &[f64],
) -> Result<LstmParams> {
    let n = caches.len();
    if targets.len() != n || preds.len() != n {
        return Err(Error::Shape(format!(
            "segment has {n} caches, {} targets and {} predictions",
            targets.len(),
            preds.len()
        )));
    }
    let hdim = params.hidden;
    let mut grads = LstmParams::zeros(hdim, params.inputs);
    if n == 0 {
        return Ok(grads);
    }
    let scale = 1.0 / n as f64;

    let mut dh_next = vec![0.0; hdim];
    let mut dc_next = vec![0.0; hdim];
    let mut z = Vec::with_capacity(hdim + params.inputs);
    let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hdim]);

    for t in (0..n).rev() {
        let s = &caches[t];
        let dlogit = (preds[t] - targets[t] as f64) * scale;
        for (g, h) in grads.w_fc.iter_mut().zip(&s.h) {
            *g += dlogit * h;
        }
        grads.b_fc += dlogit;

        for k in 0..hdim {
            let dh = dh_next[k] + dlogit * params.w_fc[k];
            let tanh_c = s.c[k].tanh();
            let d_o = dh * tanh_c;
            let dc = dc_next[k] + dh * s.o[k] * (1.0 - tanh_c * tanh_c);
            let d_f = dc * s.c_prev[k];
            let d_i = dc * s.ctilde[k];
            let d_ct = dc * s.i[k];
            dc_next[k] = dc * s.f[k];

            da[0][k] = d_f * s.f[k] * (1.0 - s.f[k]);
            da[1][k] = d_i * s.i[k] * (1.0 - s.i[k]);
            da[2][k] = d_o * s.o[k] * (1.0 - s.o[k]);
            da[3][k] = d_ct * (1.0 - s.ctilde[k] * s.ctilde[k]);
        }

        z.clear();
        z.extend_from_slice(&s.h_prev);
        z.extend_from_slice(&s.x);
        dh_next.iter_mut().for_each(|v| *v = 0.0);

        for (g, da_g) in Gate::ALL.into_iter().zip(&da) {
            let (w, _) = params.gate(g);
            let (gw, gb) = grads.gate_mut(g);
            for r in 0..hdim {
                let a = da_g[r];
                if a == 0.0 {
                    continue;
                }
                gb[r] += a;
                for (acc, zv) in gw.row_mut(r).iter_mut().zip(&z) {
                    *acc += a * zv;
                }
                for (acc, wv) in dh_next.iter_mut().zip(&w.row(r)[..hdim]) {
                    *acc += a * wv;
                }
            }
        }
    }
    Ok(grads)
}

/// Runs a segment forward from `init` and returns its mean clamped BCE.
pub fn segment_loss<X: AsRef<[f64]>>(
    params: &LstmParams,
    init: &LstmState,
    xs: &[X],
    targets: &[u8],
) -> Result<f64> {
    let mut state = init.clone();
    let mut total = 0.0;
    for (x, &y) in xs.iter().zip(targets) {
        let (next, _) = lstm_step(params, &state, x.as_ref())?;
        total += bce_loss(predict_head(params, &next.h), y);
        state = next;
    }
    Ok(total / xs.len().max(1) as f64)
}

/// Forward pass over a segment, keeping the caches and predictions.
pub fn forward_segment<X: AsRef<[f64]>>(
    params: &LstmParams,
    init: &LstmState,
    xs: &[X],
) -> Result<(Vec<StepCache>, Vec<f64>, LstmState)> {
    let mut state = init.clone();
    let mut caches = Vec::with_capacity(xs.len());
    let mut preds = Vec::with_capacity(xs.len());
    for (k, x) in xs.iter().enumerate() {
        let (next, cache) = lstm_step(params, &state, x.as_ref()).map_err(|e| match e {
            Error::NonFinite { message, .. } => Error::NonFinite { step: k, message },
            other => other,
        })?;
        preds.push(predict_head(params, &next.h));
        caches.push(cache);
        state = next;
    }
    Ok((caches, preds, state))
}
