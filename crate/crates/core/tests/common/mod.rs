//! Brute-force reference implementations shared by the integration suites.
#![allow(dead_code)]

use occupancy_hvac::lstm::{segment_loss, LstmParams, LstmState};

/// Fraction of (positive, negative) pairs ranked correctly, ties counting half.
pub fn brute_auroc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let mut wins = 0.0;
    let mut pairs = 0u64;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1;
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    (pairs > 0).then(|| wins / pairs as f64)
}

/// Step-sum of precision over recall increments, sweeping every distinct
/// score as a `score >= threshold` cut from the top.
pub fn brute_ap(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let positives = labels.iter().filter(|&&y| y == 1).count();
    if positives == 0 {
        return None;
    }
    let mut thresholds = scores.to_vec();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for tau in thresholds {
        let (mut tp, mut fp) = (0usize, 0usize);
        for (s, &y) in scores.iter().zip(labels) {
            if *s >= tau {
                if y == 1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let recall = tp as f64 / positives as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Some(ap)
}

/// Central-difference gradient of the mean segment loss, tensor by tensor in
/// the same order as [`LstmParams::tensors`].
pub fn fd_gradients(
    params: &LstmParams,
    init: &LstmState,
    xs: &[Vec<f64>],
    targets: &[u8],
    delta: f64,
) -> Vec<Vec<f64>> {
    let mut p = params.clone();
    let shapes: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    let mut out = Vec::new();
    for (k, len) in shapes.into_iter().enumerate() {
        let mut g = vec![0.0; len];
        for (j, gj) in g.iter_mut().enumerate() {
            let orig = p.tensors()[k][j];
            p.tensors_mut()[k][j] = orig + delta;
            let up = segment_loss(&p, init, xs, targets).unwrap();
            p.tensors_mut()[k][j] = orig - delta;
            let down = segment_loss(&p, init, xs, targets).unwrap();
            p.tensors_mut()[k][j] = orig;
            *gj = (up - down) / (2.0 * delta);
        }
        out.push(g);
    }
    out
}

/// `|a - b| / max(|a| + |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(floor)
}

/// True windowed target computed by scanning: 1 iff any of the next `w`
/// records after `t` (clipped to the series end) is occupied.
pub fn brute_target(occ: &[u8], t: usize, w: usize) -> u8 {
    let end = (t + w).min(occ.len() - 1);
    u8::from(occ[t + 1..=end].contains(&1))
}

/// Per-minute dataset with the given occupancy, starting at `start`, and
/// sensor values that vary smoothly with the step index.
pub fn dataset_from(
    occ: &[u8],
    start: chrono::NaiveDateTime,
) -> occupancy_hvac::timeseries::Dataset {
    use occupancy_hvac::timeseries::{Dataset, EventRecord};
    let records = occ
        .iter()
        .enumerate()
        .map(|(t, &o)| {
            let phase = t as f64 * 0.37;
            EventRecord {
                timestamp: start + chrono::Duration::minutes(t as i64),
                airflow_actual: 50.0 + 30.0 * phase.sin() + 20.0 * o as f64,
                airflow_setpoint: 65.0 + 25.0 * o as f64,
                cooling_setpoint: 74.5,
                heating_setpoint: 67.5,
                damper_position_command: 30.0 + 10.0 * phase.cos(),
                discharge_temperature: 58.0 + phase.sin(),
                hw_valve_command: (t % 7) as f64,
                space_temperature_actual: 71.0 + 3.0 * (phase * 0.5).sin(),
                occupancy: o,
            }
        })
        .collect();
    Dataset::new("RM-T", records).expect("valid records")
}

pub fn july() -> chrono::NaiveDateTime {
    chrono::NaiveDate::from_ymd_opt(2019, 7, 9)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
}
