//! Binary classification metrics: mean BCE, AUROC and average precision.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lstm::bce_loss;
use crate::timeseries::{window_targets, Dataset, WindowSpec};

/// Aligned predictions and labels.
#[derive(Debug, Clone, Copy)]
pub struct EvalPairs<'a> {
    preds: &'a [f64],
    labels: &'a [u8],
}

impl<'a> EvalPairs<'a> {
    pub fn new(preds: &'a [f64], labels: &'a [u8]) -> Result<Self> {
        if preds.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} predictions vs {} labels",
                preds.len(),
                labels.len()
            )));
        }
        if preds.is_empty() {
            return Err(Error::Shape("no evaluation pairs".into()));
        }
        if let Some(p) = preds.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Shape(format!("prediction {p} outside [0, 1]")));
        }
        if let Some(y) = labels.iter().find(|&&y| y > 1) {
            return Err(Error::Shape(format!("label {y} is not binary")));
        }
        Ok(EvalPairs { preds, labels })
    }

    pub fn preds(&self) -> &[f64] {
        self.preds
    }

    pub fn labels(&self) -> &[u8] {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (pos, self.labels.len() - pos)
    }
}

pub fn mean_bce(pairs: EvalPairs<'_>) -> f64 {
    let total: f64 = pairs
        .preds
        .iter()
        .zip(pairs.labels)
        .map(|(&p, &y)| bce_loss(p, y))
        .sum();
    total / pairs.len() as f64
}

/// Indices sorted by score, descending.
fn descending(preds: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..preds.len()).collect();
    idx.sort_by(|&a, &b| preds[b].partial_cmp(&preds[a]).unwrap_or(Ordering::Equal));
    idx
}

/// Mann-Whitney form with average ranks for ties. `None` if a class is absent.
pub fn auroc(pairs: EvalPairs<'_>) -> Option<f64> {
    let (pos, neg) = pairs.class_counts();
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.sort_by(|&a, &b| {
        pairs.preds[a]
            .partial_cmp(&pairs.preds[b])
            .unwrap_or(Ordering::Equal)
    });

    // ranks are 1-based; a tie block spanning ranks lo..=hi gets (lo+hi)/2
    let mut pos_rank_sum = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let score = pairs.preds[idx[start]];
        let mut end = start + 1;
        while end < idx.len() && pairs.preds[idx[end]] == score {
            end += 1;
        }
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        let block_pos = idx[start..end]
            .iter()
            .filter(|&&i| pairs.labels[i] == 1)
            .count();
        pos_rank_sum += avg_rank * block_pos as f64;
        start = end;
    }
    let (p, n) = (pos as f64, neg as f64);
    let u = pos_rank_sum - p * (p + 1.0) / 2.0;
    Some(u / (p * n))
}

/// Step-sum `sum_k (R_k - R_{k-1}) P_k` over descending-score tie blocks.
/// `None` if there are no positives.
pub fn average_precision(pairs: EvalPairs<'_>) -> Option<f64> {
    let (pos, _) = pairs.class_counts();
    if pos == 0 {
        return None;
    }
    let idx = descending(pairs.preds);
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    let mut start = 0;
    while start < idx.len() {
        let score = pairs.preds[idx[start]];
        let mut end = start;
        while end < idx.len() && pairs.preds[idx[end]] == score {
            tp += pairs.labels[idx[end]] as usize;
            end += 1;
        }
        seen += end - start;
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / seen as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        start = end;
    }
    Some(ap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub room_id: String,
    pub window_minutes: u32,
    pub bce: f64,
    pub auroc: Option<f64>,
    pub average_precision: Option<f64>,
    pub samples: usize,
    pub prevalence: f64,
}

pub fn evaluate_pairs(room_id: &str, window_minutes: u32, pairs: EvalPairs<'_>) -> MetricsReport {
    let (pos, _) = pairs.class_counts();
    MetricsReport {
        room_id: room_id.to_string(),
        window_minutes,
        bce: mean_bce(pairs),
        auroc: auroc(pairs),
        average_precision: average_precision(pairs),
        samples: pairs.len(),
        prevalence: pos as f64 / pairs.len() as f64,
    }
}

/// Scores per-step predictions on `d` against its `w`-window targets.
///
/// `preds[t]` is the prediction issued after observing record `t`; the last
/// record has no future and is not scored.
pub fn evaluate(preds: &[f64], d: &Dataset, w: WindowSpec) -> Result<MetricsReport> {
    if preds.len() != d.len() {
        return Err(Error::Shape(format!(
            "{} predictions for {} records of room {}",
            preds.len(),
            d.len(),
            d.room_id()
        )));
    }
    let targets = window_targets(d, w);
    let pairs = EvalPairs::new(&preds[..targets.len()], &targets)?;
    Ok(evaluate_pairs(d.room_id(), w.minutes(), pairs))
}

pub const METRICS_HEADER: &str = "room,window_minutes,bce,auroc,avg_precision";

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"))
}

impl MetricsReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{},{}",
            self.room_id,
            self.window_minutes,
            self.bce,
            cell(self.auroc),
            cell(self.average_precision)
        )
    }
}

pub fn metrics_csv(reports: &[MetricsReport]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}
