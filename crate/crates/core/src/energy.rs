//! Convective-heat HVAC energy, rule-based-control baseline and the savings
//! obtained by switching HVAC off during predicted-unoccupied minutes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{Dataset, EventRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    /// Specific heat capacity of air, kJ/(kg K).
    pub cp: f64,
    pub heating_months: Vec<u32>,
    /// Minutes whose occupancy probability is below this count as unoccupied.
    pub unoccupied_threshold: f64,
    pub control_window: u32,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            cp: 1.005,
            heating_months: vec![10, 11, 12, 1, 2, 3],
            unoccupied_threshold: 0.5,
            control_window: 30,
        }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cp > 0.0 && self.cp.is_finite()) {
            return Err(Error::Config(format!(
                "cp must be positive, got {}",
                self.cp
            )));
        }
        if !(self.unoccupied_threshold > 0.0 && self.unoccupied_threshold < 1.0) {
            return Err(Error::Config(format!(
                "unoccupied threshold must lie in (0, 1), got {}",
                self.unoccupied_threshold
            )));
        }
        if let Some(m) = self.heating_months.iter().find(|m| !(1..=12).contains(*m)) {
            return Err(Error::Config(format!("heating month {m} is not in 1..=12")));
        }
        if self.control_window == 0 {
            return Err(Error::Config(
                "control window must be at least 1 minute".into(),
            ));
        }
        Ok(())
    }

    pub fn is_heating_month(&self, month: u32) -> bool {
        self.heating_months.contains(&month)
    }
}

/// Heating setpoint in heating months, cooling setpoint otherwise.
pub fn select_setpoint(record: &EventRecord, cfg: &EnergyConfig) -> f64 {
    if cfg.is_heating_month(record.month()) {
        record.heating_setpoint
    } else {
        record.cooling_setpoint
    }
}

/// `cp * max(airflow, 0) * |setpoint - space temperature|`.
pub fn step_energy(record: &EventRecord, cfg: &EnergyConfig) -> f64 {
    let delta_t = select_setpoint(record, cfg) - record.space_temperature_actual;
    cfg.cp * record.airflow_actual.max(0.0) * delta_t.abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub room_id: String,
    pub values: Vec<f64>,
    pub total: f64,
}

/// Energy the measured (rule-based) operation used at every step.
pub fn simulate_rbc(d: &Dataset, cfg: &EnergyConfig) -> Result<EnergySeries> {
    if d.is_empty() {
        return Err(Error::Shape(format!("room {} has no records", d.room_id())));
    }
    let values: Vec<f64> = d.records().iter().map(|r| step_energy(r, cfg)).collect();
    // fold from +0.0: an empty f64 sum is -0.0, which would print as "-0.00"
    let total = values.iter().fold(0.0, |acc, e| acc + e);
    Ok(EnergySeries {
        room_id: d.room_id().to_string(),
        values,
        total,
    })
}

/// Maps a prediction stream onto control timesteps.
///
/// `preds[s]` is the prediction issued after record `s` of the full series.
/// Timestep `start + t` is governed by the prediction made one minute
/// earlier, so the result has `len` entries taken from `preds[start - 1 ..]`.
pub fn align_predictions(preds: &[f64], start: usize, len: usize) -> Result<Vec<f64>> {
    if start == 0 {
        return Err(Error::Index {
            index: start,
            message: "the first control step needs a prediction issued before it".into(),
        });
    }
    if start - 1 + len > preds.len() {
        return Err(Error::Shape(format!(
            "need predictions up to index {}, have {}",
            start + len - 2,
            preds.len()
        )));
    }
    Ok(preds[start - 1..start - 1 + len].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Savings {
    pub saved: f64,
    pub percent: f64,
}

/// Baseline energy spent during minutes predicted unoccupied.
pub fn estimate_savings(
    series: &EnergySeries,
    aligned: &[f64],
    cfg: &EnergyConfig,
) -> Result<Savings> {
    if aligned.len() != series.values.len() {
        return Err(Error::Shape(format!(
            "{} aligned predictions for {} energy steps",
            aligned.len(),
            series.values.len()
        )));
    }
    let saved: f64 = series
        .values
        .iter()
        .zip(aligned)
        .filter(|(_, &p)| p < cfg.unoccupied_threshold)
        .fold(0.0, |acc, (e, _)| acc + e);
    let percent = if series.total > 0.0 {
        100.0 * saved / series.total
    } else {
        log::warn!(
            "room {}: baseline energy is zero, reporting 0% savings",
            series.room_id
        );
        0.0
    };
    Ok(Savings { saved, percent })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoomSavings {
    pub room_id: String,
    pub actual: f64,
    pub saved: f64,
    pub percent: f64,
}

impl RoomSavings {
    pub fn new(room_id: &str, actual: f64, saved: f64) -> Result<Self> {
        if !(actual >= 0.0 && saved >= 0.0 && actual.is_finite() && saved.is_finite()) {
            return Err(Error::Config(format!(
                "room {room_id}: energies must be finite and non-negative"
            )));
        }
        // summation order can leave saved a few ulps above actual
        if saved > actual * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "room {room_id}: saved energy {saved} exceeds actual {actual}"
            )));
        }
        let percent = if actual > 0.0 {
            100.0 * saved / actual
        } else {
            0.0
        };
        Ok(RoomSavings {
            room_id: room_id.to_string(),
            actual,
            saved,
            percent,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SavingsReport {
    pub rows: Vec<RoomSavings>,
    pub average: RoomSavings,
}

/// Adds the average row: mean actual, mean saved, and the mean of the
/// per-room percentages (not the ratio of the means).
pub fn savings_report(rows: Vec<RoomSavings>) -> Result<SavingsReport> {
    if rows.is_empty() {
        return Err(Error::Config(
            "savings report needs at least one room".into(),
        ));
    }
    let n = rows.len() as f64;
    let mean = |f: fn(&RoomSavings) -> f64| rows.iter().map(f).sum::<f64>() / n;
    let average = RoomSavings {
        room_id: "AVERAGE".to_string(),
        actual: mean(|r| r.actual),
        saved: mean(|r| r.saved),
        percent: mean(|r| r.percent),
    };
    Ok(SavingsReport { rows, average })
}

pub const SAVINGS_HEADER: &str = "room,actual_energy,saved_energy,savings_percent";

impl SavingsReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SAVINGS_HEADER);
        out.push('\n');
        for r in self.rows.iter().chain(std::iter::once(&self.average)) {
            let _ = writeln!(
                out,
                "{},{:.2},{:.2},{:.2}",
                r.room_id, r.actual, r.saved, r.percent
            );
        }
        out
    }
}

/// Reads `room,actual_energy,saved_energy[,...]` rows of already-measured
/// energies, e.g. a published table, for re-deriving percentages.
pub fn parse_replay_csv(text: &str) -> Result<Vec<RoomSavings>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    };
    let (c_room, c_actual, c_saved) = (col("room")?, col("actual_energy")?, col("saved_energy")?);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let room = rec.get(c_room).unwrap_or_default();
        if room.eq_ignore_ascii_case("average") {
            continue;
        }
        let num = |c: usize| -> Result<f64> {
            rec.get(c)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("bad number in column {}", headers.get(c).unwrap_or("?")),
                })
        };
        rows.push(RoomSavings::new(room, num(c_actual)?, num(c_saved)?)?);
    }
    Ok(rows)
}
