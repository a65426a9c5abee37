//! Seeded synthetic per-minute telemetry with a learnable occupancy schedule.
//!
//! Occupancy follows a daily schedule (noisy arrival/departure on weekdays,
//! occasional short weekend sessions) through a two-state Markov chain that
//! lags the schedule and flips spuriously at a small per-minute rate. Sensor
//! channels are affine in occupancy plus Gaussian noise, centred on the
//! single-room statistics a real campus building reports (cooling setpoint
//! near 74.8 F, heating near 67.4 F, space temperature near 71 F).

use std::path::{Path, PathBuf};

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{Dataset, EventRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorNoise {
    pub airflow: f64,
    pub damper: f64,
    pub discharge: f64,
    pub temperature: f64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        SensorNoise {
            airflow: 6.0,
            damper: 4.0,
            discharge: 1.0,
            temperature: 0.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub rooms: Vec<String>,
    pub arrival_hour_mean: f64,
    pub arrival_hour_std: f64,
    pub departure_hour_mean: f64,
    pub departure_hour_std: f64,
    /// Chance that a weekend day has a (shorter) occupied session.
    pub weekend_occupancy_prob: f64,
    pub weekend_arrival_hour: f64,
    pub weekend_departure_hour: f64,
    /// Per-minute chance of leaving the scheduled state.
    pub flip_prob: f64,
    /// Per-minute chance of returning to the scheduled state.
    pub revert_prob: f64,
    /// Per-room schedule offsets are drawn uniformly within these spreads (hours).
    pub room_arrival_spread: f64,
    pub room_departure_spread: f64,
    pub noise: SensorNoise,
    pub heating_months: Vec<u32>,
}

pub const DEFAULT_WEEKS: u32 = 8;

fn default_start() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2019, 7, 9)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid default start")
}

impl Default for GenConfig {
    fn default() -> Self {
        let start = default_start();
        GenConfig {
            seed: 0,
            start,
            end: start + Duration::weeks(DEFAULT_WEEKS as i64),
            rooms: room_ids(5),
            arrival_hour_mean: 7.5,
            arrival_hour_std: 0.5,
            departure_hour_mean: 19.5,
            departure_hour_std: 1.0,
            weekend_occupancy_prob: 0.15,
            weekend_arrival_hour: 10.0,
            weekend_departure_hour: 15.0,
            flip_prob: 0.002,
            revert_prob: 0.2,
            room_arrival_spread: 1.0,
            room_departure_spread: 1.5,
            noise: SensorNoise::default(),
            heating_months: vec![10, 11, 12, 1, 2, 3],
        }
    }
}

/// `RM-A`, `RM-B`, ... then `RM-27`, `RM-28`, ...
pub fn room_ids(n: usize) -> Vec<String> {
    (0..n)
        .map(|k| {
            if k < 26 {
                format!("RM-{}", (b'A' + k as u8) as char)
            } else {
                format!("RM-{}", k + 1)
            }
        })
        .collect()
}

impl GenConfig {
    pub fn with_weeks(mut self, weeks: u32) -> Self {
        self.end = self.start + Duration::weeks(weeks as i64);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.start >= self.end {
            return Err(Error::Config(format!(
                "start {} must precede end {}",
                self.start, self.end
            )));
        }
        if self.rooms.is_empty() {
            return Err(Error::Config("at least one room is required".into()));
        }
        for (name, p) in [
            ("weekend_occupancy_prob", self.weekend_occupancy_prob),
            ("flip_prob", self.flip_prob),
            ("revert_prob", self.revert_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let n = &self.noise;
        for (name, v) in [
            ("arrival_hour_std", self.arrival_hour_std),
            ("departure_hour_std", self.departure_hour_std),
            ("room_arrival_spread", self.room_arrival_spread),
            ("room_departure_spread", self.room_departure_spread),
            ("noise.airflow", n.airflow),
            ("noise.damper", n.damper),
            ("noise.discharge", n.discharge),
            ("noise.temperature", n.temperature),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        let mut ids = self.rooms.clone();
        ids.sort();
        ids.dedup();
        if ids.len() != self.rooms.len() {
            return Err(Error::Config("room ids must be unique".into()));
        }
        Ok(())
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

fn round_half(v: f64) -> f64 {
    (v * 2.0).round() / 2.0
}

fn gauss(rng: &mut ChaCha8Rng, mean: f64, std: f64) -> f64 {
    if std == 0.0 {
        return mean;
    }
    Normal::new(mean, std).expect("finite std").sample(rng)
}

struct DayPlan {
    /// Occupied window in minutes after midnight, `[start, end)`.
    window: Option<(f64, f64)>,
    cooling_setpoint: f64,
    heating_setpoint: f64,
}

fn plan_day(cfg: &GenConfig, date: NaiveDate, shift: (f64, f64), rng: &mut ChaCha8Rng) -> DayPlan {
    let weekend = date.weekday().number_from_monday() >= 6;
    let window = if weekend {
        if rng.random::<f64>() < cfg.weekend_occupancy_prob {
            let a = gauss(rng, cfg.weekend_arrival_hour, cfg.arrival_hour_std);
            let d = gauss(rng, cfg.weekend_departure_hour, cfg.departure_hour_std);
            Some((a, d))
        } else {
            None
        }
    } else {
        let a = gauss(rng, cfg.arrival_hour_mean + shift.0, cfg.arrival_hour_std);
        let d = gauss(
            rng,
            cfg.departure_hour_mean + shift.1,
            cfg.departure_hour_std,
        );
        Some((a, d))
    };
    let window = window
        .map(|(a, d)| (a.clamp(0.0, 24.0) * 60.0, d.clamp(0.0, 24.0) * 60.0))
        .filter(|(a, d)| d > a);
    DayPlan {
        window,
        cooling_setpoint: round_half(gauss(rng, 74.8, 1.0)).clamp(72.0, 80.0),
        heating_setpoint: round_half(gauss(rng, 67.4, 1.0)).clamp(65.0, 70.0),
    }
}

fn generate_room(cfg: &GenConfig, room_index: usize) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(room_index as u64 + 1);
    let shift = (
        rng.random_range(-1.0..=1.0) * cfg.room_arrival_spread,
        rng.random_range(-1.0..=1.0) * cfg.room_departure_spread,
    );

    let minutes = (cfg.end - cfg.start).num_minutes().max(0) as usize;
    let mut records = Vec::with_capacity(minutes);
    let mut plan: Option<(NaiveDate, DayPlan)> = None;
    let mut occ: Option<u8> = None;
    let noise = &cfg.noise;

    for m in 0..minutes {
        let ts = cfg.start + Duration::minutes(m as i64);
        let date = ts.date();
        if plan.as_ref().map(|(d, _)| *d) != Some(date) {
            plan = Some((date, plan_day(cfg, date, shift, &mut rng)));
        }
        let (_, day) = plan.as_ref().expect("plan set above");
        let minute_of_day = (ts.hour() * 60 + ts.minute()) as f64;
        let scheduled =
            day.window
                .is_some_and(|(a, d)| minute_of_day >= a && minute_of_day < d) as u8;

        let o = match occ {
            None => scheduled,
            Some(prev) if prev == scheduled => {
                if rng.random::<f64>() < cfg.flip_prob {
                    1 - prev
                } else {
                    prev
                }
            }
            Some(prev) => {
                if rng.random::<f64>() < cfg.revert_prob {
                    scheduled
                } else {
                    prev
                }
            }
        };
        occ = Some(o);
        let of = o as f64;

        let heating = cfg.heating_months.contains(&ts.month());
        let deviation = (2.0 + 1.5 * of + gauss(&mut rng, 0.0, noise.temperature)).max(0.0);
        let space_temperature = if heating {
            day.heating_setpoint + deviation
        } else {
            day.cooling_setpoint - deviation
        };
        let airflow = 48.0 + 40.0 * of + gauss(&mut rng, 0.0, noise.airflow);
        let damper = (25.0 + 35.0 * of + gauss(&mut rng, 0.0, noise.damper)).clamp(0.0, 100.0);
        let (discharge, hw_valve) = if heating {
            (
                70.0 + 6.0 * of + gauss(&mut rng, 0.0, noise.discharge),
                (8.0 + 20.0 * of + gauss(&mut rng, 0.0, 5.0)).clamp(0.0, 100.0),
            )
        } else {
            (62.4 - 3.0 * of + gauss(&mut rng, 0.0, noise.discharge), 0.0)
        };

        records.push(EventRecord {
            timestamp: ts,
            airflow_actual: round2(airflow),
            airflow_setpoint: 65.0 + 25.0 * of,
            cooling_setpoint: day.cooling_setpoint,
            heating_setpoint: day.heating_setpoint,
            damper_position_command: round2(damper),
            discharge_temperature: round2(discharge),
            hw_valve_command: round2(hw_valve),
            space_temperature_actual: round2(space_temperature),
            occupancy: o,
        });
    }
    Dataset::new(cfg.rooms[room_index].clone(), records)
}

/// One dataset per configured room, in `cfg.rooms` order.
pub fn generate(cfg: &GenConfig) -> Result<Vec<Dataset>> {
    cfg.validate()?;
    (0..cfg.rooms.len())
        .map(|k| generate_room(cfg, k))
        .collect()
}

/// Writes `<dir>/<room>.csv` for every dataset and returns the paths.
pub fn write_datasets(datasets: &[Dataset], dir: &Path) -> Result<Vec<PathBuf>> {
    datasets
        .iter()
        .map(|d| {
            let path = dir.join(format!("{}.csv", d.room_id()));
            d.write_csv(&path)?;
            Ok(path)
        })
        .collect()
}
