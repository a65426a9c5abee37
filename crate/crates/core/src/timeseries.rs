//! Per-minute building telemetry: ingestion, calendar features, z-score
//! normalization, chronological splitting and windowed occupancy targets.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDateTime, Timelike, Weekday};

use crate::error::{Error, Result};
use crate::fsutil;

/// Column order of the ingestion CSV.
pub const CSV_COLUMNS: [&str; 10] = [
    "timestamp",
    "airflow_actual",
    "airflow_setpoint",
    "cooling_setpoint",
    "heating_setpoint",
    "damper_position_command",
    "discharge_temperature",
    "hw_valve_command",
    "space_temperature_actual",
    "occupancy",
];

/// Default model input layout.
pub const FEATURE_NAMES: [&str; 12] = [
    "airflow_actual",
    "airflow_setpoint",
    "cooling_setpoint",
    "heating_setpoint",
    "damper_position_command",
    "discharge_temperature",
    "hw_valve_command",
    "space_temperature_actual",
    "day_of_week",
    "hour",
    "month",
    "is_weekend",
];

/// Name of the optional current-occupancy input column.
pub const OCCUPANCY_FEATURE: &str = "occupancy";

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";

/// One per-minute telemetry row.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub timestamp: NaiveDateTime,
    pub airflow_actual: f64,
    pub airflow_setpoint: f64,
    pub cooling_setpoint: f64,
    pub heating_setpoint: f64,
    pub damper_position_command: f64,
    pub discharge_temperature: f64,
    pub hw_valve_command: f64,
    pub space_temperature_actual: f64,
    pub occupancy: u8,
}

impl EventRecord {
    /// The eight sensor channels in feature-layout order.
    pub fn sensors(&self) -> [f64; 8] {
        [
            self.airflow_actual,
            self.airflow_setpoint,
            self.cooling_setpoint,
            self.heating_setpoint,
            self.damper_position_command,
            self.discharge_temperature,
            self.hw_valve_command,
            self.space_temperature_actual,
        ]
    }

    pub fn month(&self) -> u32 {
        self.timestamp.month()
    }
}

/// Chronologically ordered telemetry for a single room.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    room_id: String,
    records: Vec<EventRecord>,
}

impl Dataset {
    /// Validates occupancy values and strict timestamp ordering.
    pub fn new(room_id: impl Into<String>, records: Vec<EventRecord>) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            let line = i as u64 + 1;
            if r.occupancy > 1 {
                return Err(Error::Domain {
                    line,
                    message: format!("occupancy must be 0 or 1, got {}", r.occupancy),
                });
            }
            if i > 0 && r.timestamp <= records[i - 1].timestamp {
                return Err(Error::Ordering {
                    line,
                    previous: records[i - 1]
                        .timestamp
                        .format(TIMESTAMP_FORMAT)
                        .to_string(),
                    current: r.timestamp.format(TIMESTAMP_FORMAT).to_string(),
                });
            }
        }
        Ok(Dataset {
            room_id: room_id.into(),
            records,
        })
    }

    pub fn room_id(&self) -> &str {
        &self.room_id
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn occupancy(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.occupancy).collect()
    }

    /// Serializes to the ingestion CSV format.
    pub fn to_csv_string(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{}", r.timestamp.format(TIMESTAMP_FORMAT));
            for v in r.sensors() {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", r.occupancy);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fsutil::write_atomic(path, self.to_csv_string().as_bytes())
    }
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    [
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%dT%H:%M:%S",
        "%Y-%m-%d %H:%M",
        "%Y-%m-%d %H:%M:%S",
    ]
    .iter()
    .find_map(|fmt| NaiveDateTime::parse_from_str(s, fmt).ok())
    .filter(|t| t.second() == 0 && t.nanosecond() == 0)
}

/// Reads one room's telemetry. Rows are checked, never re-sorted.
pub fn load_csv(path: &Path, room_id: &str) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, room_id)
}

pub fn parse_csv(text: &str, room_id: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    let mut index = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        if !CSV_COLUMNS.contains(&name) {
            return Err(Error::Schema(format!("unknown column `{name}`")));
        }
        if index.insert(name.to_string(), i).is_some() {
            return Err(Error::Schema(format!("duplicate column `{name}`")));
        }
    }
    let mut cols = [0usize; 10];
    for (slot, name) in cols.iter_mut().zip(CSV_COLUMNS) {
        *slot = *index
            .get(name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))?;
    }

    let mut records = Vec::new();
    let mut prev: Option<NaiveDateTime> = None;
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |c: usize| -> Result<&str> {
            match row.get(cols[c]) {
                Some(v) if !v.is_empty() => Ok(v),
                _ => Err(Error::Parse {
                    line,
                    message: format!("missing value for `{}`", CSV_COLUMNS[c]),
                }),
            }
        };
        let real = |c: usize| -> Result<f64> {
            let raw = field(c)?;
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{}`: cannot parse `{raw}` as a number", CSV_COLUMNS[c]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("`{}`: non-finite value", CSV_COLUMNS[c]),
                });
            }
            Ok(v)
        };

        let raw_ts = field(0)?;
        let timestamp = parse_timestamp(raw_ts).ok_or_else(|| Error::Parse {
            line,
            message: format!("bad timestamp `{raw_ts}` (expected YYYY-MM-DDTHH:MM)"),
        })?;
        if let Some(p) = prev {
            if timestamp <= p {
                return Err(Error::Ordering {
                    line,
                    previous: p.format(TIMESTAMP_FORMAT).to_string(),
                    current: timestamp.format(TIMESTAMP_FORMAT).to_string(),
                });
            }
        }
        prev = Some(timestamp);

        let occ = real(9)?;
        let occupancy = if occ == 0.0 {
            0
        } else if occ == 1.0 {
            1
        } else {
            return Err(Error::Domain {
                line,
                message: format!("occupancy must be 0 or 1, got {occ}"),
            });
        };

        records.push(EventRecord {
            timestamp,
            airflow_actual: real(1)?,
            airflow_setpoint: real(2)?,
            cooling_setpoint: real(3)?,
            heating_setpoint: real(4)?,
            damper_position_command: real(5)?,
            discharge_temperature: real(6)?,
            hw_valve_command: real(7)?,
            space_temperature_actual: real(8)?,
            occupancy,
        });
    }
    Dataset::new(room_id, records)
}

/// Named, ordered model inputs. Binary columns bypass z-scoring.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FeatureLayout {
    pub names: Vec<String>,
}

impl FeatureLayout {
    pub fn standard(include_occupancy: bool) -> Self {
        let mut names: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
        if include_occupancy {
            names.push(OCCUPANCY_FEATURE.to_string());
        }
        FeatureLayout { names }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn is_passthrough(&self, i: usize) -> bool {
        matches!(self.names[i].as_str(), "is_weekend" | OCCUPANCY_FEATURE)
    }

    pub fn includes_occupancy(&self) -> bool {
        self.names.iter().any(|n| n == OCCUPANCY_FEATURE)
    }
}

/// Row-major feature matrix, one row per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    layout: FeatureLayout,
    values: Vec<f64>,
}

impl Features {
    pub fn from_rows(layout: FeatureLayout, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = layout.dim();
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::Shape(format!(
                    "row {i} has {} values, layout expects {dim}",
                    r.len()
                )));
            }
            values.extend_from_slice(r);
        }
        Ok(Features { layout, values })
    }

    pub fn layout(&self) -> &FeatureLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let d = self.dim();
        &self.values[t * d..(t + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim())
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn slice(&self, start: usize, end: usize) -> Features {
        let d = self.dim();
        Features {
            layout: self.layout.clone(),
            values: self.values[start * d..end * d].to_vec(),
        }
    }
}

/// Calendar part of the feature vector: (day_of_week with Monday=0, hour, month, is_weekend).
pub fn calendar_features(ts: &NaiveDateTime) -> [f64; 4] {
    let dow = ts.weekday().num_days_from_monday();
    let weekend = matches!(ts.weekday(), Weekday::Sat | Weekday::Sun);
    [
        dow as f64,
        ts.hour() as f64,
        ts.month() as f64,
        if weekend { 1.0 } else { 0.0 },
    ]
}

/// One feature row per record: raw sensors, then calendar columns.
pub fn engineer_features(d: &Dataset, layout: &FeatureLayout) -> Features {
    let mut values = Vec::with_capacity(d.len() * layout.dim());
    for r in d.records() {
        values.extend_from_slice(&r.sensors());
        values.extend_from_slice(&calendar_features(&r.timestamp));
        if layout.includes_occupancy() {
            values.push(r.occupancy as f64);
        }
    }
    Features {
        layout: layout.clone(),
        values,
    }
}

/// Chronological split: the first `floor(fraction * T)` records train.
pub fn split_train_test(d: &Dataset, fraction: f64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n = d.len();
    if n < 2 {
        return Err(Error::DegenerateSplit(format!(
            "need at least 2 records, got {n}"
        )));
    }
    let cut = (fraction * n as f64).floor() as usize;
    if cut == 0 || cut == n {
        return Err(Error::DegenerateSplit(format!(
            "fraction {fraction} of {n} records leaves an empty side"
        )));
    }
    let train = Dataset {
        room_id: d.room_id.clone(),
        records: d.records[..cut].to_vec(),
    };
    let test = Dataset {
        room_id: d.room_id.clone(),
        records: d.records[cut..].to_vec(),
    };
    Ok((train, test))
}

/// Index of the first test record for a given split fraction.
pub fn split_index(len: usize, fraction: f64) -> usize {
    (fraction * len as f64).floor() as usize
}

/// Per-feature z-score statistics fitted on a training split.
#[derive(Debug, Clone, PartialEq)]
pub struct NormStats {
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub passthrough: Vec<bool>,
    pub fitted_on: String,
}

const STD_FLOOR: f64 = 1e-12;

impl NormStats {
    /// Sample mean and (n-1) standard deviation per column. Constant
    /// columns get std 1.0 and a warning.
    pub fn fit(train: &Features, fitted_on: impl Into<String>) -> Result<Self> {
        let n = train.len();
        if n == 0 {
            return Err(Error::Shape(
                "cannot fit normalizer on empty features".into(),
            ));
        }
        let layout = train.layout();
        let mut mean = vec![0.0; layout.dim()];
        let mut std = vec![1.0; layout.dim()];
        let mut passthrough = vec![false; layout.dim()];
        for j in 0..layout.dim() {
            if layout.is_passthrough(j) {
                passthrough[j] = true;
                continue;
            }
            let m = train.column(j).sum::<f64>() / n as f64;
            let ss: f64 = train.column(j).map(|x| (x - m) * (x - m)).sum();
            let s = if n > 1 {
                (ss / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            mean[j] = m;
            std[j] = if s > STD_FLOOR {
                s
            } else {
                log::warn!(
                    "feature `{}` has zero variance on the training split; using std 1.0",
                    layout.names[j]
                );
                1.0
            };
        }
        Ok(NormStats {
            names: layout.names.clone(),
            mean,
            std,
            passthrough,
            fitted_on: fitted_on.into(),
        })
    }

    fn check(&self, f: &Features) -> Result<()> {
        if f.layout().names != self.names {
            return Err(Error::Shape(format!(
                "features have layout {:?}, statistics were fitted on {:?}",
                f.layout().names,
                self.names
            )));
        }
        Ok(())
    }

    pub fn apply(&self, f: &Features) -> Result<Features> {
        self.check(f)?;
        let d = f.dim();
        let values = f
            .values
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let j = k % d;
                if self.passthrough[j] {
                    x
                } else {
                    (x - self.mean[j]) / self.std[j]
                }
            })
            .collect();
        Ok(Features {
            layout: f.layout.clone(),
            values,
        })
    }

    pub fn invert(&self, z: &Features) -> Result<Features> {
        self.check(z)?;
        let d = z.dim();
        let values = z
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let j = k % d;
                if self.passthrough[j] {
                    v
                } else {
                    v * self.std[j] + self.mean[j]
                }
            })
            .collect();
        Ok(Features {
            layout: z.layout.clone(),
            values,
        })
    }

    /// Plain-text `key=value` sidecar.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fitted_on={}", self.fitted_on);
        let _ = writeln!(out, "features={}", self.names.join(","));
        for (j, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "{name}.mean={}", self.mean[j]);
            let _ = writeln!(out, "{name}.std={}", self.std[j]);
            let _ = writeln!(out, "{name}.passthrough={}", self.passthrough[j]);
        }
        out
    }

    pub fn from_sidecar(text: &str) -> Result<Self> {
        let mut kv = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n as u64 + 1,
                message: format!("expected key=value, got `{line}`"),
            })?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&String> {
            kv.get(k)
                .ok_or_else(|| Error::Model(format!("normalization sidecar lacks `{k}`")))
        };
        let real = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::Model(format!("`{k}` is not a number")))
        };
        let names: Vec<String> = get("features")?.split(',').map(str::to_string).collect();
        let mut stats = NormStats {
            fitted_on: get("fitted_on")?.clone(),
            mean: Vec::with_capacity(names.len()),
            std: Vec::with_capacity(names.len()),
            passthrough: Vec::with_capacity(names.len()),
            names,
        };
        for name in &stats.names {
            stats.mean.push(real(&format!("{name}.mean"))?);
            let s = real(&format!("{name}.std"))?;
            if s.is_nan() || s <= 0.0 {
                return Err(Error::Model(format!("`{name}.std` must be positive")));
            }
            stats.std.push(s);
            stats.passthrough.push(
                get(&format!("{name}.passthrough"))?
                    .parse()
                    .map_err(|_| Error::Model(format!("`{name}.passthrough` is not a bool")))?,
            );
        }
        Ok(stats)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_atomic(path, self.to_sidecar().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_sidecar(&text)
    }
}

/// Future-window size in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindowSpec(u32);

impl WindowSpec {
    /// Window sizes used by the evaluation sweep.
    pub const SWEEP: [u32; 8] = [1, 5, 10, 30, 60, 120, 240, 480];

    pub fn new(minutes: u32) -> Result<Self> {
        if minutes == 0 {
            return Err(Error::Config("window must be at least 1 minute".into()));
        }
        Ok(WindowSpec(minutes))
    }

    /// Like [`WindowSpec::new`] but restricted to the sweep set.
    pub fn supported(minutes: u32) -> Result<Self> {
        if !Self::SWEEP.contains(&minutes) {
            return Err(Error::Config(format!(
                "window {minutes} is not one of {:?}",
                Self::SWEEP
            )));
        }
        Self::new(minutes)
    }

    pub fn minutes(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 1 iff any record in `t+1 ..= min(t+W, T-1)` is occupied (0-based `t`).
pub fn aggregate_target(d: &Dataset, t: usize, w: WindowSpec) -> Result<u8> {
    let n = d.len();
    if t + 1 >= n {
        return Err(Error::Index {
            index: t,
            message: format!("target needs a successor record; dataset has {n} records"),
        });
    }
    let end = (t + w.minutes() as usize).min(n - 1);
    Ok(d.records[t + 1..=end].iter().any(|r| r.occupancy == 1) as u8)
}

/// Windowed targets for every step that has a successor (length `T - 1`).
pub fn window_targets(d: &Dataset, w: WindowSpec) -> Vec<u8> {
    window_targets_from_occupancy(&d.occupancy(), w)
}

/// Same as [`window_targets`] on a raw occupancy column, in O(T).
pub fn window_targets_from_occupancy(occ: &[u8], w: WindowSpec) -> Vec<u8> {
    let n = occ.len();
    if n < 2 {
        return Vec::new();
    }
    // next_occ[s] = first index >= s that is occupied, or n
    let mut next_occ = vec![n; n + 1];
    for s in (0..n).rev() {
        next_occ[s] = if occ[s] == 1 { s } else { next_occ[s + 1] };
    }
    let w = w.minutes() as usize;
    (0..n - 1)
        .map(|t| {
            let end = (t + w).min(n - 1);
            (next_occ[t + 1] <= end) as u8
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn ts(y: i32, m: u32, d: u32, h: u32, min: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(h, min, 0)
            .unwrap()
    }

    fn record(t: NaiveDateTime, occ: u8) -> EventRecord {
        EventRecord {
            timestamp: t,
            airflow_actual: 62.46,
            airflow_setpoint: 69.26,
            cooling_setpoint: 74.77,
            heating_setpoint: 67.38,
            damper_position_command: 46.47,
            discharge_temperature: 62.39,
            hw_valve_command: 1.24,
            space_temperature_actual: 71.04,
            occupancy: occ,
        }
    }

    fn series(occ: &[u8]) -> Dataset {
        let start = ts(2019, 7, 9, 0, 0);
        let records = occ
            .iter()
            .enumerate()
            .map(|(i, &o)| record(start + chrono::Duration::minutes(i as i64), o))
            .collect();
        Dataset::new("RM-T", records).unwrap()
    }

    const HEADER: &str = "timestamp,airflow_actual,airflow_setpoint,cooling_setpoint,heating_setpoint,damper_position_command,discharge_temperature,hw_valve_command,space_temperature_actual,occupancy\n";

    #[test]
    fn loads_well_formed_rows() {
        let text = format!(
            "{HEADER}2019-07-09T00:00,60,65,74,67,40,62,0,71,0\n\
             2019-07-09T00:01,61,65,74,67,41,62,0,71.5,1\n\
             2019-07-09T00:02,62.5,65,74,67,42,62,0,72,1\n"
        );
        let d = parse_csv(&text, "RM-A").unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.room_id(), "RM-A");
        assert_eq!(d.records()[2].airflow_actual, 62.5);
        assert_eq!(d.occupancy(), vec![0, 1, 1]);
    }

    #[test]
    fn rejects_bad_occupancy() {
        let text = format!("{HEADER}2019-07-09T00:00,60,65,74,67,40,62,0,71,2\n");
        assert!(matches!(
            parse_csv(&text, "r"),
            Err(Error::Domain { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_out_of_order_and_duplicate_timestamps() {
        let text = format!(
            "{HEADER}2019-07-09T00:05,60,65,74,67,40,62,0,71,0\n\
             2019-07-09T00:04,60,65,74,67,40,62,0,71,0\n"
        );
        assert!(matches!(
            parse_csv(&text, "r"),
            Err(Error::Ordering { line: 3, .. })
        ));
        let text = format!(
            "{HEADER}2019-07-09T00:05,60,65,74,67,40,62,0,71,0\n\
             2019-07-09T00:05,60,65,74,67,40,62,0,71,0\n"
        );
        assert!(matches!(parse_csv(&text, "r"), Err(Error::Ordering { .. })));
    }

    #[test]
    fn rejects_schema_and_missing_values() {
        let bad_header = HEADER.replace("hw_valve_command", "hw_valve");
        let text = format!("{bad_header}2019-07-09T00:00,60,65,74,67,40,62,0,71,0\n");
        assert!(matches!(parse_csv(&text, "r"), Err(Error::Schema(_))));

        let missing = HEADER.replace(",occupancy", "");
        let text = format!("{missing}2019-07-09T00:00,60,65,74,67,40,62,0,71\n");
        assert!(matches!(parse_csv(&text, "r"), Err(Error::Schema(_))));

        let text = format!(
            "{HEADER}2019-07-09T00:00,60,65,74,67,40,62,0,71,0\n\
             2019-07-09T00:01,,65,74,67,40,62,0,71,0\n"
        );
        let err = parse_csv(&text, "r").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");

        let text = format!("{HEADER}2019-07-09T00:00,abc,65,74,67,40,62,0,71,0\n");
        assert!(matches!(
            parse_csv(&text, "r"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn calendar_columns() {
        // 2019-07-13 is a Saturday
        assert_eq!(
            calendar_features(&ts(2019, 7, 13, 10, 0)),
            [5.0, 10.0, 7.0, 1.0]
        );
        let mon = calendar_features(&ts(2019, 7, 15, 0, 30));
        assert_eq!(mon[0], 0.0);
        assert_eq!(mon[1], 0.0);
        assert_eq!(mon[3], 0.0);
    }

    #[test]
    fn features_copy_sensors_verbatim() {
        let d = series(&[0, 1, 0]);
        let f = engineer_features(&d, &FeatureLayout::standard(false));
        assert_eq!(f.len(), 3);
        assert_eq!(f.dim(), 12);
        for (row, r) in f.rows().zip(d.records()) {
            assert_eq!(&row[..8], &r.sensors());
        }
        let with_occ = engineer_features(&d, &FeatureLayout::standard(true));
        assert_eq!(with_occ.dim(), 13);
        assert_eq!(with_occ.row(1)[12], 1.0);
    }

    #[test]
    fn split_floor_arithmetic() {
        let d = series(&[0; 10]);
        let (tr, te) = split_train_test(&d, 0.7).unwrap();
        assert_eq!((tr.len(), te.len()), (7, 3));
        let d = series(&[0; 100]);
        let (tr, te) = split_train_test(&d, 0.7).unwrap();
        assert_eq!(tr.records(), &d.records()[..70]);
        assert_eq!(te.records(), &d.records()[70..]);
        let d = series(&[0; 3]);
        let (tr, te) = split_train_test(&d, 0.5).unwrap();
        assert_eq!((tr.len(), te.len()), (1, 2));
    }

    #[test]
    fn split_errors() {
        let d = series(&[0; 10]);
        assert!(matches!(split_train_test(&d, 0.0), Err(Error::Config(_))));
        assert!(matches!(split_train_test(&d, 1.0), Err(Error::Config(_))));
        assert!(matches!(
            split_train_test(&d, 0.05),
            Err(Error::DegenerateSplit(_))
        ));
        assert!(matches!(
            split_train_test(&series(&[0]), 0.5),
            Err(Error::DegenerateSplit(_))
        ));
    }

    #[test]
    fn normalizer_constant_and_simple_columns() {
        let layout = FeatureLayout::standard(false);
        let mut a = vec![5.0; 12];
        let mut b = vec![5.0; 12];
        a[1] = 1.0;
        b[1] = 3.0;
        a[11] = 1.0;
        b[11] = 0.0;
        let f = Features::from_rows(layout, &[a, b]).unwrap();
        let stats = NormStats::fit(&f, "t").unwrap();
        assert_eq!(stats.mean[0], 5.0);
        assert_eq!(stats.std[0], 1.0);
        assert_eq!(stats.mean[1], 2.0);
        assert_eq!((stats.mean[11], stats.std[11]), (0.0, 1.0));
        let z = stats.apply(&f).unwrap();
        assert_eq!(z.row(0)[0], 0.0);
        assert_eq!(z.row(0)[11], 1.0);
        assert_eq!(z.row(1)[11], 0.0);
    }

    #[test]
    fn normalizer_definition_points() {
        let layout = FeatureLayout::standard(false);
        let mut stats = NormStats::fit(
            &Features::from_rows(layout.clone(), &[vec![0.0; 12], vec![1.0; 12]]).unwrap(),
            "t",
        )
        .unwrap();
        // Table 1 airflow_actual row
        stats.mean[0] = 62.46;
        stats.std[0] = 30.28;
        let mut at_mean = stats.mean.clone();
        at_mean[11] = 0.0;
        let mut plus_std: Vec<f64> = stats
            .mean
            .iter()
            .zip(&stats.std)
            .map(|(m, s)| m + s)
            .collect();
        plus_std[11] = 1.0;
        let z = stats
            .apply(&Features::from_rows(layout, &[at_mean, plus_std]).unwrap())
            .unwrap();
        assert!(z.row(0)[..11].iter().all(|&v| v == 0.0));
        assert!(z.row(1)[..11].iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert_eq!(z.row(1)[11], 1.0);
    }

    #[test]
    fn normalizer_shape_mismatch() {
        let f12 = Features::from_rows(FeatureLayout::standard(false), &[vec![1.0; 12]]).unwrap();
        let f13 = Features::from_rows(FeatureLayout::standard(true), &[vec![1.0; 13]]).unwrap();
        let stats = NormStats::fit(&f12, "t").unwrap();
        assert!(matches!(stats.apply(&f13), Err(Error::Shape(_))));
    }

    #[test]
    fn sidecar_round_trip() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..12).map(|j| (i * j) as f64 / 3.0 + 0.1).collect())
            .collect();
        let f = Features::from_rows(FeatureLayout::standard(false), &rows).unwrap();
        let stats = NormStats::fit(&f, "RM-A:train").unwrap();
        let back = NormStats::from_sidecar(&stats.to_sidecar()).unwrap();
        assert_eq!(back, stats);
    }

    #[test]
    fn target_window_examples() {
        let d = series(&[0, 1, 0, 0, 1, 0, 0, 0]);
        let w1 = WindowSpec::new(1).unwrap();
        for t in 0..d.len() - 1 {
            assert_eq!(
                aggregate_target(&d, t, w1).unwrap(),
                d.records()[t + 1].occupancy
            );
        }
        let zeros = series(&[0; 12]);
        assert_eq!(
            aggregate_target(&zeros, 3, WindowSpec::new(5).unwrap()).unwrap(),
            0
        );

        let d = series(&[0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(
            aggregate_target(&d, 0, WindowSpec::new(5).unwrap()).unwrap(),
            1
        );
        // truncated window at the series end
        assert_eq!(
            aggregate_target(&d, 4, WindowSpec::new(30).unwrap()).unwrap(),
            0
        );
        assert!(matches!(
            aggregate_target(&d, 6, WindowSpec::new(5).unwrap()),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn window_spec_validation() {
        assert!(WindowSpec::new(0).is_err());
        assert!(WindowSpec::new(7).is_ok());
        assert!(WindowSpec::supported(7).is_err());
        for w in WindowSpec::SWEEP {
            assert!(WindowSpec::supported(w).is_ok());
        }
    }
}
