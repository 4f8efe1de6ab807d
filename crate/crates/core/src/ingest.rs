//! Raw reading logs: CSV I/O, fixed-length windowing and multi-sensor
//! instance assembly.
//!
//! Readings are held column-wise per sensor ([`SensorSeries`]) since a
//! default run carries several million of them.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default reading-window length.
pub const DEFAULT_WINDOW: usize = 512;

pub const LOG_HEADER: [&str; 5] = ["sensor_id", "timestamp_ms", "x", "y", "z"];
pub const LABEL_HEADER: [&str; 2] = ["window_index", "label"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Control,
    Near,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Control => "control",
            Label::Near => "near",
        }
    }

    /// +1 for the positive class ("near"), -1 otherwise.
    pub fn sign(self) -> f64 {
        match self {
            Label::Near => 1.0,
            Label::Control => -1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "control" => Ok(Label::Control),
            "near" => Ok(Label::Near),
            other => Err(format!("unknown label {other:?} (expected control or near)")),
        }
    }
}

/// One timestamped X/Y/Z sample from one named sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorReading {
    pub sensor_id: String,
    pub timestamp_ms: u64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Time-ordered readings of a single sensor, stored column-wise.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SensorSeries {
    pub sensor_id: String,
    pub timestamps: Vec<u64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl SensorSeries {
    pub fn new(sensor_id: impl Into<String>) -> Self {
        Self { sensor_id: sensor_id.into(), ..Default::default() }
    }

    pub fn with_capacity(sensor_id: impl Into<String>, n: usize) -> Self {
        Self {
            sensor_id: sensor_id.into(),
            timestamps: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn push(&mut self, timestamp_ms: u64, xyz: [f64; 3]) {
        self.timestamps.push(timestamp_ms);
        self.x.push(xyz[0]);
        self.y.push(xyz[1]);
        self.z.push(xyz[2]);
    }

    pub fn axis(&self, axis: usize) -> &[f64] {
        match axis {
            0 => &self.x,
            1 => &self.y,
            _ => &self.z,
        }
    }

    pub fn reading(&self, i: usize) -> SensorReading {
        SensorReading {
            sensor_id: self.sensor_id.clone(),
            timestamp_ms: self.timestamps[i],
            x: self.x[i],
            y: self.y[i],
            z: self.z[i],
        }
    }

    pub fn readings(&self) -> impl Iterator<Item = SensorReading> + '_ {
        (0..self.len()).map(|i| self.reading(i))
    }

    pub fn from_readings<'a>(
        sensor_id: &str,
        readings: impl IntoIterator<Item = &'a SensorReading>,
    ) -> Self {
        let mut s = SensorSeries::new(sensor_id);
        for r in readings {
            s.push(r.timestamp_ms, [r.x, r.y, r.z]);
        }
        s
    }
}

/// Parsed log, one series per sensor, keyed (and therefore ordered) by name.
pub type SensorLog = BTreeMap<String, SensorSeries>;

/// Exactly `w_r` consecutive readings of one sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingWindow {
    pub sensor_id: String,
    pub window_index: usize,
    pub timestamps: Vec<u64>,
    pub axes: [Vec<f64>; 3],
}

impl ReadingWindow {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn axis(&self, axis: usize) -> &[f64] {
        &self.axes[axis]
    }

    /// Builds a window from bare axis values with synthetic 1 ms timestamps.
    pub fn from_axes(sensor_id: &str, window_index: usize, axes: [Vec<f64>; 3]) -> Result<Self> {
        let n = axes[0].len();
        if axes[1].len() != n || axes[2].len() != n {
            return Err(Error::Contract(format!(
                "window for {sensor_id}: axis lengths differ ({}, {}, {})",
                axes[0].len(),
                axes[1].len(),
                axes[2].len()
            )));
        }
        Ok(Self {
            sensor_id: sensor_id.to_string(),
            window_index,
            timestamps: (0..n as u64).collect(),
            axes,
        })
    }
}

/// One multi-sensor instance: window `k` of every sensor.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub window_index: usize,
    pub windows: BTreeMap<String, ReadingWindow>,
    pub label: Option<Label>,
}

// ---------------------------------------------------------------------------
// CSV I/O

fn parse_field<T: FromStr>(
    path: &Path,
    line: u64,
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.trim()
        .parse::<T>()
        .map_err(|_| Error::parse(path, line, format!("field {name}: cannot parse {raw:?}")))
}

fn parse_finite(
    path: &Path,
    line: u64,
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<f64> {
    let v: f64 = parse_field(path, line, record, idx, name)?;
    if !v.is_finite() {
        return Err(Error::parse(path, line, format!("field {name}: non-finite value {v}")));
    }
    Ok(v)
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(file))
}

fn check_header(
    path: &Path,
    records: &mut csv::StringRecordsIter<'_, File>,
    expected: &[&str],
) -> Result<()> {
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::parse(path, 1, e.to_string()))?,
        None => return Err(Error::parse(path, 1, "empty file, missing header")),
    };
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got != expected {
        return Err(Error::parse(
            path,
            1,
            format!("missing or wrong header: expected {}, got {}", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

/// Parses a raw reading log (`sensor_id,timestamp_ms,x,y,z`).
///
/// Each sensor's readings keep file order. Any malformed row aborts with
/// its 1-based line number (the header is line 1).
pub fn parse_log(path: impl AsRef<Path>) -> Result<SensorLog> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut records = reader.records();
    check_header(path, &mut records, &LOG_HEADER)?;

    let mut log = SensorLog::new();
    for (i, rec) in records.enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if rec.len() != LOG_HEADER.len() {
            return Err(Error::parse(
                path,
                line,
                format!("expected {} columns, found {}", LOG_HEADER.len(), rec.len()),
            ));
        }
        let sensor = rec[0].trim();
        if sensor.is_empty() {
            return Err(Error::parse(path, line, "empty sensor_id"));
        }
        let ts: u64 = parse_field(path, line, &rec, 1, "timestamp_ms")?;
        let x = parse_finite(path, line, &rec, 2, "x")?;
        let y = parse_finite(path, line, &rec, 3, "y")?;
        let z = parse_finite(path, line, &rec, 4, "z")?;
        log.entry(sensor.to_string())
            .or_insert_with(|| SensorSeries::new(sensor))
            .push(ts, [x, y, z]);
    }
    Ok(log)
}

/// Writes sensors as contiguous blocks in the given order.
pub fn write_log<'a>(
    path: impl AsRef<Path>,
    series: impl IntoIterator<Item = &'a SensorSeries>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::with_capacity(1 << 20, file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", LOG_HEADER.join(",")).map_err(io)?;
    for s in series {
        for i in 0..s.len() {
            writeln!(w, "{},{},{},{},{}", s.sensor_id, s.timestamps[i], s.x[i], s.y[i], s.z[i])
                .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn parse_labels(path: impl AsRef<Path>) -> Result<BTreeMap<usize, Label>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    let mut records = reader.records();
    check_header(path, &mut records, &LABEL_HEADER)?;
    let mut labels = BTreeMap::new();
    for (i, rec) in records.enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::parse(path, line, format!("expected 2 columns, found {}", rec.len())));
        }
        let idx: usize = parse_field(path, line, &rec, 0, "window_index")?;
        let label: Label = rec[1].parse().map_err(|m| Error::parse(path, line, m))?;
        if labels.insert(idx, label).is_some() {
            return Err(Error::parse(path, line, format!("duplicate window_index {idx}")));
        }
    }
    Ok(labels)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[(usize, Label)]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", LABEL_HEADER.join(",")).map_err(io)?;
    for (idx, label) in labels {
        writeln!(w, "{idx},{label}").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Optional manifest of the windows actually used: `sensor_id,window_index,start_ts,end_ts`.
pub fn write_manifest<'a>(
    path: impl AsRef<Path>,
    windows: impl IntoIterator<Item = &'a ReadingWindow>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(w, "sensor_id,window_index,start_ts,end_ts").map_err(io)?;
    for win in windows {
        let start = win.timestamps.first().copied().unwrap_or(0);
        let end = win.timestamps.last().copied().unwrap_or(0);
        writeln!(w, "{},{},{start},{end}", win.sensor_id, win.window_index).map_err(io)?;
    }
    w.flush().map_err(io)
}

// ---------------------------------------------------------------------------
// Windowing and assembly

/// Splits one sensor's series into consecutive, non-overlapping windows of
/// exactly `w_r` readings. A trailing partial chunk is dropped; a sensor with
/// fewer than `w_r` readings yields no windows (and a warning).
pub fn windowize(series: &SensorSeries, w_r: usize) -> Result<Vec<ReadingWindow>> {
    if w_r == 0 {
        return Err(Error::Config("window length must be positive".into()));
    }
    if series.timestamps.windows(2).any(|p| p[1] < p[0]) {
        return Err(Error::Data(format!(
            "readings of sensor {} are not time-ordered",
            series.sensor_id
        )));
    }
    let count = series.len() / w_r;
    if count == 0 {
        log::warn!(
            "sensor {} has {} readings, fewer than one window of {w_r}; no windows produced",
            series.sensor_id,
            series.len()
        );
    }
    let dropped = series.len() - count * w_r;
    if dropped > 0 && count > 0 {
        log::debug!("sensor {}: dropping {dropped} trailing readings", series.sensor_id);
    }
    Ok((0..count)
        .map(|k| {
            let r = k * w_r..(k + 1) * w_r;
            ReadingWindow {
                sensor_id: series.sensor_id.clone(),
                window_index: k,
                timestamps: series.timestamps[r.clone()].to_vec(),
                axes: [
                    series.x[r.clone()].to_vec(),
                    series.y[r.clone()].to_vec(),
                    series.z[r].to_vec(),
                ],
            }
        })
        .collect())
}

/// Aligns windows across sensors by ordinal: instance `k` holds window `k`
/// of every sensor, truncated to the smallest per-sensor window count.
///
/// With `labels = None` the instances are unlabeled. Otherwise every
/// assembled index must be present in the sidecar.
pub fn assemble_instances(
    windows: BTreeMap<String, Vec<ReadingWindow>>,
    labels: Option<&BTreeMap<usize, Label>>,
) -> Result<Vec<RawInstance>> {
    if windows.is_empty() {
        return Err(Error::Data("no sensors to assemble".into()));
    }
    if let Some((sensor, _)) = windows.iter().find(|(_, w)| w.is_empty()) {
        return Err(Error::Data(format!("sensor {sensor} has no complete window")));
    }
    let count = windows.values().map(Vec::len).min().unwrap_or(0);

    let mut instances: Vec<RawInstance> = (0..count)
        .map(|k| RawInstance { window_index: k, windows: BTreeMap::new(), label: None })
        .collect();
    for (sensor, ws) in windows {
        for w in ws.into_iter().take(count) {
            let k = w.window_index;
            instances[k].windows.insert(sensor.clone(), w);
        }
    }
    if let Some(labels) = labels {
        for inst in &mut instances {
            let label = labels.get(&inst.window_index).ok_or_else(|| {
                Error::Label(format!("label sidecar has no entry for window {}", inst.window_index))
            })?;
            inst.label = Some(*label);
        }
    }
    Ok(instances)
}

/// Windowize every sensor of a log and assemble instances.
pub fn log_to_instances(
    log: &SensorLog,
    w_r: usize,
    labels: Option<&BTreeMap<usize, Label>>,
) -> Result<Vec<RawInstance>> {
    let mut windows = BTreeMap::new();
    for (sensor, series) in log {
        windows.insert(sensor.clone(), windowize(series, w_r)?);
    }
    assemble_instances(windows, labels)
}
