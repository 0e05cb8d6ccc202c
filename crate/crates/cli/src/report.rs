//! Output records: timeseries CSV rows, alert lines and the run summary.

use std::collections::BTreeMap;
use std::io::Write;

use chrono::{DateTime, SecondsFormat, Utc};
use crowdwatch_core::{AnalysisConfig, CrowdGroup, CrowdType, Emotion, Level, WindowRecord};
use serde::{Deserialize, Serialize};

pub const TIMESERIES_HEADER: &str = "window_index,window_start,window_end,n_total,n_classified,n_anger,n_fear,n_happiness,n_sadness,rate_anger,rate_fear,rate_happiness,rate_sadness,z_anger,z_fear,z_happiness,z_sadness,level_anger,level_fear,level_happiness,level_sadness,status,groups,crowd_types,danger";

fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// One line of the timeseries CSV. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeseriesRow {
    pub window_index: i64,
    pub window_start: String,
    pub window_end: String,
    pub n_total: u64,
    pub n_classified: u64,
    pub n_anger: u64,
    pub n_fear: u64,
    pub n_happiness: u64,
    pub n_sadness: u64,
    pub rate_anger: Option<f64>,
    pub rate_fear: Option<f64>,
    pub rate_happiness: Option<f64>,
    pub rate_sadness: Option<f64>,
    pub z_anger: Option<f64>,
    pub z_fear: Option<f64>,
    pub z_happiness: Option<f64>,
    pub z_sadness: Option<f64>,
    pub level_anger: Option<Level>,
    pub level_fear: Option<Level>,
    pub level_happiness: Option<Level>,
    pub level_sadness: Option<Level>,
    pub status: String,
    /// `|`-separated group keys, empty when no inference was made.
    pub groups: String,
    pub crowd_types: String,
    pub danger: bool,
}

impl TimeseriesRow {
    pub fn from_record(r: &WindowRecord) -> TimeseriesRow {
        let s = &r.stats;
        let pick = |a: Option<[f64; 4]>, e: Emotion| a.map(|v| v[e.index()]);
        let level = |e: Emotion| s.levels.map(|v| v[e.index()]);
        let (groups, crowd_types) = match &r.inference {
            Some(inf) => (
                inf.groups.iter().map(|g| g.key()).collect::<Vec<_>>().join("|"),
                inf.crowd_types.iter().map(|t| t.key()).collect::<Vec<_>>().join("|"),
            ),
            None => (String::new(), String::new()),
        };
        TimeseriesRow {
            window_index: s.index,
            window_start: timestamp(s.start),
            window_end: timestamp(s.end),
            n_total: s.n_total,
            n_classified: s.n_classified(),
            n_anger: s.count(Emotion::Anger),
            n_fear: s.count(Emotion::Fear),
            n_happiness: s.count(Emotion::Happiness),
            n_sadness: s.count(Emotion::Sadness),
            rate_anger: pick(s.rates, Emotion::Anger),
            rate_fear: pick(s.rates, Emotion::Fear),
            rate_happiness: pick(s.rates, Emotion::Happiness),
            rate_sadness: pick(s.rates, Emotion::Sadness),
            z_anger: pick(s.zscores, Emotion::Anger),
            z_fear: pick(s.zscores, Emotion::Fear),
            z_happiness: pick(s.zscores, Emotion::Happiness),
            z_sadness: pick(s.zscores, Emotion::Sadness),
            level_anger: level(Emotion::Anger),
            level_fear: level(Emotion::Fear),
            level_happiness: level(Emotion::Happiness),
            level_sadness: level(Emotion::Sadness),
            status: r.status.as_str().to_owned(),
            groups,
            crowd_types,
            danger: r.is_danger(),
        }
    }
}

/// Writes CSV rows one window at a time, header first.
pub struct TimeseriesWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TimeseriesWriter<W> {
    pub fn new(out: W) -> csv::Result<TimeseriesWriter<W>> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(TIMESERIES_HEADER.split(','))?;
        inner.flush()?;
        Ok(TimeseriesWriter { inner })
    }

    pub fn write(&mut self, row: &TimeseriesRow) -> csv::Result<()> {
        self.inner.serialize(row)?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner
            .into_inner()
            .unwrap_or_else(|e| panic!("flushed writer failed to unwrap: {}", e.error()))
    }
}

/// Parses a timeseries CSV written by [`TimeseriesWriter`].
pub fn read_timeseries<R: std::io::Read>(input: R) -> csv::Result<Vec<TimeseriesRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlertRecord {
    pub window_index: i64,
    pub window_start: String,
    pub groups: Vec<CrowdGroup>,
    pub crowd_types: Vec<CrowdType>,
    pub trigger_emotions: Vec<Emotion>,
    pub zscores: BTreeMap<String, f64>,
}

impl AlertRecord {
    /// `None` unless a dangerous group is active in `r`.
    pub fn from_record(r: &WindowRecord) -> Option<AlertRecord> {
        let inf = r.inference.as_ref().filter(|i| i.danger)?;
        let levels = r.stats.levels?;
        let z = r.stats.zscores?;
        Some(AlertRecord {
            window_index: r.stats.index,
            window_start: timestamp(r.stats.start),
            groups: inf.groups.iter().copied().collect(),
            crowd_types: inf.crowd_types.iter().copied().collect(),
            trigger_emotions: Emotion::ALL
                .into_iter()
                .filter(|e| levels[e.index()] == Level::High)
                .collect(),
            zscores: Emotion::ALL
                .into_iter()
                .map(|e| (e.name().to_owned(), z[e.index()]))
                .collect(),
        })
    }
}

/// Settings echoed into the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub analysis: AnalysisConfig,
    pub origin: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub hashtags: Vec<String>,
    pub bbox: Option<[f64; 4]>,
    pub lexicon: Option<String>,
    pub input: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_total: u64,
    pub n_classified: u64,
    pub n_unclassified: u64,
    pub classified_fraction: f64,
    pub emotion_totals: BTreeMap<String, u64>,
    pub n_windows: usize,
    pub alert_windows: Vec<i64>,
    pub skipped_records: usize,
    pub filtered_out: usize,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub windows: Vec<TimeseriesRow>,
    pub alerts: Vec<AlertRecord>,
    pub summary: Summary,
}

impl RunReport {
    pub fn danger(&self) -> bool {
        !self.alerts.is_empty()
    }
}

/// Accumulates a [`RunReport`] window by window.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    config: ConfigEcho,
    rows: Vec<TimeseriesRow>,
    alerts: Vec<AlertRecord>,
    totals: [u64; 4],
    n_total: u64,
    skipped: usize,
    filtered_out: usize,
}

impl ReportBuilder {
    pub fn new(config: ConfigEcho, skipped: usize, filtered_out: usize) -> ReportBuilder {
        ReportBuilder {
            config,
            rows: Vec::new(),
            alerts: Vec::new(),
            totals: [0; 4],
            n_total: 0,
            skipped,
            filtered_out,
        }
    }

    /// Records one window and returns its CSV row and alert, if any.
    pub fn push(&mut self, r: &WindowRecord) -> (TimeseriesRow, Option<AlertRecord>) {
        self.n_total += r.stats.n_total;
        for (t, c) in self.totals.iter_mut().zip(r.stats.counts) {
            *t += c;
        }
        let row = TimeseriesRow::from_record(r);
        let alert = AlertRecord::from_record(r);
        self.rows.push(row.clone());
        if let Some(a) = &alert {
            self.alerts.push(a.clone());
        }
        (row, alert)
    }

    pub fn finish(self) -> RunReport {
        let n_classified: u64 = self.totals.iter().sum();
        let summary = Summary {
            n_total: self.n_total,
            n_classified,
            n_unclassified: self.n_total - n_classified,
            classified_fraction: if self.n_total == 0 {
                0.0
            } else {
                n_classified as f64 / self.n_total as f64
            },
            emotion_totals: Emotion::ALL
                .into_iter()
                .map(|e| (e.name().to_owned(), self.totals[e.index()]))
                .collect(),
            n_windows: self.rows.len(),
            alert_windows: self.alerts.iter().map(|a| a.window_index).collect(),
            skipped_records: self.skipped,
            filtered_out: self.filtered_out,
        };
        RunReport { config: self.config, windows: self.rows, alerts: self.alerts, summary }
    }
}

pub fn write_alerts<W: Write>(mut out: W, alerts: &[AlertRecord]) -> std::io::Result<()> {
    for a in alerts {
        serde_json::to_writer(&mut out, a)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
