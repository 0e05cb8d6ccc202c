//! Window-by-window analysis, in batch and streaming form.
//!
//! [`Analyzer`] consumes classified messages in timestamp order and emits a
//! [`WindowRecord`] as soon as a later message proves the window closed.
//! [`analyze_batch`] computes the same records from a complete stream; the
//! two must agree record for record.

use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::ClassifiedMessage;
use crate::crowd::{infer, Inference};
use crate::temporal::{
    compute_windows, default_origin, window_index, AnalysisConfig, ConfigError, RateTracker,
    WindowStats,
};

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("message at {got} arrived after window {current} was already open (window {window})")]
    OutOfOrder { got: DateTime<Utc>, window: i64, current: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowStatus {
    /// Too few classified messages for rates.
    NoData,
    /// Rates exist but fewer than two earlier windows had data.
    Warmup,
    /// Levels defined and at least one rule fired.
    Ok,
    /// Levels defined but no rule covers them (sadness alone is High).
    Indeterminate,
}

impl WindowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowStatus::NoData => "no_data",
            WindowStatus::Warmup => "warmup",
            WindowStatus::Ok => "ok",
            WindowStatus::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for WindowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub stats: WindowStats,
    pub status: WindowStatus,
    pub inference: Option<Inference>,
}

impl WindowRecord {
    pub fn from_stats(stats: WindowStats) -> WindowRecord {
        let (status, inference) = match (&stats.rates, &stats.levels) {
            (None, _) => (WindowStatus::NoData, None),
            (Some(_), None) => (WindowStatus::Warmup, None),
            (Some(_), Some(levels)) => {
                let inf = infer(levels);
                let status = if inf.is_indeterminate() {
                    WindowStatus::Indeterminate
                } else {
                    WindowStatus::Ok
                };
                (status, Some(inf))
            }
        };
        WindowRecord { stats, status, inference }
    }

    pub fn is_danger(&self) -> bool {
        self.inference.as_ref().is_some_and(|i| i.danger)
    }
}

/// Streaming window analyzer. Feed messages with [`Analyzer::push`] in
/// timestamp order and call [`Analyzer::finish`] at end of stream.
#[derive(Debug, Clone)]
pub struct Analyzer {
    config: AnalysisConfig,
    origin: Option<DateTime<Utc>>,
    open: Option<WindowStats>,
    tracker: RateTracker,
}

impl Analyzer {
    /// With `origin = None` the grid is anchored on the first message.
    pub fn new(config: AnalysisConfig, origin: Option<DateTime<Utc>>) -> Result<Analyzer, PipelineError> {
        config.validate()?;
        Ok(Analyzer { config, origin, open: None, tracker: RateTracker::new(config) })
    }

    pub fn origin(&self) -> Option<DateTime<Utc>> {
        self.origin
    }

    fn close(&mut self, mut w: WindowStats) -> WindowRecord {
        self.tracker.update(&mut w);
        WindowRecord::from_stats(w)
    }

    /// Adds one message, returning any windows it closed (including gap
    /// windows with no messages).
    pub fn push(&mut self, m: &ClassifiedMessage) -> Result<Vec<WindowRecord>, PipelineError> {
        let ts = m.message.timestamp;
        let interval = self.config.interval();
        let origin = *self
            .origin
            .get_or_insert_with(|| default_origin(ts, self.config.interval_minutes));
        let k = window_index(ts, origin, interval);
        let mut closed = Vec::new();
        match self.open.take() {
            None => self.open = Some(WindowStats::empty(k, origin, interval)),
            Some(w) if k == w.index => self.open = Some(w),
            Some(w) if k < w.index => {
                let current = w.index;
                self.open = Some(w);
                return Err(PipelineError::OutOfOrder { got: ts, window: k, current });
            }
            Some(w) => {
                let next = w.index + 1;
                closed.push(self.close(w));
                for gap in next..k {
                    closed.push(self.close(WindowStats::empty(gap, origin, interval)));
                }
                self.open = Some(WindowStats::empty(k, origin, interval));
            }
        }
        self.open.as_mut().expect("window is open").record(m);
        Ok(closed)
    }

    /// Closes the last open window, if any.
    pub fn finish(&mut self) -> Option<WindowRecord> {
        let w = self.open.take()?;
        Some(self.close(w))
    }
}

/// Analyzes a complete stream. Messages need not be sorted.
pub fn analyze_batch(
    messages: &[ClassifiedMessage],
    config: &AnalysisConfig,
    origin: Option<DateTime<Utc>>,
) -> Result<Vec<WindowRecord>, PipelineError> {
    config.validate()?;
    let Some(first) = messages.iter().map(|m| m.message.timestamp).min() else {
        return Ok(Vec::new());
    };
    let origin = origin.unwrap_or_else(|| default_origin(first, config.interval_minutes));
    Ok(compute_windows(messages, config, origin)
        .into_iter()
        .map(WindowRecord::from_stats)
        .collect())
}

/// Sorts by timestamp, keeping file order among equal timestamps.
pub fn sort_by_time(messages: &mut [ClassifiedMessage]) {
    messages.sort_by_key(|m| m.message.timestamp);
}
