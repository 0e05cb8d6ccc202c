//! Fixed-interval windows, emotion rates and trailing z-scores.
//!
//! Statistics are causal: a window's z-scores compare its rates against the
//! rates of up to `ma_window` earlier windows that had data. The current
//! window never enters its own baseline.

use std::collections::VecDeque;
use std::fmt;

use chrono::{DateTime, Duration, DurationRound, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::ClassifiedMessage;
use crate::emotion::Emotion;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("interval_minutes must be at least 1")]
    Interval,
    #[error("ma_window must be at least 2, got {0}")]
    MaWindow(usize),
    #[error("thresholds must satisfy z_cap > z_threshold > 0 (got z_threshold={z_threshold}, z_cap={z_cap})")]
    Thresholds { z_threshold: f64, z_cap: f64 },
    #[error("std_epsilon must be positive and finite, got {0}")]
    Epsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub interval_minutes: u32,
    pub z_threshold: f64,
    pub ma_window: usize,
    pub min_classified: u64,
    pub std_epsilon: f64,
    pub z_cap: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            interval_minutes: 15,
            z_threshold: 1.0,
            ma_window: 8,
            min_classified: 1,
            std_epsilon: 1e-9,
            z_cap: 100.0,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.interval_minutes < 1 {
            return Err(ConfigError::Interval);
        }
        if self.ma_window < 2 {
            return Err(ConfigError::MaWindow(self.ma_window));
        }
        let ordered = self.z_threshold > 0.0 && self.z_cap > self.z_threshold && self.z_cap.is_finite();
        if !ordered {
            return Err(ConfigError::Thresholds { z_threshold: self.z_threshold, z_cap: self.z_cap });
        }
        if !(self.std_epsilon > 0.0 && self.std_epsilon.is_finite()) {
            return Err(ConfigError::Epsilon(self.std_epsilon));
        }
        Ok(())
    }

    pub fn interval(&self) -> Duration {
        Duration::minutes(i64::from(self.interval_minutes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    High,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Low => "low",
            Level::High => "high",
        })
    }
}

/// Counts and statistics for one half-open interval `[start, end)`.
///
/// `rates`, `zscores` and `levels` are `None` when the value is undefined
/// (too few classified messages, or not enough history for a z-score).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub index: i64,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub n_total: u64,
    pub counts: [u64; 4],
    pub rates: Option<[f64; 4]>,
    pub zscores: Option<[f64; 4]>,
    pub levels: Option<[Level; 4]>,
}

impl WindowStats {
    pub fn empty(index: i64, origin: DateTime<Utc>, interval: Duration) -> WindowStats {
        let start = origin + Duration::milliseconds(interval.num_milliseconds() * index);
        WindowStats {
            index,
            start,
            end: start + interval,
            n_total: 0,
            counts: [0; 4],
            rates: None,
            zscores: None,
            levels: None,
        }
    }

    pub fn n_classified(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, e: Emotion) -> u64 {
        self.counts[e.index()]
    }

    pub fn record(&mut self, m: &ClassifiedMessage) {
        self.n_total += 1;
        if let Some(e) = m.label.emotion() {
            self.counts[e.index()] += 1;
        }
    }
}

/// Index of the window holding `t` on the grid anchored at `origin`.
pub fn window_index(t: DateTime<Utc>, origin: DateTime<Utc>, interval: Duration) -> i64 {
    let step = interval.num_milliseconds();
    (t - origin).num_milliseconds().div_euclid(step)
}

/// Grid origin for a stream starting at `first`: the timestamp truncated
/// to the hour, then down to a whole number of intervals past the hour.
pub fn default_origin(first: DateTime<Utc>, interval_minutes: u32) -> DateTime<Utc> {
    let hour = first
        .duration_trunc(Duration::hours(1))
        .expect("hour truncation is in range");
    let step = Duration::minutes(i64::from(interval_minutes.max(1)));
    let k = (first - hour).num_milliseconds() / step.num_milliseconds();
    hour + step * k as i32
}

/// Buckets messages into contiguous windows with counts filled in.
///
/// Gap windows between the first and last occupied window are emitted with
/// zero counts. Returns an empty list for empty input.
pub fn partition_windows(
    messages: &[ClassifiedMessage],
    config: &AnalysisConfig,
    origin: DateTime<Utc>,
) -> Vec<WindowStats> {
    let interval = config.interval();
    let mut order: Vec<&ClassifiedMessage> = messages.iter().collect();
    if !order.is_sorted_by_key(|m| m.message.timestamp) {
        order.sort_by_key(|m| m.message.timestamp);
    }
    let (Some(first), Some(last)) = (order.first(), order.last()) else {
        return Vec::new();
    };
    let lo = window_index(first.message.timestamp, origin, interval);
    let hi = window_index(last.message.timestamp, origin, interval);
    let mut windows: Vec<WindowStats> = (lo..=hi)
        .map(|k| WindowStats::empty(k, origin, interval))
        .collect();
    for m in order {
        let k = window_index(m.message.timestamp, origin, interval);
        windows[(k - lo) as usize].record(m);
    }
    windows
}

/// Fraction of classified messages per emotion. `None` when fewer than
/// `max(1, min_classified)` messages were classified.
pub fn emotion_rates(counts: [u64; 4], config: &AnalysisConfig) -> Option<[f64; 4]> {
    let total: u64 = counts.iter().sum();
    if total == 0 || total < config.min_classified {
        return None;
    }
    let total = total as f64;
    Some(counts.map(|c| c as f64 / total))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation about `mu`.
fn population_std(xs: &[f64], mu: f64) -> f64 {
    (xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// z-score of `current` against `history`. `None` with fewer than two
/// history points. A near-zero spread yields 0 when `current` sits on the
/// mean and `±z_cap` otherwise.
pub fn zscore(current: f64, history: &[f64], config: &AnalysisConfig) -> Option<f64> {
    if history.len() < 2 {
        return None;
    }
    let mu = mean(history);
    let sigma = population_std(history, mu);
    let diff = current - mu;
    if sigma < config.std_epsilon {
        if diff.abs() < config.std_epsilon {
            Some(0.0)
        } else {
            Some(diff.signum() * config.z_cap)
        }
    } else {
        Some(diff / sigma)
    }
}

pub fn levels_from_zscores(zscores: Option<[f64; 4]>, config: &AnalysisConfig) -> Option<[Level; 4]> {
    zscores.map(|z| z.map(|z| if z > config.z_threshold { Level::High } else { Level::Low }))
}

/// High exactly when the z-score strictly exceeds the threshold.
pub fn assign_levels(window: &WindowStats, config: &AnalysisConfig) -> Option<[Level; 4]> {
    levels_from_zscores(window.zscores, config)
}

/// Sequential stage that fills in rates, z-scores and levels.
///
/// Keeps the rates of the last `ma_window` windows with data.
#[derive(Debug, Clone)]
pub struct RateTracker {
    config: AnalysisConfig,
    history: VecDeque<[f64; 4]>,
}

impl RateTracker {
    pub fn new(config: AnalysisConfig) -> RateTracker {
        RateTracker {
            config,
            history: VecDeque::with_capacity(config.ma_window),
        }
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.config
    }

    /// Completes `window` in place and folds its rates into the history.
    pub fn update(&mut self, window: &mut WindowStats) {
        window.rates = emotion_rates(window.counts, &self.config);
        window.zscores = None;
        window.levels = None;
        let Some(rates) = window.rates else {
            return;
        };
        if self.history.len() >= 2 {
            let mut z = [0.0; 4];
            let mut series = Vec::with_capacity(self.history.len());
            for e in Emotion::ALL {
                let i = e.index();
                series.clear();
                series.extend(self.history.iter().map(|r| r[i]));
                z[i] = zscore(rates[i], &series, &self.config).expect("history has two points");
            }
            window.zscores = Some(z);
            window.levels = assign_levels(window, &self.config);
        }
        if self.history.len() == self.config.ma_window {
            self.history.pop_front();
        }
        self.history.push_back(rates);
    }
}

/// Partitions and scores a complete stream in one pass.
pub fn compute_windows(
    messages: &[ClassifiedMessage],
    config: &AnalysisConfig,
    origin: DateTime<Utc>,
) -> Vec<WindowStats> {
    let mut windows = partition_windows(messages, config, origin);
    let mut tracker = RateTracker::new(*config);
    for w in &mut windows {
        tracker.update(w);
    }
    windows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emotion::{EmotionVector, Label};
    use crate::ingest::Message;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn at(h: u32, m: u32, s: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2014, 5, 4, h, m, s).unwrap()
    }

    fn cm(t: DateTime<Utc>, label: Label) -> ClassifiedMessage {
        ClassifiedMessage {
            message: Message::new("x", t, ""),
            vector: EmotionVector::ZERO,
            label,
        }
    }

    /// Straight-line z-score using Welford's running moments.
    fn oracle_z(current: f64, history: &[f64], eps: f64, cap: f64) -> Option<f64> {
        if history.len() < 2 {
            return None;
        }
        let mut n = 0.0;
        let mut m = 0.0;
        let mut m2 = 0.0;
        for &x in history {
            n += 1.0;
            let d = x - m;
            m += d / n;
            m2 += d * (x - m);
        }
        let sd = (m2 / n).sqrt();
        let d = current - m;
        Some(if sd < eps {
            if d.abs() < eps { 0.0 } else if d > 0.0 { cap } else { -cap }
        } else {
            d / sd
        })
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = AnalysisConfig::default();
        assert_eq!(c.interval_minutes, 15);
        assert_eq!(c.z_threshold, 1.0);
        assert_eq!(c.ma_window, 8);
        assert!(c.validate().is_ok());
        assert!(AnalysisConfig { interval_minutes: 0, ..c }.validate().is_err());
        assert!(AnalysisConfig { ma_window: 1, ..c }.validate().is_err());
        assert!(AnalysisConfig { z_cap: 0.5, ..c }.validate().is_err());
        assert!(AnalysisConfig { z_threshold: 0.0, ..c }.validate().is_err());
    }

    #[test]
    fn half_open_windows() {
        let c = AnalysisConfig::default();
        let msgs = [
            cm(at(0, 0, 0), Label::Fear),
            cm(at(0, 14, 59), Label::Fear),
            cm(at(0, 15, 0), Label::Anger),
        ];
        let w = partition_windows(&msgs, &c, at(0, 0, 0));
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].n_total, 2);
        assert_eq!(w[1].n_total, 1);
        assert_eq!(w[1].start, at(0, 15, 0));
        assert_eq!(w[1].end, at(0, 30, 0));
    }

    #[test]
    fn single_and_gap_windows() {
        let c = AnalysisConfig::default();
        let w = partition_windows(&[cm(at(0, 3, 0), Label::Fear)], &c, at(0, 0, 0));
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].n_total, 1);

        // 00:46 sits in the fourth window of a grid anchored at or before 00:01
        let msgs = [cm(at(0, 46, 0), Label::Fear), cm(at(0, 1, 0), Label::Unclassified)];
        let w = partition_windows(&msgs, &c, at(0, 0, 0));
        assert_eq!(w.iter().map(|w| w.n_total).collect::<Vec<_>>(), [1, 0, 0, 1]);
        let w = partition_windows(&msgs, &c, at(0, 1, 0));
        assert_eq!(w.len(), 4);

        let msgs = [cm(at(0, 44, 0), Label::Fear), cm(at(0, 1, 0), Label::Unclassified)];
        let w = partition_windows(&msgs, &c, at(0, 0, 0));
        assert_eq!(w.iter().map(|w| w.n_total).collect::<Vec<_>>(), [1, 0, 1]);
        assert_eq!(w[0].counts, [0; 4]);
        assert_eq!(w[1].counts, [0; 4]);
        assert_eq!(w[2].counts, [0, 1, 0, 0]);

        assert!(partition_windows(&[], &c, at(0, 0, 0)).is_empty());
    }

    #[test]
    fn messages_before_origin_get_negative_index() {
        let c = AnalysisConfig::default();
        assert_eq!(window_index(at(0, 0, 0), at(0, 15, 0), c.interval()), -1);
        assert_eq!(window_index(at(0, 14, 59), at(0, 15, 0), c.interval()), -1);
    }

    #[test]
    fn origin_truncates_to_interval_grid() {
        assert_eq!(default_origin(at(22, 52, 31), 15), at(22, 45, 0));
        assert_eq!(default_origin(at(22, 45, 0), 15), at(22, 45, 0));
        assert_eq!(default_origin(at(22, 52, 31), 7), at(22, 49, 0));
        assert_eq!(default_origin(at(22, 52, 31), 120), at(22, 0, 0));
    }

    #[test]
    fn rate_examples() {
        let c = AnalysisConfig::default();
        assert_eq!(emotion_rates([2, 1, 1, 0], &c), Some([0.5, 0.25, 0.25, 0.0]));
        assert_eq!(emotion_rates([0, 0, 0, 0], &c), None);
        assert_eq!(emotion_rates([0, 5, 0, 0], &c), Some([0.0, 1.0, 0.0, 0.0]));
        let strict = AnalysisConfig { min_classified: 10, ..c };
        assert_eq!(emotion_rates([2, 1, 1, 0], &strict), None);
    }

    #[test]
    fn zscore_examples() {
        let c = AnalysisConfig::default();
        // straight-line: mean 0.15, squared deviations all 0.0025, sd 0.05
        let expected = oracle_z(0.25, &[0.1, 0.2, 0.1, 0.2], 1e-9, 100.0).unwrap();
        assert!((expected - 2.0).abs() < 1e-9);
        let z = zscore(0.25, &[0.1, 0.2, 0.1, 0.2], &c).unwrap();
        assert!((z - 2.0).abs() < 1e-9, "z = {z}");
        assert_eq!(zscore(0.1, &[0.1, 0.1, 0.1], &c), Some(0.0));
        assert_eq!(zscore(0.9, &[0.1, 0.1], &c), Some(100.0));
        assert_eq!(zscore(0.0, &[0.1, 0.1], &c), Some(-100.0));
        assert_eq!(zscore(0.5, &[0.1], &c), None);
        assert_eq!(zscore(0.5, &[], &c), None);
    }

    #[test]
    fn level_examples() {
        let c = AnalysisConfig::default();
        use Level::*;
        assert_eq!(
            levels_from_zscores(Some([0.2, 1.2, -0.5, 0.0]), &c),
            Some([Low, High, Low, Low])
        );
        assert_eq!(levels_from_zscores(Some([1.0; 4]), &c), Some([Low; 4]));
        assert_eq!(levels_from_zscores(None, &c), None);
    }

    #[test]
    fn nodata_windows_skip_history() {
        let c = AnalysisConfig::default();
        let mut t = RateTracker::new(c);
        let origin = at(0, 0, 0);
        let mut make = |k: i64, counts: [u64; 4]| {
            let mut w = WindowStats::empty(k, origin, c.interval());
            w.counts = counts;
            w.n_total = counts.iter().sum();
            t.update(&mut w);
            w
        };
        assert!(make(0, [1, 1, 0, 0]).zscores.is_none());
        let gap = make(1, [0; 4]);
        assert!(gap.rates.is_none() && gap.zscores.is_none() && gap.levels.is_none());
        assert!(make(2, [1, 1, 0, 0]).zscores.is_none());
        let w = make(3, [0, 4, 0, 0]);
        assert_eq!(w.zscores.unwrap()[1], 100.0);
        assert_eq!(w.levels.unwrap()[1], Level::High);
    }

    fn arb_stream() -> impl Strategy<Value = Vec<ClassifiedMessage>> {
        prop::collection::vec((0i64..(6 * 3600), 0usize..5), 0..200).prop_map(|v| {
            v.into_iter()
                .map(|(s, l)| {
                    let label = [Label::Anger, Label::Fear, Label::Happiness, Label::Sadness, Label::Unclassified][l];
                    cm(at(0, 0, 0) + Duration::seconds(s), label)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn zscore_matches_oracle(
            current in 0.0f64..1.0,
            history in prop::collection::vec(prop_oneof![Just(0.25), 0.0f64..1.0], 0..10),
        ) {
            let c = AnalysisConfig::default();
            let got = zscore(current, &history, &c);
            let want = oracle_z(current, &history, c.std_epsilon, c.z_cap);
            match (got, want) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{} vs {}", a, b),
                (None, None) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn rates_sum_to_one(counts in prop::array::uniform4(0u64..1000)) {
            let c = AnalysisConfig::default();
            if let Some(r) = emotion_rates(counts, &c) {
                prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                prop_assert!(r.iter().all(|x| (0.0..=1.0).contains(x)));
            } else {
                prop_assert_eq!(counts.iter().sum::<u64>(), 0);
            }
        }

        #[test]
        fn every_message_in_exactly_one_window(msgs in arb_stream()) {
            let c = AnalysisConfig::default();
            let w = partition_windows(&msgs, &c, at(0, 0, 0));
            prop_assert_eq!(w.iter().map(|w| w.n_total).sum::<u64>(), msgs.len() as u64);
            for pair in w.windows(2) {
                prop_assert_eq!(pair[0].end, pair[1].start);
                prop_assert_eq!(pair[0].index + 1, pair[1].index);
            }
        }

        #[test]
        fn prefix_processing_is_causal(msgs in arb_stream(), ma in 2usize..10) {
            let c = AnalysisConfig { ma_window: ma, ..AnalysisConfig::default() };
            let origin = at(0, 0, 0);
            let full = compute_windows(&msgs, &c, origin);
            for (k, w) in full.iter().enumerate() {
                let prefix: Vec<_> = msgs.iter().filter(|m| m.message.timestamp < w.end).cloned().collect();
                let partial = compute_windows(&prefix, &c, origin);
                // a trailing gap window is only emitted once a later message arrives
                prop_assert!(partial.len() <= k + 1);
                prop_assert_eq!(&partial[..], &full[..partial.len()]);
            }
        }
    }
}
