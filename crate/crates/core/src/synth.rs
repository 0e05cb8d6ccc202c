//! Seeded synthetic message streams with ground-truth labels.
//!
//! A schedule is a list of phases. Each phase lasts a number of windows and
//! fixes the emotion mix, message count per window and the fraction of
//! messages made only of out-of-vocabulary filler. Message texts are built
//! from lexicon words whose dominant emotion is the drawn label, and every
//! text is checked against the classifier before it is emitted.

use std::io::{self, Write};
use std::str::FromStr;

use chrono::{DateTime, Duration, SecondsFormat, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{classify_text, dominant_emotion};
use crate::emotion::{Emotion, Label};
use crate::ingest::{tokenize, Message};
use crate::lexicon::Lexicon;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("infeasible schedule: lexicon has no word whose dominant emotion is {0}")]
    InfeasibleSchedule(Emotion),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("could not find out-of-vocabulary filler words for this lexicon")]
    NoFiller,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub windows: u32,
    /// Proportions for anger, fear, happiness, sadness.
    pub mix: [f64; 4],
    /// Messages per window.
    pub rate: u32,
    /// Fraction of messages made only of filler words.
    #[serde(default)]
    pub oov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmotionSchedule {
    pub phases: Vec<Phase>,
}

impl EmotionSchedule {
    pub fn new(phases: Vec<Phase>) -> Result<EmotionSchedule, SynthError> {
        let s = EmotionSchedule { phases };
        s.validate()?;
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<EmotionSchedule, SynthError> {
        let s: EmotionSchedule =
            serde_json::from_str(text).map_err(|e| SynthError::InvalidSchedule(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        for (i, p) in self.phases.iter().enumerate() {
            let bad = |what: String| Err(SynthError::InvalidSchedule(format!("phase {i}: {what}")));
            if p.windows < 1 {
                return bad("windows must be at least 1".into());
            }
            if p.mix.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return bad(format!("mix {:?} has a negative or non-finite entry", p.mix));
            }
            let sum: f64 = p.mix.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return bad(format!("mix sums to {sum}, expected 1"));
            }
            if !(0.0..1.0).contains(&p.oov) {
                return bad(format!("oov fraction {} outside [0, 1)", p.oov));
            }
        }
        Ok(())
    }

    pub fn total_windows(&self) -> u64 {
        self.phases.iter().map(|p| u64::from(p.windows)).sum()
    }

    /// Phase governing each window, in order.
    pub fn window_phases(&self) -> impl Iterator<Item = &Phase> {
        self.phases
            .iter()
            .flat_map(|p| std::iter::repeat_n(p, p.windows as usize))
    }
}

/// How per-window label counts are drawn from a phase's mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// Exact quotas per window (largest-remainder rounding of the mix), in
    /// shuffled order.
    #[default]
    Stratified,
    /// Independent categorical draw per message.
    Independent,
}

impl FromStr for Sampling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stratified" => Ok(Sampling::Stratified),
            "independent" => Ok(Sampling::Independent),
            other => Err(format!("unknown sampling mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GeneratorOptions {
    pub seed: u64,
    pub origin: DateTime<Utc>,
    pub interval_minutes: u32,
    pub sampling: Sampling,
}

impl GeneratorOptions {
    pub fn new(seed: u64, origin: DateTime<Utc>) -> GeneratorOptions {
        GeneratorOptions { seed, origin, interval_minutes: 15, sampling: Sampling::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticMessage {
    pub message: Message,
    pub truth: Label,
    pub window: u64,
}

#[derive(Serialize, Deserialize)]
struct JsonRecord<'a> {
    id: &'a str,
    timestamp: String,
    text: &'a str,
    truth: Label,
}

/// Writes messages as JSONL with an extra `truth` field holding the label.
pub fn write_jsonl<W: Write>(mut out: W, messages: &[SyntheticMessage]) -> io::Result<()> {
    for m in messages {
        let rec = JsonRecord {
            id: &m.message.id,
            timestamp: m.message.timestamp.to_rfc3339_opts(SecondsFormat::Millis, true),
            text: &m.message.text,
            truth: m.truth,
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

const SYLLABLES: [&str; 12] = ["zor", "vak", "qui", "blen", "trop", "mik", "sna", "fel", "wub", "jax", "pli", "dro"];

fn filler_words(lexicon: &Lexicon) -> Vec<String> {
    let mut words = Vec::new();
    for a in SYLLABLES {
        for b in SYLLABLES {
            let w = format!("{a}{b}");
            if !lexicon.contains(&w) && tokenize(&w) == [w.as_str()] {
                words.push(w);
            }
        }
    }
    words
}

/// Lexicon words with a unique dominant emotion that survive tokenization
/// unchanged, grouped by that emotion and sorted.
fn pure_words(lexicon: &Lexicon) -> [Vec<String>; 4] {
    let mut pools: [Vec<String>; 4] = Default::default();
    for (word, v) in lexicon.iter() {
        if let Some(e) = dominant_emotion(v).emotion() {
            if tokenize(word) == [word] {
                pools[e.index()].push(word.to_owned());
            }
        }
    }
    for p in &mut pools {
        p.sort_unstable();
    }
    pools
}

/// Splits `n` into four counts proportional to `mix` by largest remainder.
fn quota(n: u32, mix: &[f64; 4]) -> [u32; 4] {
    let exact = mix.map(|p| p * f64::from(n));
    let mut counts = exact.map(|x| x.floor() as u32);
    let assigned: u32 = counts.iter().sum();
    let mut order: Vec<usize> = (0..4).collect();
    // ties broken by canonical emotion order
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

fn draw_categorical(rng: &mut ChaCha8Rng, mix: &[f64; 4]) -> Emotion {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for e in Emotion::ALL {
        acc += mix[e.index()];
        if u < acc {
            return e;
        }
    }
    // rounding slack: last emotion with positive weight
    Emotion::ALL
        .into_iter()
        .rev()
        .find(|e| mix[e.index()] > 0.0)
        .unwrap_or(Emotion::Sadness)
}

struct TextBuilder<'a> {
    lexicon: &'a Lexicon,
    pools: [Vec<String>; 4],
    filler: Vec<String>,
}

impl TextBuilder<'_> {
    fn filler_text(&self, rng: &mut ChaCha8Rng) -> String {
        let n = rng.random_range(1..=4);
        (0..n)
            .map(|_| self.filler.choose(rng).expect("filler pool is non-empty").as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn emotion_text(&self, rng: &mut ChaCha8Rng, e: Emotion) -> String {
        let pool = &self.pools[e.index()];
        let mut words: Vec<&str> = (0..rng.random_range(1..=3))
            .map(|_| pool.choose(rng).expect("pool checked for feasibility").as_str())
            .collect();
        for _ in 0..rng.random_range(0..=2) {
            words.push(self.filler.choose(rng).expect("filler pool is non-empty"));
        }
        words.shuffle(rng);
        let text = words.join(" ");
        if classify_text(self.lexicon, &text).1 == Label::from(e) {
            text
        } else {
            // a single dominant word always classifies as its own emotion
            pool.choose(rng).expect("pool checked for feasibility").clone()
        }
    }
}

/// Generates a deterministic stream for `schedule`.
pub fn generate_stream(
    schedule: &EmotionSchedule,
    lexicon: &Lexicon,
    options: &GeneratorOptions,
) -> Result<Vec<SyntheticMessage>, SynthError> {
    schedule.validate()?;
    if options.interval_minutes < 1 {
        return Err(SynthError::InvalidSchedule("interval must be at least 1 minute".into()));
    }
    let pools = pure_words(lexicon);
    for p in &schedule.phases {
        for e in Emotion::ALL {
            if p.mix[e.index()] > 0.0 && p.oov < 1.0 && pools[e.index()].is_empty() {
                return Err(SynthError::InfeasibleSchedule(e));
            }
        }
    }
    let filler = filler_words(lexicon);
    if filler.is_empty() {
        return Err(SynthError::NoFiller);
    }
    let builder = TextBuilder { lexicon, pools, filler };
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let interval_ms = i64::from(options.interval_minutes) * 60_000;
    let mut out = Vec::new();

    for (w, phase) in schedule.window_phases().enumerate() {
        let n = phase.rate;
        let mut labels: Vec<Label> = Vec::with_capacity(n as usize);
        match options.sampling {
            Sampling::Stratified => {
                let n_oov = (f64::from(n) * phase.oov).round() as u32;
                labels.extend(std::iter::repeat_n(Label::Unclassified, n_oov as usize));
                for (e, c) in Emotion::ALL.into_iter().zip(quota(n - n_oov, &phase.mix)) {
                    labels.extend(std::iter::repeat_n(Label::from(e), c as usize));
                }
                labels.shuffle(&mut rng);
            }
            Sampling::Independent => {
                for _ in 0..n {
                    let label = if rng.random::<f64>() < phase.oov {
                        Label::Unclassified
                    } else {
                        Label::from(draw_categorical(&mut rng, &phase.mix))
                    };
                    labels.push(label);
                }
            }
        }
        let window_start = options.origin + Duration::milliseconds(interval_ms * w as i64);
        for (i, label) in labels.into_iter().enumerate() {
            let text = match label.emotion() {
                Some(e) => builder.emotion_text(&mut rng, e),
                None => builder.filler_text(&mut rng),
            };
            let offset = interval_ms * i as i64 / i64::from(n);
            let message = Message::new(
                format!("w{w}-{i}"),
                window_start + Duration::milliseconds(offset),
                text,
            );
            out.push(SyntheticMessage { message, truth: label, window: w as u64 });
        }
    }
    Ok(out)
}
