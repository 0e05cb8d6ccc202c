//! The four-emotion model and its weight vectors.

use std::fmt;
use std::ops::{Add, AddAssign, Index};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the four basic emotions tracked by the engine.
///
/// Declaration order is the canonical index order (anger, fear, happiness,
/// sadness) used by every vector, count array and CSV column in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger,
    Fear,
    Happiness,
    Sadness,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [
        Emotion::Anger,
        Emotion::Fear,
        Emotion::Happiness,
        Emotion::Sadness,
    ];

    /// Zero-based position in canonical order.
    pub const fn index(self) -> usize {
        match self {
            Emotion::Anger => 0,
            Emotion::Fear => 1,
            Emotion::Happiness => 2,
            Emotion::Sadness => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Emotion> {
        Self::ALL.get(index).copied()
    }

    pub const fn name(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Fear => "fear",
            Emotion::Happiness => "happiness",
            Emotion::Sadness => "sadness",
        }
    }

    /// Maps a lexicon emotion label onto the model. `joy` is accepted as an
    /// alias for happiness; labels outside the model return `None`.
    pub fn from_lexicon_label(label: &str) -> Option<Emotion> {
        match label.trim().to_lowercase().as_str() {
            "anger" => Some(Emotion::Anger),
            "fear" => Some(Emotion::Fear),
            "joy" | "happiness" => Some(Emotion::Happiness),
            "sadness" => Some(Emotion::Sadness),
            _ => None,
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::from_lexicon_label(s).ok_or_else(|| format!("unknown emotion `{s}`"))
    }
}

/// Non-negative association weights for the four emotions, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EmotionVector(pub [f64; 4]);

impl EmotionVector {
    pub const ZERO: EmotionVector = EmotionVector([0.0; 4]);

    pub fn new(anger: f64, fear: f64, happiness: f64, sadness: f64) -> Self {
        EmotionVector([anger, fear, happiness, sadness])
    }

    /// Vector with a single non-zero component.
    pub fn unit(emotion: Emotion, weight: f64) -> Self {
        let mut v = Self::ZERO;
        v.0[emotion.index()] = weight;
        v
    }

    pub fn get(&self, emotion: Emotion) -> f64 {
        self.0[emotion.index()]
    }

    pub fn set(&mut self, emotion: Emotion, weight: f64) {
        self.0[emotion.index()] = weight;
    }

    pub fn components(&self) -> [f64; 4] {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EmotionVector(self.0.map(|w| w * factor))
    }

    /// True when every component is finite and non-negative.
    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|w| w.is_finite() && *w >= 0.0)
    }
}

impl Add for EmotionVector {
    type Output = EmotionVector;

    fn add(mut self, rhs: EmotionVector) -> EmotionVector {
        self += rhs;
        self
    }
}

impl AddAssign for EmotionVector {
    fn add_assign(&mut self, rhs: EmotionVector) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Index<Emotion> for EmotionVector {
    type Output = f64;

    fn index(&self, emotion: Emotion) -> &f64 {
        &self.0[emotion.index()]
    }
}

/// Classification outcome for a single message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Anger,
    Fear,
    Happiness,
    Sadness,
    /// No strictly dominant component (all-zero or tied vector).
    Unclassified,
}

impl Label {
    pub fn emotion(self) -> Option<Emotion> {
        match self {
            Label::Anger => Some(Emotion::Anger),
            Label::Fear => Some(Emotion::Fear),
            Label::Happiness => Some(Emotion::Happiness),
            Label::Sadness => Some(Emotion::Sadness),
            Label::Unclassified => None,
        }
    }

    pub fn is_classified(self) -> bool {
        self != Label::Unclassified
    }

    pub fn name(self) -> &'static str {
        match self.emotion() {
            Some(e) => e.name(),
            None => "unclassified",
        }
    }
}

impl From<Emotion> for Label {
    fn from(e: Emotion) -> Label {
        match e {
            Emotion::Anger => Label::Anger,
            Emotion::Fear => Label::Fear,
            Emotion::Happiness => Label::Happiness,
            Emotion::Sadness => Label::Sadness,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
