//! Crowd monitoring from short social-media messages.
//!
//! Messages are scored against a word/emotion lexicon, labelled with their
//! dominant emotion (anger, fear, happiness or sadness), bucketed into fixed
//! windows, and compared against a trailing baseline. Emotions whose z-score
//! exceeds the threshold are High, and a small rule set maps the High
//! emotions onto Berlonghi crowd-type groups.
//!
//! ```
//! use crowdwatch_core::{classify_text, EmotionVector, Label, Lexicon};
//!
//! let lexicon = Lexicon::from_entries([
//!     ("scream", EmotionVector::new(0.0, 0.9, 0.0, 0.1)),
//!     ("fun", EmotionVector::new(0.0, 0.0, 0.8, 0.0)),
//! ])
//! .unwrap();
//! let (_, label) = classify_text(&lexicon, "Everyone SCREAM!! #stampede");
//! assert_eq!(label, Label::Fear);
//! ```

pub mod classifier;
pub mod crowd;
pub mod emotion;
pub mod ingest;
pub mod lexicon;
pub mod pipeline;
pub mod synth;
pub mod temporal;

pub use classifier::{classify, classify_all, classify_text, dominant_emotion, message_vector, ClassifiedMessage};
pub use crowd::{group_members, infer, infer_crowd, CrowdError, CrowdGroup, CrowdType, Inference, Rule};
pub use emotion::{Emotion, EmotionVector, Label};
pub use ingest::{
    apply_filter, parse_stream, parse_timestamp, tokenize, BoundingBox, EventFilter, GeoPoint, IngestError,
    InputFormat, Message, ParsedStream,
};
pub use lexicon::{load_lexicon, Lexicon, LexiconError};
pub use pipeline::{analyze_batch, Analyzer, PipelineError, WindowRecord, WindowStatus};
pub use synth::{generate_stream, EmotionSchedule, GeneratorOptions, Phase, Sampling, SynthError, SyntheticMessage};
pub use temporal::{
    assign_levels, emotion_rates, partition_windows, zscore, AnalysisConfig, ConfigError, Level, WindowStats,
};
