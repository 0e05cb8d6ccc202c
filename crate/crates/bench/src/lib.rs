//! Shared fixtures for the criterion benches.

use chrono::{TimeZone, Utc};
use crowdwatch_core::{
    generate_stream, ClassifiedMessage, Emotion, EmotionSchedule, EmotionVector, GeneratorOptions, Lexicon, Message,
    Phase,
};

/// Lexicon of `n` synthetic words, each with one dominant emotion.
pub fn synthetic_lexicon(n: usize) -> Lexicon {
    Lexicon::from_entries((0..n).map(|i| {
        let e = Emotion::ALL[i % 4];
        let mut v = EmotionVector::unit(e, 0.5 + (i % 97) as f64 / 100.0);
        v.set(Emotion::ALL[(i + 1) % 4], 0.1);
        (format!("w{i}x"), v)
    }))
    .expect("non-empty lexicon")
}

/// About `n` messages over 28 fifteen-minute windows.
pub fn synthetic_messages(lexicon: &Lexicon, n: u32, seed: u64) -> Vec<Message> {
    let rate = n.div_ceil(28);
    let schedule = EmotionSchedule::new(vec![
        Phase { windows: 19, mix: [0.45, 0.10, 0.35, 0.10], rate, oov: 0.15 },
        Phase { windows: 2, mix: [0.15, 0.60, 0.15, 0.10], rate, oov: 0.15 },
        Phase { windows: 7, mix: [0.45, 0.10, 0.35, 0.10], rate, oov: 0.15 },
    ])
    .expect("valid schedule");
    let origin = Utc.with_ymd_and_hms(2014, 5, 4, 1, 0, 0).unwrap();
    generate_stream(&schedule, lexicon, &GeneratorOptions::new(seed, origin))
        .expect("feasible schedule")
        .into_iter()
        .map(|m| m.message)
        .collect()
}

pub fn classified(lexicon: &Lexicon, messages: &[Message]) -> Vec<ClassifiedMessage> {
    crowdwatch_core::classify_all(lexicon, messages.to_vec())
}
