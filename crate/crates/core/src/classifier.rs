//! Bag-of-words emotion classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::emotion::{Emotion, EmotionVector, Label};
use crate::ingest::{tokenize, Message};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedMessage {
    pub message: Message,
    pub vector: EmotionVector,
    pub label: Label,
}

/// Sum of the word vectors of `tokens`, one term per occurrence.
///
/// Tokens are summed in lexicographic order so the result is bit-identical
/// for every permutation of the input.
pub fn message_vector<S: AsRef<str>>(lexicon: &Lexicon, tokens: &[S]) -> EmotionVector {
    let mut sorted: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    sorted.sort_unstable();
    sorted
        .into_iter()
        .fold(EmotionVector::ZERO, |acc, t| acc + lexicon.word_vector(t))
}

/// The strictly largest component, or `Unclassified` for an all-zero vector
/// or a tie at the maximum.
pub fn dominant_emotion(vector: &EmotionVector) -> Label {
    let mut best: Option<Emotion> = None;
    let mut best_weight = 0.0;
    let mut tied = false;
    for e in Emotion::ALL {
        let w = vector.get(e);
        if w > best_weight {
            best = Some(e);
            best_weight = w;
            tied = false;
        } else if w == best_weight && best.is_some() {
            tied = true;
        }
    }
    match best {
        Some(e) if !tied => Label::from(e),
        _ => Label::Unclassified,
    }
}

pub fn classify_text(lexicon: &Lexicon, text: &str) -> (EmotionVector, Label) {
    let vector = message_vector(lexicon, &tokenize(text));
    (vector, dominant_emotion(&vector))
}

pub fn classify(lexicon: &Lexicon, message: Message) -> ClassifiedMessage {
    let (vector, label) = classify_text(lexicon, &message.text);
    ClassifiedMessage { message, vector, label }
}

/// Classifies a batch in parallel. Output order matches input order.
pub fn classify_all(lexicon: &Lexicon, messages: Vec<Message>) -> Vec<ClassifiedMessage> {
    messages
        .into_par_iter()
        .map(|m| classify(lexicon, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn lex() -> Lexicon {
        Lexicon::from_entries([
            ("scream", EmotionVector::new(0.0, 0.9, 0.0, 0.1)),
            ("fun", EmotionVector::new(0.0, 0.0, 0.8, 0.0)),
        ])
        .unwrap()
    }

    fn msg(text: &str) -> Message {
        Message::new("m", Utc.with_ymd_and_hms(2014, 5, 4, 5, 45, 0).unwrap(), text)
    }

    #[test]
    fn summation_examples() {
        let l = lex();
        assert_eq!(
            message_vector(&l, &["scream", "fun", "xyz"]),
            EmotionVector::new(0.0, 0.9, 0.8, 0.1)
        );
        assert_eq!(message_vector::<&str>(&l, &[]), EmotionVector::ZERO);
        assert_eq!(message_vector(&l, &["fun", "fun"]), EmotionVector::new(0.0, 0.0, 1.6, 0.0));
    }

    #[test]
    fn dominant_examples() {
        assert_eq!(dominant_emotion(&EmotionVector::new(0.2, 0.9, 0.1, 0.0)), Label::Fear);
        assert_eq!(dominant_emotion(&EmotionVector::ZERO), Label::Unclassified);
        assert_eq!(dominant_emotion(&EmotionVector::new(0.5, 0.5, 0.0, 0.0)), Label::Unclassified);
        assert_eq!(dominant_emotion(&EmotionVector::new(0.0, 0.0, 0.0, 0.3)), Label::Sadness);
        assert_eq!(dominant_emotion(&EmotionVector::new(0.1, 0.1, 0.0, 0.3)), Label::Sadness);
    }

    #[test]
    fn classify_examples() {
        let l = lex();
        let c = classify(&l, msg("scream scream"));
        assert_eq!(c.vector, EmotionVector::new(0.0, 1.8, 0.0, 0.2));
        assert_eq!(c.label, Label::Fear);

        let c = classify(&l, msg("xyz qqq"));
        assert_eq!(c.vector, EmotionVector::ZERO);
        assert_eq!(c.label, Label::Unclassified);
    }

    #[test]
    fn tie_is_unclassified() {
        let l = Lexicon::from_entries([
            ("scream", EmotionVector::new(0.0, 0.9, 0.0, 0.0)),
            ("fun", EmotionVector::new(0.0, 0.0, 0.9, 0.0)),
        ])
        .unwrap();
        let c = classify(&l, msg("scream fun"));
        // hand computation: anger 0, fear 0.9, happiness 0.9, sadness 0
        let expected = [0.0, 0.9, 0.9, 0.0];
        assert_eq!(c.vector.components(), expected);
        assert_eq!(c.label, Label::Unclassified);
    }

    #[test]
    fn classify_all_preserves_order() {
        let l = lex();
        let msgs: Vec<Message> = ["fun", "scream", "zzz", "fun scream"].iter().map(|t| msg(t)).collect();
        let out = classify_all(&l, msgs.clone());
        let serial: Vec<_> = msgs.into_iter().map(|m| classify(&l, m)).collect();
        assert_eq!(out, serial);
    }

    fn arb_vector() -> impl Strategy<Value = EmotionVector> {
        prop::array::uniform4(prop_oneof![Just(0.0), Just(0.5), 0.0f64..10.0])
            .prop_map(EmotionVector)
    }

    proptest! {
        #[test]
        fn label_invariant_under_positive_scaling(v in arb_vector(), k in prop::sample::select(vec![0.5, 2.0, 4.0, 0.25])) {
            prop_assert_eq!(dominant_emotion(&v.scaled(k)), dominant_emotion(&v));
        }

        #[test]
        fn single_nonzero_component_wins(i in 0usize..4, w in 1e-6f64..100.0) {
            let e = Emotion::from_index(i).unwrap();
            prop_assert_eq!(dominant_emotion(&EmotionVector::unit(e, w)), Label::from(e));
        }

        #[test]
        fn labelled_component_is_strict_max(v in arb_vector()) {
            if let Some(e) = dominant_emotion(&v).emotion() {
                for other in Emotion::ALL.into_iter().filter(|o| *o != e) {
                    prop_assert!(v.get(e) > v.get(other));
                }
            }
        }
    }
}
