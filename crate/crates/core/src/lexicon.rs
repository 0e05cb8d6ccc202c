//! Word to emotion-association lexicon.
//!
//! The on-disk format is one `emotion<TAB>word<TAB>score` triple per line.
//! Lines starting with `#` and blank lines are skipped. Labels outside the
//! four-emotion model are dropped, and a word listed under several emotions
//! is merged into one vector.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::emotion::{Emotion, EmotionVector};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("malformed lexicon line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("lexicon contains no entries for anger, fear, happiness or sadness")]
    EmptyLexicon,
    #[error("failed reading lexicon: {0}")]
    Io(#[from] io::Error),
}

/// Immutable word → [`EmotionVector`] map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: HashMap<String, EmotionVector>,
    source: Option<PathBuf>,
    clamped: usize,
    dropped: usize,
}

impl Lexicon {
    /// Builds a lexicon directly from word vectors. Words are lowercased and
    /// vectors merged the same way as when loading from a file.
    pub fn from_entries<I, S>(entries: I) -> Result<Lexicon, LexiconError>
    where
        I: IntoIterator<Item = (S, EmotionVector)>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for (i, (word, vector)) in entries.into_iter().enumerate() {
            let word = normalize_word(word.as_ref())
                .map_err(|reason| LexiconError::MalformedLine { line: i + 1, reason })?;
            for e in Emotion::ALL {
                lex.insert(&word, e, vector.get(e), i + 1)?;
            }
        }
        if lex.entries.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }
        Ok(lex)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        let reader = BufReader::new(reader);
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let mut line = line.trim_end_matches('\r');
            if lineno == 1 {
                line = line.trim_start_matches('\u{feff}');
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            lex.parse_line(line, lineno)?;
        }
        if lex.entries.is_empty() {
            return Err(LexiconError::EmptyLexicon);
        }
        Ok(lex)
    }

    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        Self::from_reader(text.as_bytes())
    }

    fn parse_line(&mut self, line: &str, lineno: usize) -> Result<(), LexiconError> {
        let malformed = |reason: String| LexiconError::MalformedLine { line: lineno, reason };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(malformed(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let score: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| malformed(format!("score `{}` is not a number", fields[2].trim())))?;
        if !score.is_finite() {
            return Err(malformed(format!("score `{}` is not finite", fields[2].trim())));
        }
        let word = normalize_word(fields[1]).map_err(malformed)?;
        match Emotion::from_lexicon_label(fields[0]) {
            Some(emotion) => self.insert(&word, emotion, score, lineno),
            None => {
                self.dropped += 1;
                Ok(())
            }
        }
    }

    fn insert(
        &mut self,
        word: &str,
        emotion: Emotion,
        score: f64,
        lineno: usize,
    ) -> Result<(), LexiconError> {
        if !score.is_finite() {
            return Err(LexiconError::MalformedLine {
                line: lineno,
                reason: format!("score `{score}` is not finite"),
            });
        }
        let score = if score < 0.0 {
            self.clamped += 1;
            0.0
        } else {
            score
        };
        let slot = self.entries.entry(word.to_owned()).or_default();
        // Duplicate (word, emotion) pairs keep the larger score so that line
        // order never matters.
        if score > slot.get(emotion) {
            slot.set(emotion, score);
        }
        Ok(())
    }

    /// Weight vector for `word`, or the zero vector when it is not present.
    pub fn word_vector(&self, word: &str) -> EmotionVector {
        self.entries.get(word).copied().unwrap_or(EmotionVector::ZERO)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    /// Number of negative scores that were clamped to zero while loading.
    pub fn clamped_count(&self) -> usize {
        self.clamped
    }

    /// Number of lines skipped because their emotion is outside the model.
    pub fn dropped_count(&self) -> usize {
        self.dropped
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &EmotionVector)> {
        self.entries.iter().map(|(w, v)| (w.as_str(), v))
    }

    /// Copy of this lexicon with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Lexicon {
        Lexicon {
            entries: self
                .entries
                .iter()
                .map(|(w, v)| (w.clone(), v.scaled(factor)))
                .collect(),
            source: self.source.clone(),
            clamped: self.clamped,
            dropped: self.dropped,
        }
    }
}

fn normalize_word(raw: &str) -> Result<String, String> {
    let word = raw.trim().to_lowercase();
    if word.is_empty() {
        return Err("empty word".into());
    }
    if word.chars().any(char::is_whitespace) {
        return Err(format!("word `{word}` contains whitespace"));
    }
    Ok(word)
}

/// Loads a lexicon file.
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => LexiconError::FileNotFound(path.to_path_buf()),
        _ => LexiconError::Io(e),
    })?;
    let mut lex = Lexicon::from_reader(file)?;
    lex.source = Some(path.to_path_buf());
    Ok(lex)
}
