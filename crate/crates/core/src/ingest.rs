//! Message streams: parsing, tokenization and event filtering.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::LazyLock;

use chrono::{DateTime, FixedOffset, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("format error: {0}")]
    FormatError(String),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("failed reading input: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            other => Err(format!("unknown input format `{other}` (expected jsonl or csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Option<GeoPoint> {
        let ok = lat.is_finite()
            && lon.is_finite()
            && (-90.0..=90.0).contains(&lat)
            && (-180.0..=180.0).contains(&lon);
        ok.then_some(GeoPoint { lat, lon })
    }
}

/// A timestamped short text message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    /// Lowercase tag bodies without the leading `#`.
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub geo: Option<GeoPoint>,
}

impl Message {
    pub fn new(id: impl Into<String>, timestamp: DateTime<Utc>, text: impl Into<String>) -> Self {
        Message {
            id: id.into(),
            timestamp,
            text: text.into(),
            hashtags: Vec::new(),
            geo: None,
        }
    }
}

/// Messages read from a stream plus the number of records skipped.
#[derive(Debug, Clone, Default)]
pub struct ParsedStream {
    pub messages: Vec<Message>,
    pub skipped: usize,
}

/// Parses an ISO-8601 timestamp that carries an explicit UTC offset.
pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    DateTime::<FixedOffset>::parse_from_rfc3339(s.trim())
        .ok()
        .map(|t| t.with_timezone(&Utc))
}

fn normalize_tag(tag: &str) -> Option<String> {
    let tag = tag.trim().trim_start_matches('#').to_lowercase();
    (!tag.is_empty()).then_some(tag)
}

pub fn parse_stream(path: impl AsRef<Path>, format: InputFormat) -> Result<ParsedStream, IngestError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => IngestError::FileNotFound(path.to_path_buf()),
        _ => IngestError::Io(e),
    })?;
    match format {
        InputFormat::Jsonl => parse_jsonl(file),
        InputFormat::Csv => parse_csv(file),
    }
}

/// Reads one JSON object per line. A first record that is not a JSON object
/// is a format error; later unparseable records are skipped and counted.
pub fn parse_jsonl<R: Read>(reader: R) -> Result<ParsedStream, IngestError> {
    let mut out = ParsedStream::default();
    let mut seen_record = false;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value: Option<Value> = serde_json::from_str(line).ok().filter(Value::is_object);
        let first = !seen_record;
        seen_record = true;
        let Some(value) = value else {
            if first {
                return Err(IngestError::FormatError(format!(
                    "line {}: first record is not a JSON object",
                    i + 1
                )));
            }
            out.skipped += 1;
            continue;
        };
        match message_from_json(&value) {
            Some(m) => out.messages.push(m),
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

fn message_from_json(v: &Value) -> Option<Message> {
    let id = match v.get("id")? {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return None,
    };
    let timestamp = parse_timestamp(v.get("timestamp")?.as_str()?)?;
    let text = v.get("text")?.as_str()?.to_owned();
    let hashtags = match v.get("hashtags") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|t| t.as_str().and_then(normalize_tag))
            .collect::<Option<Vec<_>>>()?,
        Some(_) => return None,
    };
    let coord = |key: &str| match v.get(key) {
        None | Some(Value::Null) => Some(None),
        Some(x) => x.as_f64().map(Some),
    };
    let geo = geo_from_parts(coord("lat")?, coord("lon")?)?;
    Some(Message { id, timestamp, text, hashtags, geo })
}

/// Both coordinates or neither; a lone coordinate or out-of-range value
/// invalidates the record.
fn geo_from_parts(lat: Option<f64>, lon: Option<f64>) -> Option<Option<GeoPoint>> {
    match (lat, lon) {
        (None, None) => Some(None),
        (Some(lat), Some(lon)) => GeoPoint::new(lat, lon).map(Some),
        _ => None,
    }
}

pub const CSV_HEADER: [&str; 6] = ["id", "timestamp", "text", "hashtags", "lat", "lon"];

/// Reads CSV with header `id,timestamp,text,hashtags,lat,lon`.
pub fn parse_csv<R: Read>(reader: R) -> Result<ParsedStream, IngestError> {
    let mut out = ParsedStream::default();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) if e.is_io_error() => return Err(IngestError::FormatError(e.to_string())),
        Err(e) => return Err(IngestError::FormatError(format!("unreadable header: {e}"))),
    };
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        // empty file
        return Ok(out);
    }
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != CSV_HEADER {
        return Err(IngestError::FormatError(format!(
            "CSV header mismatch: expected `{}`, found `{}`",
            CSV_HEADER.join(","),
            got.join(",")
        )));
    }
    for record in rdr.records() {
        match record {
            Ok(r) => match message_from_csv(&r) {
                Some(m) => out.messages.push(m),
                None => out.skipped += 1,
            },
            Err(_) => out.skipped += 1,
        }
    }
    Ok(out)
}

fn message_from_csv(r: &csv::StringRecord) -> Option<Message> {
    if r.len() != CSV_HEADER.len() {
        return None;
    }
    let cell = |i: usize| {
        let s = r.get(i).unwrap_or("").trim();
        (!s.is_empty()).then_some(s)
    };
    let id = cell(0)?.to_owned();
    let timestamp = parse_timestamp(cell(1)?)?;
    // Text keeps its inner whitespace; an empty cell means absent.
    let text = r.get(2).filter(|s| !s.trim().is_empty())?.to_owned();
    let hashtags = match cell(3) {
        None => Vec::new(),
        Some(s) => s.split('|').filter_map(normalize_tag).collect(),
    };
    let coord = |i: usize| match cell(i) {
        None => Some(None),
        Some(s) => s.parse::<f64>().ok().map(Some),
    };
    let geo = geo_from_parts(coord(4)?, coord(5)?)?;
    Some(Message { id, timestamp, text, hashtags, geo })
}

const URL_MARKERS: [&str; 3] = ["http://", "https://", "www."];

/// Byte offset of the first URL marker that starts at a word boundary.
fn url_start(piece: &str) -> Option<usize> {
    URL_MARKERS
        .iter()
        .flat_map(|m| piece.match_indices(m).map(|(i, _)| i))
        .filter(|&i| {
            piece[..i]
                .chars()
                .next_back()
                .is_none_or(|c| !c.is_alphanumeric())
        })
        .min()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Splits text into lowercase unigrams.
///
/// URLs and `@mentions` are removed whole, a leading `#` is stripped so the
/// tag body counts as a word, and punctuation is trimmed from both ends of
/// each piece. Internal apostrophes survive. Duplicates are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for piece in lowered.split_whitespace() {
        let piece = match url_start(piece) {
            Some(i) => &piece[..i],
            None => piece,
        };
        let piece = piece.trim_start_matches(|c: char| !is_word_char(c) && c != '@' && c != '#');
        if piece.starts_with('@') {
            continue;
        }
        let piece = piece
            .trim_start_matches('#')
            .trim_matches(|c: char| !is_word_char(c));
        if !piece.is_empty() {
            tokens.push(piece.to_owned());
        }
    }
    tokens
}

static HASHTAG_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?:^|[^\p{L}\p{N}_&])#([\p{L}\p{N}_]+)").unwrap());

/// `#tag` occurrences in free text, lowercased and without the `#`.
pub fn text_hashtags(text: &str) -> Vec<String> {
    HASHTAG_RE
        .captures_iter(text)
        .map(|c| c[1].to_lowercase())
        .collect()
}

/// Inclusive latitude/longitude rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub min_lon: f64,
    pub max_lat: f64,
    pub max_lon: f64,
}

impl BoundingBox {
    /// Corners must be ordered: `lat1 <= lat2` and `lon1 <= lon2`.
    pub fn new(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<BoundingBox, IngestError> {
        let (Some(lo), Some(hi)) = (GeoPoint::new(lat1, lon1), GeoPoint::new(lat2, lon2)) else {
            return Err(IngestError::InvalidFilter("bounding box corner out of range".into()));
        };
        if lo.lat > hi.lat || lo.lon > hi.lon {
            return Err(IngestError::InvalidFilter(
                "bounding box corners must be ordered (lat1 <= lat2, lon1 <= lon2)".into(),
            ));
        }
        Ok(BoundingBox { min_lat: lo.lat, min_lon: lo.lon, max_lat: hi.lat, max_lon: hi.lon })
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        (self.min_lat..=self.max_lat).contains(&p.lat) && (self.min_lon..=self.max_lon).contains(&p.lon)
    }
}

impl FromStr for BoundingBox {
    type Err = IngestError;

    /// Parses `lat1,lon1,lat2,lon2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| IngestError::InvalidFilter(format!("bad bounding box `{s}`")))?;
        match parts[..] {
            [a, b, c, d] => BoundingBox::new(a, b, c, d),
            _ => Err(IngestError::InvalidFilter(format!(
                "bounding box needs 4 numbers, got {}",
                parts.len()
            ))),
        }
    }
}

/// Restricts a stream to one event. Present clauses combine with AND; tags
/// within the hashtag clause combine with OR.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventFilter {
    from: Option<DateTime<Utc>>,
    to: Option<DateTime<Utc>>,
    hashtags: Option<BTreeSet<String>>,
    bbox: Option<BoundingBox>,
}

impl EventFilter {
    pub fn new(
        from: Option<DateTime<Utc>>,
        to: Option<DateTime<Utc>>,
        hashtags: impl IntoIterator<Item = impl AsRef<str>>,
        bbox: Option<BoundingBox>,
    ) -> Result<EventFilter, IngestError> {
        if let (Some(f), Some(t)) = (from, to) {
            if f >= t {
                return Err(IngestError::InvalidFilter(format!(
                    "time range start {f} is not before end {t}"
                )));
            }
        }
        let tags: BTreeSet<String> = hashtags
            .into_iter()
            .filter_map(|t| normalize_tag(t.as_ref()))
            .collect();
        Ok(EventFilter {
            from,
            to,
            hashtags: (!tags.is_empty()).then_some(tags),
            bbox,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.from.is_none() && self.to.is_none() && self.hashtags.is_none() && self.bbox.is_none()
    }

    pub fn matches(&self, m: &Message) -> bool {
        if self.from.is_some_and(|f| m.timestamp < f) {
            return false;
        }
        if self.to.is_some_and(|t| m.timestamp >= t) {
            return false;
        }
        if let Some(tags) = &self.hashtags {
            let hit = m.hashtags.iter().any(|t| tags.contains(t))
                || text_hashtags(&m.text).iter().any(|t| tags.contains(t));
            if !hit {
                return false;
            }
        }
        if let Some(bbox) = &self.bbox {
            match m.geo {
                Some(p) if bbox.contains(p) => {}
                _ => return false,
            }
        }
        true
    }
}

/// Keeps the messages that satisfy `filter`, preserving order.
pub fn apply_filter(messages: impl IntoIterator<Item = Message>, filter: &EventFilter) -> Vec<Message> {
    messages.into_iter().filter(|m| filter.matches(m)).collect()
}
