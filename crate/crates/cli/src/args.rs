use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use chrono::{DateTime, Utc};
use clap::{Args, Parser, Subcommand};
use crowdwatch_core::{parse_timestamp, BoundingBox, InputFormat, Sampling};

#[derive(Debug, Parser)]
#[command(name = "crowdwatch", version, about = "Emotion-driven crowd-type monitoring over message streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a message file and write timeseries, alerts and summary.
    Analyze(AnalyzeArgs),
    /// Replay a message file window by window, emitting each record as it closes.
    Replay(ReplayArgs),
    /// Generate a synthetic message stream from an emotion schedule.
    Generate(GenerateArgs),
}

fn timestamp_arg(s: &str) -> Result<DateTime<Utc>, String> {
    parse_timestamp(s).ok_or_else(|| format!("`{s}` is not an ISO-8601 timestamp with offset"))
}

fn bbox_arg(s: &str) -> Result<BoundingBox, String> {
    s.parse().map_err(|e: crowdwatch_core::IngestError| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Lexicon file (`emotion<TAB>word<TAB>score` per line).
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Message file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "jsonl", value_parser = InputFormat::from_str)]
    pub format: InputFormat,
    #[arg(long, default_value_t = 15)]
    pub interval_minutes: u32,
    #[arg(long, default_value_t = 1.0)]
    pub z_threshold: f64,
    #[arg(long, default_value_t = 8)]
    pub ma_window: usize,
    #[arg(long, default_value_t = 1)]
    pub min_classified: u64,
    /// Keep messages at or after this instant.
    #[arg(long, value_parser = timestamp_arg)]
    pub from: Option<DateTime<Utc>>,
    /// Keep messages strictly before this instant.
    #[arg(long, value_parser = timestamp_arg)]
    pub to: Option<DateTime<Utc>>,
    /// Required hashtag; repeat for alternatives.
    #[arg(long = "hashtag")]
    pub hashtags: Vec<String>,
    /// `lat1,lon1,lat2,lon2`
    #[arg(long, value_parser = bbox_arg, allow_hyphen_values = true)]
    pub bbox: Option<BoundingBox>,
    /// Window grid origin. Defaults to the first message truncated to the interval grid.
    #[arg(long, value_parser = timestamp_arg)]
    pub origin: Option<DateTime<Utc>>,
    /// Output directory for timeseries.csv, alerts.jsonl and summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Delay between emitted windows during replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pace {
    /// As fast as possible.
    Immediate,
    /// One window interval of wall time per window.
    Realtime,
    Fixed(Duration),
}

impl FromStr for Pace {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(Pace::Immediate),
            "realtime" => Ok(Pace::Realtime),
            _ => s
                .strip_suffix("ms")
                .and_then(|n| n.parse::<u64>().ok())
                .map(|ms| Pace::Fixed(Duration::from_millis(ms)))
                .ok_or_else(|| format!("pace `{s}` must be 0, realtime or <N>ms")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[command(flatten)]
    pub analyze: AnalyzeArgs,
    #[arg(long, default_value = "0", value_parser = Pace::from_str)]
    pub pace: Pace,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// JSON array of `{"windows":N,"mix":[a,f,h,s],"rate":M,"oov":p}` phases.
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// First window start.
    #[arg(long, value_parser = timestamp_arg, default_value = "2014-05-04T01:00:00Z")]
    pub origin: DateTime<Utc>,
    #[arg(long, default_value_t = 15)]
    pub interval_minutes: u32,
    #[arg(long, default_value = "stratified", value_parser = Sampling::from_str)]
    pub sampling: Sampling,
    /// Output directory for stream.jsonl; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pace_parsing() {
        assert_eq!("0".parse::<Pace>(), Ok(Pace::Immediate));
        assert_eq!("realtime".parse::<Pace>(), Ok(Pace::Realtime));
        assert_eq!("250ms".parse::<Pace>(), Ok(Pace::Fixed(Duration::from_millis(250))));
        assert!("fast".parse::<Pace>().is_err());
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["crowdwatch", "analyze", "--lexicon", "l.tsv", "--input", "in.jsonl"]).unwrap();
        let Command::Analyze(a) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(a.interval_minutes, 15);
        assert_eq!(a.z_threshold, 1.0);
        assert_eq!(a.ma_window, 8);
        assert_eq!(a.min_classified, 1);
        assert_eq!(a.format, InputFormat::Jsonl);
    }

    #[test]
    fn repeatable_hashtags_and_negative_bbox() {
        let cli = Cli::try_parse_from([
            "crowdwatch", "replay", "--lexicon", "l", "--input", "i", "--hashtag", "MGMGrand", "--hashtag",
            "boxing", "--bbox", "-36.2,-115.3,36.2,-115.0", "--pace", "10ms",
        ])
        .unwrap();
        let Command::Replay(r) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(r.analyze.hashtags, ["MGMGrand", "boxing"]);
        assert!(r.analyze.bbox.is_some());
        assert_eq!(r.pace, Pace::Fixed(Duration::from_millis(10)));
    }
}
