#![allow(dead_code)]

use std::path::{Path, PathBuf};

use crowdwatch_cli::{AnalyzeArgs, GenerateArgs, Pace, ReplayArgs};
use crowdwatch_core::{parse_timestamp, InputFormat, Phase, Sampling};

/// Small hand-written lexicon in the tab-separated distribution format.
pub const LEXICON: &str = "\
# emotion\tword\tscore
anger\trage\t0.92
anger\tfurious\t0.85
anger\thate\t0.71
anger\tangry\t0.88
anger\toutraged\t0.79
fear\toutraged\t0.12
fear\tscared\t0.90
fear\tterrified\t0.95
fear\tpanic\t0.83
fear\tafraid\t0.77
fear\tscream\t0.74
sadness\tscream\t0.20
joy\thappy\t0.81
joy\tawesome\t0.72
joy\tcelebrate\t0.78
joy\tcheer\t0.66
happiness\twin\t0.59
sadness\tsad\t0.89
sadness\tcry\t0.76
sadness\theartbroken\t0.93
sadness\ttears\t0.68
fear\ttears\t0.10
surprise\twow\t0.80
trust\tsafe\t0.60
";

pub fn write_lexicon(dir: &Path) -> PathBuf {
    let path = dir.join("lexicon.tsv");
    std::fs::write(&path, LEXICON).unwrap();
    path
}

pub fn write_schedule(dir: &Path, phases: &[Phase]) -> PathBuf {
    let path = dir.join("schedule.json");
    std::fs::write(&path, serde_json::to_string(phases).unwrap()).unwrap();
    path
}

pub const BASELINE: [f64; 4] = [0.45, 0.10, 0.35, 0.10];
pub const SURGE: [f64; 4] = [0.15, 0.60, 0.15, 0.10];

/// 19 baseline windows, a two-window fear surge, then 7 baseline windows.
pub fn stampede_phases(rate: u32) -> Vec<Phase> {
    vec![
        Phase { windows: 19, mix: BASELINE, rate, oov: 0.0 },
        Phase { windows: 2, mix: SURGE, rate, oov: 0.0 },
        Phase { windows: 7, mix: BASELINE, rate, oov: 0.0 },
    ]
}

pub fn generate_args(lexicon: &Path, schedule: &Path, seed: u64, out: &Path, sampling: Sampling) -> GenerateArgs {
    GenerateArgs {
        lexicon: lexicon.to_path_buf(),
        schedule: schedule.to_path_buf(),
        seed,
        origin: parse_timestamp("2014-05-04T01:00:00Z").unwrap(),
        interval_minutes: 15,
        sampling,
        out: Some(out.to_path_buf()),
    }
}

pub fn analyze_args(lexicon: &Path, input: &Path, out: Option<&Path>) -> AnalyzeArgs {
    AnalyzeArgs {
        lexicon: lexicon.to_path_buf(),
        input: input.to_path_buf(),
        format: InputFormat::Jsonl,
        interval_minutes: 15,
        z_threshold: 1.0,
        ma_window: 8,
        min_classified: 1,
        from: None,
        to: None,
        hashtags: Vec::new(),
        bbox: None,
        origin: None,
        out: out.map(Path::to_path_buf),
    }
}

pub fn replay_args(analyze: AnalyzeArgs) -> ReplayArgs {
    ReplayArgs { analyze, pace: Pace::Immediate }
}
