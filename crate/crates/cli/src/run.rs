//! Subcommand implementations.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use chrono::SecondsFormat;
use crowdwatch_core::pipeline::sort_by_time;
use crowdwatch_core::synth::write_jsonl;
use crowdwatch_core::{
    analyze_batch, apply_filter, classify_all, generate_stream, load_lexicon, parse_stream, AnalysisConfig,
    Analyzer, ClassifiedMessage, EmotionSchedule, EventFilter, GeneratorOptions, WindowRecord,
};

use crate::args::{AnalyzeArgs, GenerateArgs, Pace, ReplayArgs};
use crate::report::{write_alerts, ConfigEcho, ReportBuilder, RunReport, TimeseriesWriter};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const ALERTS_FILE: &str = "alerts.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const STREAM_FILE: &str = "stream.jsonl";

impl AnalyzeArgs {
    pub fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            interval_minutes: self.interval_minutes,
            z_threshold: self.z_threshold,
            ma_window: self.ma_window,
            min_classified: self.min_classified,
            ..AnalysisConfig::default()
        }
    }

    fn echo(&self) -> ConfigEcho {
        let ts = |t: Option<chrono::DateTime<chrono::Utc>>| t.map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true));
        ConfigEcho {
            analysis: self.config(),
            origin: ts(self.origin),
            from: ts(self.from),
            to: ts(self.to),
            hashtags: self.hashtags.clone(),
            bbox: self.bbox.map(|b| [b.min_lat, b.min_lon, b.max_lat, b.max_lon]),
            lexicon: Some(self.lexicon.display().to_string()),
            input: Some(self.input.display().to_string()),
        }
    }
}

/// Loaded, filtered, classified and time-sorted input.
struct Prepared {
    messages: Vec<ClassifiedMessage>,
    builder: ReportBuilder,
}

fn prepare(args: &AnalyzeArgs) -> Result<Prepared> {
    args.config().validate().context("invalid analysis settings")?;
    let lexicon = load_lexicon(&args.lexicon)
        .with_context(|| format!("loading lexicon {}", args.lexicon.display()))?;
    let parsed = parse_stream(&args.input, args.format)
        .with_context(|| format!("reading messages from {}", args.input.display()))?;
    let filter = EventFilter::new(args.from, args.to, &args.hashtags, args.bbox)?;
    let before = parsed.messages.len();
    let kept = apply_filter(parsed.messages, &filter);
    let filtered_out = before - kept.len();
    let mut messages = classify_all(&lexicon, kept);
    sort_by_time(&mut messages);
    Ok(Prepared { messages, builder: ReportBuilder::new(args.echo(), parsed.skipped, filtered_out) })
}

/// Writes the three output files for a finished report.
struct Outputs {
    timeseries: Option<TimeseriesWriter<BufWriter<File>>>,
}

impl Outputs {
    fn open(dir: Option<&Path>) -> Result<Outputs> {
        let Some(dir) = dir else {
            return Ok(Outputs { timeseries: None });
        };
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        let path = dir.join(TIMESERIES_FILE);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Outputs { timeseries: Some(TimeseriesWriter::new(BufWriter::new(file))?) })
    }

    fn finish(self, dir: Option<&Path>, report: &RunReport) -> Result<()> {
        let Some(dir) = dir else { return Ok(()) };
        if let Some(w) = self.timeseries {
            w.into_inner().flush()?;
        }
        let alerts = dir.join(ALERTS_FILE);
        write_alerts(BufWriter::new(File::create(&alerts)?), &report.alerts)
            .with_context(|| format!("writing {}", alerts.display()))?;
        let summary = dir.join(SUMMARY_FILE);
        let body = serde_json::json!({ "config": report.config, "summary": report.summary });
        fs::write(&summary, serde_json::to_string_pretty(&body)? + "\n")
            .with_context(|| format!("writing {}", summary.display()))?;
        Ok(())
    }
}

/// Batch analysis of a whole input file.
pub fn run_analyze(args: &AnalyzeArgs) -> Result<RunReport> {
    let Prepared { messages, mut builder } = prepare(args)?;
    let records = analyze_batch(&messages, &args.config(), args.origin)?;
    let mut outputs = Outputs::open(args.out.as_deref())?;
    for r in &records {
        let (row, _) = builder.push(r);
        if let Some(w) = outputs.timeseries.as_mut() {
            w.write(&row)?;
        }
    }
    let report = builder.finish();
    outputs.finish(args.out.as_deref(), &report)?;
    Ok(report)
}

/// Streams the input through [`Analyzer`], writing each window's CSV row to
/// `sink` as soon as the window closes.
pub fn run_replay<W: Write>(args: &ReplayArgs, sink: W) -> Result<RunReport> {
    let a = &args.analyze;
    let Prepared { messages, mut builder } = prepare(a)?;
    let mut analyzer = Analyzer::new(a.config(), a.origin)?;
    let mut outputs = Outputs::open(a.out.as_deref())?;
    let mut live = TimeseriesWriter::new(sink)?;
    let delay = match args.pace {
        Pace::Immediate => None,
        Pace::Realtime => Some(a.config().interval().to_std()?),
        Pace::Fixed(d) => Some(d),
    };
    let mut emit = |r: WindowRecord| -> Result<()> {
        let (row, _) = builder.push(&r);
        live.write(&row)?;
        if let Some(w) = outputs.timeseries.as_mut() {
            w.write(&row)?;
        }
        if let Some(d) = delay {
            std::thread::sleep(d);
        }
        Ok(())
    };
    for m in &messages {
        for r in analyzer.push(m)? {
            emit(r)?;
        }
    }
    if let Some(r) = analyzer.finish() {
        emit(r)?;
    }
    let report = builder.finish();
    outputs.finish(a.out.as_deref(), &report)?;
    Ok(report)
}

/// Writes a synthetic stream. Returns the number of messages written.
pub fn run_generate<W: Write>(args: &GenerateArgs, stdout: W) -> Result<usize> {
    let lexicon = load_lexicon(&args.lexicon)
        .with_context(|| format!("loading lexicon {}", args.lexicon.display()))?;
    let text = fs::read_to_string(&args.schedule)
        .with_context(|| format!("reading schedule {}", args.schedule.display()))?;
    let schedule = EmotionSchedule::from_json(&text)
        .with_context(|| format!("parsing schedule {}", args.schedule.display()))?;
    let options = GeneratorOptions {
        seed: args.seed,
        origin: args.origin,
        interval_minutes: args.interval_minutes,
        sampling: args.sampling,
    };
    let messages = generate_stream(&schedule, &lexicon, &options)?;
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(STREAM_FILE);
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_jsonl(BufWriter::new(file), &messages)?;
        }
        None => write_jsonl(stdout, &messages)?,
    }
    Ok(messages.len())
}
