//! Command-line driver. Every output file is a JSON envelope
//! `{ "meta": .., "result": .. }` (or a TSV table) written atomically; the
//! only run-dependent byte is `meta.generated_at`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::{load_corpus, CorpusConfig, CorpusFormat, PaperCorpus};
use crate::error::{Error, Result};
use crate::io::{read_json, write_atomic, write_json};
use crate::linkpred::{run_prediction, FeatureMode, ModelKind, PredictConfig, SplitSpec};
use crate::metrics::{ego_table, figure_tables, summarize};
use crate::pipeline::{detect_corpus, detect_corpus_with_threads, detections_for_metrics, DetectConfig, EgoCircles};
use crate::profiles::CorpusStats;
use crate::synth::{generate_temporal_corpus, TemporalCorpusSpec};

pub const CONFIG_ENV: &str = "EGOCIRCLES_CONFIG";
pub const TOOL: &str = "egocircles";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Circle detection and evaluation for co-authorship ego networks")]
pub struct Cli {
    /// Corpus config (TOML: field labels, decade bins, year range).
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with planted communities.
    Synth(SynthArgs),
    /// Detect circles in every ego network of a corpus snapshot.
    Detect(DetectArgs),
    /// Compute circle metrics and figure tables from detected circles.
    Eval(EvalArgs),
    /// Run temporal link prediction.
    Predict(PredictArgs),
    /// Render a plain-text digest of eval and predict outputs.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    /// Output directory; receives corpus.<format> and truth.json.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub authors: usize,
    #[arg(long, default_value_t = 10)]
    pub communities: usize,
    #[arg(long, default_value_t = 800)]
    pub train_papers: usize,
    #[arg(long, default_value_t = 250)]
    pub test_papers: usize,
    /// Probability that a new test-window pair lies inside a community.
    #[arg(long, default_value_t = 0.9)]
    pub signal: f64,
    #[arg(long, default_value_t = 1995)]
    pub train_end: i32,
    /// Test window as Y1:Y2.
    #[arg(long, default_value = "1996:1999", value_parser = parse_window)]
    pub window: (i32, i32),
    /// csv or jsonl.
    #[arg(long, default_value = "csv", value_parser = ["csv", "jsonl"])]
    pub format: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DetectArgs {
    /// Paper corpus (.csv or .jsonl).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Last year included in the snapshot.
    #[arg(long)]
    pub cutoff_year: i32,
    #[arg(long, default_value_t = 0.2)]
    pub tau_l: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub min_alters: usize,
    /// Rejections in a row before stopping (default: number of alters).
    #[arg(long)]
    pub patience: Option<usize>,
    /// Hard iteration cap (default: 200 times the number of alters).
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Worker threads across ego networks (default: all cores).
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output of `detect`.
    #[arg(long)]
    pub circles: PathBuf,
    /// Snapshot year (default: the one recorded in the circles file).
    #[arg(long)]
    pub cutoff_year: Option<i32>,
    /// Output directory for fig*.tsv, egos.tsv and summary.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub train_end: i32,
    /// Test window as Y1:Y2.
    #[arg(long, value_parser = parse_window)]
    pub window: (i32, i32),
    /// N, E, NE, NEB or NEBC.
    #[arg(long, default_value = "NE")]
    pub mode: FeatureMode,
    /// lr or srw.
    #[arg(long, default_value = "lr")]
    pub model: ModelKind,
    /// Output of `detect` on the training snapshot; required by NEB and NEBC.
    #[arg(long)]
    pub circles: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 0.5)]
    pub test_fraction: f64,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long)]
    pub lr_epochs: Option<usize>,
    #[arg(long)]
    pub srw_epochs: Option<usize>,
    #[arg(long)]
    pub srw_sources: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// summary.json written by `eval`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Reports written by `predict`; may be repeated.
    #[arg(long = "prediction")]
    pub predictions: Vec<PathBuf>,
    /// Write the digest here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_window(s: &str) -> std::result::Result<(i32, i32), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected Y1:Y2, got `{s}`"))?;
    let a: i32 = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b: i32 = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    if a > b {
        return Err(format!("window {a}:{b} ends before it starts"));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    /// Seconds since the Unix epoch, or `SOURCE_DATE_EPOCH` when set.
    pub generated_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub meta: Meta,
    pub result: T,
}

fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse().ok()) {
        return t;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn meta(command: &str, config: Value) -> Meta {
    Meta {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        config,
        generated_at: now(),
    }
}

fn context(stage: &'static str) -> impl Fn(Error) -> String {
    move |e| format!("{stage}: {e}")
}

fn corpus_config(path: Option<&Path>) -> Result<CorpusConfig> {
    match path {
        Some(p) => CorpusConfig::from_file(p),
        None => Ok(CorpusConfig::default()),
    }
}

fn read_corpus(path: &Path, config: &CorpusConfig) -> Result<PaperCorpus> {
    load_corpus(path, CorpusFormat::from_path(path), config.clone())
}

fn read_circles(path: &Path) -> Result<(Vec<EgoCircles>, Option<i32>)> {
    let env: Envelope<Vec<EgoCircles>> = read_json(path)?;
    let cutoff = env.meta.config["resolved"]["cutoff_year"].as_i64().map(|y| y as i32);
    Ok((env.result, cutoff))
}

fn synth(args: &SynthArgs) -> std::result::Result<String, String> {
    let spec = TemporalCorpusSpec {
        authors: args.authors,
        communities: args.communities,
        train_papers: args.train_papers,
        test_papers: args.test_papers,
        signal: args.signal,
        train_end: args.train_end,
        window: args.window,
        seed: args.seed,
        ..TemporalCorpusSpec::default()
    };
    let err = context("synth");
    let t = generate_temporal_corpus(&spec).map_err(&err)?;
    let format = if args.format == "jsonl" { CorpusFormat::Jsonl } else { CorpusFormat::Csv };
    let corpus_path = args.out.join(format!("corpus.{}", args.format));
    let mut bytes = Vec::new();
    t.corpus.write_to(&mut bytes, format).map_err(&err)?;
    write_atomic(&corpus_path, &bytes).map_err(&err)?;
    let truth = Envelope {
        meta: meta("synth", json!({ "args": args, "resolved": spec })),
        result: json!({ "communities": t.communities }),
    };
    write_json(&args.out.join("truth.json"), &truth).map_err(&err)?;
    let authors = t.corpus.papers_by_author().len();
    Ok(format!(
        "synth: {} papers by {authors} authors in {} communities -> {}",
        t.corpus.len(),
        t.communities.len(),
        corpus_path.display()
    ))
}

fn detect(args: &DetectArgs, config: &CorpusConfig) -> std::result::Result<String, String> {
    let err = context("detect");
    let corpus = read_corpus(&args.corpus, config).map_err(&err)?;
    let cfg = DetectConfig {
        cutoff_year: args.cutoff_year,
        tau_lower: args.tau_l,
        min_alters: args.min_alters,
        seed: args.seed,
        patience: args.patience,
        max_iterations: args.max_iterations,
    };
    let dets = match args.threads {
        Some(0) => return Err("detect: --threads must be at least 1".into()),
        Some(n) => detect_corpus_with_threads(&corpus, &cfg, n),
        None => detect_corpus(&corpus, &cfg),
    }
    .map_err(&err)?;
    let circles: usize = dets.iter().map(|d| d.circles.len()).sum();
    let egos = dets.len();
    let env = Envelope {
        meta: meta("detect", json!({ "args": args, "corpus_config": config, "resolved": cfg })),
        result: dets,
    };
    write_json(&args.out, &env).map_err(&err)?;
    Ok(format!("detect: {egos} egos, {circles} circles -> {}", args.out.display()))
}

fn eval(args: &EvalArgs, config: &CorpusConfig) -> std::result::Result<String, String> {
    let err = context("eval");
    let corpus = read_corpus(&args.corpus, config).map_err(&err)?;
    let (dets, recorded) = read_circles(&args.circles).map_err(&err)?;
    let cutoff = args
        .cutoff_year
        .or(recorded)
        .ok_or("eval: circles file records no cutoff year; pass --cutoff-year")?;
    let snapshot = corpus.snapshot(cutoff).map_err(&err)?;
    let stats = CorpusStats::new(&snapshot);
    let inputs = detections_for_metrics(&stats, &dets).map_err(&err)?;
    let summary = summarize(&inputs).map_err(&err)?;
    for table in figure_tables(&summary) {
        write_atomic(&args.out.join(table.file_name()), table.to_tsv().as_bytes()).map_err(&err)?;
    }
    write_atomic(&args.out.join("egos.tsv"), ego_table(&summary).as_bytes()).map_err(&err)?;
    let q = summary.mean_q_ov.map_or("n/a".to_string(), |q| format!("{q:.4}"));
    let line = format!(
        "eval: {} egos ({} with circles), {} circles, mean Q_ov {q} -> {}",
        summary.egos,
        summary.egos_with_circles,
        summary.circles,
        args.out.display()
    );
    let env = Envelope {
        meta: meta("eval", json!({ "args": args, "corpus_config": config, "resolved": { "cutoff_year": cutoff } })),
        result: summary,
    };
    write_json(&args.out.join("summary.json"), &env).map_err(&err)?;
    Ok(line)
}

fn predict(args: &PredictArgs, config: &CorpusConfig) -> std::result::Result<String, String> {
    let err = context("predict");
    let corpus = read_corpus(&args.corpus, config).map_err(&err)?;
    let split = SplitSpec {
        train_end: args.train_end,
        window: args.window,
    };
    let mut cfg = PredictConfig::new(split, args.mode, args.model, args.seed);
    cfg.negatives_per_positive = args.negatives;
    cfg.test_fraction = args.test_fraction;
    cfg.k = args.k;
    if let Some(e) = args.lr_epochs {
        cfg.lr.epochs = e;
    }
    if let Some(e) = args.srw_epochs {
        cfg.srw.epochs = e;
    }
    if let Some(s) = args.srw_sources {
        cfg.srw.max_sources = s;
    }
    let circles = match &args.circles {
        Some(path) => {
            let (dets, cutoff) = read_circles(path).map_err(&err)?;
            if let Some(y) = cutoff.filter(|&y| y > args.train_end) {
                return Err(format!("predict: circles were detected through {y}, after --train-end {}", args.train_end));
            }
            Some(dets)
        }
        None if args.mode.uses_circles() => {
            return Err(format!("predict: mode {} needs --circles", args.mode));
        }
        None => None,
    };
    let report = run_prediction(&corpus, &cfg, circles.as_deref()).map_err(&err)?;
    let line = format!(
        "predict: {}/{} AUC {:.4} Prec@{} {:.4} ({} positives) -> {}",
        args.mode,
        args.model.name(),
        report.auc,
        report.k,
        report.prec_at_k,
        report.positives,
        args.out.display()
    );
    let env = Envelope {
        meta: meta("predict", json!({ "args": args, "corpus_config": config, "resolved": cfg })),
        result: report,
    };
    write_json(&args.out, &env).map_err(&err)?;
    Ok(line)
}

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) if v.is_f64() => format!("{x:.4}"),
        _ if v.is_null() => "-".into(),
        _ => v.to_string(),
    }
}

fn report(args: &ReportArgs) -> std::result::Result<String, String> {
    let err = context("report");
    if args.summary.is_none() && args.predictions.is_empty() {
        return Err("report: nothing to report; pass --summary and/or --prediction".into());
    }
    let mut out = String::new();
    if let Some(path) = &args.summary {
        let v: Value = read_json(path).map_err(&err)?;
        let s = &v["result"];
        let _ = writeln!(out, "circles ({})", path.display());
        for key in ["egos", "egos_with_circles", "circles", "mean_q_ov", "mean_circle_size", "mean_cliquishness", "mean_homogeneity"] {
            let _ = writeln!(out, "  {key:<20}{}", num(&s[key]));
        }
        let _ = writeln!(out, "  {:<16}{:>6}{:>10}{:>10}{:>13}{:>14}", "band", "egos", "circles", "size", "memberships", "cliquishness");
        for b in s["bands"].as_array().into_iter().flatten() {
            let _ = writeln!(
                out,
                "  {:<16}{:>6}{:>10}{:>10}{:>13}{:>14}",
                b["band"].as_str().unwrap_or("?"),
                num(&b["egos"]),
                num(&b["mean_circles"]),
                num(&b["mean_size"]),
                num(&b["mean_memberships"]),
                num(&b["mean_cliquishness"])
            );
        }
    }
    if !args.predictions.is_empty() {
        let _ = writeln!(out, "link prediction");
        let _ = writeln!(out, "  {:<6}{:<6}{:>8}{:>10}{:>11}", "mode", "model", "AUC", "Prec@k", "positives");
        for path in &args.predictions {
            let v: Value = read_json(path).map_err(&err)?;
            let r = &v["result"];
            let _ = writeln!(
                out,
                "  {:<6}{:<6}{:>8}{:>10}{:>11}",
                r["mode"].as_str().unwrap_or("?"),
                r["model"].as_str().unwrap_or("?"),
                num(&r["auc"]),
                num(&r["prec_at_k"]),
                num(&r["positives"])
            );
        }
    }
    match &args.out {
        Some(path) => {
            write_atomic(path, out.as_bytes()).map_err(&err)?;
            Ok(format!("report: {} -> {}", args.predictions.len() + args.summary.is_some() as usize, path.display()))
        }
        None => {
            print!("{out}");
            Ok(format!("report: {} inputs", args.predictions.len() + args.summary.is_some() as usize))
        }
    }
}

/// Parse `argv` and run one subcommand. Returns the process exit status:
/// 0 on success, 2 for usage errors, 1 for everything else.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Synth(a) => synth(a),
        Command::Report(a) => report(a),
        cmd => match corpus_config(cli.config.as_deref()) {
            Err(e) => Err(format!("config: {e}")),
            Ok(config) => match cmd {
                Command::Detect(a) => detect(a, &config),
                Command::Eval(a) => eval(a, &config),
                Command::Predict(a) => predict(a, &config),
                Command::Synth(_) | Command::Report(_) => unreachable!(),
            },
        },
    };
    match outcome {
        Ok(line) => {
            eprintln!("{line}");
            0
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("1996:1999"), Ok((1996, 1999)));
        assert!(parse_window("1999:1996").is_err());
        assert!(parse_window("1996").is_err());
        assert!(parse_window("x:1999").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["egocircles", "detect", "--bogus"]), 2);
        assert_eq!(run(["egocircles", "frobnicate"]), 2);
        // Seeds are mandatory.
        assert_eq!(run(["egocircles", "detect", "--corpus", "c.csv", "--cutoff-year", "1995", "--out", "o.json"]), 2);
        assert_eq!(run(["egocircles", "predict", "--corpus", "c", "--train-end", "1995", "--window", "1996:1999", "--mode", "XYZ", "--seed", "1", "--out", "o"]), 2);
        assert_eq!(run(["egocircles", "--help"]), 0);
    }

    #[test]
    fn missing_inputs_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.json");
        let code = run([
            "egocircles".as_ref(),
            "detect".as_ref(),
            "--corpus".as_ref(),
            dir.path().join("nope.csv").as_os_str(),
            "--cutoff-year".as_ref(),
            "1995".as_ref(),
            "--seed".as_ref(),
            "1".as_ref(),
            "--out".as_ref(),
            out.as_os_str(),
        ] as [&std::ffi::OsStr; 10]);
        assert_eq!(code, 1);
        assert!(!out.exists());
    }
}
