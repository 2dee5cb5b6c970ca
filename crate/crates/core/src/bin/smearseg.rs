use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use smearseg::imbalance::{
    class_weights, imbalance_ratio, upsample_plan, ClassDistribution, WeightScheme,
};
use smearseg::normalize::NormalizationStats;
use smearseg::pipeline::eval::{load_predictions, load_truth};
use smearseg::pipeline::io::{create_dir, list_pngs, write_text};
use smearseg::pipeline::synth::write_batch;
use smearseg::pipeline::{
    eval_separation, export_dir, fit_stats_dir, run_segment, segment_dir, timing_report,
    PipelineConfig, SceneSpec, SegmentOptions, Segmenter,
};

/// Bad configuration; reported with exit code 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

#[derive(Parser)]
#[command(
    name = "smearseg",
    version,
    about = "Blood-smear segmentation and overlapping-cell separation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit background normalization statistics over a directory of PNGs.
    FitStats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Segment every PNG in a directory and write annotations.
    Segment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Write overlay images.
        #[arg(long)]
        overlay: bool,
        /// Write per-cell crops and a manifest.
        #[arg(long)]
        crops: bool,
    },
    /// Write per-cell crops from existing annotation files.
    Export {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 72)]
        canvas: usize,
    },
    /// Generate synthetic scenes with a ground-truth CSV.
    Synth {
        #[arg(long, default_value_t = 200)]
        scenes: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Cells per group, e.g. `2..4`.
        #[arg(long, default_value = "2..4")]
        count: String,
        #[arg(long, default_value_t = 1)]
        clusters: usize,
    },
    /// Score annotations against a truth CSV.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time mask extraction and separation, single-threaded.
    Bench {
        /// Directory of PNGs; synthetic scenes are generated when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        scenes: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Class weights, imbalance ratio and upsampling plan for a `class,count` CSV.
    Imbalance {
        #[arg(long)]
        counts: PathBuf,
        #[arg(long, default_value = "inverse")]
        scheme: String,
        /// Class whose count every other class is upsampled to.
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` TOML file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Normalization statistics JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    min_area: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p).map_err(config_err)?,
            None => PipelineConfig::default(),
        };
        if let Some(s) = &self.stats {
            cfg.stats = Some(s.clone());
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(a) = self.min_area {
            cfg.min_area = a;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        cfg.validate().map_err(config_err)?;
        Ok(cfg)
    }

    fn segmenter(&self) -> Result<Segmenter> {
        Segmenter::from_config(self.resolve()?).map_err(config_err)
    }
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (lo, hi) = s.split_once("..").unwrap_or((s, s));
    let lo = lo.trim().parse().map_err(config_err)?;
    let hi = hi.trim().parse().map_err(config_err)?;
    Ok((lo, hi))
}

fn report_failures(failures: &[(PathBuf, String)]) -> ExitCode {
    for (_, msg) in failures {
        eprintln!("error: {msg}");
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::FitStats { input, out, cfg } => {
            let cfg = cfg.resolve()?;
            let stats: NormalizationStats = fit_stats_dir(&input, &cfg)?;
            stats.save(&out)?;
            println!(
                "{} images, global background mean [{:.3}, {:.3}, {:.3}]",
                stats.image_count(),
                stats.global_mean[0],
                stats.global_mean[1],
                stats.global_mean[2]
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Segment {
            input,
            output,
            cfg,
            overlay,
            crops,
        } => {
            let seg = cfg.segmenter()?;
            let outcome = segment_dir(&seg, &input, &output, SegmentOptions { crops, overlay })?;
            for d in &outcome.diagnostics {
                eprintln!("note: {d}");
            }
            println!(
                "{} images segmented, {} failed",
                outcome.processed,
                outcome.failures.len()
            );
            Ok(report_failures(&outcome.failures))
        }
        Command::Export {
            images,
            annotations,
            output,
            canvas,
        } => {
            if canvas < smearseg::pipeline::config::MIN_CROP_CANVAS {
                return Err(config_err(format!(
                    "canvas must be at least {}",
                    smearseg::pipeline::config::MIN_CROP_CANVAS
                )));
            }
            let outcome = export_dir(&images, &annotations, &output, canvas)?;
            for d in &outcome.diagnostics {
                eprintln!("note: {d}");
            }
            println!(
                "{} crops from {} images",
                outcome.manifest.len(),
                outcome.processed
            );
            Ok(report_failures(&outcome.failures))
        }
        Command::Synth {
            scenes,
            seed,
            out,
            count,
            clusters,
        } => {
            let spec = SceneSpec {
                seed,
                count: parse_range(&count)?,
                clusters,
                ..SceneSpec::default()
            };
            spec.validate().map_err(config_err)?;
            let truths = write_batch(&out, &spec, scenes)?;
            let contours: usize = truths.iter().map(|(_, t)| t.contours.len()).sum();
            println!(
                "{scenes} scenes, {contours} contours written to {}",
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            pred,
            truth,
            report,
        } => {
            let predictions = load_predictions(&pred)?;
            let truth = load_truth(&truth)?;
            let r = eval_separation(&predictions, &truth)?;
            print!("{}", r.render_table());
            if let Some(path) = report {
                write_text(&path, &r.to_json()?)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            input,
            scenes,
            seed,
            cfg,
        } => {
            let mut config = cfg.resolve()?;
            config.threads = 1;
            let seg = Segmenter::from_config(config).map_err(config_err)?;
            let tmp;
            let dir = match input {
                Some(d) => d,
                None => {
                    tmp = std::env::temp_dir().join(format!("smearseg-bench-{seed}-{scenes}"));
                    create_dir(&tmp)?;
                    let spec = SceneSpec {
                        seed,
                        ..SceneSpec::default()
                    };
                    write_batch(&tmp, &spec, scenes)?;
                    tmp
                }
            };
            let paths = list_pngs(&dir).with_context(|| format!("listing {}", dir.display()))?;
            let mut failures = Vec::new();
            let mut rows = Vec::new();
            for (path, r) in run_segment(&seg, &paths) {
                match r {
                    Ok(r) => rows.push(r.timing),
                    Err(e) => failures.push((path, e.to_string())),
                }
            }
            print!("{}", timing_report(rows).to_csv());
            Ok(report_failures(&failures))
        }
        Command::Imbalance {
            counts,
            scheme,
            target,
        } => {
            let scheme: WeightScheme = scheme.parse().map_err(config_err)?;
            let dist = ClassDistribution::load(&counts)?;
            let mut out = serde_json::Map::new();
            out.insert(
                "imbalance_ratio".into(),
                serde_json::json!(imbalance_ratio(&dist)?),
            );
            out.insert(
                "weights".into(),
                serde_json::to_value(class_weights(&dist, scheme)?)?,
            );
            if let Some(t) = target {
                out.insert(
                    "upsample".into(),
                    serde_json::to_value(upsample_plan(&dist, &t)?)?,
                );
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ConfigError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
