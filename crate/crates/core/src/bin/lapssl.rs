//! Experiment runner for label-aware graph-Laplacian clustering.
//!
//! Subcommands: `single` (one pipeline run), `sweep` (trials x values grid),
//! `embed` (spectral embedding export), `metrics` (NMI/ACC between two label
//! files). Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lapssl::cluster;
use lapssl::experiment::plot::{embedding_svg, scatter_svg, sweep_lines_svg, SweepSeries};
use lapssl::experiment::{
    run_embedding, run_single, run_sweep, write_resolved_config, write_results_csv,
    write_summary_json, ExperimentConfig, ExperimentReport, LaplacianKind, Method, Overrides,
    SweepParam,
};
use lapssl::{Error, Result};

#[derive(Parser)]
#[command(
    name = "lapssl",
    version,
    about = "Semi-supervised spectral clustering and Dirichlet interpolation on graph Laplacians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat `key = value` experiment config file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count override.
    #[arg(long)]
    trials: Option<usize>,
    /// Method override: spectral | dirichlet.
    #[arg(long)]
    method: Option<String>,
    /// Output directory override.
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and report NMI/ACC.
    Single {
        #[command(flatten)]
        common: CommonArgs,
        /// Laplacian override: l | wnll | ssl | ssl1 | ssl2 | ssl3.
        #[arg(long)]
        laplacian: Option<String>,
    },
    /// Run a trials x values grid over one swept parameter.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// One or more comma-separated Laplacian kinds.
        #[arg(long)]
        laplacian: Option<String>,
        /// Swept parameter: noise_std | per_class | total.
        #[arg(long, value_name = "PARAM")]
        sweep_param: String,
        /// Comma-separated sweep values.
        #[arg(long, value_name = "V,V,...")]
        sweep_values: String,
    },
    /// Export a spectral embedding (CSV + scatter SVG).
    Embed {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        laplacian: Option<String>,
        /// Number of non-trivial eigenvectors.
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// NMI/ACC between two label files (one integer per line).
    Metrics {
        #[arg(long, value_name = "FILE")]
        true_labels: PathBuf,
        #[arg(long, value_name = "FILE")]
        pred_labels: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Input(_)
        | Error::Format(_)
        | Error::DimensionMismatch { .. }
        | Error::Io(_) => 2,
        Error::NonConvergence { .. }
        | Error::Solver(_)
        | Error::ComponentWithoutLabel { .. }
        | Error::Internal(_) => 3,
    }
}

fn load_config(common: &CommonArgs, laplacian: Option<&str>) -> Result<ExperimentConfig> {
    let overrides = Overrides {
        seed: common.seed,
        trials: common.trials,
        laplacian: laplacian.map(LaplacianKind::parse).transpose()?,
        method: common.method.as_deref().map(Method::parse).transpose()?,
        out_dir: common.out_dir.clone(),
    };
    ExperimentConfig::load(common.config.as_deref(), &overrides)
}

fn ensure_out_dir(cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    write_resolved_config(cfg, &cfg.out_dir.join("resolved.cfg"))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Single { common, laplacian } => {
            let cfg = load_config(&common, laplacian.as_deref())?;
            ensure_out_dir(&cfg)?;
            let outcome = run_single(&cfg)?;
            println!(
                "laplacian={} method={} nmi={:.4} acc={:.4} sigma={:.6}",
                cfg.laplacian.name(),
                cfg.method.name(),
                outcome.metrics.nmi,
                outcome.metrics.acc,
                outcome.sigma
            );
            #[derive(serde::Serialize)]
            struct SingleSummary {
                config: std::collections::BTreeMap<String, String>,
                nmi: f64,
                acc: f64,
                permutation: Vec<usize>,
                sigma: f64,
            }
            let summary = SingleSummary {
                config: cfg.resolved_entries(),
                nmi: outcome.metrics.nmi,
                acc: outcome.metrics.acc,
                permutation: outcome.metrics.permutation.clone(),
                sigma: outcome.sigma,
            };
            std::fs::write(
                cfg.out_dir.join("summary.json"),
                serde_json::to_string_pretty(&summary)
                    .map_err(|e| Error::Internal(e.to_string()))?,
            )?;
            if let Some(points) = &outcome.points_2d {
                let title = format!("{} / {}", cfg.laplacian.name(), cfg.method.name());
                let svg = scatter_svg(&title, points, &outcome.predicted)?;
                std::fs::write(cfg.out_dir.join("clusters.svg"), svg)?;
            }
            Ok(())
        }
        Command::Sweep {
            common,
            laplacian,
            sweep_param,
            sweep_values,
        } => {
            let param = SweepParam::parse(&sweep_param)?;
            let values = parse_values(&sweep_values)?;
            let kinds: Vec<LaplacianKind> = match laplacian.as_deref() {
                None => vec![load_config(&common, None)?.laplacian],
                Some(list) => list
                    .split(',')
                    .map(|s| LaplacianKind::parse(s.trim()))
                    .collect::<Result<_>>()?,
            };

            let base = load_config(&common, None)?;
            std::fs::create_dir_all(&base.out_dir)?;
            let mut nmi_series = Vec::new();
            let mut acc_series = Vec::new();
            let mut any_failed = false;
            for kind in &kinds {
                let mut cfg = base.clone();
                cfg.laplacian = *kind;
                if kinds.len() > 1 {
                    cfg.out_dir = base.out_dir.join(kind.name());
                }
                ensure_out_dir(&cfg)?;
                let report = run_sweep(&cfg, param, &values)?;
                write_results_csv(&report, &cfg.out_dir.join("results.csv"))?;
                write_summary_json(&cfg, &report, Some(param), &cfg.out_dir.join("summary.json"))?;
                any_failed |= !report.failures.is_empty();
                print_aggregates(kind.name(), param, &report);
                nmi_series.push(SweepSeries {
                    name: kind.name().to_string(),
                    points: report
                        .aggregates
                        .iter()
                        .map(|a| (a.sweep_value, a.mean_nmi, a.std_nmi))
                        .collect(),
                });
                acc_series.push(SweepSeries {
                    name: kind.name().to_string(),
                    points: report
                        .aggregates
                        .iter()
                        .map(|a| (a.sweep_value, a.mean_acc, a.std_acc))
                        .collect(),
                });
            }
            let x_label = param.name();
            std::fs::write(
                base.out_dir.join("sweep_nmi.svg"),
                sweep_lines_svg("NMI", x_label, "NMI", &nmi_series)?,
            )?;
            std::fs::write(
                base.out_dir.join("sweep_acc.svg"),
                sweep_lines_svg("ACC", x_label, "ACC", &acc_series)?,
            )?;
            if any_failed {
                return Err(Error::Solver("one or more trials failed; see summary.json".into()));
            }
            Ok(())
        }
        Command::Embed {
            common,
            laplacian,
            dim,
        } => {
            let cfg = load_config(&common, laplacian.as_deref())?;
            ensure_out_dir(&cfg)?;
            let (embedding, truth) = run_embedding(&cfg, dim)?;
            let mut csv = String::from("node,");
            csv.push_str(
                &(0..embedding.dim())
                    .map(|d| format!("coord{d}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            csv.push_str(",label\n");
            for i in 0..embedding.len() {
                csv.push_str(&i.to_string());
                for d in 0..embedding.dim() {
                    csv.push_str(&format!(",{}", embedding.coordinates[[i, d]]));
                }
                csv.push_str(&format!(",{}\n", truth[i]));
            }
            std::fs::write(cfg.out_dir.join("embedding.csv"), csv)?;
            let title = format!("{} embedding", cfg.laplacian.name());
            let svg = embedding_svg(&title, &embedding, &truth)?;
            std::fs::write(cfg.out_dir.join("embedding.svg"), svg)?;
            println!(
                "wrote embedding.csv and embedding.svg to {}",
                cfg.out_dir.display()
            );
            Ok(())
        }
        Command::Metrics {
            true_labels,
            pred_labels,
        } => {
            let truth = read_label_file(&true_labels)?;
            let pred = read_label_file(&pred_labels)?;
            let report = cluster::evaluate(&truth, &pred)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(|e| Error::Internal(e.to_string()))?
            );
            Ok(())
        }
    }
}

fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad sweep value '{t}'")))
        })
        .collect()
}

fn read_label_file(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse()
                .map_err(|_| Error::Format(format!("{}: bad label '{l}'", path.display())))
        })
        .collect()
}

fn print_aggregates(name: &str, param: SweepParam, report: &ExperimentReport) {
    for a in &report.aggregates {
        println!(
            "laplacian={name} {}={} trials={} nmi={:.4}+-{:.4} acc={:.4}+-{:.4}",
            param.name(),
            a.sweep_value,
            a.trials,
            a.mean_nmi,
            a.std_nmi,
            a.mean_acc,
            a.std_acc
        );
    }
}
