//! Experiment pipelines: dataset -> affinity -> Laplacian variant ->
//! clustering -> metrics, for single runs and for trial x sweep-value grids.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{evaluate, kmeans, MetricReport};
use crate::data::{generate_moons, load_idx, sample_labeled_set, LabelBudget, MoonsSpec, Placement};
use crate::error::{Error, Result};
use crate::experiment::config::{
    DatasetSpec, ExperimentConfig, LaplacianKind, Method, NeighborPolicy, SigmaPolicy,
};
use crate::graph::{build_affinity, median_sigma, Dataset, GraphConfig, Laplacian, Neighbors};
use crate::seed;
use crate::solvers::{
    smallest_eigenpairs, solve_multiclass_dirichlet, DirichletOptions, EigenOptions,
    SpectralEmbedding,
};
use crate::ssl::{
    ablation_affinity, ssl_affinity, weighted_nonlocal_affinity, AblationVariant, LabeledSet,
    SslConfig,
};

/// One sweep cell result.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub sweep_value: f64,
    pub nmi: f64,
    pub acc: f64,
}

/// Mean/std of the metric over the successful trials of one sweep value.
#[derive(Debug, Clone, Serialize)]
pub struct SweepAggregate {
    pub sweep_value: f64,
    pub trials: usize,
    pub mean_nmi: f64,
    pub std_nmi: f64,
    pub mean_acc: f64,
    pub std_acc: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub sweep_value: f64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<SweepAggregate>,
    pub failures: Vec<TrialFailure>,
}

/// The swept parameter of [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Noise standard deviation of a generated dataset.
    NoiseStd,
    /// Labels revealed per class.
    PerClass,
    /// Labels revealed in total.
    Total,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::NoiseStd => "noise_std",
            SweepParam::PerClass => "per_class",
            SweepParam::Total => "total",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "noise_std" | "noise" => Ok(SweepParam::NoiseStd),
            "per_class" => Ok(SweepParam::PerClass),
            "total" => Ok(SweepParam::Total),
            other => Err(Error::Config(format!(
                "unknown sweep parameter '{other}' (expected noise_std | per_class | total)"
            ))),
        }
    }
}

/// Everything a single pipeline run produces.
#[derive(Debug)]
pub struct SingleOutcome {
    pub metrics: MetricReport,
    pub predicted: Vec<usize>,
    pub truth: Vec<usize>,
    /// The 2-D input points when the dataset is synthetic (for plots).
    pub points_2d: Option<Vec<(f64, f64)>>,
    /// Spectral embedding when the method is spectral.
    pub embedding: Option<SpectralEmbedding>,
    /// Kernel width actually used.
    pub sigma: f64,
    /// Per-trial derived seed (recorded in sweep CSVs).
    pub trial_seed: u64,
}

/// Per-trial parameter overrides used by sweeps.
#[derive(Debug, Clone, Copy, Default)]
struct TrialParams {
    noise_std: Option<f64>,
    per_class: Option<usize>,
    total: Option<usize>,
}

/// Runs the full pipeline once with the seed of trial 0.
pub fn run_single(cfg: &ExperimentConfig) -> Result<SingleOutcome> {
    let shared = prepare_shared_data(cfg)?;
    execute_trial(cfg, shared.as_ref(), 0, TrialParams::default())
}

/// Dataset plus its affinity graph, computed once and reused across trials.
/// Only labels vary between trials of a file-backed dataset, and the
/// unsupervised graph does not depend on them.
struct SharedData {
    data: Dataset,
    affinity: crate::graph::SparseSymmetricMatrix,
    sigma: f64,
}

/// For file-backed datasets the load and the graph build happen once;
/// generated datasets are redrawn per trial instead (fresh noise).
fn prepare_shared_data(cfg: &ExperimentConfig) -> Result<Option<SharedData>> {
    match &cfg.dataset {
        DatasetSpec::Idx { images, labels } => {
            let data = load_idx(images, labels)?;
            let (affinity, sigma) = build_graph(cfg, &data)?;
            Ok(Some(SharedData {
                data,
                affinity,
                sigma,
            }))
        }
        DatasetSpec::Moons { .. } => Ok(None),
    }
}

fn build_graph(
    cfg: &ExperimentConfig,
    data: &Dataset,
) -> Result<(crate::graph::SparseSymmetricMatrix, f64)> {
    let neighbors = match cfg.neighbors {
        NeighborPolicy::Dense => Neighbors::Dense,
        NeighborPolicy::Knn(k) => Neighbors::Knn(k),
        NeighborPolicy::Auto => {
            if data.len() <= 2000 {
                Neighbors::Dense
            } else {
                Neighbors::Knn(10)
            }
        }
    };
    let sigma = match cfg.sigma {
        SigmaPolicy::Fixed(v) => v,
        SigmaPolicy::Median => {
            let probe = match neighbors {
                Neighbors::Knn(k) => k,
                Neighbors::Dense => 7.min(data.len() - 1),
            };
            median_sigma(data, probe)?
        }
    };
    let affinity = build_affinity(data, &GraphConfig { sigma, neighbors })?;
    Ok((affinity, sigma))
}

fn execute_trial(
    cfg: &ExperimentConfig,
    shared: Option<&SharedData>,
    trial: usize,
    params: TrialParams,
) -> Result<SingleOutcome> {
    let trial_seed = seed::mix(cfg.seed, trial as u64);
    let data_seed = seed::mix(trial_seed, 1);
    let label_seed = seed::mix(trial_seed, 2);
    let kmeans_seed = seed::mix(trial_seed, 3);

    // Dataset and graph (precomputed for file-backed datasets).
    let generated;
    let (data, affinity, sigma): (&Dataset, _, f64) = match (&cfg.dataset, shared) {
        (_, Some(s)) => (&s.data, s.affinity.clone(), s.sigma),
        (DatasetSpec::Moons { n, moons, noise_std }, None) => {
            generated = generate_moons(&MoonsSpec {
                n_points: *n,
                n_moons: *moons,
                noise_std: params.noise_std.unwrap_or(*noise_std),
                seed: data_seed,
            })?;
            let (affinity, sigma) = build_graph(cfg, &generated)?;
            (&generated, affinity, sigma)
        }
        (DatasetSpec::Idx { .. }, None) => {
            return Err(Error::Internal("file dataset was not preloaded".into()))
        }
    };
    let truth = data
        .labels()
        .ok_or_else(|| Error::Input("experiment datasets need ground-truth labels".into()))?
        .to_vec();
    let k = cfg
        .clusters
        .or(data.n_clusters())
        .ok_or_else(|| Error::Config("cluster count unknown; set 'clusters'".into()))?;
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 clusters, got {k}")));
    }

    // Labeled subset.
    let labeled = labeled_set_for(cfg, data, label_seed, params)?;

    // Laplacian variant.
    let laplacian = build_variant(cfg, &affinity, &labeled)?;

    // Clustering.
    let (predicted, embedding) = match cfg.method {
        Method::Spectral => {
            let dim = cfg.embed_dim.unwrap_or(k - 1).max(1);
            let emb = smallest_eigenpairs(&laplacian, dim, true, &EigenOptions::default())?;
            let clusters = kmeans(emb.coordinates.view(), k, kmeans_seed, cfg.restarts)?;
            (clusters.labels, Some(emb))
        }
        Method::Dirichlet => {
            let sol = solve_multiclass_dirichlet(&laplacian, &labeled, &DirichletOptions::default())?;
            (sol.labels, None)
        }
    };

    let metrics = evaluate(&truth, &predicted)?;
    let points_2d = (data.dim() == 2).then(|| {
        (0..data.len())
            .map(|i| (data.points()[[i, 0]], data.points()[[i, 1]]))
            .collect()
    });
    Ok(SingleOutcome {
        metrics,
        predicted,
        truth,
        points_2d,
        embedding,
        sigma,
        trial_seed,
    })
}

fn labeled_set_for(
    cfg: &ExperimentConfig,
    data: &Dataset,
    label_seed: u64,
    params: TrialParams,
) -> Result<LabeledSet> {
    if let Some(lists) = &cfg.fixed_labels {
        return sample_labeled_set(
            data,
            &LabelBudget {
                mode: crate::data::BudgetMode::Total(0),
                seed: label_seed,
                placement: Placement::FixedIndices(lists.clone()),
            },
        );
    }
    let per_class = params.per_class.or(cfg.per_class);
    let total = params.total.or(cfg.total_labels);
    match (per_class, total) {
        (Some(0), _) | (None, Some(0)) | (None, None) => Ok(LabeledSet::empty(data.len())),
        (Some(m), _) => sample_labeled_set(data, &LabelBudget::per_class(m, label_seed)),
        (None, Some(t)) => sample_labeled_set(data, &LabelBudget::total(t, label_seed)),
    }
}

fn build_variant(
    cfg: &ExperimentConfig,
    affinity: &crate::graph::SparseSymmetricMatrix,
    labeled: &LabeledSet,
) -> Result<Laplacian> {
    if cfg.laplacian == LaplacianKind::Unsupervised {
        return Laplacian::from_affinity(affinity.clone());
    }
    let ssl_cfg = resolve_ssl_config(cfg, labeled)?;
    let w = match cfg.laplacian {
        LaplacianKind::Unsupervised => unreachable!(),
        LaplacianKind::Wnll => weighted_nonlocal_affinity(affinity, labeled, &ssl_cfg)?,
        LaplacianKind::Ssl => ssl_affinity(affinity, labeled, &ssl_cfg)?,
        LaplacianKind::SslSameClusterOnly => {
            ablation_affinity(affinity, labeled, &ssl_cfg, AblationVariant::SameClusterOnly)?
        }
        LaplacianKind::SslCrossClusterOnly => {
            ablation_affinity(affinity, labeled, &ssl_cfg, AblationVariant::CrossClusterOnly)?
        }
        LaplacianKind::SslDensityOnly => {
            ablation_affinity(affinity, labeled, &ssl_cfg, AblationVariant::DensityOnly)?
        }
    };
    Laplacian::from_affinity(w)
}

fn resolve_ssl_config(cfg: &ExperimentConfig, labeled: &LabeledSet) -> Result<SslConfig> {
    let mut ssl_cfg = if labeled.is_unlabeled() {
        // Unsupervised limit: every variant reduces to 2W.
        SslConfig { mu: 1.0, alpha: 0.0 }
    } else {
        SslConfig::for_labels(labeled)?
    };
    if let Some(mu) = cfg.mu {
        ssl_cfg = ssl_cfg.with_mu(mu);
    }
    if let Some(alpha) = cfg.alpha {
        ssl_cfg = ssl_cfg.with_alpha(alpha);
    }
    Ok(ssl_cfg)
}

/// Runs the full `trials x values` grid. Each cell owns a seed derived from
/// the master seed, its trial index and the sweep position, so the grid is
/// reproducible cell by cell and independent of execution order.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<ExperimentReport> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    if param == SweepParam::NoiseStd && !matches!(cfg.dataset, DatasetSpec::Moons { .. }) {
        return Err(Error::Config(
            "noise_std can only be swept on a generated dataset".into(),
        ));
    }
    for &v in values {
        match param {
            SweepParam::NoiseStd => {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Config(format!("invalid noise_std {v}")));
                }
            }
            SweepParam::PerClass | SweepParam::Total => {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(Error::Config(format!(
                        "{} sweep values must be non-negative integers, got {v}",
                        param.name()
                    )));
                }
            }
        }
    }
    let shared = prepare_shared_data(cfg)?;

    let grid: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|vi| (0..cfg.trials).map(move |t| (vi, t)))
        .collect();
    let outcomes: Vec<(usize, usize, Result<SingleOutcome>)> = grid
        .par_iter()
        .map(|&(vi, t)| {
            let mut params = TrialParams::default();
            let v = values[vi];
            match param {
                SweepParam::NoiseStd => params.noise_std = Some(v),
                SweepParam::PerClass => params.per_class = Some(v as usize),
                SweepParam::Total => params.total = Some(v as usize),
            }
            // Distinct trial indices per sweep value keep every cell's
            // randomness independent.
            let trial_index = vi * cfg.trials + t;
            (vi, t, execute_trial(cfg, shared.as_ref(), trial_index, params))
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (vi, t, outcome) in outcomes {
        match outcome {
            Ok(o) => records.push(TrialRecord {
                trial: t,
                seed: o.trial_seed,
                sweep_value: values[vi],
                nmi: o.metrics.nmi,
                acc: o.metrics.acc,
            }),
            Err(e) => failures.push(TrialFailure {
                trial: t,
                sweep_value: values[vi],
                message: e.to_string(),
            }),
        }
    }
    records.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.trial.cmp(&b.trial))
    });
    failures.sort_by(|a, b| {
        a.sweep_value
            .total_cmp(&b.sweep_value)
            .then(a.trial.cmp(&b.trial))
    });

    let aggregates = values
        .iter()
        .map(|&v| {
            let nmis: Vec<f64> = records
                .iter()
                .filter(|r| r.sweep_value == v)
                .map(|r| r.nmi)
                .collect();
            let accs: Vec<f64> = records
                .iter()
                .filter(|r| r.sweep_value == v)
                .map(|r| r.acc)
                .collect();
            let (mean_nmi, std_nmi) = mean_std(&nmis);
            let (mean_acc, std_acc) = mean_std(&accs);
            SweepAggregate {
                sweep_value: v,
                trials: nmis.len(),
                mean_nmi,
                std_nmi,
                mean_acc,
                std_acc,
            }
        })
        .collect();

    Ok(ExperimentReport {
        records,
        aggregates,
        failures,
    })
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Writes `results.csv` with the fixed header `trial,seed,sweep_value,nmi,acc`.
pub fn write_results_csv(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut out = String::from("trial,seed,sweep_value,nmi,acc\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial, r.seed, r.sweep_value, r.nmi, r.acc
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a `results.csv` back; used for offline recomputation of aggregates.
pub fn read_results_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{}: empty file", path.display())))?;
    if header != "trial,seed,sweep_value,nmi,acc" {
        return Err(Error::Format(format!(
            "{}: unexpected header '{header}'",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Format(format!(
                "{}:{}: expected 5 fields, got {}",
                path.display(),
                i + 2,
                fields.len()
            )));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Format(format!("{}:{}: bad number '{s}'", path.display(), i + 2)))
        };
        records.push(TrialRecord {
            trial: fields[0]
                .parse()
                .map_err(|_| Error::Format(format!("{}:{}: bad trial id", path.display(), i + 2)))?,
            seed: fields[1]
                .parse()
                .map_err(|_| Error::Format(format!("{}:{}: bad seed", path.display(), i + 2)))?,
            sweep_value: parse_f(fields[2])?,
            nmi: parse_f(fields[3])?,
            acc: parse_f(fields[4])?,
        });
    }
    Ok(records)
}

#[derive(Serialize)]
struct Summary<'a> {
    config: std::collections::BTreeMap<String, String>,
    sweep_param: Option<&'a str>,
    aggregates: &'a [SweepAggregate],
    failures: &'a [TrialFailure],
}

/// Writes `summary.json` (resolved config + per-value aggregates).
pub fn write_summary_json(
    cfg: &ExperimentConfig,
    report: &ExperimentReport,
    sweep_param: Option<SweepParam>,
    path: &Path,
) -> Result<()> {
    let summary = Summary {
        config: cfg.resolved_entries(),
        sweep_param: sweep_param.map(|p| p.name()),
        aggregates: &report.aggregates,
        failures: &report.failures,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Internal(format!("summary serialization: {e}")))?;
    std::fs::write(path, json)?;
    Ok(())
}

/// Writes the fully resolved configuration as `key = value` lines.
pub fn write_resolved_config(cfg: &ExperimentConfig, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (key, value) in cfg.resolved_entries() {
        writeln!(out, "{key} = {value}")?;
    }
    out.flush()?;
    Ok(())
}

/// One embedding computation for the `embed` subcommand: returns the
/// embedding plus the dataset truth for coloring.
pub fn run_embedding(cfg: &ExperimentConfig, dim: usize) -> Result<(SpectralEmbedding, Vec<usize>)> {
    let mut cfg = cfg.clone();
    cfg.method = Method::Spectral;
    cfg.embed_dim = Some(dim);
    let outcome = run_single(&cfg)?;
    let embedding = outcome
        .embedding
        .ok_or_else(|| Error::Internal("spectral run returned no embedding".into()))?;
    Ok((embedding, outcome.truth))
}
