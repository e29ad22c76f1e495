//! Experiment configuration: a flat `key = value` file with command-line
//! overrides. Every run writes the fully resolved configuration next to its
//! results so sweeps can be reproduced exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Which dataset a run operates on.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Moons {
        n: usize,
        moons: usize,
        noise_std: f64,
    },
    Idx {
        images: PathBuf,
        labels: PathBuf,
    },
}

/// Kernel width selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaPolicy {
    /// Median distance to the k nearest neighbors.
    Median,
    Fixed(f64),
}

/// Graph sparsity selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborPolicy {
    /// Dense for small graphs (n <= 2000), 10-nearest-neighbor otherwise.
    Auto,
    Dense,
    Knn(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Dirichlet,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Dirichlet => "dirichlet",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spectral" => Ok(Method::Spectral),
            "dirichlet" => Ok(Method::Dirichlet),
            other => Err(Error::Config(format!(
                "unknown method '{other}' (expected spectral | dirichlet)"
            ))),
        }
    }
}

/// Which Laplacian the pipeline is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// Plain `L = D - W`.
    Unsupervised,
    /// Weighted nonlocal variant (labeled-unlabeled edges up-weighted).
    Wnll,
    /// Full label-aware variant.
    Ssl,
    /// Ablation: same-cluster attraction only.
    SslSameClusterOnly,
    /// Ablation: cross-cluster disconnection only.
    SslCrossClusterOnly,
    /// Ablation: labeled-unlabeled density only (reproduces the WNLL
    /// affinity when `alpha = mu - 1`).
    SslDensityOnly,
}

impl LaplacianKind {
    pub const ALL: [LaplacianKind; 6] = [
        LaplacianKind::Unsupervised,
        LaplacianKind::Wnll,
        LaplacianKind::Ssl,
        LaplacianKind::SslSameClusterOnly,
        LaplacianKind::SslCrossClusterOnly,
        LaplacianKind::SslDensityOnly,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LaplacianKind::Unsupervised => "L",
            LaplacianKind::Wnll => "L_WNLL",
            LaplacianKind::Ssl => "L_SSL",
            LaplacianKind::SslSameClusterOnly => "L1_SSL",
            LaplacianKind::SslCrossClusterOnly => "L2_SSL",
            LaplacianKind::SslDensityOnly => "L3_SSL",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l" => Ok(LaplacianKind::Unsupervised),
            "wnll" | "l_wnll" => Ok(LaplacianKind::Wnll),
            "ssl" | "l_ssl" => Ok(LaplacianKind::Ssl),
            "ssl1" | "l1_ssl" => Ok(LaplacianKind::SslSameClusterOnly),
            "ssl2" | "l2_ssl" => Ok(LaplacianKind::SslCrossClusterOnly),
            "ssl3" | "l3_ssl" => Ok(LaplacianKind::SslDensityOnly),
            other => Err(Error::Config(format!(
                "unknown laplacian '{other}' (expected l | wnll | ssl | ssl1 | ssl2 | ssl3)"
            ))),
        }
    }
}

/// Fully resolved description of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub sigma: SigmaPolicy,
    pub neighbors: NeighborPolicy,
    pub method: Method,
    pub laplacian: LaplacianKind,
    /// Labels revealed per class (mutually exclusive with `total_labels`).
    pub per_class: Option<usize>,
    /// Labels revealed in total, drawn over all nodes.
    pub total_labels: Option<usize>,
    /// Explicit label placement, one index list per class.
    pub fixed_labels: Option<Vec<Vec<usize>>>,
    pub trials: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Number of clusters; defaults to the dataset ground truth.
    pub clusters: Option<usize>,
    /// Spectral embedding dimension; defaults to `clusters - 1` non-trivial
    /// eigenvectors (the constant one adds nothing to K-means geometry).
    pub embed_dim: Option<usize>,
    /// K-means restarts.
    pub restarts: usize,
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetSpec::Moons {
                n: 500,
                moons: 2,
                noise_std: 0.1,
            },
            sigma: SigmaPolicy::Median,
            neighbors: NeighborPolicy::Auto,
            method: Method::Spectral,
            laplacian: LaplacianKind::Ssl,
            per_class: None,
            total_labels: None,
            fixed_labels: None,
            trials: 1,
            seed: 42,
            out_dir: PathBuf::from("results"),
            clusters: None,
            embed_dim: None,
            restarts: 10,
            mu: None,
            alpha: None,
        }
    }
}

/// Command-line overrides applied after the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub laplacian: Option<LaplacianKind>,
    pub method: Option<Method>,
    pub out_dir: Option<PathBuf>,
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got '{value}'")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected an integer seed, got '{value}'")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got '{value}'")))
}

/// Parses `class0_idx,idx,...;class1_idx,...` into per-class index lists.
fn parse_fixed_labels(value: &str) -> Result<Vec<Vec<usize>>> {
    value
        .split(';')
        .map(|class| {
            class
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| parse_usize("fixed_labels", t.trim()))
                .collect()
        })
        .collect()
}

impl ExperimentConfig {
    /// Reads a flat `key = value` file (`#` comments and blank lines are
    /// ignored) and applies `overrides` on top of it.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut entries: Vec<(String, String)> = Vec::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(Error::Config(format!(
                        "{}:{}: expected 'key = value', got '{raw}'",
                        path.display(),
                        lineno + 1
                    )));
                };
                let value = value.trim().trim_matches('"');
                entries.push((key.trim().to_string(), value.to_string()));
            }
        }
        Self::from_entries(&entries, overrides)
    }

    pub fn from_entries(entries: &[(String, String)], overrides: &Overrides) -> Result<Self> {
        let mut cfg = Self::default();
        // Dataset keys are gathered first so they can be combined.
        let mut dataset_kind: Option<String> = None;
        let mut n: Option<usize> = None;
        let mut noise_std: Option<f64> = None;
        let mut images: Option<PathBuf> = None;
        let mut labels: Option<PathBuf> = None;

        for (key, value) in entries {
            match key.as_str() {
                "dataset" => dataset_kind = Some(value.to_ascii_lowercase()),
                "n" => n = Some(parse_usize(key, value)?),
                "noise_std" => noise_std = Some(parse_f64(key, value)?),
                "images" => images = Some(PathBuf::from(value)),
                "labels" => labels = Some(PathBuf::from(value)),
                "sigma" => {
                    cfg.sigma = if value.eq_ignore_ascii_case("median") {
                        SigmaPolicy::Median
                    } else {
                        SigmaPolicy::Fixed(parse_f64(key, value)?)
                    }
                }
                "neighbors" => {
                    cfg.neighbors = match value.to_ascii_lowercase().as_str() {
                        "auto" => NeighborPolicy::Auto,
                        "dense" => NeighborPolicy::Dense,
                        other => NeighborPolicy::Knn(parse_usize(key, other)?),
                    }
                }
                "method" => cfg.method = Method::parse(value)?,
                "laplacian" => cfg.laplacian = LaplacianKind::parse(value)?,
                "per_class" => cfg.per_class = Some(parse_usize(key, value)?),
                "total" => cfg.total_labels = Some(parse_usize(key, value)?),
                "fixed_labels" => cfg.fixed_labels = Some(parse_fixed_labels(value)?),
                "trials" => cfg.trials = parse_usize(key, value)?,
                "seed" => cfg.seed = parse_u64(key, value)?,
                "out_dir" => cfg.out_dir = PathBuf::from(value),
                "clusters" => cfg.clusters = Some(parse_usize(key, value)?),
                "embed_dim" => cfg.embed_dim = Some(parse_usize(key, value)?),
                "restarts" => cfg.restarts = parse_usize(key, value)?,
                "mu" => cfg.mu = Some(parse_f64(key, value)?),
                "alpha" => cfg.alpha = Some(parse_f64(key, value)?),
                other => {
                    return Err(Error::Config(format!("unknown config key '{other}'")));
                }
            }
        }

        match dataset_kind.as_deref() {
            None | Some("moons2") => {
                cfg.dataset = DatasetSpec::Moons {
                    n: n.unwrap_or(500),
                    moons: 2,
                    noise_std: noise_std.unwrap_or(0.1),
                }
            }
            Some("moons3") => {
                cfg.dataset = DatasetSpec::Moons {
                    n: n.unwrap_or(900),
                    moons: 3,
                    noise_std: noise_std.unwrap_or(0.1),
                }
            }
            Some("idx") => {
                let (Some(images), Some(labels)) = (images, labels) else {
                    return Err(Error::Config(
                        "dataset = idx needs both 'images' and 'labels' paths".into(),
                    ));
                };
                cfg.dataset = DatasetSpec::Idx {
                    images: resolve_data_path(images),
                    labels: resolve_data_path(labels),
                };
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown dataset '{other}' (expected moons2 | moons3 | idx)"
                )));
            }
        }

        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = overrides.trials {
            cfg.trials = trials;
        }
        if let Some(lap) = overrides.laplacian {
            cfg.laplacian = lap;
        }
        if let Some(method) = overrides.method {
            cfg.method = method;
        }
        if let Some(out_dir) = &overrides.out_dir {
            cfg.out_dir = out_dir.clone();
        }

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.per_class.is_some() && self.total_labels.is_some() {
            return Err(Error::Config(
                "per_class and total are mutually exclusive".into(),
            ));
        }
        let has_labels = self.per_class.is_some_and(|m| m > 0)
            || self.total_labels.is_some_and(|t| t > 0)
            || self
                .fixed_labels
                .as_ref()
                .is_some_and(|f| f.iter().any(|c| !c.is_empty()));
        if self.method == Method::Dirichlet && !has_labels {
            return Err(Error::Config(
                "the dirichlet method needs labeled nodes as constraints; set per_class, total or fixed_labels"
                    .into(),
            ));
        }
        if let DatasetSpec::Moons { noise_std, .. } = self.dataset {
            if noise_std < 0.0 {
                return Err(Error::Config("noise_std must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Every effective setting as sorted `key = value` lines, for the
    /// `resolved.cfg` file written next to results.
    pub fn resolved_entries(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        match &self.dataset {
            DatasetSpec::Moons { n, moons, noise_std } => {
                map.insert("dataset".into(), format!("moons{moons}"));
                map.insert("n".into(), n.to_string());
                map.insert("noise_std".into(), noise_std.to_string());
            }
            DatasetSpec::Idx { images, labels } => {
                map.insert("dataset".into(), "idx".into());
                map.insert("images".into(), images.display().to_string());
                map.insert("labels".into(), labels.display().to_string());
            }
        }
        map.insert(
            "sigma".into(),
            match self.sigma {
                SigmaPolicy::Median => "median".into(),
                SigmaPolicy::Fixed(v) => v.to_string(),
            },
        );
        map.insert(
            "neighbors".into(),
            match self.neighbors {
                NeighborPolicy::Auto => "auto".into(),
                NeighborPolicy::Dense => "dense".into(),
                NeighborPolicy::Knn(k) => k.to_string(),
            },
        );
        map.insert("method".into(), self.method.name().into());
        map.insert("laplacian".into(), self.laplacian.name().into());
        if let Some(m) = self.per_class {
            map.insert("per_class".into(), m.to_string());
        }
        if let Some(t) = self.total_labels {
            map.insert("total".into(), t.to_string());
        }
        if let Some(f) = &self.fixed_labels {
            let text = f
                .iter()
                .map(|class| {
                    class
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join(";");
            map.insert("fixed_labels".into(), text);
        }
        map.insert("trials".into(), self.trials.to_string());
        map.insert("seed".into(), self.seed.to_string());
        map.insert("out_dir".into(), self.out_dir.display().to_string());
        if let Some(k) = self.clusters {
            map.insert("clusters".into(), k.to_string());
        }
        if let Some(d) = self.embed_dim {
            map.insert("embed_dim".into(), d.to_string());
        }
        map.insert("restarts".into(), self.restarts.to_string());
        if let Some(mu) = self.mu {
            map.insert("mu".into(), mu.to_string());
        }
        if let Some(alpha) = self.alpha {
            map.insert("alpha".into(), alpha.to_string());
        }
        map
    }
}

/// Relative image/label paths resolve against `SSL_DATA_DIR` when it is set.
fn resolve_data_path(path: PathBuf) -> PathBuf {
    if path.is_relative() {
        if let Ok(root) = std::env::var("SSL_DATA_DIR") {
            return Path::new(&root).join(path);
        }
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.cfg");
        std::fs::write(
            &path,
            "# comment\ndataset = moons2\nn = 300\nnoise_std = 0.15\nsigma = 0.4\n\
             neighbors = dense\nmethod = spectral\nlaplacian = ssl\nper_class = 10\n\
             trials = 3\nseed = 7\nout_dir = out\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::load(
            Some(&path),
            &Overrides {
                seed: Some(99),
                laplacian: Some(LaplacianKind::Wnll),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.laplacian, LaplacianKind::Wnll);
        assert_eq!(cfg.sigma, SigmaPolicy::Fixed(0.4));
        assert_eq!(
            cfg.dataset,
            DatasetSpec::Moons {
                n: 300,
                moons: 2,
                noise_std: 0.15
            }
        );
    }

    #[test]
    fn unknown_key_is_a_config_error() {
        let entries = vec![("bogus".to_string(), "1".to_string())];
        assert!(matches!(
            ExperimentConfig::from_entries(&entries, &Overrides::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn dirichlet_without_labels_is_rejected() {
        let entries = vec![("method".to_string(), "dirichlet".to_string())];
        assert!(ExperimentConfig::from_entries(&entries, &Overrides::default()).is_err());
        let entries = vec![
            ("method".to_string(), "dirichlet".to_string()),
            ("per_class".to_string(), "5".to_string()),
        ];
        assert!(ExperimentConfig::from_entries(&entries, &Overrides::default()).is_ok());
    }

    #[test]
    fn laplacian_names_roundtrip() {
        for kind in LaplacianKind::ALL {
            assert_eq!(LaplacianKind::parse(kind.name()).unwrap(), kind);
        }
        assert!(LaplacianKind::parse("frobnicate").is_err());
    }

    #[test]
    fn fixed_label_lists_parse() {
        let lists = parse_fixed_labels("1,2,3;7,9").unwrap();
        assert_eq!(lists, vec![vec![1, 2, 3], vec![7, 9]]);
    }

    #[test]
    fn resolved_entries_are_complete_and_sorted() {
        let cfg = ExperimentConfig::default();
        let map = cfg.resolved_entries();
        assert!(map.contains_key("dataset"));
        assert!(map.contains_key("seed"));
        assert!(map.contains_key("laplacian"));
        let keys: Vec<_> = map.keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }
}
