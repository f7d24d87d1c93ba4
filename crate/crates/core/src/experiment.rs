//! Robustness of community partitions under rewiring noise.
//!
//! The reference partition `G_0` is the Louvain partition of the noiseless
//! full projection. For each noise level and realization the network is
//! rewired, partitioned three ways (full projection, FDR-validated network,
//! Bonferroni-validated network) and scored against `G_0`.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::benchmark::{rewire, RewirePlan, SwapMode};
use crate::community::{
    adjusted_rand, adjusted_wallace, cores_of, louvain_projection, EdgeWeights, Partition,
};
use crate::corrections::{check_alpha, Method};
use crate::error::{Error, Result};
use crate::graph::{project, BipartiteNetwork, Side};
use crate::svn::validate_one_tail;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkKind {
    Full,
    Fdr,
    Bonferroni,
}

impl NetworkKind {
    pub const ALL: [NetworkKind; 3] = [NetworkKind::Full, NetworkKind::Fdr, NetworkKind::Bonferroni];

    pub fn as_str(self) -> &'static str {
        match self {
            NetworkKind::Full => "full",
            NetworkKind::Fdr => "fdr",
            NetworkKind::Bonferroni => "bonferroni",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Metric {
    #[serde(rename = "r_adj")]
    AdjustedRand,
    #[serde(rename = "w_adj")]
    AdjustedWallace,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::AdjustedRand => "r_adj",
            Metric::AdjustedWallace => "w_adj",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub side: Side,
    pub p_r_values: Vec<f64>,
    pub realizations: usize,
    pub alpha: f64,
    pub seed: u64,
    pub swap_mode: SwapMode,
    pub weights: EdgeWeights,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub kind: NetworkKind,
    pub p_r: f64,
    pub metric: Metric,
    /// Mean over realizations where the metric is defined; NaN if none.
    pub mean: f64,
    /// Sample standard deviation over the same realizations.
    pub std: f64,
    /// Realizations where the metric was defined (an empty validated
    /// network, for instance, has no Wallace index).
    pub defined: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub reference_seed: u64,
    pub reference_communities: usize,
    pub rows: Vec<ExperimentRow>,
}

/// Independent, reproducible seed for stream `stream` of `master`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.next_u64()
}

/// `None` where the metric is undefined for this pair of partitions.
fn score(candidate: &Partition, reference: &Partition) -> Result<[Option<f64>; 2]> {
    let defined = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::InsufficientOverlap(_)) | Err(Error::UndefinedWallace(_)) => Ok(None),
        Err(e) => Err(e),
    };
    Ok([
        defined(adjusted_rand(candidate, reference))?,
        defined(adjusted_wallace(candidate, reference))?,
    ])
}

fn partition_of(
    bn: &BipartiteNetwork,
    kind: NetworkKind,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Partition> {
    match kind {
        NetworkKind::Full => louvain_projection(&project(bn, config.side), seed),
        NetworkKind::Fdr | NetworkKind::Bonferroni => {
            let method = if kind == NetworkKind::Fdr {
                Method::Fdr
            } else {
                Method::Bonferroni
            };
            let vn = validate_one_tail(bn, config.side, config.alpha, method)?;
            cores_of(&vn, seed, config.weights)
        }
    }
}

/// Per-realization scores indexed `[kind][metric]`.
type Scores = [[Option<f64>; 2]; 3];

pub fn robustness_experiment(
    bn: &BipartiteNetwork,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    check_alpha(config.alpha)?;
    if config.realizations == 0 {
        return Err(Error::invalid("realizations", "must be at least 1"));
    }
    if let Some(p) = config.p_r_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid("p_r", format!("{p} outside [0, 1]")));
    }
    let reference_seed = derive_seed(config.seed, 0);
    let reference = louvain_projection(&project(bn, config.side), reference_seed)?;

    let tasks: Vec<(usize, usize)> = (0..config.p_r_values.len())
        .flat_map(|p| (0..config.realizations).map(move |r| (p, r)))
        .collect();
    let scores: Vec<Scores> = tasks
        .par_iter()
        .map(|&(p_idx, r)| {
            let counter = (p_idx * config.realizations + r) as u64;
            let plan = RewirePlan {
                mode: config.swap_mode,
                ..RewirePlan::new(config.p_r_values[p_idx], derive_seed(config.seed, 1 + 2 * counter))
            };
            let louvain_seed = derive_seed(config.seed, 2 + 2 * counter);
            let (noisy, _) = rewire(bn, &plan)?;
            let mut out: Scores = [[None; 2]; 3];
            for (k, kind) in NetworkKind::ALL.iter().enumerate() {
                let part = partition_of(&noisy, *kind, config, louvain_seed)?;
                out[k] = score(&part, &reference)?;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (k, kind) in NetworkKind::ALL.iter().enumerate() {
        for (p_idx, &p_r) in config.p_r_values.iter().enumerate() {
            for (m, metric) in [Metric::AdjustedRand, Metric::AdjustedWallace].iter().enumerate() {
                let values: Vec<f64> = scores
                    [p_idx * config.realizations..(p_idx + 1) * config.realizations]
                    .iter()
                    .filter_map(|s| s[k][m])
                    .collect();
                let (mean, std) = mean_std(&values);
                rows.push(ExperimentRow {
                    kind: *kind,
                    p_r,
                    metric: *metric,
                    mean,
                    std,
                    defined: values.len(),
                });
            }
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        reference_seed,
        reference_communities: reference.n_communities(),
        rows,
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl ExperimentReport {
    pub fn row(&self, kind: NetworkKind, p_r: f64, metric: Metric) -> Option<&ExperimentRow> {
        self.rows
            .iter()
            .find(|r| r.kind == kind && r.p_r == p_r && r.metric == metric)
    }

    /// Writes `network_kind<TAB>p_r<TAB>metric<TAB>mean<TAB>std` with a
    /// header line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "network_kind\tp_r\tmetric\tmean\tstd")?;
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.kind.as_str(),
                r.p_r,
                r.metric.as_str(),
                r.mean,
                r.std
            )?;
        }
        Ok(())
    }
}
