//! Synthetic bipartite benchmarks with planted blocks, and degree-preserving
//! rewiring noise.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{BipartiteNetwork, NodeIndex};

/// Planted block model: A-node `a` of block `k` links to each B-node of block
/// `k` with probability `intra_link_prob` and to every other B-node with
/// probability `inter_link_prob`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkSpec {
    pub n_blocks: usize,
    pub a_nodes_per_block: usize,
    pub b_nodes_per_block: usize,
    pub intra_link_prob: f64,
    pub inter_link_prob: f64,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            n_blocks: 4,
            a_nodes_per_block: 50,
            b_nodes_per_block: 100,
            intra_link_prob: 0.3,
            inter_link_prob: 0.02,
            seed: DEFAULT_SEED,
        }
    }
}

/// Seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_190_611;

impl BenchmarkSpec {
    fn validate(&self) -> Result<()> {
        if self.n_blocks == 0 || self.a_nodes_per_block == 0 || self.b_nodes_per_block == 0 {
            return Err(Error::invalid("benchmark", "blocks must contain nodes"));
        }
        for (name, p) in [
            ("intra_link_prob", self.intra_link_prob),
            ("inter_link_prob", self.inter_link_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("benchmark", format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

fn padded_labels(prefix: char, n: usize) -> NodeIndex {
    let width = n.saturating_sub(1).to_string().len();
    NodeIndex::new((0..n).map(|i| format!("{prefix}{i:0width$}")).collect())
        .expect("labels are distinct")
}

/// Generates the network and the planted partition of its A side.
pub fn generate(spec: &BenchmarkSpec) -> Result<(BipartiteNetwork, Partition)> {
    spec.validate()?;
    let n_a = spec.n_blocks * spec.a_nodes_per_block;
    let n_b = spec.n_blocks * spec.b_nodes_per_block;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut links = Vec::new();
    for a in 0..n_a {
        let block = a / spec.a_nodes_per_block;
        for b in 0..n_b {
            let p = if b / spec.b_nodes_per_block == block {
                spec.intra_link_prob
            } else {
                spec.inter_link_prob
            };
            if rng.gen::<f64>() < p {
                links.push((a, b));
            }
        }
    }
    let bn = BipartiteNetwork::from_links(padded_labels('a', n_a), padded_labels('b', n_b), links)?;
    let planted: Vec<usize> = (0..n_a).map(|a| a / spec.a_nodes_per_block).collect();
    Ok((bn, Partition::from_complete(&planted)))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SwapMode {
    /// Swap only between endpoints of equal degree, alternating the side
    /// whose endpoints are matched.
    #[default]
    Matched,
    /// Any double-edge swap that creates no duplicate link.
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RewirePlan {
    /// Fraction of links targeted; `round(p_r * L / 2)` swaps are made.
    pub p_r: f64,
    pub seed: u64,
    pub mode: SwapMode,
    /// Sampling attempts allowed per swap before it is given up.
    pub attempts_per_swap: usize,
}

impl RewirePlan {
    pub fn new(p_r: f64, seed: u64) -> Self {
        RewirePlan {
            p_r,
            seed,
            mode: SwapMode::Matched,
            attempts_per_swap: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RewireStats {
    pub requested_swaps: usize,
    pub performed_swaps: usize,
}

/// Double-edge swaps `(a1, b1), (a2, b2) -> (a1, b2), (a2, b1)`. Every node
/// keeps its degree and no duplicate link is ever created.
pub fn rewire(bn: &BipartiteNetwork, plan: &RewirePlan) -> Result<(BipartiteNetwork, RewireStats)> {
    if !(0.0..=1.0).contains(&plan.p_r) {
        return Err(Error::invalid("p_r", format!("{} outside [0, 1]", plan.p_r)));
    }
    let mut links: Vec<(usize, usize)> = bn.links().collect();
    let requested = (plan.p_r * links.len() as f64 / 2.0).round() as usize;
    let mut stats = RewireStats {
        requested_swaps: requested,
        performed_swaps: 0,
    };
    if requested == 0 || links.len() < 2 {
        return Ok((bn.clone(), stats));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut present: HashSet<(usize, usize)> = links.iter().copied().collect();
    let a_degree = bn.degrees(crate::graph::Side::A);
    let b_degree = bn.degrees(crate::graph::Side::B);

    for swap in 0..requested {
        let match_b = swap % 2 == 0;
        let mut done = false;
        for _ in 0..plan.attempts_per_swap {
            let x = rng.gen_range(0..links.len());
            let y = rng.gen_range(0..links.len());
            let ((a1, b1), (a2, b2)) = (links[x], links[y]);
            if a1 == a2 || b1 == b2 {
                continue;
            }
            if plan.mode == SwapMode::Matched {
                let equal = if match_b {
                    b_degree[b1] == b_degree[b2]
                } else {
                    a_degree[a1] == a_degree[a2]
                };
                if !equal {
                    continue;
                }
            }
            if present.contains(&(a1, b2)) || present.contains(&(a2, b1)) {
                continue;
            }
            present.remove(&(a1, b1));
            present.remove(&(a2, b2));
            present.insert((a1, b2));
            present.insert((a2, b1));
            links[x] = (a1, b2);
            links[y] = (a2, b1);
            done = true;
            break;
        }
        if done {
            stats.performed_swaps += 1;
        }
    }
    if stats.performed_swaps < requested {
        log::warn!(
            "rewiring performed {} of {} swaps within the retry budget",
            stats.performed_swaps,
            requested
        );
    }
    let rewired = BipartiteNetwork::from_links(
        bn.nodes(crate::graph::Side::A).clone(),
        bn.nodes(crate::graph::Side::B).clone(),
        links,
    )?;
    Ok((rewired, stats))
}
