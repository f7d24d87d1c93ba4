//! Louvain community detection and partition comparison.
//!
//! Partitions are defined over a universe of node indices (one side of a
//! bipartite network) and may cover only part of it: a partition found on a
//! validated network covers only the nodes that kept at least one link.
//! Comparisons are computed on the nodes covered by both partitions.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corrections::Method;
use crate::error::{Error, Result};
use crate::graph::{BipartiteNetwork, NodeIndex, ProjectedNetwork, Side};
use crate::pvalue::Tail;
use crate::svn::{validate_one_tail, ValidatedNetwork};

/// Node-to-community assignment with dense labels `0..n_communities`,
/// numbered by first appearance in node order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    labels: Vec<Option<usize>>,
    n_communities: usize,
}

impl Partition {
    /// Relabels densely; `labels[i] = None` leaves node `i` uncovered.
    pub fn from_labels(labels: Vec<Option<usize>>) -> Self {
        let mut remap = HashMap::new();
        let labels: Vec<Option<usize>> = labels
            .into_iter()
            .map(|l| {
                l.map(|c| {
                    let next = remap.len();
                    *remap.entry(c).or_insert(next)
                })
            })
            .collect();
        Partition {
            labels,
            n_communities: remap.len(),
        }
    }

    /// Every node of a universe of size `n` covered.
    pub fn from_complete(labels: &[usize]) -> Self {
        Self::from_labels(labels.iter().map(|&c| Some(c)).collect())
    }

    pub fn empty(universe: usize) -> Self {
        Partition {
            labels: vec![None; universe],
            n_communities: 0,
        }
    }

    pub fn universe_size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, node: usize) -> Option<usize> {
        self.labels.get(node).copied().flatten()
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    pub fn coverage(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i].is_some())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.n_communities == 0
    }

    /// Writes `node<TAB>community` for covered nodes.
    pub fn write_tsv<W: Write>(&self, nodes: &NodeIndex, mut out: W) -> std::io::Result<()> {
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(c) = l {
                writeln!(out, "{}\t{c}", nodes.label(i))?;
            }
        }
        Ok(())
    }
}

/// Reads `node<TAB>community` rows as labelled pairs.
pub fn read_partition_tsv<R: BufRead>(reader: R) -> Result<Vec<(String, String)>> {
    let mut rows = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        if seen.insert(fields[0].to_string(), i + 1).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("node '{}' assigned twice", fields[0]),
            });
        }
        rows.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(rows)
}

/// Places two labelled partitions over a shared universe (the union of their
/// node labels, sorted).
pub fn align_partitions(
    first: &[(String, String)],
    second: &[(String, String)],
) -> (NodeIndex, Partition, Partition) {
    let mut names: Vec<String> = first
        .iter()
        .chain(second)
        .map(|(n, _)| n.clone())
        .collect();
    names.sort();
    names.dedup();
    let index = NodeIndex::new(names).expect("deduplicated");
    let build = |rows: &[(String, String)]| {
        let mut community_ids: HashMap<&str, usize> = HashMap::new();
        let mut labels = vec![None; index.len()];
        for (node, community) in rows {
            let next = community_ids.len();
            let c = *community_ids.entry(community.as_str()).or_insert(next);
            labels[index.get(node).unwrap()] = Some(c);
        }
        Partition::from_labels(labels)
    };
    let (a, b) = (build(first), build(second));
    (index, a, b)
}

/// Undirected weighted graph used by Louvain; self-loops kept apart.
#[derive(Clone, Debug, PartialEq)]
pub struct CommunityGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

/// Weight given to validated links when building a [`CommunityGraph`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EdgeWeights {
    /// Every validated link weighs 1.
    #[default]
    Binary,
    /// Validated links weigh their co-occurrence count.
    Nij,
}

impl CommunityGraph {
    /// Builds from `(i, j, weight)` links, `i != j`, weights summed per pair.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); node_count];
        let mut self_loops = vec![0.0; node_count];
        for (i, j, w) in edges {
            if i == j {
                self_loops[i] += w;
            } else {
                *maps[i].entry(j).or_insert(0.0) += w;
                *maps[j].entry(i).or_insert(0.0) += w;
            }
        }
        CommunityGraph {
            adj: maps.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }

    /// Co-occurrence-weighted projection.
    pub fn from_projection(pn: &ProjectedNetwork) -> Self {
        Self::from_edges(
            pn.node_count,
            pn.edges.iter().map(|e| (e.i, e.j, e.count as f64)),
        )
    }

    /// Over-expressed links of a validated network. Under-expressed links
    /// mark avoidance and are not used as affinities.
    pub fn from_validated(vn: &ValidatedNetwork, weights: EdgeWeights) -> Self {
        Self::from_edges(
            vn.node_count,
            vn.edges.iter().filter(|e| e.tail == Tail::Over).map(|e| {
                let w = match weights {
                    EdgeWeights::Binary => 1.0,
                    EdgeWeights::Nij => e.n_ij as f64,
                };
                (e.i, e.j, w)
            }),
        )
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, node: usize) -> f64 {
        self.adj[node].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[node]
    }

    /// Twice the total edge weight.
    pub fn total_degree(&self) -> f64 {
        (0..self.node_count()).map(|i| self.degree(i)).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
            + self.self_loops.iter().filter(|&&w| w > 0.0).count()
    }

    fn aggregate(&self, community: &[usize], n_communities: usize) -> CommunityGraph {
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n_communities];
        let mut self_loops = vec![0.0; n_communities];
        for i in 0..self.node_count() {
            let ci = community[i];
            self_loops[ci] += self.self_loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    // Each internal link is visited from both ends.
                    self_loops[ci] += w / 2.0;
                } else {
                    *maps[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        CommunityGraph {
            adj: maps.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loops,
        }
    }
}

/// Newman-Girvan modularity `sum_c (e_c / m - (d_c / 2m)^2)`. Nodes without
/// links may be left uncovered; every other node needs a label.
pub fn modularity(graph: &CommunityGraph, part: &Partition) -> Result<f64> {
    let m2 = graph.total_degree();
    if m2 <= 0.0 {
        return Err(Error::EmptyNetwork);
    }
    let mut internal = vec![0.0; part.n_communities()];
    let mut degree = vec![0.0; part.n_communities()];
    for i in 0..graph.node_count() {
        let d = graph.degree(i);
        if d == 0.0 {
            continue;
        }
        let c = part.label(i).ok_or(Error::UncoveredNode(i))?;
        degree[c] += d;
        internal[c] += graph.self_loops[i];
        for &(j, w) in &graph.adj[i] {
            if part.label(j) == Some(c) {
                internal[c] += w / 2.0;
            }
        }
    }
    let m = m2 / 2.0;
    Ok(internal
        .iter()
        .zip(&degree)
        .map(|(e, d)| e / m - (d / m2) * (d / m2))
        .sum())
}

const GAIN_EPS: f64 = 1e-10;
const MAX_PASSES: usize = 1000;

/// One round of local moves. Returns the community of every node and whether
/// any node moved.
fn local_moves(graph: &CommunityGraph, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = graph.node_count();
    let m2 = graph.total_degree();
    let degree: Vec<f64> = (0..n).map(|i| graph.degree(i)).collect();
    let mut community: Vec<usize> = (0..n).collect();
    let mut total = degree.clone();
    let mut link_weight = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    let mut any_move = false;

    for _ in 0..MAX_PASSES {
        order.shuffle(rng);
        let mut moved = false;
        for &i in &order {
            let own = community[i];
            for &(j, w) in &graph.adj[i] {
                let c = community[j];
                if link_weight[c] == 0.0 {
                    touched.push(c);
                }
                link_weight[c] += w;
            }
            total[own] -= degree[i];
            let gain = |c: usize| link_weight[c] - total[c] * degree[i] / m2;
            let stay = gain(own);
            let best = touched
                .iter()
                .map(|&c| gain(c))
                .fold(stay, f64::max);
            let mut target = own;
            if best > stay + GAIN_EPS {
                target = touched
                    .iter()
                    .copied()
                    .filter(|&c| gain(c) >= best - GAIN_EPS)
                    .min()
                    .expect("best gain comes from a neighbor community");
            }
            total[target] += degree[i];
            if target != own {
                community[i] = target;
                moved = true;
            }
            for &c in &touched {
                link_weight[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    (community, any_move)
}

fn dense(community: &mut [usize]) -> usize {
    let mut remap = HashMap::new();
    for c in community.iter_mut() {
        let next = remap.len();
        *c = *remap.entry(*c).or_insert(next);
    }
    remap.len()
}

/// Two-phase Louvain: local moves to convergence, aggregation, repeat until
/// a level moves nothing. The visit order of every pass is shuffled by a
/// generator seeded with `seed`; equal best gains go to the lowest community
/// label. Nodes without links are left uncovered.
pub fn louvain(graph: &CommunityGraph, seed: u64) -> Result<Partition> {
    if graph.total_degree() <= 0.0 {
        return Err(Error::EmptyNetwork);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    let mut level = graph.clone();
    loop {
        let (mut community, moved) = local_moves(&level, &mut rng);
        if !moved {
            break;
        }
        let count = dense(&mut community);
        for m in membership.iter_mut() {
            *m = community[*m];
        }
        level = level.aggregate(&community, count);
    }
    let labels = (0..n)
        .map(|i| (graph.degree(i) > 0.0).then_some(membership[i]))
        .collect();
    Ok(Partition::from_labels(labels))
}

/// Pair counts over the nodes covered by both partitions: `n11` pairs together
/// in both, `n10` together only in the first, `n01` only in the second, `n00`
/// in neither.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairContingency {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl PairContingency {
    pub fn total(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

pub fn pair_contingency(first: &Partition, second: &Partition) -> Result<PairContingency> {
    let universe = first.universe_size().max(second.universe_size());
    let mut joint: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    let mut common = 0u64;
    for i in 0..universe {
        if let (Some(a), Some(b)) = (first.label(i), second.label(i)) {
            *joint.entry((a, b)).or_default() += 1;
            *rows.entry(a).or_default() += 1;
            *cols.entry(b).or_default() += 1;
            common += 1;
        }
    }
    if common < 2 {
        return Err(Error::InsufficientOverlap(common as usize));
    }
    let n11: u64 = joint.values().map(|&c| choose2(c)).sum();
    let same_first: u64 = rows.values().map(|&c| choose2(c)).sum();
    let same_second: u64 = cols.values().map(|&c| choose2(c)).sum();
    let total = choose2(common);
    Ok(PairContingency {
        n11,
        n10: same_first - n11,
        n01: same_second - n11,
        n00: total + n11 - same_first - same_second,
    })
}

/// Hubert-Arabie adjusted Rand index.
pub fn adjusted_rand(first: &Partition, second: &Partition) -> Result<f64> {
    let t = pair_contingency(first, second)?;
    let total = t.total() as f64;
    let a = (t.n11 + t.n10) as f64;
    let b = (t.n11 + t.n01) as f64;
    let expected = a * b / total;
    let max = 0.5 * (a + b);
    if max == expected {
        // Both partitions are all-singletons or both all-together.
        return Ok(1.0);
    }
    Ok((t.n11 as f64 - expected) / (max - expected))
}

/// Adjusted Wallace index of `candidate` with respect to `reference`: the
/// share of the candidate's co-clustered pairs that the reference also
/// co-clusters, corrected by the share `E` of all pairs the reference
/// co-clusters, `(W - E) / (1 - E)`.
pub fn adjusted_wallace(candidate: &Partition, reference: &Partition) -> Result<f64> {
    let t = pair_contingency(candidate, reference)?;
    let together = t.n11 + t.n10;
    if together == 0 {
        return Err(Error::UndefinedWallace("candidate co-clusters no pair"));
    }
    let reference_together = t.n11 + t.n01;
    if reference_together == t.total() {
        return Err(Error::UndefinedWallace(
            "reference co-clusters every pair",
        ));
    }
    let w = t.n11 as f64 / together as f64;
    let e = reference_together as f64 / t.total() as f64;
    Ok((w - e) / (1.0 - e))
}

/// Louvain partition of the full co-occurrence-weighted projection.
pub fn louvain_projection(pn: &ProjectedNetwork, seed: u64) -> Result<Partition> {
    louvain(&CommunityGraph::from_projection(pn), seed)
}

/// Community cores: Louvain on the one-tail validated network. Coverage is
/// restricted to nodes keeping at least one validated link; an empty
/// validated network yields an empty partition.
pub fn community_cores(
    bn: &BipartiteNetwork,
    side: Side,
    alpha: f64,
    method: Method,
    seed: u64,
    weights: EdgeWeights,
) -> Result<Partition> {
    let vn = validate_one_tail(bn, side, alpha, method)?;
    cores_of(&vn, seed, weights)
}

pub fn cores_of(vn: &ValidatedNetwork, seed: u64, weights: EdgeWeights) -> Result<Partition> {
    let graph = CommunityGraph::from_validated(vn, weights);
    if graph.total_degree() <= 0.0 {
        log::warn!("validated network is empty; no community cores");
        return Ok(Partition::empty(vn.node_count));
    }
    louvain(&graph, seed)
}
