//! Disparity-filter backbone extraction.
//!
//! Every node `i` with `k_i >= 2` tests each of its outgoing (for undirected
//! input: incident) links against the null of a uniform random split of its
//! strength. A link therefore gets one test per endpoint and the backbone is
//! directed: `i -> j` means the link is significant from `i`'s side.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::corrections::{self, check_alpha, Method, TestBattery};
use crate::error::Result;
use crate::graph::{NodeIndex, WeightedNetwork};
use crate::pvalue::{pvalue_disparity, PValueRecord, Tail};

/// Treatment of links seen from a node of degree one, where the null density
/// is undefined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DegreeOnePolicy {
    /// Never retain a link from the degree-one side.
    #[default]
    Drop,
    /// Always retain it (untested, reported without a p-value).
    Keep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrize {
    /// Keep a link if either direction survived.
    Union,
    /// Keep a link only if both directions survived.
    Intersection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BackboneEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    /// `None` for links retained by [`DegreeOnePolicy::Keep`].
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Backbone {
    /// Retained directed edges, sorted by (source, target).
    pub edges: Vec<BackboneEdge>,
    pub method: Method,
    pub alpha: f64,
    /// Number of (node, link) tests performed.
    pub n_tests: u64,
    /// Per-test threshold applied by the correction.
    pub threshold: f64,
}

/// One disparity test per (node, outgoing link) for nodes with `k >= 2`,
/// ordered by (source, target). `statistic` holds the normalized weight.
pub fn disparity_tests(wn: &WeightedNetwork) -> Vec<PValueRecord> {
    (0..wn.node_count())
        .into_par_iter()
        .map(|i| {
            let k = wn.out_degree(i) as u64;
            if k < 2 {
                return Vec::new();
            }
            let strength = wn.out_strength(i);
            wn.out_edges(i)
                .iter()
                .map(|&(j, w)| {
                    let x = (w / strength).min(1.0);
                    PValueRecord {
                        subject: (i, j),
                        tail: Tail::Disparity,
                        p: pvalue_disparity(k, x).expect("k >= 2 and x in [0, 1]"),
                        statistic: x,
                    }
                })
                .collect()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn disparity_backbone(
    wn: &WeightedNetwork,
    alpha: f64,
    correction: Method,
    degree_one: DegreeOnePolicy,
) -> Result<Backbone> {
    check_alpha(alpha)?;
    let records = disparity_tests(wn);
    let n_tests = records.len() as u64;
    let battery = TestBattery::new(records, n_tests, alpha)?;
    let result = corrections::apply(correction, &battery);

    let mut edges: Vec<BackboneEdge> = result
        .rejected
        .iter()
        .map(|&idx| {
            let r = &battery.records[idx];
            let (source, target) = r.subject;
            BackboneEdge {
                source,
                target,
                weight: weight_of(wn, source, target),
                p_value: Some(r.p),
            }
        })
        .collect();
    if degree_one == DegreeOnePolicy::Keep {
        for i in (0..wn.node_count()).filter(|&i| wn.out_degree(i) == 1) {
            let (target, weight) = wn.out_edges(i)[0];
            edges.push(BackboneEdge {
                source: i,
                target,
                weight,
                p_value: None,
            });
        }
    }
    edges.sort_by_key(|e| (e.source, e.target));
    Ok(Backbone {
        edges,
        method: correction,
        alpha,
        n_tests,
        threshold: result.threshold,
    })
}

fn weight_of(wn: &WeightedNetwork, source: usize, target: usize) -> f64 {
    let list = wn.out_edges(source);
    let pos = list
        .binary_search_by_key(&target, |&(t, _)| t)
        .expect("tested edge exists");
    list[pos].1
}

impl Backbone {
    pub fn contains(&self, source: usize, target: usize) -> bool {
        self.edges
            .binary_search_by_key(&(source, target), |e| (e.source, e.target))
            .is_ok()
    }

    /// Collapses the directed backbone to undirected links (`source <
    /// target`). The weight is taken from the lower-index direction when both
    /// survived; the p-value is the smaller of the two.
    pub fn symmetrize(&self, mode: Symmetrize) -> Vec<BackboneEdge> {
        let mut pairs: BTreeMap<(usize, usize), (BackboneEdge, u8)> = BTreeMap::new();
        for e in &self.edges {
            let key = (e.source.min(e.target), e.source.max(e.target));
            pairs
                .entry(key)
                .and_modify(|(kept, seen)| {
                    *seen += 1;
                    kept.p_value = match (kept.p_value, e.p_value) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                    if e.source < e.target {
                        kept.weight = e.weight;
                    }
                })
                .or_insert((*e, 1));
        }
        pairs
            .into_iter()
            .filter(|(_, (_, seen))| mode == Symmetrize::Union || *seen == 2)
            .map(|((source, target), (e, _))| BackboneEdge {
                source,
                target,
                ..e
            })
            .collect()
    }
}

/// Writes `source<TAB>target<TAB>weight<TAB>pvalue`; untested links print `NA`.
pub fn write_backbone_tsv<W: Write>(
    edges: &[BackboneEdge],
    nodes: &NodeIndex,
    mut out: W,
) -> std::io::Result<()> {
    for e in edges {
        let p = e
            .p_value
            .map_or_else(|| "NA".to_string(), |p| format!("{p:e}"));
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            nodes.label(e.source),
            nodes.label(e.target),
            e.weight,
            p
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::read_weighted;

    fn net(text: &str) -> WeightedNetwork {
        read_weighted(text.as_bytes(), false).unwrap()
    }

    #[test]
    fn dominant_link_is_retained() {
        let wn = net("hub\tx\t9.9\nhub\ty\t0.1\n");
        let bb = disparity_backbone(&wn, 0.05, Method::None, DegreeOnePolicy::Drop).unwrap();
        let hub = wn.nodes().get("hub").unwrap();
        let x = wn.nodes().get("x").unwrap();
        assert_eq!(bb.edges.len(), 1);
        assert_eq!((bb.edges[0].source, bb.edges[0].target), (hub, x));
        assert!((bb.edges[0].p_value.unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(bb.n_tests, 2);
    }

    #[test]
    fn uniform_weights_retain_nothing() {
        let text: String = (0..10).map(|i| format!("c\tl{i}\t3.5\n")).collect();
        let wn = net(&text);
        let tests = disparity_tests(&wn);
        assert_eq!(tests.len(), 10);
        for t in &tests {
            assert!((t.p - 0.9f64.powi(9)).abs() < 1e-12);
        }
        let bb = disparity_backbone(&wn, 0.05, Method::None, DegreeOnePolicy::Drop).unwrap();
        assert!(bb.edges.is_empty());
    }

    #[test]
    fn degree_one_policy() {
        let wn = net("hub\tx\t9.9\nhub\ty\t0.1\n");
        let x = wn.nodes().get("x").unwrap();
        let hub = wn.nodes().get("hub").unwrap();
        let drop = disparity_backbone(&wn, 0.05, Method::None, DegreeOnePolicy::Drop).unwrap();
        assert!(!drop.contains(x, hub));
        let keep = disparity_backbone(&wn, 0.05, Method::None, DegreeOnePolicy::Keep).unwrap();
        assert!(keep.contains(x, hub));
        let kept = keep.edges.iter().find(|e| e.source == x).unwrap();
        assert_eq!(kept.p_value, None);
        assert_eq!(keep.n_tests, 2);
    }

    #[test]
    fn rejects_bad_alpha() {
        let wn = net("a\tb\t1\n");
        assert!(disparity_backbone(&wn, 1.5, Method::Fdr, DegreeOnePolicy::Drop).is_err());
        assert!(disparity_backbone(&wn, 0.0, Method::Fdr, DegreeOnePolicy::Drop).is_err());
    }

    #[test]
    fn directed_input_tests_out_links_only() {
        let wn = read_weighted("a\tb\t9\na\tc\t1\nb\ta\t1\n".as_bytes(), true).unwrap();
        let tests = disparity_tests(&wn);
        assert_eq!(tests.len(), 2);
        assert!(tests.iter().all(|t| t.subject.0 == wn.nodes().get("a").unwrap()));
    }

    #[test]
    fn scaling_a_nodes_weights_keeps_its_pvalues() {
        let base = net("a\tb\t1\na\tc\t2\na\td\t7\n");
        let scaled = net("a\tb\t3\na\tc\t6\na\td\t21\n");
        let pa: Vec<f64> = disparity_tests(&base)
            .iter()
            .filter(|t| t.subject.0 == 0)
            .map(|t| t.p)
            .collect();
        let pb: Vec<f64> = disparity_tests(&scaled)
            .iter()
            .filter(|t| t.subject.0 == 0)
            .map(|t| t.p)
            .collect();
        for (x, y) in pa.iter().zip(&pb) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn symmetrize_modes() {
        // a dominates its link to b; b has b-a and b-c balanced except for a.
        let wn = net("a\tb\t100\na\tc\t1\nb\tc\t1\nb\td\t1\nb\te\t1\nb\tf\t1\n");
        let bb = disparity_backbone(&wn, 0.05, Method::None, DegreeOnePolicy::Drop).unwrap();
        let union = bb.symmetrize(Symmetrize::Union);
        let inter = bb.symmetrize(Symmetrize::Intersection);
        assert!(inter.len() <= union.len());
        assert!(union.iter().all(|e| e.source < e.target));
        for e in &inter {
            assert!(bb.contains(e.source, e.target) && bb.contains(e.target, e.source));
        }
    }

    #[test]
    fn tsv_format() {
        let wn = net("hub\tx\t9.9\nhub\ty\t0.1\n");
        let bb = disparity_backbone(&wn, 0.05, Method::None, DegreeOnePolicy::Keep).unwrap();
        let mut buf = Vec::new();
        write_backbone_tsv(&bb.edges, wn.nodes(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("hub\tx\t9.9\t"));
        assert!(text.contains("x\thub\t9.9\tNA"));
    }
}
