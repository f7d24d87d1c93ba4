//! Statistically validated networks from bipartite projections.
//!
//! A projected link between `i` and `j` is tested against the hypergeometric
//! null of random co-occurrence given the degrees `N_i`, `N_j` and the size
//! `N_B` of the opposite set. One-tail validation tests every projected link
//! for over-expression. Two-tail validation tests every pair of non-isolated
//! nodes, including pairs that never co-occur, for both over- and
//! under-expression.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::corrections::{self, check_alpha, Method, TestBattery};
use crate::error::{Error, Result};
use crate::graph::{project, BipartiteNetwork, NodeIndex, Side};
use crate::pvalue::{pvalue_over, pvalue_under, HypergeomParams, PValueRecord, Tail};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Tails {
    One,
    Two,
}

/// How the two-tail family is counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// One over and one under test per pair: `N_t = n (n - 1)`.
    #[default]
    Tests,
    /// One two-sided test per pair, `p = 2 min(p_over, p_under)`:
    /// `N_t = n (n - 1) / 2`.
    Pairs,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidatedEdge {
    pub i: usize,
    pub j: usize,
    pub n_ij: u32,
    pub tail: Tail,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidatedNetwork {
    pub side: Side,
    pub node_count: usize,
    /// Sorted by (i, j, tail) with `i < j`.
    pub edges: Vec<ValidatedEdge>,
    pub method: Method,
    pub alpha: f64,
    pub tails: Tails,
    pub family: Option<Family>,
    pub n_tests: u64,
    /// Per-test threshold applied by the correction.
    pub threshold: f64,
    /// Degree-zero nodes on the tested side, left out of the family.
    pub isolated_nodes: usize,
}

fn params(bn: &BipartiteNetwork, side: Side, i: usize, j: usize) -> HypergeomParams {
    HypergeomParams::new(
        bn.size(side.opposite()) as u64,
        bn.degree(side, i) as u64,
        bn.degree(side, j) as u64,
    )
    .expect("degrees are bounded by the opposite side")
}

/// Over-expression tests for every link of the projection onto `side`.
pub fn over_expression_tests(bn: &BipartiteNetwork, side: Side) -> Vec<PValueRecord> {
    project(bn, side)
        .edges
        .par_iter()
        .map(|e| PValueRecord {
            subject: (e.i, e.j),
            tail: Tail::Over,
            p: pvalue_over(params(bn, side, e.i, e.j), e.count as u64)
                .expect("observed overlap lies in the support"),
            statistic: e.count as f64,
        })
        .collect()
}

fn isolated(bn: &BipartiteNetwork, side: Side) -> usize {
    (0..bn.size(side)).filter(|&i| bn.degree(side, i) == 0).count()
}

fn assemble(
    bn: &BipartiteNetwork,
    side: Side,
    battery: &TestBattery,
    method: Method,
    tails: Tails,
    family: Option<Family>,
) -> ValidatedNetwork {
    let result = corrections::apply(method, battery);
    let edges = result
        .rejected
        .iter()
        .map(|&idx| {
            let r = &battery.records[idx];
            ValidatedEdge {
                i: r.subject.0,
                j: r.subject.1,
                n_ij: r.statistic as u32,
                tail: r.tail,
                p_value: r.p,
            }
        })
        .collect();
    ValidatedNetwork {
        side,
        node_count: bn.size(side),
        edges,
        method,
        alpha: battery.alpha(),
        tails,
        family,
        n_tests: battery.n_tests(),
        threshold: result.threshold,
        isolated_nodes: isolated(bn, side),
    }
}

/// Over-expression validation of the projected links. `N_t` is the number of
/// projected links.
pub fn validate_one_tail(
    bn: &BipartiteNetwork,
    side: Side,
    alpha: f64,
    method: Method,
) -> Result<ValidatedNetwork> {
    check_alpha(alpha)?;
    let records = over_expression_tests(bn, side);
    let n_tests = records.len() as u64;
    let battery = TestBattery::new(records, n_tests, alpha)?;
    Ok(assemble(bn, side, &battery, method, Tails::One, None))
}

/// Over- and under-expression validation of every pair of non-isolated nodes.
///
/// Pairs are streamed row by row with `O(n)` scratch per worker. Only records
/// with `p <= alpha` are kept: no correction can reject anything above
/// `alpha`, and those records rank after all kept ones, so the outcome equals
/// the one over the full family.
pub fn validate_two_tail(
    bn: &BipartiteNetwork,
    side: Side,
    alpha: f64,
    method: Method,
    family: Family,
) -> Result<ValidatedNetwork> {
    check_alpha(alpha)?;
    let n = bn.size(side);
    let active: Vec<usize> = (0..n).filter(|&i| bn.degree(side, i) > 0).collect();
    if active.len() < 2 {
        return Err(Error::invalid(
            "side",
            format!(
                "two-tail validation needs at least 2 non-isolated nodes on side {side}, found {}",
                active.len()
            ),
        ));
    }
    let m = active.len() as u64;
    let n_tests = match family {
        Family::Tests => m * (m - 1),
        Family::Pairs => m * (m - 1) / 2,
    };

    let rows: Vec<Vec<PValueRecord>> = active
        .par_iter()
        .enumerate()
        .map_init(
            || (vec![0u32; n], Vec::new()),
            |(counts, touched), (pos, &i)| {
                bn.cooccurrence_row(side, i, counts, touched);
                let mut row = Vec::new();
                for &j in &active[pos + 1..] {
                    let n_ij = counts[j];
                    let hp = params(bn, side, i, j);
                    let over = pvalue_over(hp, n_ij as u64).expect("in support");
                    let under = pvalue_under(hp, n_ij as u64).expect("in support");
                    let record = |tail, p| PValueRecord {
                        subject: (i, j),
                        tail,
                        p,
                        statistic: n_ij as f64,
                    };
                    match family {
                        Family::Tests => {
                            if over <= alpha {
                                row.push(record(Tail::Over, over));
                            }
                            if under <= alpha {
                                row.push(record(Tail::Under, under));
                            }
                        }
                        Family::Pairs => {
                            let (tail, one_sided) = if over <= under {
                                (Tail::Over, over)
                            } else {
                                (Tail::Under, under)
                            };
                            let p = (2.0 * one_sided).min(1.0);
                            if p <= alpha {
                                row.push(record(tail, p));
                            }
                        }
                    }
                }
                for &t in touched.iter() {
                    counts[t] = 0;
                }
                touched.clear();
                row
            },
        )
        .collect();
    let records: Vec<PValueRecord> = rows.into_iter().flatten().collect();
    let battery = TestBattery::new(records, n_tests, alpha)?;
    Ok(assemble(bn, side, &battery, method, Tails::Two, Some(family)))
}

impl ValidatedNetwork {
    /// Nodes touched by at least one validated link, ascending.
    pub fn covered_nodes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.node_count];
        for e in &self.edges {
            seen[e.i] = true;
            seen[e.j] = true;
        }
        (0..self.node_count).filter(|&i| seen[i]).collect()
    }

    pub fn contains(&self, i: usize, j: usize, tail: Tail) -> bool {
        self.edges
            .iter()
            .any(|e| e.i == i.min(j) && e.j == i.max(j) && e.tail == tail)
    }

    /// Writes `i<TAB>j<TAB>n_ij<TAB>tail<TAB>pvalue`.
    pub fn write_tsv<W: Write>(&self, nodes: &NodeIndex, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:e}",
                nodes.label(e.i),
                nodes.label(e.j),
                e.n_ij,
                e.tail,
                e.p_value
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeIndex;

    fn labels(prefix: &str, n: usize) -> NodeIndex {
        NodeIndex::new((0..n).map(|i| format!("{prefix}{i:03}")).collect()).unwrap()
    }

    fn bipartite(n_a: usize, n_b: usize, links: &[(usize, usize)]) -> BipartiteNetwork {
        BipartiteNetwork::from_links(labels("a", n_a), labels("b", n_b), links.iter().copied())
            .unwrap()
    }

    #[test]
    fn forced_overlap_is_never_validated() {
        let links: Vec<_> = (0..2).flat_map(|i| (0..50).map(move |j| (i, j))).collect();
        let bn = bipartite(2, 50, &links);
        let tests = over_expression_tests(&bn, Side::A);
        assert_eq!(tests.len(), 1);
        assert_eq!(tests[0].statistic, 50.0);
        assert_eq!(tests[0].p, 1.0);
        let vn = validate_one_tail(&bn, Side::A, 0.05, Method::Fdr).unwrap();
        assert!(vn.edges.is_empty());
    }

    #[test]
    fn perfect_overlap_in_large_population() {
        let links: Vec<_> = (0..2).flat_map(|i| (0..10).map(move |j| (i, j))).collect();
        let bn = bipartite(2, 100, &links);
        let vn = validate_one_tail(&bn, Side::A, 0.01, Method::Bonferroni).unwrap();
        assert_eq!(vn.n_tests, 1);
        assert_eq!(vn.edges.len(), 1);
        let exact = 1.0 / 17_310_309_456_440.0;
        assert!((vn.edges[0].p_value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn empty_projection_is_empty_result() {
        let bn = bipartite(3, 3, &[(0, 0), (1, 1), (2, 2)]);
        let vn = validate_one_tail(&bn, Side::A, 0.05, Method::Fdr).unwrap();
        assert_eq!(vn.n_tests, 0);
        assert!(vn.edges.is_empty());
    }

    #[test]
    fn two_tail_needs_two_nodes() {
        let bn = bipartite(3, 2, &[(0, 0), (0, 1)]);
        assert!(validate_two_tail(&bn, Side::A, 0.05, Method::Fdr, Family::Tests).is_err());
    }

    #[test]
    fn avoided_pair_is_under_validated() {
        // Two nodes splitting 100 B-nodes exactly in half never co-occur.
        let mut links: Vec<_> = (0..50).map(|j| (0, j)).collect();
        links.extend((50..100).map(|j| (1, j)));
        let bn = bipartite(2, 100, &links);
        let vn = validate_two_tail(&bn, Side::A, 0.01, Method::Bonferroni, Family::Tests).unwrap();
        assert_eq!(vn.n_tests, 2);
        assert_eq!(vn.edges.len(), 1);
        let e = vn.edges[0];
        assert_eq!((e.n_ij, e.tail), (0, Tail::Under));
        // 1 / C(100, 50)
        assert!((e.p_value - 9.911_653_021_418_89e-30).abs() < 1e-12 * e.p_value);
    }

    #[test]
    fn shared_everything_is_over_only() {
        let mut links: Vec<_> = (0..5).map(|j| (0, j)).collect();
        links.extend((0..5).map(|j| (1, j)));
        links.extend((0..200).map(|j| (2, j % 200)).filter(|&(_, j)| j % 3 == 0));
        let bn = bipartite(3, 200, &links);
        let vn = validate_two_tail(&bn, Side::A, 0.05, Method::Fdr, Family::Tests).unwrap();
        assert!(vn.contains(0, 1, Tail::Over));
        assert!(!vn.contains(0, 1, Tail::Under));
    }

    #[test]
    fn isolated_nodes_leave_the_family() {
        let mut links: Vec<_> = (0..50).map(|j| (0, j)).collect();
        links.extend((50..100).map(|j| (1, j)));
        let bn = bipartite(4, 100, &links);
        let vn = validate_two_tail(&bn, Side::A, 0.05, Method::Fdr, Family::Pairs).unwrap();
        assert_eq!(vn.isolated_nodes, 2);
        assert_eq!(vn.n_tests, 1);
        assert_eq!(vn.edges.len(), 1);
        assert!((vn.edges[0].p_value - 2.0 * 9.911_653_021_418_89e-30).abs() < 1e-40);
    }
}
