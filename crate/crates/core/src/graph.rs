//! Network data model: weighted (directed or undirected) networks, bipartite
//! networks, their one-mode projections, and the TSV formats they are read
//! from and written to.
//!
//! Node identifiers are opaque strings. Every loader maps them to dense
//! indices in lexicographic label order, so the index assignment depends only
//! on the label set and a save/load cycle reproduces the same network.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Bidirectional map between node labels and dense indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeIndex {
    labels: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl NodeIndex {
    /// Builds an index in the order given. Labels must be unique.
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if lookup.insert(label.clone(), i).is_some() {
                return Err(Error::invalid("node labels", format!("'{label}' appears twice")));
            }
        }
        Ok(NodeIndex { labels, lookup })
    }

    fn from_set(labels: BTreeSet<String>) -> Self {
        let labels: Vec<String> = labels.into_iter().collect();
        let lookup = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        NodeIndex { labels, lookup }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.lookup.get(label).copied()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Writes the `label<TAB>index` sidecar.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(out, "{label}\t{i}")?;
        }
        Ok(())
    }
}

/// One stored (half-)edge of a [`WeightedNetwork`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Weighted network with strictly positive weights, no self-loops and at most
/// one edge per ordered pair.
///
/// Undirected input is stored as two directed half-edges, so `out_edges(i)`
/// always lists every link incident to `i` in that case.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedNetwork {
    nodes: NodeIndex,
    directed: bool,
    out_adj: Vec<Vec<(usize, f64)>>,
    in_adj: Vec<Vec<(usize, f64)>>,
}

/// Per-node degree and strength. For undirected networks the in- and
/// out- columns are identical.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeStats {
    pub node: usize,
    pub out_degree: usize,
    pub out_strength: f64,
    pub in_degree: usize,
    pub in_strength: f64,
}

impl WeightedNetwork {
    /// Builds a network from labelled edges. Each edge carries the 1-based
    /// source line used in error messages.
    pub fn from_labeled_edges<'a, I>(edges: I, directed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, &'a str, &'a str, f64)>,
    {
        let mut raw = Vec::new();
        let mut labels = BTreeSet::new();
        for (line, s, t, w) in edges {
            if s == t {
                return Err(Error::SelfLoop {
                    line,
                    node: s.to_string(),
                });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonPositiveWeight { line, weight: w });
            }
            labels.insert(s.to_string());
            labels.insert(t.to_string());
            raw.push((line, s, t, w));
        }
        let nodes = NodeIndex::from_set(labels);
        let n = nodes.len();
        let mut seen = BTreeMap::new();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (line, s, t, w) in raw {
            let (si, ti) = (nodes.get(s).unwrap(), nodes.get(t).unwrap());
            let key = if directed { (si, ti) } else { (si.min(ti), si.max(ti)) };
            if seen.insert(key, line).is_some() {
                return Err(Error::DuplicateEdge {
                    line,
                    source_node: s.to_string(),
                    target_node: t.to_string(),
                });
            }
            out_adj[si].push((ti, w));
            in_adj[ti].push((si, w));
            if !directed {
                out_adj[ti].push((si, w));
                in_adj[si].push((ti, w));
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_by_key(|&(j, _)| j);
        }
        Ok(WeightedNetwork {
            nodes,
            directed,
            out_adj,
            in_adj,
        })
    }

    pub fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Outgoing (half-)edges of `node`, sorted by target.
    pub fn out_edges(&self, node: usize) -> &[(usize, f64)] {
        &self.out_adj[node]
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.out_adj[node].len()
    }

    pub fn out_strength(&self, node: usize) -> f64 {
        self.out_adj[node].iter().map(|&(_, w)| w).sum()
    }

    /// Normalized weight `w_ij / s_i` of the edge `i -> j` seen from `i`.
    pub fn normalized_weight(&self, i: usize, j: usize) -> Option<f64> {
        let edges = &self.out_adj[i];
        let pos = edges.binary_search_by_key(&j, |&(t, _)| t).ok()?;
        Some(edges[pos].1 / self.out_strength(i))
    }

    /// Every stored half-edge, ordered by (source, target).
    pub fn half_edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        self.out_adj.iter().enumerate().flat_map(|(source, list)| {
            list.iter().map(move |&(target, weight)| WeightedEdge {
                source,
                target,
                weight,
            })
        })
    }

    /// The input edge set: every half-edge when directed, one entry per link
    /// (source < target) when undirected.
    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        let directed = self.directed;
        self.half_edges()
            .filter(move |e| directed || e.source < e.target)
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Degree and strength of every node.
    pub fn degrees_strengths(&self) -> Vec<NodeStats> {
        (0..self.node_count())
            .map(|node| NodeStats {
                node,
                out_degree: self.out_adj[node].len(),
                out_strength: self.out_adj[node].iter().map(|&(_, w)| w).sum(),
                in_degree: self.in_adj[node].len(),
                in_strength: self.in_adj[node].iter().map(|&(_, w)| w).sum(),
            })
            .collect()
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in self.edges() {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.nodes.label(e.source),
                self.nodes.label(e.target),
                e.weight
            )?;
        }
        Ok(())
    }
}

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })),
        Ok(l) => {
            let trimmed = l.trim_end_matches(['\r', '\n']);
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, trimmed.to_string())))
            }
        }
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Parses `source<TAB>target<TAB>weight` lines.
pub fn read_weighted<R: BufRead>(reader: R, directed: bool) -> Result<WeightedNetwork> {
    let mut rows = Vec::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let weight: f64 = fields[2].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("weight '{}' is not a number", fields[2]),
        })?;
        rows.push((line, fields[0].to_string(), fields[1].to_string(), weight));
    }
    WeightedNetwork::from_labeled_edges(
        rows.iter().map(|(l, s, t, w)| (*l, s.as_str(), t.as_str(), *w)),
        directed,
    )
}

pub fn load_weighted(path: impl AsRef<Path>, directed: bool) -> Result<WeightedNetwork> {
    read_weighted(open(path.as_ref())?, directed)
}

/// One of the two node sets of a bipartite network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, clap::ValueEnum)]
pub enum Side {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Binary bipartite network between two disjoint label namespaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteNetwork {
    a: NodeIndex,
    b: NodeIndex,
    a_adj: Vec<Vec<usize>>,
    b_adj: Vec<Vec<usize>>,
}

impl BipartiteNetwork {
    /// Builds a network over explicit node indices. Duplicate links collapse.
    pub fn from_links<I>(a: NodeIndex, b: NodeIndex, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut a_adj = vec![Vec::new(); a.len()];
        let mut b_adj = vec![Vec::new(); b.len()];
        for (i, j) in links {
            if i >= a.len() || j >= b.len() {
                return Err(Error::invalid(
                    "link",
                    format!("({i}, {j}) outside {}x{} node sets", a.len(), b.len()),
                ));
            }
            a_adj[i].push(j);
            b_adj[j].push(i);
        }
        for list in a_adj.iter_mut().chain(b_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(BipartiteNetwork { a, b, a_adj, b_adj })
    }

    pub fn nodes(&self, side: Side) -> &NodeIndex {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn size(&self, side: Side) -> usize {
        self.nodes(side).len()
    }

    pub fn neighbors(&self, side: Side, node: usize) -> &[usize] {
        match side {
            Side::A => &self.a_adj[node],
            Side::B => &self.b_adj[node],
        }
    }

    pub fn degree(&self, side: Side, node: usize) -> usize {
        self.neighbors(side, node).len()
    }

    pub fn degrees(&self, side: Side) -> Vec<usize> {
        (0..self.size(side)).map(|i| self.degree(side, i)).collect()
    }

    pub fn link_count(&self) -> usize {
        self.a_adj.iter().map(Vec::len).sum()
    }

    /// All links as (A index, B index), sorted.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.a_adj
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&j| (i, j)))
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, j) in self.links() {
            writeln!(out, "{}\t{}", self.a.label(i), self.b.label(j))?;
        }
        Ok(())
    }

    /// Co-occurrence counts between `node` and every other node on `side`,
    /// accumulated into `counts` (length = side size, all zero on entry).
    /// Indices that became non-zero are pushed onto `touched`; callers reset
    /// them afterwards.
    pub(crate) fn cooccurrence_row(
        &self,
        side: Side,
        node: usize,
        counts: &mut [u32],
        touched: &mut Vec<usize>,
    ) {
        for &other in self.neighbors(side, node) {
            for &peer in self.neighbors(side.opposite(), other) {
                if counts[peer] == 0 {
                    touched.push(peer);
                }
                counts[peer] += 1;
            }
        }
    }
}

/// Parses `nodeA<TAB>nodeB` lines. The two columns are separate namespaces.
/// Duplicate links are dropped with a warning unless `strict`.
pub fn read_bipartite<R: BufRead>(reader: R, strict: bool) -> Result<BipartiteNetwork> {
    let mut rows = Vec::new();
    let mut a_labels = BTreeSet::new();
    let mut b_labels = BTreeSet::new();
    for item in data_lines(reader) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        a_labels.insert(fields[0].to_string());
        b_labels.insert(fields[1].to_string());
        rows.push((line, fields[0].to_string(), fields[1].to_string()));
    }
    let a = NodeIndex::from_set(a_labels);
    let b = NodeIndex::from_set(b_labels);
    let mut seen = BTreeSet::new();
    let mut links = Vec::with_capacity(rows.len());
    for (line, la, lb) in rows {
        let pair = (a.get(&la).unwrap(), b.get(&lb).unwrap());
        if !seen.insert(pair) {
            if strict {
                return Err(Error::DuplicateLink { line, a: la, b: lb });
            }
            log::warn!("line {line}: duplicate link {la} -- {lb} ignored");
            continue;
        }
        links.push(pair);
    }
    BipartiteNetwork::from_links(a, b, links)
}

pub fn load_bipartite(path: impl AsRef<Path>, strict: bool) -> Result<BipartiteNetwork> {
    read_bipartite(open(path.as_ref())?, strict)
}

/// Edge of a projected network with its co-occurrence count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjectedEdge {
    pub i: usize,
    pub j: usize,
    pub count: u32,
}

/// One-mode projection of a bipartite network. Edges are stored once with
/// `i < j`, sorted, and only for pairs sharing at least one neighbor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedNetwork {
    pub side: Side,
    pub node_count: usize,
    pub edges: Vec<ProjectedEdge>,
}

/// Projects `bn` onto `side`.
pub fn project(bn: &BipartiteNetwork, side: Side) -> ProjectedNetwork {
    let n = bn.size(side);
    let rows: Vec<Vec<ProjectedEdge>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], Vec::new()),
            |(counts, touched), i| {
                bn.cooccurrence_row(side, i, counts, touched);
                let mut row: Vec<ProjectedEdge> = touched
                    .iter()
                    .filter(|&&j| j > i)
                    .map(|&j| ProjectedEdge {
                        i,
                        j,
                        count: counts[j],
                    })
                    .collect();
                for &j in touched.iter() {
                    counts[j] = 0;
                }
                touched.clear();
                row.sort_unstable_by_key(|e| e.j);
                row
            },
        )
        .collect();
    ProjectedNetwork {
        side,
        node_count: n,
        edges: rows.into_iter().flatten().collect(),
    }
}

/// Writes `contents` to `path` through a buffered writer.
pub(crate) fn write_file<F>(path: &Path, contents: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    contents(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn save_weighted(wn: &WeightedNetwork, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |out| wn.write_tsv(out))
}

pub fn save_bipartite(bn: &BipartiteNetwork, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |out| bn.write_tsv(out))
}

pub fn save_node_index(index: &NodeIndex, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |out| index.write_tsv(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn weighted(text: &str, directed: bool) -> Result<WeightedNetwork> {
        read_weighted(text.as_bytes(), directed)
    }

    #[test]
    fn strength_sums_incident_weights() {
        let wn = weighted("i\tj\t1.0\ni\tk\t2.0\nj\tk\t3.0\n", false).unwrap();
        let i = wn.nodes().get("i").unwrap();
        assert_eq!(wn.out_strength(i), 3.0);
        assert_eq!(wn.out_degree(i), 2);
        assert_eq!(wn.edge_count(), 3);
    }

    #[test]
    fn empty_file_gives_empty_network() {
        let wn = weighted("# only a comment\n\n", true).unwrap();
        assert_eq!(wn.node_count(), 0);
    }

    #[test]
    fn self_loop_reports_line() {
        match weighted("a\ta\t1.0\n", false) {
            Err(Error::SelfLoop { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(matches!(
            weighted("a\tb\t1\nb\tc\n", false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            weighted("# c\na\tb\t-1\n", false),
            Err(Error::NonPositiveWeight { line: 2, .. })
        ));
        assert!(matches!(
            weighted("a\tb\tx\n", false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            weighted("a\tb\t1\nb\ta\t2\n", false),
            Err(Error::DuplicateEdge { line: 2, .. })
        ));
        // Reciprocal edges are distinct when directed.
        assert!(weighted("a\tb\t1\nb\ta\t2\n", true).is_ok());
        assert!(weighted("a\tb\t1\na\tb\t2\n", true).is_err());
    }

    #[test]
    fn triangle_degrees() {
        let wn = weighted("a\tb\t1\nb\tc\t1\nc\ta\t1\n", false).unwrap();
        for s in wn.degrees_strengths() {
            assert_eq!(s.out_degree, 2);
            assert_eq!(s.out_strength, 2.0);
            assert_eq!(s.in_degree, 2);
        }
    }

    #[test]
    fn directed_single_edge_degrees() {
        let wn = weighted("a\tb\t5\n", true).unwrap();
        let stats = wn.degrees_strengths();
        let a = &stats[wn.nodes().get("a").unwrap()];
        let b = &stats[wn.nodes().get("b").unwrap()];
        assert_eq!((a.out_degree, a.out_strength, a.in_degree), (1, 5.0, 0));
        assert_eq!((b.in_degree, b.in_strength, b.out_degree), (1, 5.0, 0));
    }

    #[test]
    fn degrees_match_naive_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pairs = BTreeSet::new();
        while pairs.len() < 50 {
            let s = rng.gen_range(0..20);
            let t = rng.gen_range(0..20);
            if s != t {
                pairs.insert((s, t));
            }
        }
        let rows: Vec<(String, String, f64)> = pairs
            .iter()
            .map(|&(s, t)| (format!("n{s}"), format!("n{t}"), rng.gen_range(0.1..10.0)))
            .collect();
        let wn = WeightedNetwork::from_labeled_edges(
            rows.iter()
                .enumerate()
                .map(|(l, (s, t, w))| (l + 1, s.as_str(), t.as_str(), *w)),
            true,
        )
        .unwrap();
        let mut out: HashMap<&str, (usize, f64)> = HashMap::new();
        let mut inn: HashMap<&str, (usize, f64)> = HashMap::new();
        for (s, t, w) in &rows {
            let e = out.entry(s).or_default();
            e.0 += 1;
            e.1 += w;
            let e = inn.entry(t).or_default();
            e.0 += 1;
            e.1 += w;
        }
        for st in wn.degrees_strengths() {
            let label = wn.nodes().label(st.node);
            let (ok, os) = out.get(label).copied().unwrap_or_default();
            let (ik, is) = inn.get(label).copied().unwrap_or_default();
            assert_eq!(st.out_degree, ok);
            assert_eq!(st.in_degree, ik);
            assert!((st.out_strength - os).abs() < 1e-12);
            assert!((st.in_strength - is).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_round_trip() {
        let wn = weighted("z\ty\t0.25\nb\ta\t1e-3\na\tz\t7\n", false).unwrap();
        let mut buf = Vec::new();
        wn.write_tsv(&mut buf).unwrap();
        let again = read_weighted(buf.as_slice(), false).unwrap();
        assert_eq!(wn, again);
    }

    #[test]
    fn bipartite_counts_and_namespaces() {
        let bn = read_bipartite("1\tx\n1\ty\n2\tx\n2\tz\n".as_bytes(), true).unwrap();
        assert_eq!(bn.size(Side::A), 2);
        assert_eq!(bn.size(Side::B), 3);
        let same = read_bipartite("x\tx\n".as_bytes(), true).unwrap();
        assert_eq!((same.size(Side::A), same.size(Side::B)), (1, 1));
    }

    #[test]
    fn duplicate_links() {
        let text = "a\tx\na\tx\n";
        assert!(matches!(
            read_bipartite(text.as_bytes(), true),
            Err(Error::DuplicateLink { line: 2, .. })
        ));
        let lenient = read_bipartite(text.as_bytes(), false).unwrap();
        assert_eq!(lenient.link_count(), 1);
    }

    #[test]
    fn projection_examples() {
        let bn = read_bipartite("1\tx\n1\ty\n2\tx\n2\ty\n".as_bytes(), true).unwrap();
        let p = project(&bn, Side::A);
        assert_eq!(p.edges, vec![ProjectedEdge { i: 0, j: 1, count: 2 }]);

        let star = read_bipartite("a\thub\nb\thub\nc\thub\nd\thub\n".as_bytes(), true).unwrap();
        let p = project(&star, Side::A);
        assert_eq!(p.edges.len(), 6);
        assert!(p.edges.iter().all(|e| e.count == 1));

        let movies = read_bipartite(
            "alice\tm1\nalice\tm2\nbob\tm2\nbob\tm3\ncarol\tm4\n".as_bytes(),
            true,
        )
        .unwrap();
        let p = project(&movies, Side::A);
        assert_eq!(p.edges.len(), 1);
        assert_eq!(p.edges[0].count, 1);
    }

    #[test]
    fn projection_matches_set_intersection() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = NodeIndex::new((0..6).map(|i| format!("a{i}")).collect()).unwrap();
        let b = NodeIndex::new((0..8).map(|i| format!("b{i}")).collect()).unwrap();
        let links: Vec<(usize, usize)> = (0..6)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        let bn = BipartiteNetwork::from_links(a, b, links.clone()).unwrap();
        let sets: Vec<BTreeSet<usize>> = (0..6)
            .map(|i| links.iter().filter(|l| l.0 == i).map(|l| l.1).collect())
            .collect();
        let p = project(&bn, Side::A);
        let mut expected = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                let c = sets[i].intersection(&sets[j]).count() as u32;
                if c > 0 {
                    expected.push(ProjectedEdge { i, j, count: c });
                }
            }
        }
        assert_eq!(p.edges, expected);
        // The B side projection respects the same bound.
        let pb = project(&bn, Side::B);
        for e in &pb.edges {
            let bound = bn.degree(Side::B, e.i).min(bn.degree(Side::B, e.j));
            assert!(e.count as usize <= bound);
        }
    }
}
