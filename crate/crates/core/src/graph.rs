//! Simple undirected graphs, partitions and the structural measures used by
//! the experiments.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range
    /// endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a}, {b}) out of range for {n} nodes")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Graph { n, edges: list })
    }

    /// Graph without edges.
    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        Graph { n, edges }
    }

    pub fn path(n: usize) -> Self {
        Graph { n, edges: (1..n).map(|i| (i - 1, i)).collect() }
    }

    /// Star with `leaves` leaves around node 0.
    pub fn star(leaves: usize) -> Self {
        Graph { n: leaves + 1, edges: (1..=leaves).map(|i| (0, i)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Sorted neighbour lists.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut v = DMatrix::zeros(self.n, self.n);
        for &(a, b) in &self.edges {
            v[(a, b)] = 1.0;
            v[(b, a)] = 1.0;
        }
        v
    }

    /// Laplace matrix `L = D - V`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(a, b) in &self.edges {
            l[(a, b)] = -1.0;
            l[(b, a)] = -1.0;
            l[(a, a)] += 1.0;
            l[(b, b)] += 1.0;
        }
        l
    }

    /// Component label per node, components numbered by smallest member.
    pub fn connected_components(&self) -> Vec<usize> {
        let adj = self.neighbors();
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Number of triangles through each node.
    pub fn triangles(&self) -> Vec<usize> {
        let adj = self.neighbors();
        let mut t = vec![0; self.n];
        for &(a, b) in &self.edges {
            let common = count_common(&adj[a], &adj[b]);
            t[a] += common;
            t[b] += common;
        }
        // each triangle at a node is seen from both of its incident edges
        t.iter().map(|x| x / 2).collect()
    }

    /// Number of edges between each (unordered) pair of degree classes.
    pub fn joint_degree_census(&self) -> BTreeMap<(usize, usize), usize> {
        let d = self.degrees();
        let mut census = BTreeMap::new();
        for &(a, b) in &self.edges {
            let key = (d[a].min(d[b]), d[a].max(d[b]));
            *census.entry(key).or_insert(0) += 1;
        }
        census
    }

    /// FNV-1a hash of the node count and edge list, for result metadata.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(self.n as u64);
        for &(a, b) in &self.edges {
            feed(a as u64);
            feed(b as u64);
        }
        h
    }

    /// Edge-list text: a `# nodes <n>` header followed by one `i j` line per
    /// edge (0-indexed).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes {}\n", self.n);
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Parses whitespace-separated integer pairs, one edge per line. `#` starts a
/// comment; a `# nodes <n>` comment fixes the node count (otherwise it is the
/// largest index plus one). With `one_indexed`, labels start at 1.
pub fn parse_edge_list(text: &str, one_indexed: bool) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut declared = None;
    let mut max_index = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let (body, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let mut words = c.split_whitespace();
            if words.next() == Some("nodes") {
                let n = words.next().and_then(|w| w.parse::<usize>().ok()).ok_or_else(|| Error::FormatError {
                    line,
                    message: "malformed node-count header".into(),
                })?;
                declared = Some(n);
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::FormatError { line, message: format!("expected 2 fields, found {}", fields.len()) });
        }
        let mut pair = [0usize; 2];
        for (slot, field) in pair.iter_mut().zip(&fields) {
            let v: usize = field
                .parse()
                .map_err(|_| Error::FormatError { line, message: format!("'{field}' is not a node index") })?;
            *slot = if one_indexed {
                v.checked_sub(1).ok_or_else(|| Error::FormatError {
                    line,
                    message: "index 0 in a 1-indexed edge list".into(),
                })?
            } else {
                v
            };
        }
        max_index = Some(max_index.unwrap_or(0).max(pair[0]).max(pair[1]));
        edges.push((pair[0], pair[1]));
    }
    let n = match (declared, max_index) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::InvalidGraph(format!("edge endpoint {m} exceeds declared node count {n}")))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    Graph::new(n, edges)
}

pub fn load_edge_list(path: impl AsRef<Path>, one_indexed: bool) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, one_indexed)
}

/// Community assignment with contiguous ids `0..M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    /// Takes labels that must already form the range `0..M`.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let m = labels.iter().copied().max().map_or(0, |x| x + 1);
        let mut seen = vec![false; m];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("community id {missing} is unused")));
        }
        Ok(Partition { labels })
    }

    /// Renumbers arbitrary labels by order of first appearance.
    pub fn from_labels<T: Ord + Clone>(labels: &[T]) -> Self {
        let mut ids = BTreeMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let next = ids.len();
            out.push(*ids.entry(l.clone()).or_insert(next));
        }
        Partition { labels: out }
    }

    /// Every node in one community.
    pub fn single(n: usize) -> Self {
        Partition { labels: vec![0; n] }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_communities(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.n_communities()];
        for (node, &c) in self.labels.iter().enumerate() {
            groups[c].push(node);
        }
        groups
    }

    /// Parses `node label` lines (`#` comments allowed).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut labels: Vec<Option<String>> = vec![None; n];
        for (lineno, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 2 {
                return Err(Error::FormatError { line: lineno + 1, message: "expected 'node label'".into() });
            }
            let node: usize = fields[0]
                .parse()
                .map_err(|_| Error::FormatError { line: lineno + 1, message: format!("bad node '{}'", fields[0]) })?;
            if node >= n {
                return Err(Error::IndexError { index: node, len: n });
            }
            labels[node] = Some(fields[1].to_string());
        }
        let labels: Vec<String> = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::InvalidPartition(format!("node {i} has no label"))))
            .collect::<Result<_>>()?;
        Ok(Partition::from_labels(&labels))
    }

    pub fn to_text(&self) -> String {
        self.labels.iter().enumerate().map(|(i, l)| format!("{i} {l}\n")).collect()
    }
}

/// Erdős–Rényi graph: every pair present independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability("p", p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph { n, edges })
}

/// Stochastic block model with communities of the given sizes.
pub fn sbm(sizes: &[usize], p_within: f64, p_between: f64, seed: u64) -> Result<(Graph, Partition)> {
    check_probability("p_w", p_within)?;
    check_probability("p_b", p_between)?;
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::InvalidParameter("community sizes must be positive".into()));
    }
    let labels: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| std::iter::repeat_n(c, s)).collect();
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_within } else { p_between };
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok((Graph { n, edges }, Partition { labels }))
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")))
    }
}

/// Newman modularity `Q = (1/2m) sum_ij [A_ij - d_i d_j / 2m] delta(c_i, c_j)`.
pub fn modularity(g: &Graph, part: &Partition) -> Result<f64> {
    if part.len() != g.n() {
        return Err(Error::InvalidPartition(format!("partition covers {} of {} nodes", part.len(), g.n())));
    }
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return Err(Error::DegenerateGraph("modularity is undefined without edges".into()));
    }
    let labels = part.labels();
    let mut internal = vec![0.0; part.n_communities()];
    let mut degree_sum = vec![0.0; part.n_communities()];
    for &(a, b) in g.edges() {
        if labels[a] == labels[b] {
            internal[labels[a]] += 1.0;
        }
    }
    for (node, d) in g.degrees().into_iter().enumerate() {
        degree_sum[labels[node]] += d as f64;
    }
    Ok(internal.iter().zip(&degree_sum).map(|(l, d)| l / m - (d / (2.0 * m)).powi(2)).sum())
}

/// Local clustering coefficient of every node (0 for degree < 2).
pub fn local_clustering(g: &Graph) -> Vec<f64> {
    let t = g.triangles();
    g.degrees()
        .iter()
        .zip(&t)
        .map(|(&k, &tri)| if k < 2 { 0.0 } else { tri as f64 / (k * (k - 1) / 2) as f64 })
        .collect()
}

/// Mean local clustering per occurring degree.
pub fn clustering_spectrum(g: &Graph) -> BTreeMap<usize, f64> {
    spectrum_from(&g.degrees(), &g.triangles())
}

pub(crate) fn spectrum_from(degrees: &[usize], triangles: &[usize]) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (&k, &t) in degrees.iter().zip(triangles) {
        let c = if k < 2 { 0.0 } else { t as f64 / (k * (k - 1) / 2) as f64 };
        let e = acc.entry(k).or_insert((0.0, 0));
        e.0 += c;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, count))| (k, s / count as f64)).collect()
}

/// L1 distance between two clustering spectra over the union of degrees.
pub fn spectrum_distance(a: &BTreeMap<usize, f64>, b: &BTreeMap<usize, f64>) -> f64 {
    let mut keys: Vec<usize> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    keys.iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_laplacians() {
        let g = Graph::path(2);
        assert_eq!(g.laplacian(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let tri = Graph::complete(3);
        let l = tri.laplacian();
        let mut eig: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(eig[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[2], 3.0, epsilon = 1e-12);
        assert_eq!(Graph::empty(4).laplacian(), DMatrix::zeros(4, 4));
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(Error::InvalidGraph(_))));
        assert!(matches!(Graph::new(2, [(0, 2)]), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn er_extremes() {
        assert_eq!(erdos_renyi(30, 1.0, 9).unwrap().edge_count(), 435);
        assert_eq!(erdos_renyi(30, 0.0, 9).unwrap().edge_count(), 0);
        assert!(erdos_renyi(30, 1.5, 9).is_err());
    }

    #[test]
    fn er_edge_count_statistics() {
        // Binomial(435, 1/2): sigma = sqrt(435)/2
        let sigma = 435f64.sqrt() / 2.0;
        let mut total = 0.0;
        for seed in 0..100 {
            let m = erdos_renyi(30, 0.5, seed).unwrap().edge_count() as f64;
            assert!((m - 217.5).abs() <= 4.0 * sigma, "seed {seed}: {m} edges");
            total += m;
        }
        let mean_degree = 2.0 * total / 100.0 / 30.0;
        assert!((mean_degree - 14.5).abs() < 0.3, "mean degree {mean_degree}");
    }

    #[test]
    fn generators_are_reproducible() {
        assert_eq!(erdos_renyi(25, 0.3, 4).unwrap(), erdos_renyi(25, 0.3, 4).unwrap());
        assert_eq!(sbm(&[6, 7], 0.8, 0.1, 2).unwrap(), sbm(&[6, 7], 0.8, 0.1, 2).unwrap());
        assert_ne!(erdos_renyi(25, 0.3, 4).unwrap(), erdos_renyi(25, 0.3, 5).unwrap());
    }

    #[test]
    fn sbm_disjoint_cliques() {
        let (g, p) = sbm(&[5, 5], 1.0, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert_eq!(g.component_count(), 2);
        assert_eq!(p.n_communities(), 2);
        assert_abs_diff_eq!(modularity(&g, &p).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn sbm_inter_community_edges() {
        let mut total = 0usize;
        for seed in 0..200 {
            let (g, p) = sbm(&[10, 10], 0.75, 0.025, seed).unwrap();
            total += g.edges().iter().filter(|&&(a, b)| p.labels()[a] != p.labels()[b]).count();
        }
        let mean = total as f64 / 200.0;
        // Binomial(100, 0.025) mean 2.5, sd of the mean ~0.11
        assert!((mean - 2.5).abs() < 0.5, "mean inter-community edges {mean}");
        assert!(sbm(&[3, 0], 0.5, 0.5, 0).is_err());
        assert!(sbm(&[3, 3], 1.2, 0.5, 0).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let g = parse_edge_list("0 1\n1 2", false).unwrap();
        assert_eq!(g, Graph::path(3));
        let g = parse_edge_list("# comment\n1 2 # trailing\n2 3\n", true).unwrap();
        assert_eq!(g, Graph::path(3));
        assert!(matches!(parse_edge_list("0 x\n", false), Err(Error::FormatError { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n", false), Err(Error::FormatError { .. })));
        assert!(matches!(parse_edge_list("0 1\n1 0\n", false), Err(Error::InvalidGraph(_))));
        assert!(matches!(parse_edge_list("2 2\n", false), Err(Error::InvalidGraph(_))));
        let with_isolated = parse_edge_list("# nodes 5\n0 1\n", false).unwrap();
        assert_eq!(with_isolated.n(), 5);
        let back = parse_edge_list(&with_isolated.to_edge_list(), false).unwrap();
        assert_eq!(back, with_isolated);
    }

    #[test]
    fn modularity_edge_cases() {
        let g = Graph::complete(6);
        assert_abs_diff_eq!(modularity(&g, &Partition::single(6)).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(modularity(&Graph::empty(3), &Partition::single(3)), Err(Error::DegenerateGraph(_))));
        let (g, p) = sbm(&[4, 5, 3], 0.9, 0.2, 7).unwrap();
        let relabeled: Vec<usize> = p.labels().iter().map(|&l| 2 - l).collect();
        let q1 = modularity(&g, &p).unwrap();
        let q2 = modularity(&g, &Partition::new(relabeled).unwrap()).unwrap();
        assert_abs_diff_eq!(q1, q2, epsilon = 1e-15);
    }

    #[test]
    fn clustering_of_complete_and_star() {
        let c = clustering_spectrum(&Graph::complete(5));
        assert_eq!(c.len(), 1);
        assert_abs_diff_eq!(c[&4], 1.0);
        let c = clustering_spectrum(&Graph::star(5));
        assert_abs_diff_eq!(c[&5], 0.0);
        assert_abs_diff_eq!(c[&1], 0.0);
    }

    #[test]
    fn partitions() {
        assert!(Partition::new(vec![0, 2, 2]).is_err());
        let p = Partition::from_labels(&["b", "a", "b", "c"]);
        assert_eq!(p.labels(), &[0, 1, 0, 2]);
        let parsed = Partition::parse("0 x\n1 y\n2 x\n", 3).unwrap();
        assert_eq!(parsed.labels(), &[0, 1, 0]);
        assert!(Partition::parse("0 x\n", 2).is_err());
        assert_eq!(Partition::parse(&p.to_text(), 4).unwrap(), p);
    }
}
