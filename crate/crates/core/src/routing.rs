//! Pairwise transfer fidelities over many normal modes and the routing
//! statistics derived from them.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::NetworkModel;
use crate::error::{Error, Result};
use crate::graph::{modularity, Graph, Partition};
use crate::protocols::{run_transfer, CouplingRule, Payload, ProtocolKind, ProtocolParams, TransferSpec, Window};

/// Which sender/receiver pairs to evaluate for each mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairFilter {
    #[default]
    All,
    /// All pairs among the `m` nodes with the largest `|K[i, mode]|`.
    TopOverlap { m: usize },
    /// `count` distinct pairs drawn uniformly, shared by every mode.
    Sampled { count: usize, seed: u64 },
}

/// Protocol settings shared by every pair of a tensor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorProtocol {
    pub kind: ProtocolKind,
    pub c: u32,
    #[serde(default)]
    pub coupling: CouplingRule,
    pub payload: Payload,
    pub window: Window,
}

/// Index of the unordered pair `i < j` in row-major upper-triangle order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Fidelities `F[mode][i][j]` and nominal transfer times per mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityTensor {
    pub n: usize,
    /// Normal-mode indices covered, in order.
    pub modes: Vec<usize>,
    /// Nominal transfer time of each mode.
    pub times: Vec<f64>,
    /// Per mode, the upper triangle in [`pair_index`] order; `None` marks
    /// pairs that were not evaluated.
    pub values: Vec<Vec<Option<f64>>>,
    pub graph_hash: String,
    pub protocol: TensorProtocol,
    pub omega0: f64,
    pub g: f64,
    pub filter: PairFilter,
    /// Pairs recorded as `F = 0` because a node is decoupled from the mode
    /// or the couplings make the Hamiltonian unbounded.
    pub unusable_pairs: usize,
    pub degenerate: bool,
}

/// Selected pairs for one mode.
fn select_pairs(net: &NetworkModel, mode: usize, filter: &PairFilter) -> Vec<(usize, usize)> {
    let n = net.n();
    match *filter {
        PairFilter::All => all_pairs(n),
        PairFilter::TopOverlap { m } => {
            let k = net.basis().vectors();
            let mut nodes: Vec<usize> = (0..n).collect();
            nodes.sort_by(|&a, &b| k[(b, mode)].abs().total_cmp(&k[(a, mode)].abs()).then(a.cmp(&b)));
            nodes.truncate(m.min(n));
            nodes.sort_unstable();
            let mut pairs = Vec::new();
            for (x, &a) in nodes.iter().enumerate() {
                for &b in &nodes[x + 1..] {
                    pairs.push((a, b));
                }
            }
            pairs
        }
        PairFilter::Sampled { count, seed } => {
            let pairs = all_pairs(n);
            if count >= pairs.len() {
                return pairs;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, pairs.len(), count).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| pairs[i]).collect()
        }
    }
}

/// Runs the transfer protocol for the selected pairs of every listed mode.
/// The lower node index is the sender. Work is spread over the current
/// rayon pool; the result does not depend on the number of threads.
pub fn pairwise_fidelity_tensor(
    net: &NetworkModel,
    modes: &[usize],
    protocol: &TensorProtocol,
    filter: &PairFilter,
) -> Result<FidelityTensor> {
    let n = net.n();
    if n < 2 {
        return Err(Error::DegenerateGraph("need at least two nodes".into()));
    }
    protocol.payload.validate()?;
    protocol.window.validate()?;
    let mut times = Vec::with_capacity(modes.len());
    for &m in modes {
        let params = ProtocolParams::new(protocol.kind, protocol.c, m, net.mode_frequency(m)?)?;
        times.push(params.nominal_time());
    }
    let tasks: Vec<(usize, usize, usize)> = modes
        .iter()
        .enumerate()
        .flat_map(|(pos, &m)| select_pairs(net, m, filter).into_iter().map(move |(i, j)| (pos, i, j)))
        .collect();
    let outcomes: Vec<Result<(f64, bool, bool)>> = tasks
        .par_iter()
        .map(|&(pos, i, j)| {
            let spec = TransferSpec { kind: protocol.kind, c: protocol.c, mode: modes[pos], sender: i, receiver: j, coupling: protocol.coupling };
            match run_transfer(net, &spec, &protocol.payload, &protocol.window) {
                Ok(r) => Ok((r.fidelity_best, false, r.degenerate)),
                Err(Error::NodeDecoupledFromMode { .. }) | Err(Error::NonPhysicalCoupling { .. }) => Ok((0.0, true, false)),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut values = vec![vec![None; n * (n - 1) / 2]; modes.len()];
    let mut unusable_pairs = 0;
    let mut degenerate = net.basis().has_degeneracy();
    for (&(pos, i, j), outcome) in tasks.iter().zip(outcomes) {
        let (f, unusable, deg) = outcome?;
        values[pos][pair_index(n, i, j)] = Some(f);
        unusable_pairs += unusable as usize;
        degenerate |= deg;
    }
    Ok(FidelityTensor {
        n,
        modes: modes.to_vec(),
        times,
        values,
        graph_hash: format!("{:016x}", net.graph().content_hash()),
        protocol: *protocol,
        omega0: net.omega0(),
        g: net.g(),
        filter: *filter,
        unusable_pairs,
        degenerate,
    })
}

impl FidelityTensor {
    /// Fidelity of pair `(i, j)` over the mode at position `pos`.
    pub fn get(&self, pos: usize, i: usize, j: usize) -> Option<f64> {
        if i == j || i >= self.n || j >= self.n || pos >= self.values.len() {
            return None;
        }
        self.values[pos][pair_index(self.n, i, j)]
    }

    pub fn is_complete(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(Option::is_some))
    }

    /// Evaluated `(i, j, F)` of one mode, `i < j`.
    pub fn evaluated(&self, pos: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        all_pairs(n).into_iter().filter_map(move |(i, j)| self.values[pos][pair_index(n, i, j)].map(|f| (i, j, f)))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: FidelityTensor = serde_json::from_str(text).map_err(|e| Error::FormatError { line: e.line(), message: e.to_string() })?;
        let pairs = t.n * t.n.saturating_sub(1) / 2;
        if t.times.len() != t.modes.len() || t.values.len() != t.modes.len() || t.values.iter().any(|v| v.len() != pairs) {
            return Err(Error::FormatError { line: 0, message: "tensor dimensions are inconsistent".into() });
        }
        Ok(t)
    }

    fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteTensor("some pairs were filtered out".into()))
        }
    }
}

/// Node capacities `C_i = sum_j sum_n F^n_ij / t^n`.
pub fn node_capacity(t: &FidelityTensor) -> Result<Vec<f64>> {
    t.require_complete()?;
    let mut c = vec![0.0; t.n];
    for pos in 0..t.modes.len() {
        for (i, j, f) in t.evaluated(pos) {
            let rate = f / t.times[pos];
            c[i] += rate;
            c[j] += rate;
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxCapacity {
    pub value: f64,
    pub per_node: f64,
    /// Set when pairs were filtered, so `value` bounds the true maximum
    /// from below.
    pub lower_bound: bool,
}

/// Maximal throughput `C_max = sum_n max_ij F^n_ij / t^n`.
pub fn max_capacity(t: &FidelityTensor) -> MaxCapacity {
    let value: f64 = (0..t.modes.len())
        .map(|pos| t.evaluated(pos).map(|(_, _, f)| f).fold(0.0, f64::max) / t.times[pos])
        .sum();
    MaxCapacity { value, per_node: value / t.n as f64, lower_bound: !t.is_complete() }
}

/// Per mode, the fraction of evaluated pairs with `F > threshold`.
pub fn good_transfer_fraction(t: &FidelityTensor, threshold: f64) -> Vec<f64> {
    (0..t.modes.len())
        .map(|pos| {
            let (mut good, mut total) = (0usize, 0usize);
            for (_, _, f) in t.evaluated(pos) {
                total += 1;
                good += (f > threshold) as usize;
            }
            if total == 0 {
                0.0
            } else {
                good as f64 / total as f64
            }
        })
        .collect()
}

fn check_partition(t: &FidelityTensor, part: &Partition) -> Result<()> {
    if part.len() != t.n {
        return Err(Error::InvalidPartition(format!("partition covers {} nodes, tensor has {}", part.len(), t.n)));
    }
    Ok(())
}

/// Mean fidelity between (and within) communities for one mode: entry
/// `[a][b]` averages the evaluated pairs with one node in `a` and the other
/// in `b`.
pub fn community_block_means(t: &FidelityTensor, part: &Partition, pos: usize) -> Result<Vec<Vec<Option<f64>>>> {
    check_partition(t, part)?;
    let c = part.n_communities();
    let mut sum = vec![vec![0.0; c]; c];
    let mut count = vec![vec![0usize; c]; c];
    let labels = part.labels();
    for (i, j, f) in t.evaluated(pos) {
        let (a, b) = (labels[i], labels[j]);
        sum[a][b] += f;
        count[a][b] += 1;
        if a != b {
            sum[b][a] += f;
            count[b][a] += 1;
        }
    }
    Ok((0..c)
        .map(|a| (0..c).map(|b| (count[a][b] > 0).then(|| sum[a][b] / count[a][b] as f64)).collect())
        .collect())
}

/// Ranked community statistics of one mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommunityReport {
    pub mode: usize,
    pub best: f64,
    pub top_two: f64,
    pub worst: f64,
    pub rest: f64,
    /// Communities by descending within-community mean fidelity.
    pub ranking: Vec<usize>,
}

/// Best, top-two, worst and rest statistics for the first `modes` modes of
/// the tensor.
pub fn community_fidelity_report(t: &FidelityTensor, part: &Partition, modes: usize) -> Result<Vec<CommunityReport>> {
    check_partition(t, part)?;
    if part.n_communities() < 2 {
        return Err(Error::InvalidPartition("need at least two communities".into()));
    }
    if modes > t.modes.len() {
        return Err(Error::IndexError { index: modes, len: t.modes.len() });
    }
    let labels = part.labels();
    let mut out = Vec::with_capacity(modes);
    for pos in 0..modes {
        let blocks = community_block_means(t, part, pos)?;
        let mut ranked: Vec<(usize, f64)> = (0..part.n_communities()).filter_map(|a| blocks[a][a].map(|f| (a, f))).collect();
        if ranked.len() < 2 {
            return Err(Error::InvalidPartition("fewer than two communities have evaluated internal pairs".into()));
        }
        ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        let top = [ranked[0].0, ranked[1].0];
        let (mut in_sum, mut in_n, mut out_sum, mut out_n) = (0.0, 0usize, 0.0, 0usize);
        for (i, j, f) in t.evaluated(pos) {
            if top.contains(&labels[i]) && top.contains(&labels[j]) {
                in_sum += f;
                in_n += 1;
            } else {
                out_sum += f;
                out_n += 1;
            }
        }
        let mean = |s: f64, n: usize| if n == 0 { f64::NAN } else { s / n as f64 };
        out.push(CommunityReport {
            mode: t.modes[pos],
            best: ranked[0].1,
            top_two: mean(in_sum, in_n),
            worst: ranked[ranked.len() - 1].1,
            rest: mean(out_sum, out_n),
            ranking: ranked.iter().map(|r| r.0).collect(),
        });
    }
    Ok(out)
}

/// Upper bound on the number of maximal cliques collected per mode.
const MAX_CLIQUES: usize = 100_000;

/// Maximal cliques (size >= 2) of the graph given by adjacency sets.
fn maximal_cliques(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    fn expand(
        adj: &[BTreeSet<usize>],
        r: &mut Vec<usize>,
        p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if out.len() >= MAX_CLIQUES {
            return;
        }
        if p.is_empty() {
            if x.is_empty() && r.len() >= 2 {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = *p.union(&x).max_by_key(|&&u| (p.intersection(&adj[u]).count(), std::cmp::Reverse(u))).unwrap();
        let candidates: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
        let mut p = p;
        for v in candidates {
            r.push(v);
            let np = p.intersection(&adj[v]).copied().collect();
            let nx = x.intersection(&adj[v]).copied().collect();
            expand(adj, r, np, nx, out);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    let all: BTreeSet<usize> = (0..adj.len()).filter(|&v| !adj[v].is_empty()).collect();
    expand(adj, &mut Vec::new(), all, BTreeSet::new(), &mut out);
    out
}

/// Settings of [`fidelity_based_partition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupingParams {
    pub threshold: f64,
    /// Tensor positions of the modes whose fidelities define groups.
    pub positions: Vec<usize>,
    /// Smallest number of fresh nodes a clique must bring to found a group.
    #[serde(default = "default_min_group")]
    pub min_group: usize,
}

fn default_min_group() -> usize {
    2
}

/// Groups nodes so that every pair inside a group transfers with
/// `F > threshold` over some common mode.
///
/// For each listed mode (the centre-of-mass mode, index 0, is skipped) the
/// maximal cliques of the threshold graph are collected. Cliques are taken
/// greedily, largest first and then by lowest node, each founding a group
/// from its still unassigned nodes. Nodes belonging to several groups'
/// cliques, and nodes in no group, are then visited in index order and
/// placed in the candidate group with the highest modularity. Without any
/// group the result is a single community.
pub fn fidelity_based_partition(t: &FidelityTensor, graph: &Graph, params: &GroupingParams) -> Result<Partition> {
    if graph.n() != t.n {
        return Err(Error::InvalidPartition(format!("graph has {} nodes, tensor has {}", graph.n(), t.n)));
    }
    let mut cliques: BTreeSet<Vec<usize>> = BTreeSet::new();
    for &pos in &params.positions {
        if pos >= t.modes.len() {
            return Err(Error::IndexError { index: pos, len: t.modes.len() });
        }
        if t.modes[pos] == 0 {
            continue;
        }
        let mut adj = vec![BTreeSet::new(); t.n];
        for (i, j, f) in t.evaluated(pos) {
            if f > params.threshold {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        cliques.extend(maximal_cliques(&adj));
    }
    let mut ordered: Vec<Vec<usize>> = cliques.into_iter().collect();
    ordered.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let min_group = params.min_group.max(1);
    let mut label: Vec<Option<usize>> = vec![None; t.n];
    let mut candidates: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t.n];
    let mut groups = 0;
    for clique in &ordered {
        let free: Vec<usize> = clique.iter().copied().filter(|&v| label[v].is_none()).collect();
        if free.len() < min_group {
            continue;
        }
        for &v in &free {
            label[v] = Some(groups);
        }
        for &v in clique {
            candidates[v].insert(groups);
        }
        groups += 1;
    }
    if groups == 0 {
        return Ok(Partition::single(t.n));
    }
    // unplaced nodes count as one extra community while others are decided
    let score = |label: &[Option<usize>]| {
        let flat: Vec<usize> = label.iter().map(|l| l.unwrap_or(groups)).collect();
        modularity(graph, &Partition::from_labels(&flat))
    };
    for v in 0..t.n {
        let options: Vec<usize> = if label[v].is_none() { (0..groups).collect() } else { candidates[v].iter().copied().collect() };
        if options.len() < 2 && label[v].is_some() {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for c in options {
            label[v] = Some(c);
            let q = score(&label)?;
            if best.is_none_or(|(bq, _)| q > bq + 1e-12) {
                best = Some((q, c));
            }
        }
        label[v] = best.map(|b| b.1);
    }
    let flat: Vec<usize> = label.iter().map(|l| l.unwrap_or(groups)).collect();
    Ok(Partition::from_labels(&flat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;
    use crate::protocols::run_single_step;
    use approx::assert_abs_diff_eq;

    fn protocol() -> TensorProtocol {
        TensorProtocol {
            kind: ProtocolKind::SingleStep,
            c: 3,
            coupling: CouplingRule::Effective,
            payload: Payload::Squeezed { r: 1.0, phi: 0.0 },
            window: Window::nominal(),
        }
    }

    fn synthetic(n: usize, modes: usize, f: impl Fn(usize, usize, usize) -> f64) -> FidelityTensor {
        let values = (0..modes)
            .map(|m| all_pairs(n).into_iter().map(|(i, j)| Some(f(m, i, j))).collect())
            .collect();
        FidelityTensor {
            n,
            modes: (0..modes).collect(),
            times: vec![2.0; modes],
            values,
            graph_hash: String::new(),
            protocol: protocol(),
            omega0: 1.0,
            g: 1.0,
            filter: PairFilter::All,
            unusable_pairs: 0,
            degenerate: false,
        }
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 7;
        let idx: Vec<usize> = all_pairs(n).iter().map(|&(i, j)| pair_index(n, i, j)).collect();
        assert_eq!(idx, (0..21).collect::<Vec<_>>());
        assert_eq!(pair_index(n, 5, 2), pair_index(n, 2, 5));
    }

    #[test]
    fn two_node_tensor_matches_direct_run() {
        let net = NetworkModel::new(Graph::path(2), 1.0, 1.0).unwrap();
        let t = pairwise_fidelity_tensor(&net, &[0], &protocol(), &PairFilter::All).unwrap();
        let direct = run_single_step(&net, 0, 1, 0, 3, &protocol().payload, &Window::nominal()).unwrap();
        assert_eq!(t.get(0, 0, 1), Some(direct.fidelity_best));
        assert_eq!(t.get(0, 1, 0), t.get(0, 0, 1));
        assert_abs_diff_eq!(t.times[0], 7.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn capacities_closed_forms() {
        let zero = synthetic(5, 3, |_, _, _| 0.0);
        assert_eq!(node_capacity(&zero).unwrap(), vec![0.0; 5]);
        assert_eq!(max_capacity(&zero).value, 0.0);
        let n = 6;
        let ones = synthetic(n, n, |_, _, _| 1.0);
        for c in node_capacity(&ones).unwrap() {
            assert_abs_diff_eq!(c, (n - 1) as f64 * n as f64 / 2.0, epsilon = 1e-12);
        }
        let single = synthetic(4, 1, |_, i, j| (i + j) as f64 / 10.0);
        assert_abs_diff_eq!(max_capacity(&single).value, 0.5 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn filtered_tensor_is_incomplete() {
        let g = erdos_renyi(10, 0.5, 2).unwrap();
        let net = NetworkModel::new(g, 1.0, 1.0).unwrap();
        let full = pairwise_fidelity_tensor(&net, &[0, 1, 2], &protocol(), &PairFilter::All).unwrap();
        let part = pairwise_fidelity_tensor(&net, &[0, 1, 2], &protocol(), &PairFilter::TopOverlap { m: 4 }).unwrap();
        assert!(matches!(node_capacity(&part), Err(Error::IncompleteTensor(_))));
        assert!(max_capacity(&part).lower_bound);
        assert!(max_capacity(&full).value >= max_capacity(&part).value);
        assert_eq!(part.evaluated(1).count(), 6);
        let sampled = pairwise_fidelity_tensor(&net, &[0], &protocol(), &PairFilter::Sampled { count: 9, seed: 1 }).unwrap();
        assert_eq!(sampled.evaluated(0).count(), 9);
        for (i, j, f) in sampled.evaluated(0) {
            assert_eq!(Some(f), full.get(0, i, j));
        }
    }

    #[test]
    fn good_fraction_extremes() {
        let t = synthetic(5, 2, |m, i, _| if m == 0 { 0.9 } else { i as f64 / 5.0 });
        assert_eq!(good_transfer_fraction(&t, 1.01), vec![0.0, 0.0]);
        assert_eq!(good_transfer_fraction(&t, 0.8)[0], 1.0);
        assert_abs_diff_eq!(good_transfer_fraction(&t, 0.1)[1], 0.6, epsilon = 1e-15);
    }

    #[test]
    fn report_on_uniform_and_blocks() {
        let part = Partition::new(vec![0, 0, 0, 1, 1, 1, 2, 2, 2]).unwrap();
        let flat = synthetic(9, 1, |_, _, _| 0.7);
        let r = &community_fidelity_report(&flat, &part, 1).unwrap()[0];
        for v in [r.best, r.top_two, r.worst, r.rest] {
            assert_abs_diff_eq!(v, 0.7, epsilon = 1e-12);
        }
        let labels = part.labels().to_vec();
        let t = synthetic(9, 1, move |_, i, j| if labels[i] == labels[j] { 1.0 - 0.1 * labels[i] as f64 } else { 0.0 });
        let r = &community_fidelity_report(&t, &part, 1).unwrap()[0];
        assert_eq!(r.ranking, vec![0, 1, 2]);
        assert_abs_diff_eq!(r.best, 1.0);
        assert_abs_diff_eq!(r.worst, 0.8, epsilon = 1e-12);
        // union of the top two: 6 inside pairs of value ~1, 9 cross pairs of 0
        assert_abs_diff_eq!(r.top_two, (3.0 + 3.0 * 0.9) / 15.0, epsilon = 1e-12);
        assert!(community_fidelity_report(&t, &Partition::single(9), 1).is_err());
    }

    #[test]
    fn partition_recovers_disjoint_blocks() {
        let g = Graph::new(8, [(0, 1), (1, 2), (2, 3), (0, 3), (4, 5), (5, 6), (6, 7), (4, 7), (3, 4)]).unwrap();
        let t = synthetic(8, 2, |_, i, j| if (i < 4) == (j < 4) { 1.0 } else { 0.1 });
        let params = |threshold| GroupingParams { threshold, positions: vec![0, 1], min_group: 2 };
        let p = fidelity_based_partition(&t, &g, &params(0.8)).unwrap();
        assert_eq!(p.labels(), &[0, 0, 0, 0, 1, 1, 1, 1]);
        let p = fidelity_based_partition(&t, &g, &params(1.5)).unwrap();
        assert_eq!(p.n_communities(), 1);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = erdos_renyi(6, 0.6, 9).unwrap();
        let net = NetworkModel::new(g, 1.0, 1.0).unwrap();
        let t = pairwise_fidelity_tensor(&net, &[0, 3], &protocol(), &PairFilter::TopOverlap { m: 3 }).unwrap();
        let back = FidelityTensor::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(FidelityTensor::from_json("{}").is_err());
    }
}
