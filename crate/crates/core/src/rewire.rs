//! Degree-preserving randomization by double-edge swaps.
//!
//! Four ensembles are supported. `Pk` keeps the degree sequence, `Pkk`
//! additionally keeps the joint degree distribution `P(k, k')` by only
//! swapping endpoints of equal degree. The `*Ck` variants follow the
//! randomization with simulated annealing over the same swap moves, driving
//! the clustering spectrum `c(k)` back toward that of the input graph.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{clustering_spectrum, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewireMode {
    Pk,
    Pkk,
    PkCk,
    PkkCk,
}

impl RewireMode {
    pub const ALL: [RewireMode; 4] = [RewireMode::Pk, RewireMode::Pkk, RewireMode::PkCk, RewireMode::PkkCk];

    pub fn keeps_joint_degrees(self) -> bool {
        matches!(self, RewireMode::Pkk | RewireMode::PkkCk)
    }

    pub fn targets_clustering(self) -> bool {
        matches!(self, RewireMode::PkCk | RewireMode::PkkCk)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RewireMode::Pk => "pk",
            RewireMode::Pkk => "pkk",
            RewireMode::PkCk => "pk_ck",
            RewireMode::PkkCk => "pkk_ck",
        }
    }
}

impl fmt::Display for RewireMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RewireMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "pk" => Ok(RewireMode::Pk),
            "pkk" => Ok(RewireMode::Pkk),
            "pk_ck" => Ok(RewireMode::PkCk),
            "pkk_ck" => Ok(RewireMode::PkkCk),
            other => Err(Error::InvalidParameter(format!("unknown rewiring mode '{other}'"))),
        }
    }
}

/// Move budgets and annealing schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewireParams {
    /// Attempted swaps per edge in the randomization phase.
    pub swaps_per_edge: usize,
    /// Attempted annealing moves per edge.
    pub anneal_moves_per_edge: usize,
    pub initial_temperature: f64,
    /// Temperature factor applied after every `|E|` annealing moves.
    pub cooling: f64,
    /// Target L1 distance between clustering spectra.
    pub ck_tol: f64,
}

impl Default for RewireParams {
    fn default() -> Self {
        RewireParams {
            swaps_per_edge: 100,
            anneal_moves_per_edge: 1000,
            initial_temperature: 0.1,
            cooling: 0.99,
            ck_tol: 0.05,
        }
    }
}

/// Annealing ran out of moves before reaching `ck_tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceWarning {
    pub distance: f64,
    pub tolerance: f64,
    pub moves: usize,
}

impl fmt::Display for ConvergenceWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "clustering spectrum distance {:.4} above tolerance {} after {} moves",
            self.distance, self.tolerance, self.moves
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rewired {
    pub graph: Graph,
    /// L1 distance of the clustering spectrum to the input's.
    pub ck_distance: f64,
    pub warning: Option<ConvergenceWarning>,
}

/// Randomizes `g` within the ensemble selected by `mode`.
pub fn rewire(g: &Graph, mode: RewireMode, seed: u64, params: &RewireParams) -> Result<Rewired> {
    if g.edge_count() < 2 {
        return Err(Error::InvalidParameter("rewiring needs at least two edges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SwapState::new(g);
    let target = clustering_spectrum(g);
    let m = g.edge_count();

    for _ in 0..params.swaps_per_edge * m {
        if let Some(mv) = state.propose(&mut rng, mode.keeps_joint_degrees()) {
            state.apply(mv);
        }
    }

    let mut warning = None;
    if mode.targets_clustering() {
        let mut energy = state.distance_to(&target);
        let mut best = (energy, state.edges.clone());
        let mut temperature = params.initial_temperature;
        let budget = params.anneal_moves_per_edge * m;
        let mut moves = 0;
        while moves < budget && best.0 > params.ck_tol {
            moves += 1;
            if let Some(mv) = state.propose(&mut rng, mode.keeps_joint_degrees()) {
                state.apply(mv);
                let trial = state.distance_to(&target);
                let delta = trial - energy;
                if delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp() {
                    energy = trial;
                    if energy < best.0 {
                        best = (energy, state.edges.clone());
                    }
                } else {
                    state.apply(mv.inverse());
                }
            }
            if moves % m == 0 {
                temperature *= params.cooling;
            }
        }
        if best.0 > params.ck_tol {
            warning = Some(ConvergenceWarning { distance: best.0, tolerance: params.ck_tol, moves });
        }
        state = SwapState::new(&Graph::new(g.n(), best.1)?);
    }

    let graph = Graph::new(g.n(), state.edges.iter().copied())?;
    let ck_distance = crate::graph::spectrum_distance(&clustering_spectrum(&graph), &target);
    Ok(Rewired { graph, ck_distance, warning })
}

/// A swap replacing edges `(a, b)` and `(c, d)` by `(a, d)` and `(c, b)`.
#[derive(Clone, Copy, Debug)]
struct Swap {
    first: usize,
    second: usize,
    a: usize,
    b: usize,
    c: usize,
    d: usize,
}

impl Swap {
    fn inverse(self) -> Swap {
        // edges now hold (a, d) at `first` and (c, b) at `second`
        Swap { a: self.a, b: self.d, c: self.c, d: self.b, ..self }
    }
}

struct SwapState {
    edges: Vec<(usize, usize)>,
    adjacent: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
    n: usize,
    degrees: Vec<usize>,
    triangles: Vec<usize>,
    /// Sum of triangle counts over nodes of each degree.
    class_triangles: BTreeMap<usize, i64>,
    class_sizes: BTreeMap<usize, usize>,
}

impl SwapState {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut adjacent = vec![false; n * n];
        for &(a, b) in g.edges() {
            adjacent[a * n + b] = true;
            adjacent[b * n + a] = true;
        }
        let degrees = g.degrees();
        let triangles = g.triangles();
        let mut class_triangles = BTreeMap::new();
        let mut class_sizes = BTreeMap::new();
        for (&k, &t) in degrees.iter().zip(&triangles) {
            *class_triangles.entry(k).or_insert(0) += t as i64;
            *class_sizes.entry(k).or_insert(0) += 1;
        }
        SwapState {
            edges: g.edges().to_vec(),
            adjacent,
            neighbors: g.neighbors(),
            n,
            degrees,
            triangles,
            class_triangles,
            class_sizes,
        }
    }

    fn is_edge(&self, a: usize, b: usize) -> bool {
        self.adjacent[a * self.n + b]
    }

    fn propose(&self, rng: &mut ChaCha8Rng, joint_degrees: bool) -> Option<Swap> {
        let m = self.edges.len();
        let first = rng.random_range(0..m);
        let second = rng.random_range(0..m);
        if first == second {
            return None;
        }
        let (mut a, mut b) = self.edges[first];
        let (mut c, mut d) = self.edges[second];
        if rng.random::<bool>() {
            std::mem::swap(&mut a, &mut b);
        }
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || self.is_edge(a, d) || self.is_edge(c, b) {
            return None;
        }
        if joint_degrees && self.degrees[b] != self.degrees[d] {
            return None;
        }
        Some(Swap { first, second, a, b, c, d })
    }

    fn apply(&mut self, mv: Swap) {
        self.unlink(mv.a, mv.b);
        self.unlink(mv.c, mv.d);
        self.link(mv.a, mv.d);
        self.link(mv.c, mv.b);
        self.edges[mv.first] = (mv.a.min(mv.d), mv.a.max(mv.d));
        self.edges[mv.second] = (mv.c.min(mv.b), mv.c.max(mv.b));
    }

    fn common(&self, u: usize, v: usize) -> Vec<usize> {
        let (small, other) =
            if self.neighbors[u].len() <= self.neighbors[v].len() { (u, v) } else { (v, u) };
        self.neighbors[small].iter().copied().filter(|&w| self.is_edge(w, other)).collect()
    }

    fn bump(&mut self, node: usize, delta: i64) {
        self.triangles[node] = (self.triangles[node] as i64 + delta) as usize;
        *self.class_triangles.get_mut(&self.degrees[node]).expect("degree class") += delta;
    }

    fn unlink(&mut self, u: usize, v: usize) {
        let common = self.common(u, v);
        let k = common.len() as i64;
        self.bump(u, -k);
        self.bump(v, -k);
        for w in common {
            self.bump(w, -1);
        }
        self.adjacent[u * self.n + v] = false;
        self.adjacent[v * self.n + u] = false;
        let pos = self.neighbors[u].iter().position(|&x| x == v).expect("edge present");
        self.neighbors[u].swap_remove(pos);
        let pos = self.neighbors[v].iter().position(|&x| x == u).expect("edge present");
        self.neighbors[v].swap_remove(pos);
    }

    fn link(&mut self, u: usize, v: usize) {
        let common = self.common(u, v);
        let k = common.len() as i64;
        self.bump(u, k);
        self.bump(v, k);
        for w in common {
            self.bump(w, 1);
        }
        self.adjacent[u * self.n + v] = true;
        self.adjacent[v * self.n + u] = true;
        self.neighbors[u].push(v);
        self.neighbors[v].push(u);
    }

    fn distance_to(&self, target: &BTreeMap<usize, f64>) -> f64 {
        self.class_triangles
            .iter()
            .map(|(&k, &t)| {
                let c = if k < 2 { 0.0 } else { t as f64 / (self.class_sizes[&k] * k * (k - 1) / 2) as f64 };
                (c - target.get(&k).copied().unwrap_or(0.0)).abs()
            })
            .sum()
    }
}
