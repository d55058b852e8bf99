//! Scenario configuration files and their validation.

use std::fmt;
use std::path::{Path, PathBuf};

use gaussnet_core::datasets;
use gaussnet_core::protocols::{CouplingRule, Payload, ProtocolKind, Window};
use gaussnet_core::rewire::{RewireMode, RewireParams};
use gaussnet_core::routing::{GroupingParams, PairFilter};
use serde::{Deserialize, Serialize};

use crate::catalog::ScenarioId;

/// One problem found in a config, located by its field path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Parse(Diagnostic),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

impl ConfigError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            ConfigError::Io { path, message } => vec![Diagnostic { path: path.clone(), message: message.clone() }],
            ConfigError::Parse(d) => vec![d.clone()],
            ConfigError::Invalid(ds) => ds.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub networks: Vec<NetworkSpec>,
    #[serde(default)]
    pub physics: Physics,
    pub protocol: ProtocolSpec,
    pub payloads: Vec<Payload>,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    pub output: OutputSpec,
    /// Worker threads; falls back to `GAUSSNET_WORKERS`, then to the
    /// number of available cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub graph: GraphSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Overrides `ensemble.pairs` for this network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairFilter>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    Er {
        n: usize,
        p: f64,
    },
    Sbm {
        sizes: Vec<usize>,
        p_w: f64,
        p_b: f64,
    },
    Dataset {
        name: String,
    },
    /// Edge list file; relative paths are resolved against the config's
    /// directory.
    EdgeList {
        path: PathBuf,
        #[serde(default)]
        one_indexed: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<PathBuf>,
    },
}

impl GraphSource {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, GraphSource::Er { .. } | GraphSource::Sbm { .. })
    }

    pub fn has_partition(&self) -> bool {
        match self {
            GraphSource::Er { .. } => false,
            GraphSource::Sbm { sizes, .. } => sizes.len() >= 2,
            GraphSource::Dataset { name } => name == "karate",
            GraphSource::EdgeList { partition, .. } => partition.is_some(),
        }
    }

    /// Node count when it is known without loading anything.
    pub fn known_size(&self) -> Option<usize> {
        match self {
            GraphSource::Er { n, .. } => Some(*n),
            GraphSource::Sbm { sizes, .. } => Some(sizes.iter().sum()),
            _ => None,
        }
    }
}

impl NetworkSpec {
    pub fn display_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match &self.graph {
            GraphSource::Er { n, p } => format!("er(n={n},p={p})"),
            GraphSource::Sbm { sizes, .. } => format!("sbm(n={})", sizes.iter().sum::<usize>()),
            GraphSource::Dataset { name } => name.clone(),
            GraphSource::EdgeList { path, .. } => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "edge_list".into())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physics {
    pub omega0: f64,
    pub g: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics { omega0: 1.0, g: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    #[serde(default = "default_kind")]
    pub kind: ProtocolKind,
    pub c: u32,
    #[serde(default)]
    pub modes: ModeSelection,
    #[serde(default)]
    pub coupling: CouplingRule,
}

fn default_kind() -> ProtocolKind {
    ProtocolKind::SingleStep
}

/// Normal modes to use, counted from the slowest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSelection {
    All,
    First(usize),
    List(Vec<usize>),
}

impl Default for ModeSelection {
    fn default() -> Self {
        ModeSelection::First(1)
    }
}

impl ModeSelection {
    pub fn resolve(&self, n: usize) -> Result<Vec<usize>, String> {
        match self {
            ModeSelection::All => Ok((0..n).collect()),
            ModeSelection::First(k) if *k <= n => Ok((0..*k).collect()),
            ModeSelection::First(k) => Err(format!("{k} modes requested, network has {n}")),
            ModeSelection::List(v) => match v.iter().find(|&&m| m >= n) {
                Some(m) => Err(format!("mode {m} requested, network has {n}")),
                None => Ok(v.clone()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub pairs: PairFilter,
}

fn one() -> usize {
    1
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec { realizations: 1, seed: None, pairs: PairFilter::All }
    }
}

/// Scenario-specific knobs; each scenario reads the ones it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Values of `c` swept by `ideal-scaling`.
    pub c_values: Vec<u32>,
    /// Protocols traced by `ideal-chain`.
    pub kinds: Vec<ProtocolKind>,
    /// Trajectory samples of `ideal-chain`.
    pub time_points: usize,
    /// End of the `ideal-chain` trajectory in units of `1/omega0`;
    /// defaults to 1.25 times the slowest nominal time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Fidelity above which a transfer counts as good.
    pub threshold: f64,
    /// Fraction of good pairs for a mode to count as usable.
    pub min_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grouping: Option<GroupingParams>,
    /// Slowest modes whose community overlaps are reported.
    pub overlap_modes: usize,
    pub ensembles: Vec<RewireMode>,
    pub rewire: RewireParams,
    /// Redraws allowed for a disconnected random graph.
    pub max_redraws: usize,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            c_values: vec![1, 2, 3, 5, 8],
            kinds: vec![ProtocolKind::SingleStep, ProtocolKind::TwoStep],
            time_points: 301,
            t_max: None,
            threshold: 0.8,
            min_fraction: 0.05,
            grouping: None,
            overlap_modes: 4,
            ensembles: RewireMode::ALL.to_vec(),
            rewire: RewireParams::default(),
            max_redraws: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Also write every fidelity tensor as JSON and long-format CSV.
    #[serde(default)]
    pub tensors: bool,
}

/// Parses config text; errors carry the path of the offending field.
pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse(Diagnostic {
            path: if path == "." { "(root)".into() } else { path },
            message: format!("{inner}"),
        })
    })
}

/// Reads and parses a config file; returns it with the directory that
/// relative input paths refer to.
pub fn load(path: &Path) -> Result<(ScenarioConfig, PathBuf), ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let cfg = parse(&text)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((cfg, base))
}

pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

struct Checker {
    found: Vec<Diagnostic>,
}

impl Checker {
    fn fail(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.found.push(Diagnostic { path: path.into(), message: message.into() });
    }

    fn probability(&mut self, path: String, p: f64) {
        if !(0.0..=1.0).contains(&p) {
            self.fail(path, format!("probability {p} outside [0, 1]"));
        }
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.fail(path, format!("must be positive and finite, got {v}"));
        }
    }
}

impl ScenarioConfig {
    /// Schema-level and cross-field checks. `base` locates relative input
    /// files.
    pub fn validate(&self, base: &Path) -> Result<(), ConfigError> {
        let mut c = Checker { found: Vec::new() };
        let id = self.scenario;

        c.positive("physics.omega0", self.physics.omega0);
        if !(self.physics.g >= 0.0 && self.physics.g.is_finite()) {
            c.fail("physics.g", format!("must be non-negative and finite, got {}", self.physics.g));
        }
        if self.protocol.c == 0 {
            c.fail("protocol.c", "must be at least 1");
        }
        if self.payloads.is_empty() {
            c.fail("payloads", "at least one payload is required");
        }
        for (i, p) in self.payloads.iter().enumerate() {
            if let Err(e) = p.validate() {
                c.fail(format!("payloads[{i}]"), e.to_string());
            }
        }
        if let Err(e) = self.window.validate() {
            c.fail("window", e.to_string());
        }
        if self.ensemble.realizations == 0 {
            c.fail("ensemble.realizations", "must be at least 1");
        }
        if self.workers == Some(0) {
            c.fail("workers", "must be at least 1");
        }
        if !self.analysis.threshold.is_finite() {
            c.fail("analysis.threshold", "must be finite");
        }
        match &self.protocol.modes {
            ModeSelection::First(0) => c.fail("protocol.modes", "selects no mode"),
            ModeSelection::List(v) if v.is_empty() => c.fail("protocol.modes", "selects no mode"),
            _ => {}
        }
        self.check_filter(&mut c, "ensemble.pairs", &self.ensemble.pairs);

        let mut needs_seed = id == ScenarioId::CapacityBenchmark;
        for (i, net) in self.networks.iter().enumerate() {
            let at = format!("networks[{i}]");
            needs_seed |= net.graph.is_stochastic();
            self.check_graph(&mut c, &at, &net.graph, base);
            if let Some(f) = &net.pairs {
                self.check_filter(&mut c, &format!("{at}.pairs"), f);
            }
            if let Some(n) = net.graph.known_size() {
                if let Err(m) = self.protocol.modes.resolve(n) {
                    c.fail("protocol.modes", format!("{m} ({at})"));
                }
            }
        }
        if needs_seed && self.ensemble.seed.is_none() {
            c.fail("ensemble.seed", "a seed is required for stochastic networks and randomized ensembles");
        }

        match id {
            ScenarioId::IdealChain | ScenarioId::IdealScaling => {
                if !self.networks.is_empty() {
                    c.fail("networks", format!("not used by {id}"));
                }
                if id == ScenarioId::IdealChain {
                    if self.analysis.kinds.is_empty() {
                        c.fail("analysis.kinds", "at least one protocol is required");
                    }
                    if self.analysis.time_points < 2 {
                        c.fail("analysis.time_points", "need at least two points");
                    }
                    if let Some(t) = self.analysis.t_max {
                        c.positive("analysis.t_max", t);
                    }
                }
                if id == ScenarioId::IdealScaling && (self.analysis.c_values.is_empty() || self.analysis.c_values.contains(&0)) {
                    c.fail("analysis.c_values", "need one or more values, each at least 1");
                }
            }
            _ => {
                if self.networks.is_empty() {
                    c.fail("networks", format!("{id} needs at least one network"));
                }
            }
        }
        match id {
            ScenarioId::ErDegreeFidelity => {
                for (i, net) in self.networks.iter().enumerate() {
                    if !matches!(net.graph, GraphSource::Er { .. }) {
                        c.fail(format!("networks[{i}].graph.kind"), "er-degree-fidelity uses Erdos-Renyi networks only");
                    }
                }
            }
            ScenarioId::SbmOverlaps | ScenarioId::SbmModes | ScenarioId::KarateCommunities => {
                for (i, net) in self.networks.iter().enumerate() {
                    if !net.graph.has_partition() {
                        c.fail(format!("networks[{i}].graph"), format!("{id} needs a network with at least two known communities"));
                    }
                }
                if id == ScenarioId::SbmOverlaps && self.analysis.overlap_modes == 0 {
                    c.fail("analysis.overlap_modes", "must be at least 1");
                }
                if id == ScenarioId::KarateCommunities {
                    if self.networks.len() > 1 {
                        c.fail("networks", "karate-communities takes a single network");
                    }
                    if let Some(gp) = &self.analysis.grouping {
                        if !gp.threshold.is_finite() {
                            c.fail("analysis.grouping.threshold", "must be finite");
                        }
                        if let ModeSelection::First(k) = self.protocol.modes {
                            if let Some(&p) = gp.positions.iter().find(|&&p| p >= k) {
                                c.fail("analysis.grouping.positions", format!("position {p} beyond the {k} selected modes"));
                            }
                        }
                    }
                }
            }
            ScenarioId::CapacityBenchmark => {
                if self.analysis.ensembles.is_empty() {
                    c.fail("analysis.ensembles", "at least one randomization ensemble is required");
                }
                let r = &self.analysis.rewire;
                if !(r.cooling > 0.0 && r.cooling <= 1.0) {
                    c.fail("analysis.rewire.cooling", format!("must lie in (0, 1], got {}", r.cooling));
                }
                if !(r.initial_temperature > 0.0 && r.initial_temperature.is_finite()) {
                    c.fail("analysis.rewire.initial_temperature", "must be positive");
                }
                if !(r.ck_tol >= 0.0) {
                    c.fail("analysis.rewire.ck_tol", "must be non-negative");
                }
            }
            _ => {}
        }
        if c.found.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(c.found))
        }
    }

    fn check_filter(&self, c: &mut Checker, at: &str, f: &PairFilter) {
        match *f {
            PairFilter::TopOverlap { m } if m < 2 => c.fail(format!("{at}.m"), "must be at least 2"),
            PairFilter::Sampled { count: 0, .. } => c.fail(format!("{at}.count"), "must be at least 1"),
            _ => {}
        }
    }

    fn check_graph(&self, c: &mut Checker, at: &str, g: &GraphSource, base: &Path) {
        match g {
            GraphSource::Er { n, p } => {
                if *n < 2 {
                    c.fail(format!("{at}.graph.n"), "need at least two nodes");
                }
                c.probability(format!("{at}.graph.p"), *p);
            }
            GraphSource::Sbm { sizes, p_w, p_b } => {
                if sizes.is_empty() || sizes.contains(&0) {
                    c.fail(format!("{at}.graph.sizes"), "need one or more non-empty blocks");
                } else if sizes.iter().sum::<usize>() < 2 {
                    c.fail(format!("{at}.graph.sizes"), "need at least two nodes");
                }
                c.probability(format!("{at}.graph.p_w"), *p_w);
                c.probability(format!("{at}.graph.p_b"), *p_b);
            }
            GraphSource::Dataset { name } => {
                if !datasets::NAMES.contains(&name.as_str()) {
                    c.fail(format!("{at}.graph.name"), format!("unknown dataset '{name}' (known: {})", datasets::NAMES.join(", ")));
                } else if name == "adjnoun" {
                    let file = datasets::data_dir().join("adjnoun.edges");
                    if !file.is_file() {
                        c.fail(format!("{at}.graph.name"), format!("dataset file {} not found", file.display()));
                    }
                }
            }
            GraphSource::EdgeList { path, partition, .. } => {
                let file = resolve(base, path);
                if !file.is_file() {
                    c.fail(format!("{at}.graph.path"), format!("file {} not found", file.display()));
                }
                if let Some(p) = partition {
                    let file = resolve(base, p);
                    if !file.is_file() {
                        c.fail(format!("{at}.graph.partition"), format!("file {} not found", file.display()));
                    }
                }
            }
        }
    }

    /// Canonical JSON text; hashed into the manifest.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
