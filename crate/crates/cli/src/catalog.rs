//! The named scenarios and their bundled configs.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    IdealChain,
    IdealScaling,
    ErDegreeFidelity,
    SbmOverlaps,
    SbmModes,
    KarateCommunities,
    GoodTransfers,
    NodeCapacity,
    CapacityBenchmark,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 9] = [
        ScenarioId::IdealChain,
        ScenarioId::IdealScaling,
        ScenarioId::ErDegreeFidelity,
        ScenarioId::SbmOverlaps,
        ScenarioId::SbmModes,
        ScenarioId::KarateCommunities,
        ScenarioId::GoodTransfers,
        ScenarioId::NodeCapacity,
        ScenarioId::CapacityBenchmark,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::IdealChain => "ideal-chain",
            ScenarioId::IdealScaling => "ideal-scaling",
            ScenarioId::ErDegreeFidelity => "er-degree-fidelity",
            ScenarioId::SbmOverlaps => "sbm-overlaps",
            ScenarioId::SbmModes => "sbm-modes",
            ScenarioId::KarateCommunities => "karate-communities",
            ScenarioId::GoodTransfers => "good-transfers",
            ScenarioId::NodeCapacity => "node-capacity",
            ScenarioId::CapacityBenchmark => "capacity-benchmark",
        }
    }

    /// What the scenario's tables show.
    pub fn produces(self) -> &'static str {
        match self {
            ScenarioId::IdealChain => "squeezing efficiency and fidelity over time for both protocols on the isolated three-oscillator chain",
            ScenarioId::IdealScaling => "single-step efficiency and fidelity against c3 for coherent, squeezed and twin-beam payloads",
            ScenarioId::ErDegreeFidelity => "Erdos-Renyi ensembles: mean fidelity over the slowest mode by average and by individual endpoint degree",
            ScenarioId::SbmOverlaps => "modular networks: mean node-to-mode overlap per community for the slowest modes",
            ScenarioId::SbmModes => "modular networks: best, top-two, worst and rest community fidelities per mode",
            ScenarioId::KarateCommunities => "karate club: fidelities within and between factions and a fidelity-based partition with its modularity",
            ScenarioId::GoodTransfers => "fraction of pairs above a fidelity threshold for every normal mode of several networks",
            ScenarioId::NodeCapacity => "node capacity per network size against node degree",
            ScenarioId::CapacityBenchmark => "maximal capacity of a network against its randomized variants (pk, pkk, pk_ck, pkk_ck)",
        }
    }

    /// Bundled config files, relative to the `configs` directory.
    pub fn config_files(self) -> Vec<String> {
        let id = self.as_str();
        let mut files = vec![format!("{id}.desk.json"), format!("{id}.full.json")];
        if self == ScenarioId::CapacityBenchmark {
            files.push(format!("{id}.karate.desk.json"));
            files.push(format!("{id}.karate.full.json"));
        }
        files
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ScenarioId::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

/// Directory holding the bundled configs: `GAUSSNET_CONFIG_DIR` if set,
/// otherwise the one shipped with this crate.
pub fn config_dir() -> PathBuf {
    match std::env::var_os("GAUSSNET_CONFIG_DIR") {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub id: ScenarioId,
    pub produces: &'static str,
    pub configs: Vec<PathBuf>,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let dir = config_dir();
    ScenarioId::ALL
        .into_iter()
        .map(|id| CatalogEntry { id, produces: id.produces(), configs: id.config_files().into_iter().map(|f| dir.join(f)).collect() })
        .collect()
}
