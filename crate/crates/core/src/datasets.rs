//! Empirical networks shipped with the crate.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Graph, Partition};

const KARATE_EDGES: &str = include_str!("../data/karate.edges");
const KARATE_PARTITION: &str = include_str!("../data/karate.partition");

/// Zachary's karate club (34 nodes, 78 edges) with the two factions after
/// the split.
pub fn karate() -> Result<(Graph, Partition)> {
    let g = parse_edge_list(KARATE_EDGES, false)?;
    let p = Partition::parse(KARATE_PARTITION, g.n())?;
    Ok((g, p))
}

/// Directory searched for data files that are not compiled in:
/// `GAUSSNET_DATA_DIR` if set, else this crate's `data/` directory.
pub fn data_dir() -> PathBuf {
    std::env::var_os("GAUSSNET_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")))
}

/// Adjective-noun adjacency network (112 nodes, 425 edges), read from
/// `adjnoun.edges` in [`data_dir`].
pub fn adjnoun() -> Result<Graph> {
    let path = data_dir().join("adjnoun.edges");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text, false)
}

/// Names accepted by [`load`].
pub const NAMES: [&str; 2] = ["karate", "adjnoun"];

/// Loads a bundled network by name.
pub fn load(name: &str) -> Result<Graph> {
    match name {
        "karate" => Ok(karate()?.0),
        "adjnoun" => adjnoun(),
        other => Err(Error::InvalidParameter(format!("unknown dataset '{other}' (known: {})", NAMES.join(", ")))),
    }
}
