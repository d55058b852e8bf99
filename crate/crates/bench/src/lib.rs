//! Fixtures shared by the benchmarks.

use gaussnet_core::datasets::karate;
use gaussnet_core::graph::sbm;
use gaussnet_core::{CouplingRule, NetworkModel, Payload, ProtocolKind, TensorProtocol, Window};

pub fn karate_model() -> NetworkModel {
    let (g, _) = karate().expect("karate is bundled");
    NetworkModel::new(g, 1.0, 1.0).expect("karate model")
}

/// Four communities of ten nodes.
pub fn sbm_model(seed: u64) -> NetworkModel {
    let (g, _) = sbm(&[10, 10, 10, 10], 0.75, 0.025, seed).expect("valid block model");
    NetworkModel::new(g, 1.0, 1.0).expect("sbm model")
}

pub fn protocol(c: u32, window: Window) -> TensorProtocol {
    TensorProtocol {
        kind: ProtocolKind::SingleStep,
        c,
        coupling: CouplingRule::Effective,
        payload: Payload::Squeezed { r: 1.0, phi: 0.0 },
        window,
    }
}
