use std::collections::BTreeMap;
use std::f64::consts::PI;

use gaussnet_core::datasets::karate;
use gaussnet_core::graph::{clustering_spectrum, modularity};
use gaussnet_core::rewire::rewire;
use gaussnet_core::routing::{node_capacity, pairwise_fidelity_tensor};
use gaussnet_core::{
    CouplingRule, Graph, NetworkModel, PairFilter, Payload, ProtocolKind, RewireMode, RewireParams, TensorProtocol, Window,
};

/// Clustering spectrum from explicit enumeration of node triples.
fn brute_force_spectrum(g: &Graph) -> BTreeMap<usize, f64> {
    let n = g.n();
    let deg = g.degrees();
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| g.has_edge(u, v)).collect();
        let mut closed = 0usize;
        for a in 0..nb.len() {
            for b in a + 1..nb.len() {
                if g.has_edge(nb[a], nb[b]) {
                    closed += 1;
                }
            }
        }
        let k = deg[v];
        let c = if k < 2 { 0.0 } else { closed as f64 / (k * (k - 1) / 2) as f64 };
        let e = acc.entry(k).or_insert((0.0, 0));
        e.0 += c;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}

#[test]
fn karate_clustering_spectrum_matches_enumeration() {
    let (g, _) = karate().unwrap();
    assert_eq!(clustering_spectrum(&g), brute_force_spectrum(&g));
    assert_eq!(g.triangles().iter().sum::<usize>() / 3, 45);
}

#[test]
fn karate_factions_modularity() {
    let (g, part) = karate().unwrap();
    assert_eq!(part.n_communities(), 2);
    let q = modularity(&g, &part).unwrap();
    assert!((q - 0.3582).abs() < 1e-4, "Q = {q}");
}

#[test]
fn karate_rewiring_keeps_degree_structure() {
    let (g, _) = karate().unwrap();
    let params = RewireParams::default();
    let pk = rewire(&g, RewireMode::Pk, 3, &params).unwrap();
    assert_eq!(pk.graph.degrees(), g.degrees());
    assert_ne!(pk.graph.edges(), g.edges());
    let pkk = rewire(&g, RewireMode::Pkk, 3, &params).unwrap();
    assert_eq!(pkk.graph.joint_degree_census(), g.joint_degree_census());
    for mode in [RewireMode::PkCk, RewireMode::PkkCk] {
        let r = rewire(&g, mode, 3, &params).unwrap();
        assert!(r.ck_distance <= 0.05 || r.warning.is_some(), "{mode}: {}", r.ck_distance);
        assert_eq!(r.graph.degrees(), g.degrees());
    }
}

#[test]
fn karate_tensor_times_and_capacity() {
    let (g, _) = karate().unwrap();
    let net = NetworkModel::new(g, 1.0, 1.0).unwrap();
    let protocol = TensorProtocol {
        kind: ProtocolKind::SingleStep,
        c: 5,
        coupling: CouplingRule::Effective,
        payload: Payload::Squeezed { r: 1.0, phi: 0.0 },
        window: Window::nominal(),
    };
    let t = pairwise_fidelity_tensor(&net, &[0, 1], &protocol, &PairFilter::All).unwrap();
    assert!(t.is_complete());
    for (pos, &m) in t.modes.iter().enumerate() {
        let expected = 11.0 * PI / net.mode_frequency(m).unwrap();
        assert!((t.times[pos] - expected).abs() < 1e-12);
    }
    assert!(t.evaluated(1).all(|(_, _, f)| (0.0..=1.0).contains(&f)));
    let cap = node_capacity(&t).unwrap();
    assert_eq!(cap.len(), 34);
    assert!(cap.iter().all(|c| c.is_finite() && *c >= 0.0));
}
