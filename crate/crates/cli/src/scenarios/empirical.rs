//! Scenarios built around single networks: community structure, good
//! transfers and capacities.

use std::collections::BTreeMap;

use gaussnet_core::dynamics::NetworkModel;
use gaussnet_core::graph::{modularity, Partition};
use gaussnet_core::rewire::rewire;
use gaussnet_core::routing::{
    community_block_means, fidelity_based_partition, good_transfer_fraction, max_capacity, node_capacity as capacities, pairwise_fidelity_tensor,
    FidelityTensor, GroupingParams,
};
use rayon::prelude::*;
use serde_json::json;

use super::{derive_seed, tensor_files, Ctx, Instance, RunError};
use crate::output::{num, ScenarioOutput, Table};
use crate::stats::{mean, quantile, sorted};

/// Offset separating randomized-variant seeds from network-draw seeds.
const VARIANT_KEY: u64 = 1 << 40;

fn frequencies(ctx: &Ctx, inst: &Instance) -> Result<Vec<f64>, RunError> {
    Ok(ctx.model(inst)?.basis().frequencies().iter().copied().collect())
}

/// Mean fidelity of pairs split across communities and of pairs sharing one.
fn between_within(t: &FidelityTensor, part: &Partition, pos: usize) -> (f64, f64) {
    let labels = part.labels();
    let (mut between, mut within) = (Vec::new(), Vec::new());
    for (i, j, f) in t.evaluated(pos) {
        if labels[i] == labels[j] {
            within.push(f);
        } else {
            between.push(f);
        }
    }
    (mean(&between), mean(&within))
}

fn push_blocks(table: &mut Table, name: &str, t: &FidelityTensor, part: &Partition, omegas: &[f64]) -> Result<(), gaussnet_core::Error> {
    for (pos, &m) in t.modes.iter().enumerate() {
        let blocks = community_block_means(t, part, pos)?;
        for a in 0..blocks.len() {
            for b in a..blocks.len() {
                if let Some(f) = blocks[a][b] {
                    table.push(vec![name.into(), m.to_string(), num(omegas[m]), a.to_string(), b.to_string(), num(f)]);
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn karate_communities(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let inst = ctx.instance(0, 0)?;
    let t = ctx.tensor(&inst)?;
    let omegas = frequencies(ctx, &inst)?;
    let original = inst.partition.clone().expect("validated: network has communities");
    let a = &ctx.cfg.analysis;
    let grouping = a.grouping.clone().unwrap_or_else(|| GroupingParams {
        threshold: a.threshold,
        positions: (0..t.modes.len()).collect(),
        min_group: 2,
    });
    let fail = |e: gaussnet_core::Error| ctx.fail(inst.context(), e);
    let found = fidelity_based_partition(&t, &inst.graph, &grouping).map_err(fail)?;
    let q_original = modularity(&inst.graph, &original).map_err(fail)?;
    let q_found = modularity(&inst.graph, &found).map_err(fail)?;

    let mut blocks = Table::new("block_means", &["partition", "mode", "omega", "community_a", "community_b", "mean_fidelity"]);
    push_blocks(&mut blocks, "original", &t, &original, &omegas).map_err(fail)?;
    push_blocks(&mut blocks, "fidelity_based", &t, &found, &omegas).map_err(fail)?;

    let mut split = Table::new("between_within", &["mode", "omega", "between", "within"]);
    let mut between_all = Vec::new();
    for (pos, &m) in t.modes.iter().enumerate() {
        let (between, within) = between_within(&t, &original, pos);
        split.push(vec![m.to_string(), num(omegas[m]), num(between), num(within)]);
        between_all.push(between);
    }

    let deg = inst.graph.degrees();
    let mut nodes = Table::new("partition", &["node", "degree", "original", "fidelity_based"]);
    for v in 0..inst.graph.n() {
        nodes.push(vec![v.to_string(), deg[v].to_string(), original.labels()[v].to_string(), found.labels()[v].to_string()]);
    }

    let mut out = ScenarioOutput::default();
    out.summary.insert("modularity_original".into(), json!(q_original));
    out.summary.insert("modularity_fidelity_based".into(), json!(q_found));
    out.summary.insert("communities_fidelity_based".into(), json!(found.n_communities()));
    out.summary.insert("between_community_mean_by_mode".into(), json!(between_all));
    out.summary.insert("grouping".into(), json!(grouping));
    out.files.push(("fidelity_partition.txt".into(), found.to_text()));
    if ctx.cfg.output.tensors {
        tensor_files(&mut out, &inst, &t).map_err(fail)?;
    }
    out.tables = vec![split, blocks, nodes];
    Ok(out)
}

pub(crate) fn good_transfers(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let a = &ctx.cfg.analysis;
    let instances = ctx.instances()?;
    let results = instances
        .par_iter()
        .map(|inst| Ok((ctx.tensor(inst)?, frequencies(ctx, inst)?)))
        .collect::<Result<Vec<_>, RunError>>()?;

    let mut out = ScenarioOutput::default();
    let mut rows = Table::new("fractions", &["network", "realization", "mode", "omega", "fraction", "pairs"]);
    let mut pooled: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (inst, (t, omegas)) in instances.iter().zip(&results) {
        let fractions = good_transfer_fraction(t, a.threshold);
        for (pos, &m) in t.modes.iter().enumerate() {
            let pairs = t.evaluated(pos).count();
            rows.push(vec![inst.label.clone(), inst.realization.to_string(), m.to_string(), num(omegas[m]), num(fractions[pos]), pairs.to_string()]);
            pooled.entry((inst.index, m)).or_default().push(fractions[pos]);
        }
        if ctx.cfg.output.tensors {
            tensor_files(&mut out, inst, t).map_err(|e| ctx.fail(inst.context(), e))?;
        }
        out.seeds.extend(inst.seed.clone());
    }
    let mut usable = Table::new("usable_modes", &["network", "modes", "modes_above_min_fraction", "usable"]);
    for (k, spec) in ctx.cfg.networks.iter().enumerate() {
        let means: Vec<(usize, f64)> = pooled.range((k, 0)..(k + 1, 0)).map(|(&(_, m), fs)| (m, mean(fs))).collect();
        let good: Vec<usize> = means.iter().filter(|(_, f)| *f >= a.min_fraction).map(|(m, _)| *m).collect();
        let list: Vec<String> = good.iter().map(ToString::to_string).collect();
        let label = spec.display_label();
        usable.push(vec![label.clone(), means.len().to_string(), good.len().to_string(), list.join(";")]);
        out.summary.insert(label, json!({ "modes": means.len(), "modes_above_min_fraction": good.len(), "usable": good }));
    }
    out.summary.insert("threshold".into(), json!(a.threshold));
    out.summary.insert("min_fraction".into(), json!(a.min_fraction));
    out.tables = vec![usable, rows];
    Ok(out)
}

pub(crate) fn node_capacity(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let instances = ctx.instances()?;
    let tensors = instances.par_iter().map(|inst| ctx.tensor(inst)).collect::<Result<Vec<_>, _>>()?;
    let mut out = ScenarioOutput::default();
    let mut nodes = Table::new("nodes", &["network", "realization", "node", "degree", "capacity", "capacity_per_n"]);
    let mut by_degree: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    let mut best: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut degree_range: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (inst, t) in instances.iter().zip(&tensors) {
        let caps = capacities(t).map_err(|e| ctx.fail(inst.context(), e))?;
        let n = inst.graph.n() as f64;
        let deg = inst.graph.degrees();
        for (v, c) in caps.iter().enumerate() {
            nodes.push(vec![inst.label.clone(), inst.realization.to_string(), v.to_string(), deg[v].to_string(), num(*c), num(c / n)]);
            by_degree.entry((inst.index, deg[v])).or_default().push(c / n);
            let e = best.entry(inst.index).or_insert((f64::MIN, 0));
            if c / n > e.0 {
                *e = (c / n, deg[v]);
            }
            let r = degree_range.entry(inst.index).or_insert((usize::MAX, 0));
            *r = (r.0.min(deg[v]), r.1.max(deg[v]));
        }
        if ctx.cfg.output.tensors {
            tensor_files(&mut out, inst, t).map_err(|e| ctx.fail(inst.context(), e))?;
        }
        out.seeds.extend(inst.seed.clone());
    }
    let mut degrees = Table::new("by_degree", &["network", "degree", "mean_capacity_per_n", "nodes"]);
    for (&(k, d), cs) in &by_degree {
        degrees.push(vec![ctx.cfg.networks[k].display_label(), d.to_string(), num(mean(cs)), cs.len().to_string()]);
    }
    for (k, spec) in ctx.cfg.networks.iter().enumerate() {
        let Some(&(cmax, at)) = best.get(&k) else { continue };
        let (dmin, dmax) = degree_range[&k];
        let peak = by_degree.range((k, 0)..(k + 1, 0)).max_by(|x, y| mean(x.1).total_cmp(&mean(y.1)));
        out.summary.insert(
            spec.display_label(),
            json!({
                "max_capacity_per_n": cmax,
                "degree_of_max_capacity": at,
                "degree_of_max_mean_capacity": peak.map(|(&(_, d), _)| d),
                "min_degree": dmin,
                "max_degree": dmax,
            }),
        );
    }
    out.tables = vec![degrees, nodes];
    Ok(out)
}

struct Variant {
    ensemble: usize,
    variant: usize,
    seed: u64,
    c_max: f64,
    per_n: f64,
    lower_bound: bool,
    connected: bool,
    ck_distance: f64,
    warning: Option<String>,
}

pub(crate) fn capacity_benchmark(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let a = &ctx.cfg.analysis;
    let base = ctx.cfg.ensemble.seed.expect("validated: seed present");
    let mut out = ScenarioOutput::default();
    let mut variants_t = Table::new(
        "variants",
        &["network", "ensemble", "variant", "seed", "c_max", "c_max_per_n", "lower_bound", "connected", "ck_distance", "converged"],
    );
    let mut ensembles_t = Table::new(
        "ensembles",
        &["network", "ensemble", "variants", "min", "q1", "median", "q3", "max", "original_per_n", "share_below_original"],
    );
    let mut originals_t = Table::new("original", &["network", "nodes", "edges", "c_max", "c_max_per_n", "lower_bound"]);

    for k in 0..ctx.cfg.networks.len() {
        let inst = ctx.instance(k, 0)?;
        out.seeds.extend(inst.seed.clone());
        let original = max_capacity(&ctx.tensor(&inst)?);
        originals_t.push(vec![
            inst.label.clone(),
            inst.graph.n().to_string(),
            inst.graph.edge_count().to_string(),
            num(original.value),
            num(original.per_node),
            original.lower_bound.to_string(),
        ]);

        let jobs: Vec<(usize, usize)> = (0..a.ensembles.len()).flat_map(|e| (0..ctx.cfg.ensemble.realizations).map(move |v| (e, v))).collect();
        let variants = jobs
            .par_iter()
            .map(|&(e, v)| {
                let mode = a.ensembles[e];
                let seed = derive_seed(base, &[k as u64, VARIANT_KEY + e as u64, v as u64]);
                let what = format!("{} variant {v} ({mode})", inst.context());
                let r = rewire(&inst.graph, mode, seed, &a.rewire).map_err(|err| ctx.fail(&what, err))?;
                let net = NetworkModel::new(r.graph.clone(), ctx.cfg.physics.omega0, ctx.cfg.physics.g).map_err(|err| ctx.fail(&what, err))?;
                let modes = ctx.cfg.protocol.modes.resolve(r.graph.n()).map_err(|err| ctx.fail(&what, err))?;
                let t = pairwise_fidelity_tensor(&net, &modes, &ctx.tensor_protocol(), &inst.pairs).map_err(|err| ctx.fail(&what, err))?;
                let cap = max_capacity(&t);
                Ok(Variant {
                    ensemble: e,
                    variant: v,
                    seed,
                    c_max: cap.value,
                    per_n: cap.per_node,
                    lower_bound: cap.lower_bound,
                    connected: r.graph.component_count() == 1,
                    ck_distance: r.ck_distance,
                    warning: r.warning.map(|w| format!("{what}: {w}")),
                })
            })
            .collect::<Result<Vec<_>, RunError>>()?;

        let mut pooled = Vec::new();
        for (e, mode) in a.ensembles.iter().enumerate() {
            let mine: Vec<&Variant> = variants.iter().filter(|x| x.ensemble == e).collect();
            for x in &mine {
                variants_t.push(vec![
                    inst.label.clone(),
                    mode.to_string(),
                    x.variant.to_string(),
                    x.seed.to_string(),
                    num(x.c_max),
                    num(x.per_n),
                    x.lower_bound.to_string(),
                    x.connected.to_string(),
                    num(x.ck_distance),
                    x.warning.is_none().to_string(),
                ]);
                out.warnings.extend(x.warning.clone());
            }
            let vals = sorted(&mine.iter().map(|x| x.per_n).collect::<Vec<_>>());
            let below = vals.iter().filter(|&&v| v < original.per_node).count() as f64 / vals.len() as f64;
            ensembles_t.push(vec![
                inst.label.clone(),
                mode.to_string(),
                vals.len().to_string(),
                num(vals[0]),
                num(quantile(&vals, 0.25)),
                num(quantile(&vals, 0.5)),
                num(quantile(&vals, 0.75)),
                num(vals[vals.len() - 1]),
                num(original.per_node),
                num(below),
            ]);
            pooled.extend(vals);
        }
        let pooled = sorted(&pooled);
        let q3 = quantile(&pooled, 0.75);
        out.summary.insert(
            inst.label.clone(),
            json!({
                "original_per_n": original.per_node,
                "lower_bound": original.lower_bound,
                "pooled_median": quantile(&pooled, 0.5),
                "pooled_q3": q3,
                "share_below_original": pooled.iter().filter(|&&v| v < original.per_node).count() as f64 / pooled.len() as f64,
                "original_above_pooled_q3": original.per_node > q3,
            }),
        );
    }
    out.tables = vec![ensembles_t, originals_t, variants_t];
    Ok(out)
}
