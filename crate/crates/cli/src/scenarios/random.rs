//! Ensembles of Erdos-Renyi and stochastic-block-model networks.

use std::collections::BTreeMap;

use gaussnet_core::routing::community_fidelity_report;
use rayon::prelude::*;
use serde_json::json;

use super::{tensor_files, Ctx, RunError};
use crate::output::{num, ScenarioOutput, Table};
use crate::stats::{bottleneck_profile, kavg_quartile_means, mean, non_decreasing_within_error, quantile, sorted, DegreePair};

pub(crate) fn er_degree_fidelity(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let instances = ctx.instances()?;
    let tensors = instances.par_iter().map(|inst| ctx.tensor(inst)).collect::<Result<Vec<_>, _>>()?;
    let mut out = ScenarioOutput::default();

    let mut pairs = Table::new("pairs", &["network", "realization", "mode", "i", "j", "k_i", "k_j", "fidelity"]);
    // (network, mode position) -> pair records
    let mut pooled: BTreeMap<(usize, usize), Vec<DegreePair>> = BTreeMap::new();
    for (inst, t) in instances.iter().zip(&tensors) {
        let deg = inst.graph.degrees();
        for (pos, &m) in t.modes.iter().enumerate() {
            for (i, j, f) in t.evaluated(pos) {
                pairs.push(vec![
                    inst.label.clone(),
                    inst.realization.to_string(),
                    m.to_string(),
                    i.to_string(),
                    j.to_string(),
                    deg[i].to_string(),
                    deg[j].to_string(),
                    num(f),
                ]);
                pooled.entry((inst.index, pos)).or_default().push(DegreePair { k_s: deg[i], k_r: deg[j], fidelity: f });
            }
        }
        if ctx.cfg.output.tensors {
            tensor_files(&mut out, inst, t).map_err(|e| ctx.fail(inst.context(), e))?;
        }
        out.seeds.extend(inst.seed.clone());
    }

    let mut kavg = Table::new("kavg", &["network", "mode", "k_avg", "mean_fidelity", "pairs"]);
    let mut both = Table::new("degree_pairs", &["network", "mode", "k_s", "k_r", "mean_fidelity", "pairs"]);
    let labels: Vec<String> = ctx.cfg.networks.iter().map(|n| n.display_label()).collect();
    let modes = |k: usize| tensors.iter().zip(&instances).find(|(_, i)| i.index == k).map(|(t, _)| t.modes.clone()).unwrap_or_default();
    for (&(k, pos), recs) in &pooled {
        let mode = modes(k)[pos];
        let mut by_sum: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        let mut by_pair: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for r in recs {
            by_sum.entry(r.k_s + r.k_r).or_default().push(r.fidelity);
            by_pair.entry((r.k_s, r.k_r)).or_default().push(r.fidelity);
            by_pair.entry((r.k_r, r.k_s)).or_default().push(r.fidelity);
        }
        for (s, fs) in &by_sum {
            kavg.push(vec![labels[k].clone(), mode.to_string(), num(*s as f64 / 2.0), num(mean(fs)), fs.len().to_string()]);
        }
        for ((a, b), fs) in &by_pair {
            both.push(vec![labels[k].clone(), mode.to_string(), a.to_string(), b.to_string(), num(mean(fs)), fs.len().to_string()]);
        }
        if pos == 0 {
            let (lo, hi) = kavg_quartile_means(recs);
            let profile = bottleneck_profile(recs);
            out.summary.insert(
                labels[k].clone(),
                json!({
                    "mode": mode,
                    "pairs": recs.len(),
                    "mean_fidelity": mean(&recs.iter().map(|r| r.fidelity).collect::<Vec<_>>()),
                    "bottom_quartile_kavg_fidelity": lo,
                    "top_quartile_kavg_fidelity": hi,
                    "high_sender_by_receiver_quartile": profile.iter().map(|b| b.mean).collect::<Vec<_>>(),
                    "high_sender_by_receiver_quartile_se": profile.iter().map(|b| b.std_err).collect::<Vec<_>>(),
                    "high_sender_non_decreasing": non_decreasing_within_error(&profile),
                }),
            );
        }
    }
    out.tables = vec![kavg, both, pairs];
    Ok(out)
}

pub(crate) fn sbm_overlaps(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let instances = ctx.instances()?;
    let want = ctx.cfg.analysis.overlap_modes;
    let per_instance = instances
        .par_iter()
        .map(|inst| {
            let net = ctx.model(inst)?;
            let part = inst.partition.as_ref().expect("validated: network has communities");
            let k = net.basis().vectors();
            let members = part.members();
            let rows: Vec<Vec<f64>> = (0..want.min(inst.graph.n()))
                .map(|m| members.iter().map(|nodes| mean(&nodes.iter().map(|&i| k[(i, m)].abs()).collect::<Vec<_>>())).collect())
                .collect();
            Ok((rows, members.iter().map(Vec::len).collect::<Vec<_>>()))
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    let mut out = ScenarioOutput::default();
    let mut table = Table::new("overlaps", &["network", "realization", "mode", "community", "mean_abs_overlap", "nodes"]);
    let mut contrast: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (inst, (rows, sizes)) in instances.iter().zip(&per_instance) {
        for (m, means) in rows.iter().enumerate() {
            for (c, v) in means.iter().enumerate() {
                table.push(vec![inst.label.clone(), inst.realization.to_string(), m.to_string(), c.to_string(), num(*v), sizes[c].to_string()]);
            }
            let hi = means.iter().copied().fold(f64::MIN, f64::max);
            let lo = means.iter().copied().fold(f64::MAX, f64::min);
            contrast.entry((inst.index, m)).or_default().push(lo / hi);
        }
        out.seeds.extend(inst.seed.clone());
    }
    let mut summary_table = Table::new("overlap_contrast", &["network", "mode", "median_min_over_max", "max_min_over_max"]);
    for (&(k, m), ratios) in &contrast {
        let label = ctx.cfg.networks[k].display_label();
        let s = sorted(ratios);
        summary_table.push(vec![label.clone(), m.to_string(), num(quantile(&s, 0.5)), num(s[s.len() - 1])]);
        out.summary.insert(format!("{label} mode {m}"), json!({ "median_min_over_max": quantile(&s, 0.5) }));
    }
    out.tables = vec![summary_table, table];
    Ok(out)
}

pub(crate) fn sbm_modes(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let instances = ctx.instances()?;
    let tensors = instances.par_iter().map(|inst| ctx.tensor(inst)).collect::<Result<Vec<_>, _>>()?;
    let mut out = ScenarioOutput::default();
    let mut per = Table::new("realizations", &["network", "realization", "mode", "best", "top_two", "worst", "rest", "ranking"]);
    let mut pooled: BTreeMap<(usize, usize), Vec<[f64; 4]>> = BTreeMap::new();
    let mut all_pairs: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for (inst, t) in instances.iter().zip(&tensors) {
        for (pos, &m) in t.modes.iter().enumerate() {
            all_pairs.entry((inst.index, m)).or_default().extend(t.evaluated(pos).map(|(_, _, f)| f));
        }
        let part = inst.partition.as_ref().expect("validated: network has communities");
        let report = community_fidelity_report(t, part, t.modes.len()).map_err(|e| ctx.fail(inst.context(), e))?;
        for r in &report {
            let ranking: Vec<String> = r.ranking.iter().map(ToString::to_string).collect();
            per.push(vec![
                inst.label.clone(),
                inst.realization.to_string(),
                r.mode.to_string(),
                num(r.best),
                num(r.top_two),
                num(r.worst),
                num(r.rest),
                ranking.join(";"),
            ]);
            pooled.entry((inst.index, r.mode)).or_default().push([r.best, r.top_two, r.worst, r.rest]);
        }
        if ctx.cfg.output.tensors {
            tensor_files(&mut out, inst, t).map_err(|e| ctx.fail(inst.context(), e))?;
        }
        out.seeds.extend(inst.seed.clone());
    }
    let mut agg = Table::new("modes", &["network", "mode", "all_pairs", "best", "top_two", "worst", "rest", "top_two_above_rest"]);
    for (&(k, mode), rows) in &pooled {
        let label = ctx.cfg.networks[k].display_label();
        let col = |c: usize| mean(&rows.iter().map(|r| r[c]).collect::<Vec<_>>());
        let above = rows.iter().filter(|r| r[1] > r[3]).count() as f64 / rows.len() as f64;
        let overall = mean(&all_pairs[&(k, mode)]);
        agg.push(vec![label.clone(), mode.to_string(), num(overall), num(col(0)), num(col(1)), num(col(2)), num(col(3)), num(above)]);
        out.summary.insert(
            format!("{label} mode {mode}"),
            json!({ "all_pairs": overall, "best": col(0), "top_two": col(1), "worst": col(2), "rest": col(3), "top_two_above_rest": above }),
        );
    }
    out.tables = vec![agg, per];
    Ok(out)
}
