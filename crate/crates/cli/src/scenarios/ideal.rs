//! Transfers through the bare three-oscillator chain.

use gaussnet_core::protocols::{ideal_chain_run, ideal_chain_transfer, ProtocolKind, ProtocolParams};
use rayon::prelude::*;
use serde_json::{json, Map};

use super::{payload_family, payload_label, Ctx, RunError};
use crate::output::{num, ScenarioOutput, Table};

pub(crate) fn ideal_chain(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let cfg = ctx.cfg;
    let omega = cfg.physics.omega0;
    let c = cfg.protocol.c;
    let a = &cfg.analysis;
    let mut t_end = 0.0f64;
    for &kind in &a.kinds {
        let p = ProtocolParams::new(kind, c, 0, omega).map_err(|e| ctx.fail(kind.as_str(), e))?;
        t_end = t_end.max(p.nominal_time());
    }
    let t_end = a.t_max.map(|t| t / omega).unwrap_or(1.25 * t_end);
    let times: Vec<f64> = (0..a.time_points).map(|i| t_end * i as f64 / (a.time_points - 1) as f64).collect();

    let jobs: Vec<(ProtocolKind, usize)> =
        a.kinds.iter().flat_map(|&k| (0..cfg.payloads.len()).map(move |p| (k, p))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(kind, p)| {
            let payload = &cfg.payloads[p];
            let what = format!("{} {}", kind.as_str(), payload_label(payload));
            let traj = ideal_chain_run(kind, c, omega, payload, &times).map_err(|e| ctx.fail(&what, e))?;
            let best = ideal_chain_transfer(kind, c, omega, payload, &cfg.window).map_err(|e| ctx.fail(&what, e))?;
            Ok((traj, best))
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    let mut table = Table::new("trajectory", &["protocol", "c", "payload", "t", "efficiency", "fidelity"]);
    let mut summary = Map::new();
    for (&(kind, p), (traj, best)) in jobs.iter().zip(&runs) {
        let label = payload_label(&cfg.payloads[p]);
        for pt in traj {
            table.push(vec![kind.as_str().into(), c.to_string(), label.clone(), num(pt.t), num(pt.efficiency), num(pt.fidelity)]);
        }
        summary.insert(
            format!("{} {}", kind.as_str(), label),
            json!({
                "t_nominal": best.t_nominal,
                "efficiency_at_nominal": best.efficiency_at_nominal,
                "efficiency_best": best.efficiency,
                "fidelity_at_nominal": best.fidelity_at_nominal,
                "fidelity_best": best.fidelity_best,
                "t_best": best.t_best,
            }),
        );
    }
    Ok(ScenarioOutput { tables: vec![table], summary, ..Default::default() })
}

pub(crate) fn ideal_scaling(ctx: &Ctx) -> Result<ScenarioOutput, RunError> {
    let cfg = ctx.cfg;
    let omega = cfg.physics.omega0;
    let kind = cfg.protocol.kind;
    let cs = &cfg.analysis.c_values;
    let jobs: Vec<(usize, u32)> = (0..cfg.payloads.len()).flat_map(|p| cs.iter().map(move |&c| (p, c))).collect();
    let results = jobs
        .par_iter()
        .map(|&(p, c)| {
            let payload = &cfg.payloads[p];
            ideal_chain_transfer(kind, c, omega, payload, &cfg.window)
                .map_err(|e| ctx.fail(format!("{} c={c}", payload_label(payload)), e))
        })
        .collect::<Result<Vec<_>, RunError>>()?;

    let mut table = Table::new(
        "scaling",
        &[
            "protocol",
            "family",
            "payload",
            "size",
            "c",
            "t_nominal",
            "t_best",
            "fidelity_best",
            "fidelity_at_nominal",
            "efficiency",
            "efficiency_at_nominal",
        ],
    );
    let mut summary = Map::new();
    for (p, payload) in cfg.payloads.iter().enumerate() {
        let (family, size) = payload_family(payload);
        let label = payload_label(payload);
        let rows: Vec<_> = jobs.iter().zip(&results).filter(|((q, _), _)| *q == p).map(|((_, c), r)| (*c, r)).collect();
        for (c, r) in &rows {
            table.push(vec![
                kind.as_str().into(),
                family.into(),
                label.clone(),
                num(size),
                c.to_string(),
                num(r.t_nominal),
                num(r.t_best),
                num(r.fidelity_best),
                num(r.fidelity_at_nominal),
                num(r.efficiency),
                num(r.efficiency_at_nominal),
            ]);
        }
        let fids: Vec<f64> = rows.iter().map(|(_, r)| r.fidelity_best).collect();
        summary.insert(
            label,
            json!({
                "fidelity_increasing": fids.windows(2).all(|w| w[1] > w[0]),
                "fidelity": fids,
                "efficiency": rows.iter().map(|(_, r)| r.efficiency).collect::<Vec<_>>(),
            }),
        );
    }
    summary.insert("c_values".into(), json!(cs));
    Ok(ScenarioOutput { tables: vec![table], summary, ..Default::default() })
}
