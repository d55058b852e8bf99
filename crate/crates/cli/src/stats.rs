//! Small descriptive statistics used by summaries and checks.

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Standard error of the mean (sample standard deviation over sqrt n).
pub fn std_err(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// A transfer between endpoints of degrees `k_s` and `k_r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreePair {
    pub k_s: usize,
    pub k_r: usize,
    pub fidelity: f64,
}

/// Mean fidelity of the pairs in the bottom and top quartile of the
/// average endpoint degree.
pub fn kavg_quartile_means(pairs: &[DegreePair]) -> (f64, f64) {
    let kavg: Vec<f64> = pairs.iter().map(|p| (p.k_s + p.k_r) as f64 / 2.0).collect();
    let s = sorted(&kavg);
    let (q1, q3) = (quantile(&s, 0.25), quantile(&s, 0.75));
    let pick = |keep: &dyn Fn(f64) -> bool| -> Vec<f64> {
        pairs.iter().zip(&kavg).filter(|(_, &k)| keep(k)).map(|(p, _)| p.fidelity).collect()
    };
    (mean(&pick(&|k| k <= q1)), mean(&pick(&|k| k >= q3)))
}

/// One receiver-degree quartile for senders of high degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuartileBin {
    pub mean: f64,
    pub std_err: f64,
    pub count: usize,
}

/// Fidelity by receiver-degree quartile for senders whose degree lies in
/// the top quartile. Both orientations of each pair are used; quartile
/// edges come from the degrees of all endpoints.
pub fn bottleneck_profile(pairs: &[DegreePair]) -> Vec<QuartileBin> {
    let both: Vec<DegreePair> = pairs
        .iter()
        .flat_map(|p| [*p, DegreePair { k_s: p.k_r, k_r: p.k_s, fidelity: p.fidelity }])
        .collect();
    let degs = sorted(&both.iter().map(|p| p.k_s as f64).collect::<Vec<_>>());
    let edges = [quantile(&degs, 0.25), quantile(&degs, 0.5), quantile(&degs, 0.75)];
    let bin = |k: f64| edges.iter().filter(|&&e| k > e).count();
    let mut groups = vec![Vec::new(); 4];
    for p in both.iter().filter(|p| p.k_s as f64 >= edges[2]) {
        groups[bin(p.k_r as f64)].push(p.fidelity);
    }
    groups.iter().map(|g| QuartileBin { mean: mean(g), std_err: std_err(g), count: g.len() }).collect()
}

/// Whether consecutive non-empty bins never drop by more than their pooled
/// standard error.
pub fn non_decreasing_within_error(bins: &[QuartileBin]) -> bool {
    let used: Vec<&QuartileBin> = bins.iter().filter(|b| b.count > 0).collect();
    used.windows(2).all(|w| {
        let pooled = (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
        let pooled = if pooled.is_finite() { pooled } else { 0.0 };
        w[1].mean >= w[0].mean - pooled
    })
}
