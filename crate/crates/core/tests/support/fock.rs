//! Pure single-mode Gaussian states written out in a truncated Fock basis.
//!
//! `D(alpha) S(xi) |0>` is the state annihilated by `mu a + nu a^dag - beta`
//! with `mu = cosh r`, `nu = e^{i theta} sinh r` and `beta = mu alpha + nu alpha*`,
//! which gives a three-term recurrence for its amplitudes. The library's
//! squeezing phase `phi` corresponds to `theta = pi - phi`.

#![allow(dead_code)]

use gaussnet_core::Complex;

pub type C = Complex<f64>;

pub const CUTOFF: usize = 60;

/// Normalized amplitudes `c_0 .. c_{cutoff-1}`.
pub fn amplitudes(r: f64, phi: f64, alpha: C, cutoff: usize) -> Vec<C> {
    let theta = std::f64::consts::PI - phi;
    let mu = C::new(r.cosh(), 0.0);
    let nu = C::from_polar(r.sinh(), theta);
    let beta = mu * alpha + nu * alpha.conj();
    let mut c = vec![C::new(0.0, 0.0); cutoff];
    c[0] = C::new(1.0, 0.0);
    for n in 0..cutoff - 1 {
        let prev = if n == 0 { C::new(0.0, 0.0) } else { c[n - 1] };
        c[n + 1] = (beta * c[n] - nu * (n as f64).sqrt() * prev) / (mu * ((n + 1) as f64).sqrt());
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter().map(|z| z / norm).collect()
}

pub fn overlap(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    overlap(a, b).norm_sqr()
}

/// Means `(x, p)` and covariance `[[vxx, cxp], [cxp, vpp]]` of the
/// dimensionless quadratures `x = (a + a^dag)/sqrt 2`, `p = (a - a^dag)/(i sqrt 2)`.
pub fn moments(c: &[C]) -> ([f64; 2], [f64; 3]) {
    let n = c.len();
    let a: C = (0..n - 1).map(|k| c[k].conj() * ((k + 1) as f64).sqrt() * c[k + 1]).sum();
    let a2: C = (0..n - 2).map(|k| c[k].conj() * (((k + 1) * (k + 2)) as f64).sqrt() * c[k + 2]).sum();
    let num: f64 = (0..n).map(|k| k as f64 * c[k].norm_sqr()).sum();
    let means = [2f64.sqrt() * a.re, 2f64.sqrt() * a.im];
    let vxx = a2.re + num + 0.5 - 2.0 * a.re * a.re;
    let vpp = -a2.re + num + 0.5 - 2.0 * a.im * a.im;
    let cxp = a2.im - 2.0 * a.re * a.im;
    (means, [vxx, cxp, vpp])
}
