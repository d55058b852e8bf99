//! Gaussian states of harmonic oscillators.
//!
//! A state of `n` modes is stored as its covariance matrix and first-moments
//! vector in the ordering `x = (q_1, .., q_n, p_1, .., p_n)`, with `hbar = 1`
//! and unit masses. Each mode carries its own angular frequency, which fixes
//! the physical units of its quadratures: `q` is measured in units of
//! `1/sqrt(omega)` and `p` in units of `sqrt(omega)`, so that the vacuum of a
//! mode at frequency `omega` has `Var(q) = 1/(2 omega)` and
//! `Var(p) = omega / 2`.
//!
//! Most figures of merit are evaluated on the *dimensionless* quadratures
//! `q~ = sqrt(omega) q`, `p~ = p / sqrt(omega)`, in which every vacuum has the
//! covariance matrix `I / 2`.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the symmetry of covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Tolerance on the uncertainty relation (smallest symplectic eigenvalue).
pub const UNCERTAINTY_TOL: f64 = 1e-9;

/// A Gaussian state of one or more oscillator modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct GaussianState {
    cm: DMatrix<f64>,
    means: DVector<f64>,
    freqs: Vec<f64>,
}

/// Serialized form: the covariance matrix is stored row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct StateRecord {
    n_modes: usize,
    cm: Vec<f64>,
    means: Vec<f64>,
    freqs: Vec<f64>,
}

impl From<GaussianState> for StateRecord {
    fn from(s: GaussianState) -> Self {
        let dim = s.cm.nrows();
        let mut cm = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                cm.push(s.cm[(i, j)]);
            }
        }
        StateRecord {
            n_modes: s.freqs.len(),
            cm,
            means: s.means.iter().copied().collect(),
            freqs: s.freqs,
        }
    }
}

impl TryFrom<StateRecord> for GaussianState {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        let dim = 2 * r.n_modes;
        if r.cm.len() != dim * dim || r.means.len() != dim || r.freqs.len() != r.n_modes {
            return Err(Error::IncompatibleStates(format!(
                "serialized state for {} modes has cm of length {}, means of length {} and {} frequencies",
                r.n_modes,
                r.cm.len(),
                r.means.len(),
                r.freqs.len()
            )));
        }
        GaussianState::new(
            DMatrix::from_row_slice(dim, dim, &r.cm),
            DVector::from_vec(r.means),
            r.freqs,
        )
    }
}

/// The symplectic form for the `(q.., p..)` ordering of `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

fn check_frequency(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidFrequency(omega))
    }
}

impl GaussianState {
    /// Builds a state after checking symmetry, the uncertainty relation and
    /// the frequencies.
    pub fn new(cm: DMatrix<f64>, means: DVector<f64>, freqs: Vec<f64>) -> Result<Self> {
        let n = freqs.len();
        if n == 0 {
            return Err(Error::IncompatibleStates("a state needs at least one mode".into()));
        }
        if cm.nrows() != 2 * n || cm.ncols() != 2 * n || means.len() != 2 * n {
            return Err(Error::IncompatibleStates(format!(
                "{} frequencies do not match a {}x{} covariance matrix and {} means",
                n,
                cm.nrows(),
                cm.ncols(),
                means.len()
            )));
        }
        for &w in &freqs {
            check_frequency(w)?;
        }
        let scale = cm.amax().max(1.0);
        for i in 0..2 * n {
            for j in (i + 1)..2 * n {
                if (cm[(i, j)] - cm[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::IncompatibleStates(format!(
                        "covariance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let state = GaussianState { cm, means, freqs };
        let nu_min = state.symplectic_eigenvalues()[0];
        if !(nu_min >= 0.5 - UNCERTAINTY_TOL) {
            return Err(Error::IncompatibleStates(format!(
                "covariance matrix violates the uncertainty relation (smallest symplectic eigenvalue {nu_min})"
            )));
        }
        Ok(state)
    }

    /// Builds a state without validation. Callers guarantee the invariants,
    /// e.g. when transporting a valid state with a symplectic matrix.
    pub(crate) fn from_parts_unchecked(cm: DMatrix<f64>, means: DVector<f64>, freqs: Vec<f64>) -> Self {
        GaussianState { cm, means, freqs }
    }

    /// Vacuum of a single mode.
    pub fn vacuum(omega: f64) -> Result<Self> {
        Self::squeezed_vacuum(0.0, 0.0, omega, 0.0)
    }

    /// Thermal state with mean occupation `n_th`.
    pub fn thermal(n_th: f64, omega: f64) -> Result<Self> {
        Self::squeezed_vacuum(0.0, 0.0, omega, n_th)
    }

    /// Single-mode squeezed (possibly thermal) vacuum with squeezing `r` and
    /// phase `phi`.
    pub fn squeezed_vacuum(r: f64, phi: f64, omega: f64, n_th: f64) -> Result<Self> {
        Self::single_mode(r, phi, Complex::new(0.0, 0.0), omega, n_th)
    }

    /// Coherent state with complex amplitude `alpha`.
    pub fn coherent(alpha: Complex<f64>, omega: f64) -> Result<Self> {
        Self::single_mode(0.0, 0.0, alpha, omega, 0.0)
    }

    /// The general single-mode family: displaced squeezed thermal state.
    pub fn single_mode(r: f64, phi: f64, alpha: Complex<f64>, omega: f64, n_th: f64) -> Result<Self> {
        check_frequency(omega)?;
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing must be non-negative, got {r}")));
        }
        if !(n_th >= 0.0) || !n_th.is_finite() {
            return Err(Error::InvalidParameter(format!("thermal occupation must be non-negative, got {n_th}")));
        }
        let y = (2.0 * r).cosh();
        let z_cos = phi.cos() * (2.0 * r).sinh();
        let z_sin = -phi.sin() * (2.0 * r).sinh();
        let pre = n_th + 0.5;
        let cm = DMatrix::from_row_slice(
            2,
            2,
            &[pre * (y + z_cos) / omega, pre * z_sin, pre * z_sin, pre * (y - z_cos) * omega],
        );
        let means = DVector::from_vec(vec![alpha.re * (2.0 / omega).sqrt(), alpha.im * (2.0 * omega).sqrt()]);
        Ok(GaussianState { cm, means, freqs: vec![omega] })
    }

    /// Two-mode squeezed vacuum, both modes at frequency `omega`.
    pub fn two_mode_squeezed(s: f64, phi: f64, omega: f64) -> Result<Self> {
        check_frequency(omega)?;
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("two-mode squeezing must be non-negative, got {s}")));
        }
        let y = (2.0 * s).cosh();
        let z_cos = phi.cos() * (2.0 * s).sinh();
        let z_sin = phi.sin() * (2.0 * s).sinh();
        let w = omega;
        // rows and columns: q1, q2, p1, p2
        #[rustfmt::skip]
        let cm = DMatrix::from_row_slice(4, 4, &[
            y / w,      z_cos / w,  0.0,         z_sin,
            z_cos / w,  y / w,      z_sin,       0.0,
            0.0,        z_sin,      w * y,       -w * z_cos,
            z_sin,      0.0,        -w * z_cos,  w * y,
        ]) * 0.5;
        Ok(GaussianState { cm, means: DVector::zeros(4), freqs: vec![omega, omega] })
    }

    pub fn n_modes(&self) -> usize {
        self.freqs.len()
    }

    pub fn cm(&self) -> &DMatrix<f64> {
        &self.cm
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    fn unit_scales(&self) -> DVector<f64> {
        let n = self.n_modes();
        DVector::from_fn(2 * n, |i, _| if i < n { self.freqs[i].sqrt() } else { 1.0 / self.freqs[i - n].sqrt() })
    }

    /// Covariance matrix of the dimensionless quadratures (vacuum = I/2).
    pub fn dimensionless_cm(&self) -> DMatrix<f64> {
        let d = self.unit_scales();
        DMatrix::from_fn(self.cm.nrows(), self.cm.ncols(), |i, j| d[i] * self.cm[(i, j)] * d[j])
    }

    /// First moments of the dimensionless quadratures.
    pub fn dimensionless_means(&self) -> DVector<f64> {
        self.means.component_mul(&self.unit_scales())
    }

    /// The same dimensionless state, re-expressed for modes at new frequencies.
    pub fn with_frequencies(&self, freqs: &[f64]) -> Result<Self> {
        if freqs.len() != self.n_modes() {
            return Err(Error::IncompatibleStates(format!(
                "{} frequencies given for a {}-mode state",
                freqs.len(),
                self.n_modes()
            )));
        }
        for &w in freqs {
            check_frequency(w)?;
        }
        let n = self.n_modes();
        let inv = DVector::from_fn(2 * n, |i, _| if i < n { 1.0 / freqs[i].sqrt() } else { freqs[i - n].sqrt() });
        let cmd = self.dimensionless_cm();
        let cm = DMatrix::from_fn(2 * n, 2 * n, |i, j| inv[i] * cmd[(i, j)] * inv[j]);
        let means = self.dimensionless_means().component_mul(&inv);
        Ok(GaussianState { cm, means, freqs: freqs.to_vec() })
    }

    /// Direct sum of two states: the modes of `self` come first.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (a, b) = (self.n_modes(), other.n_modes());
        let n = a + b;
        let mut cm = DMatrix::zeros(2 * n, 2 * n);
        let mut means = DVector::zeros(2 * n);
        let place = |i: usize, offset: usize, size: usize| if i < size { offset + i } else { n + offset + i - size };
        for (src, offset, size) in [(self, 0, a), (other, a, b)] {
            for i in 0..2 * size {
                let ii = place(i, offset, size);
                means[ii] = src.means[i];
                for j in 0..2 * size {
                    cm[(ii, place(j, offset, size))] = src.cm[(i, j)];
                }
            }
        }
        let mut freqs = self.freqs.clone();
        freqs.extend_from_slice(&other.freqs);
        GaussianState { cm, means, freqs }
    }

    /// Reduced state of the selected modes, in the given order.
    pub fn marginal(&self, modes: &[usize]) -> Result<GaussianState> {
        let n = self.n_modes();
        if modes.is_empty() {
            return Err(Error::IncompatibleStates("marginal over an empty mode set".into()));
        }
        for (k, &m) in modes.iter().enumerate() {
            if m >= n {
                return Err(Error::IndexError { index: m, len: n });
            }
            if modes[..k].contains(&m) {
                return Err(Error::InvalidParameter(format!("mode {m} selected twice")));
            }
        }
        let k = modes.len();
        let rows: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|&m| m + n)).collect();
        let cm = DMatrix::from_fn(2 * k, 2 * k, |i, j| self.cm[(rows[i], rows[j])]);
        let means = DVector::from_fn(2 * k, |i, _| self.means[rows[i]]);
        let freqs = modes.iter().map(|&m| self.freqs[m]).collect();
        Ok(GaussianState { cm, means, freqs })
    }

    /// Symplectic eigenvalues of the dimensionless covariance matrix, ascending.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        symplectic_spectrum(&self.dimensionless_cm())
    }

    /// `true` when every symplectic eigenvalue equals 1/2 within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.symplectic_eigenvalues().iter().all(|nu| (nu - 0.5).abs() <= tol)
    }

    /// Complex amplitude recovered from the means of a single mode.
    pub fn displacement(&self) -> Result<Complex<f64>> {
        self.require_modes(1)?;
        let d = self.dimensionless_means();
        Ok(Complex::new(d[0], d[1]) / std::f64::consts::SQRT_2)
    }

    fn require_modes(&self, n: usize) -> Result<()> {
        if self.n_modes() == n {
            Ok(())
        } else {
            Err(Error::IncompatibleStates(format!("expected a {n}-mode state, got {} modes", self.n_modes())))
        }
    }
}

/// Symplectic spectrum of a positive definite covariance matrix in the
/// `(q.., p..)` ordering.
///
/// With `S = sigma^(1/2)` the matrix `A = S J S` is antisymmetric with
/// eigenvalues `+-i nu_k`, so `A^T A` is symmetric with each `nu_k^2`
/// appearing twice.
pub fn symplectic_spectrum(cm: &DMatrix<f64>) -> Vec<f64> {
    let n = cm.nrows() / 2;
    let sym = (cm + cm.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let a = &root * symplectic_form(n) * &root;
    let ata = a.transpose() * &a;
    let mut squares: Vec<f64> = ((&ata + ata.transpose()) * 0.5).symmetric_eigen().eigenvalues.iter().copied().collect();
    squares.sort_by(f64::total_cmp);
    squares.chunks(2).map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt()).collect()
}

fn check_same_frequencies(a: &GaussianState, b: &GaussianState) -> Result<()> {
    if a.n_modes() != b.n_modes() {
        return Err(Error::IncompatibleStates(format!(
            "states have {} and {} modes",
            a.n_modes(),
            b.n_modes()
        )));
    }
    for (wa, wb) in a.freqs.iter().zip(&b.freqs) {
        if (wa - wb).abs() > 1e-12 * wa.max(*wb) {
            return Err(Error::IncompatibleStates(format!("mode frequencies differ ({wa} vs {wb})")));
        }
    }
    Ok(())
}

/// Uhlmann fidelity of two single-mode Gaussian states.
pub fn fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    a.require_modes(1)?;
    b.require_modes(1)?;
    check_same_frequencies(a, b)?;
    let (s1, s2) = (a.dimensionless_cm(), b.dimensionless_cm());
    let du = a.dimensionless_means() - b.dimensionless_means();
    Ok(single_mode_fidelity(&s1, &s2, &du))
}

/// Closed-form single-mode fidelity on dimensionless 2x2 blocks.
pub(crate) fn single_mode_fidelity(s1: &DMatrix<f64>, s2: &DMatrix<f64>, du: &DVector<f64>) -> f64 {
    let sum = s1 + s2;
    let big_delta = sum[(0, 0)] * sum[(1, 1)] - sum[(0, 1)] * sum[(1, 0)];
    let det1 = s1[(0, 0)] * s1[(1, 1)] - s1[(0, 1)] * s1[(1, 0)];
    let det2 = s2[(0, 0)] * s2[(1, 1)] - s2[(0, 1)] * s2[(1, 0)];
    let small_delta = (4.0 * (det1 - 0.25) * (det2 - 0.25)).max(0.0);
    // (sigma1 + sigma2)^-1 for a 2x2 matrix
    let quad = (sum[(1, 1)] * du[0] * du[0] - (sum[(0, 1)] + sum[(1, 0)]) * du[0] * du[1] + sum[(0, 0)] * du[1] * du[1])
        / big_delta;
    let f = (-0.5 * quad).exp() / ((big_delta + small_delta).sqrt() - small_delta.sqrt());
    f.clamp(0.0, 1.0)
}

/// Fidelity between a pure Gaussian state and an arbitrary Gaussian state of
/// any number of modes: `F = exp(-du^T (s1+s2)^-1 du / 2) / sqrt(det(s1+s2))`.
pub fn fidelity_with_pure(pure: &GaussianState, other: &GaussianState) -> Result<f64> {
    check_same_frequencies(pure, other)?;
    if !pure.is_pure(1e-7) {
        return Err(Error::IncompatibleStates("reference state is not pure".into()));
    }
    let sum = pure.dimensionless_cm() + other.dimensionless_cm();
    let du = pure.dimensionless_means() - other.dimensionless_means();
    let chol = sum
        .clone()
        .cholesky()
        .ok_or_else(|| Error::IncompatibleStates("sum of covariance matrices is singular".into()))?;
    let det: f64 = chol.l().diagonal().iter().map(|d| d * d).product();
    let quad = du.dot(&chol.solve(&du));
    Ok(((-0.5 * quad).exp() / det.sqrt()).clamp(0.0, 1.0))
}

/// Logarithmic negativity (natural logarithm) of a two-mode state.
pub fn log_negativity(s: &GaussianState) -> Result<f64> {
    s.require_modes(2)?;
    let mut cm = s.dimensionless_cm();
    // partial transposition of the second mode flips the sign of p_2
    for k in 0..4 {
        if k != 3 {
            cm[(3, k)] = -cm[(3, k)];
            cm[(k, 3)] = -cm[(k, 3)];
        }
    }
    let nu_min = symplectic_spectrum(&cm)[0];
    Ok((-(2.0 * nu_min).ln()).max(0.0))
}

/// Squeezing parameter read off the smallest quadrature variance:
/// `r = -ln(2 lambda_min) / 2`, zero for unsqueezed states.
pub fn squeezing_of(s: &GaussianState) -> Result<f64> {
    s.require_modes(1)?;
    let c = s.dimensionless_cm();
    let (a, b, d) = (c[(0, 0)], 0.5 * (c[(0, 1)] + c[(1, 0)]), c[(1, 1)]);
    let lambda_min = 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt();
    if lambda_min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-0.5 * (2.0 * lambda_min).ln()).max(0.0))
}
