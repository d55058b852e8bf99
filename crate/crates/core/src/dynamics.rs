//! Quadratic Hamiltonians of oscillator networks with external oscillators,
//! their normal modes, and symplectic time evolution.
//!
//! The Hamiltonian is `H = p^T p / 2 + q^T M q / 2`. For the network block
//! `M = omega0^2 I + g L` with `L` the graph Laplacian; each external
//! oscillator adds a diagonal entry `omega_s^2` and the bilinear coupling
//! `-k q_s q_i` to its attachment node.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_form, GaussianState};
use crate::graph::Graph;

/// An oscillator outside the network. `attach: None` describes a free
/// oscillator that never couples (e.g. an ancilla holding half of an
/// entangled pair).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct External {
    pub attach: Option<usize>,
    pub k: f64,
    pub omega: f64,
}

impl External {
    pub fn coupled(node: usize, k: f64, omega: f64) -> Self {
        External { attach: Some(node), k, omega }
    }

    pub fn free(omega: f64) -> Self {
        External { attach: None, k: 0.0, omega }
    }
}

/// A network plus the externally coupled oscillators. Coordinates are
/// ordered network nodes first, then externals in the given order.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeSystem {
    graph: Graph,
    omega0: f64,
    g: f64,
    externals: Vec<External>,
}

impl CompositeSystem {
    pub fn new(graph: Graph, omega0: f64, g: f64, externals: Vec<External>) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::InvalidFrequency(omega0));
        }
        if !g.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling g = {g}")));
        }
        let mut used = vec![false; graph.n()];
        for ext in &externals {
            if !(ext.omega > 0.0) || !ext.omega.is_finite() {
                return Err(Error::InvalidFrequency(ext.omega));
            }
            if !ext.k.is_finite() {
                return Err(Error::InvalidParameter(format!("external coupling k = {}", ext.k)));
            }
            if let Some(node) = ext.attach {
                if node >= graph.n() {
                    return Err(Error::IndexError { index: node, len: graph.n() });
                }
                if used[node] {
                    return Err(Error::InvalidParameter(format!(
                        "node {node} already has an external oscillator attached"
                    )));
                }
                used[node] = true;
            }
        }
        Ok(CompositeSystem { graph, omega0, g, externals })
    }

    pub fn isolated(graph: Graph, omega0: f64, g: f64) -> Result<Self> {
        Self::new(graph, omega0, g, Vec::new())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn externals(&self) -> &[External] {
        &self.externals
    }

    /// Total number of oscillators.
    pub fn dim(&self) -> usize {
        self.graph.n() + self.externals.len()
    }

    /// Bare frequency of each coordinate, used to express states in their
    /// natural units.
    pub fn bare_frequencies(&self) -> Vec<f64> {
        let mut f = vec![self.omega0; self.graph.n()];
        f.extend(self.externals.iter().map(|e| e.omega));
        f
    }

    /// The matrix `M` of `H = p^T p / 2 + q^T M q / 2`. Fails when `M` is
    /// not positive definite, i.e. some normal mode frequency is imaginary.
    pub fn potential_matrix(&self) -> Result<DMatrix<f64>> {
        let m = self.potential_matrix_unchecked();
        check_positive_definite(&m)?;
        Ok(m)
    }

    fn potential_matrix_unchecked(&self) -> DMatrix<f64> {
        let n = self.graph.n();
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let lap = self.graph.laplacian();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.g * lap[(i, j)];
            }
            m[(i, i)] += self.omega0 * self.omega0;
        }
        for (e, ext) in self.externals.iter().enumerate() {
            let row = n + e;
            m[(row, row)] = ext.omega * ext.omega;
            if let Some(node) = ext.attach {
                m[(row, node)] = -ext.k;
                m[(node, row)] = -ext.k;
            }
        }
        m
    }
}

fn check_positive_definite(m: &DMatrix<f64>) -> Result<()> {
    if m.clone().cholesky().is_some() {
        return Ok(());
    }
    let min = m.clone().symmetric_eigen().eigenvalues.min();
    Err(Error::NonPhysicalCoupling { min_eigenvalue: min })
}

/// Orthogonal eigenbasis of the potential matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalModeBasis {
    vectors: DMatrix<f64>,
    frequencies: DVector<f64>,
    degenerate: bool,
}

/// Relative eigenvalue gap below which two modes count as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

/// Diagonalizes `M`: columns of `K` are eigenvectors, `Omega_i = sqrt(lambda_i)`
/// ascending. Each eigenvector's largest-magnitude component is positive.
pub fn normal_modes(m: &DMatrix<f64>) -> Result<NormalModeBasis> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidParameter("potential matrix must be square and non-empty".into()));
    }
    let eig = m.clone().symmetric_eigen();
    let dim = m.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let min = eig.eigenvalues[order[0]];
    if !(min > 0.0) {
        return Err(Error::NonPhysicalCoupling { min_eigenvalue: min });
    }
    let mut vectors = DMatrix::zeros(dim, dim);
    let mut frequencies = DVector::zeros(dim);
    for (col, &src) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(src);
        let pivot = v.iamax();
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(col, &(v * sign));
        frequencies[col] = eig.eigenvalues[src].sqrt();
    }
    let top = eig.eigenvalues[order[dim - 1]];
    let degenerate = order
        .windows(2)
        .any(|w| eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]] <= DEGENERACY_TOL * top);
    Ok(NormalModeBasis { vectors, frequencies, degenerate })
}

impl NormalModeBasis {
    pub fn dim(&self) -> usize {
        self.frequencies.len()
    }

    /// The orthogonal matrix `K`.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Normal-mode frequencies, ascending.
    pub fn frequencies(&self) -> &DVector<f64> {
        &self.frequencies
    }

    /// `true` when two eigenvalues coincide; eigenvectors inside a
    /// degenerate subspace are then solver-dependent.
    pub fn has_degeneracy(&self) -> bool {
        self.degenerate
    }

    /// Number of modes whose frequency equals the slowest one.
    pub fn slowest_multiplicity(&self) -> usize {
        let w0 = self.frequencies[0];
        let top = self.frequencies[self.dim() - 1].powi(2);
        self.frequencies.iter().filter(|w| w.powi(2) - w0 * w0 <= DEGENERACY_TOL * top).count()
    }

    /// Weight `K[node, mode]` of a coordinate in a normal mode.
    pub fn mode_overlap(&self, node: usize, mode: usize) -> Result<f64> {
        let dim = self.dim();
        if node >= dim {
            return Err(Error::IndexError { index: node, len: dim });
        }
        if mode >= dim {
            return Err(Error::IndexError { index: mode, len: dim });
        }
        Ok(self.vectors[(node, mode)])
    }

    /// Symplectic propagator `S(t)` with `x(t) = S(t) x(0)`.
    pub fn propagator(&self, t: f64) -> DMatrix<f64> {
        let n = self.dim();
        let k = &self.vectors;
        let scaled = |f: &dyn Fn(f64) -> f64| {
            let d = DVector::from_iterator(n, self.frequencies.iter().map(|&w| f(w)));
            k * DMatrix::from_diagonal(&d) * k.transpose()
        };
        let cos = scaled(&|w| (w * t).cos());
        let sin_over = scaled(&|w| (w * t).sin() / w);
        let sin_times = scaled(&|w| -(w * t).sin() * w);
        let mut s = DMatrix::zeros(2 * n, 2 * n);
        s.view_mut((0, 0), (n, n)).copy_from(&cos);
        s.view_mut((0, n), (n, n)).copy_from(&sin_over);
        s.view_mut((n, 0), (n, n)).copy_from(&sin_times);
        s.view_mut((n, n), (n, n)).copy_from(&cos);
        s
    }

    /// Ground state of the Hamiltonian; `freqs` gives the units of each
    /// coordinate in the returned state.
    pub fn ground_state(&self, freqs: &[f64]) -> Result<GaussianState> {
        let n = self.dim();
        if freqs.len() != n {
            return Err(Error::IncompatibleStates(format!("{} unit frequencies for {} coordinates", freqs.len(), n)));
        }
        let k = &self.vectors;
        let inv = DMatrix::from_diagonal(&self.frequencies.map(|w| 0.5 / w));
        let direct = DMatrix::from_diagonal(&self.frequencies.map(|w| 0.5 * w));
        let qq = k * inv * k.transpose();
        let pp = k * direct * k.transpose();
        let mut cm = DMatrix::zeros(2 * n, 2 * n);
        cm.view_mut((0, 0), (n, n)).copy_from(&symmetrize(&qq));
        cm.view_mut((n, n), (n, n)).copy_from(&symmetrize(&pp));
        GaussianState::new(cm, DVector::zeros(2 * n), freqs.to_vec())
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Transports a state with a linear symplectic map: `sigma -> S sigma S^T`,
/// `<x> -> S <x>`.
pub fn evolve(state: &GaussianState, s: &DMatrix<f64>) -> Result<GaussianState> {
    let dim = state.cm().nrows();
    if s.nrows() != dim || s.ncols() != dim {
        return Err(Error::IncompatibleStates(format!(
            "propagator of size {}x{} applied to a {}-mode state",
            s.nrows(),
            s.ncols(),
            state.n_modes()
        )));
    }
    let cm = symmetrize(&(s * state.cm() * s.transpose()));
    let means = s * state.means();
    Ok(GaussianState::from_parts_unchecked(cm, means, state.freqs().to_vec()))
}

/// Expectation value of `H = p^T p / 2 + q^T M q / 2`.
pub fn energy(state: &GaussianState, m: &DMatrix<f64>) -> f64 {
    let n = state.n_modes();
    let cm = state.cm();
    let x = state.means();
    let q = x.rows(0, n);
    let p = x.rows(n, n);
    let qq = cm.view((0, 0), (n, n));
    let pp = cm.view((n, n), (n, n));
    0.5 * (pp.trace() + (m * qq).trace() + p.dot(&p) + q.dot(&(m * q)))
}

/// Checks `S^T J S = J`; returns the largest deviation.
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(s.nrows() / 2);
    (s.transpose() * &j * s - j).amax()
}

/// The isolated network together with its normal modes and ground state,
/// shared by every transfer run on that network.
#[derive(Clone, Debug)]
pub struct NetworkModel {
    system: CompositeSystem,
    basis: NormalModeBasis,
    ground: GaussianState,
}

impl NetworkModel {
    pub fn new(graph: Graph, omega0: f64, g: f64) -> Result<Self> {
        let system = CompositeSystem::isolated(graph, omega0, g)?;
        let basis = normal_modes(&system.potential_matrix()?)?;
        let ground = basis.ground_state(&system.bare_frequencies())?;
        Ok(NetworkModel { system, basis, ground })
    }

    pub fn graph(&self) -> &Graph {
        self.system.graph()
    }

    pub fn omega0(&self) -> f64 {
        self.system.omega0()
    }

    pub fn g(&self) -> f64 {
        self.system.g()
    }

    pub fn n(&self) -> usize {
        self.system.graph().n()
    }

    pub fn basis(&self) -> &NormalModeBasis {
        &self.basis
    }

    pub fn ground_state(&self) -> &GaussianState {
        &self.ground
    }

    /// Frequency of a normal mode of the isolated network.
    pub fn mode_frequency(&self, mode: usize) -> Result<f64> {
        if mode >= self.n() {
            return Err(Error::IndexError { index: mode, len: self.n() });
        }
        Ok(self.basis.frequencies()[mode])
    }

    pub fn with_externals(&self, externals: Vec<External>) -> Result<CompositeSystem> {
        CompositeSystem::new(self.graph().clone(), self.omega0(), self.g(), externals)
    }
}

/// Evolves a fixed initial state under one Hamiltonian and reads out reduced
/// states of chosen coordinates at many times.
///
/// The state is rotated into normal-mode coordinates once; afterwards each
/// readout only needs the rows of `S(t)` belonging to the probed
/// coordinates.
pub(crate) struct Tracker<'a> {
    basis: &'a NormalModeBasis,
    state: &'a GaussianState,
    mode_cm: Option<DMatrix<f64>>,
    mode_means: DVector<f64>,
}

impl<'a> Tracker<'a> {
    /// `batch` selects the normal-mode path, worthwhile when many times
    /// are sampled.
    pub(crate) fn new(basis: &'a NormalModeBasis, state: &'a GaussianState, batch: bool) -> Self {
        let n = basis.dim();
        let k = basis.vectors();
        let kt = k.transpose();
        let x = state.means();
        let mut mode_means = DVector::zeros(2 * n);
        mode_means.rows_mut(0, n).copy_from(&(&kt * x.rows(0, n)));
        mode_means.rows_mut(n, n).copy_from(&(&kt * x.rows(n, n)));
        let mode_cm = batch.then(|| {
            let cm = state.cm();
            let mut out = DMatrix::zeros(2 * n, 2 * n);
            for (r, c) in [(0, 0), (0, n), (n, 0), (n, n)] {
                let block = &kt * cm.view((r, c), (n, n)) * k;
                out.view_mut((r, c), (n, n)).copy_from(&block);
            }
            out
        });
        Tracker { basis, state, mode_cm, mode_means }
    }

    /// Rows of `S(t)` in normal-mode coordinates for the probed
    /// coordinates: q rows first, then p rows.
    fn mode_rows(&self, probes: &[usize], t: f64, out: &mut DMatrix<f64>, row0: usize) {
        let n = self.basis.dim();
        let k = self.basis.vectors();
        let w = self.basis.frequencies();
        let np = probes.len();
        for (a, &c) in probes.iter().enumerate() {
            for m in 0..n {
                let (s, co) = (w[m] * t).sin_cos();
                let weight = k[(c, m)];
                out[(row0 + a, m)] = weight * co;
                out[(row0 + a, n + m)] = weight * s / w[m];
                out[(row0 + np + a, m)] = -weight * w[m] * s;
                out[(row0 + np + a, n + m)] = weight * co;
            }
        }
    }

    /// Reduced states of `probes` (in that order) at each time.
    pub(crate) fn marginals(&self, probes: &[usize], times: &[f64]) -> Vec<GaussianState> {
        let n = self.basis.dim();
        let np = probes.len();
        let rows_per = 2 * np;
        let mut rows = DMatrix::zeros(rows_per * times.len(), 2 * n);
        for (ti, &t) in times.iter().enumerate() {
            self.mode_rows(probes, t, &mut rows, ti * rows_per);
        }
        let freqs: Vec<f64> = probes.iter().map(|&c| self.state.freqs()[c]).collect();
        let means_all = &rows * &self.mode_means;
        let projected = match &self.mode_cm {
            Some(g) => &rows * g,
            None => {
                // back to coordinate space: rows * blockdiag(K^T, K^T)
                let k = self.basis.vectors();
                let mut node_rows = DMatrix::zeros(rows.nrows(), 2 * n);
                node_rows.columns_mut(0, n).copy_from(&(rows.columns(0, n) * k.transpose()));
                node_rows.columns_mut(n, n).copy_from(&(rows.columns(n, n) * k.transpose()));
                let projected = &node_rows * self.state.cm();
                rows = node_rows;
                projected
            }
        };
        (0..times.len())
            .map(|ti| {
                let base = ti * rows_per;
                let cm = DMatrix::from_fn(rows_per, rows_per, |i, j| {
                    let a = rows.row(base + i).dot(&projected.row(base + j));
                    let b = rows.row(base + j).dot(&projected.row(base + i));
                    0.5 * (a + b)
                });
                let means = DVector::from_fn(rows_per, |i, _| means_all[base + i]);
                GaussianState::from_parts_unchecked(cm, means, freqs.clone())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;
    use approx::assert_abs_diff_eq;
    use nalgebra::Complex;
    use std::f64::consts::PI;

    #[test]
    fn potential_matrix_cases() {
        let sys = CompositeSystem::isolated(Graph::empty(3), 1.5, 0.7).unwrap();
        assert_eq!(sys.potential_matrix().unwrap(), DMatrix::identity(3, 3) * 2.25);

        let sys = CompositeSystem::new(Graph::empty(1), 1.0, 1.0, vec![External::coupled(0, 0.3, 1.0)]).unwrap();
        let m = sys.potential_matrix().unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, -0.3, -0.3, 1.0]));
        let w = normal_modes(&m).unwrap();
        assert_abs_diff_eq!(w.frequencies()[0], 0.7f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w.frequencies()[1], 1.3f64.sqrt(), epsilon = 1e-12);

        let g = erdos_renyi(30, 0.5, 1).unwrap();
        let sys = CompositeSystem::isolated(g.clone(), 1.0, 1.0).unwrap();
        assert_eq!(sys.potential_matrix().unwrap(), DMatrix::identity(30, 30) + g.laplacian());
    }

    #[test]
    fn strong_coupling_is_non_physical() {
        let sys = CompositeSystem::new(Graph::empty(1), 1.0, 1.0, vec![External::coupled(0, 1.5, 1.0)]).unwrap();
        assert!(matches!(sys.potential_matrix(), Err(Error::NonPhysicalCoupling { .. })));
    }

    #[test]
    fn one_external_per_node() {
        let ext = vec![External::coupled(0, 0.1, 1.0), External::coupled(0, 0.1, 1.0)];
        assert!(CompositeSystem::new(Graph::path(2), 1.0, 1.0, ext).is_err());
        let ext = vec![External::coupled(5, 0.1, 1.0)];
        assert!(matches!(CompositeSystem::new(Graph::path(2), 1.0, 1.0, ext), Err(Error::IndexError { .. })));
        assert!(CompositeSystem::new(Graph::path(2), 1.0, 1.0, vec![External::free(0.0)]).is_err());
    }

    #[test]
    fn chain_frequencies() {
        let sys = CompositeSystem::isolated(Graph::path(2), 1.0, 1.0).unwrap();
        let b = normal_modes(&sys.potential_matrix().unwrap()).unwrap();
        assert_abs_diff_eq!(b.frequencies()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.frequencies()[1], 3f64.sqrt(), epsilon = 1e-12);

        // three-oscillator chain with coupling sqrt(2) g on each bond
        let (w, g) = (1.3f64, 0.2f64);
        let c = 2f64.sqrt() * g;
        let m = DMatrix::from_row_slice(3, 3, &[w * w, -c, 0.0, -c, w * w, -c, 0.0, -c, w * w]);
        let b = normal_modes(&m).unwrap();
        assert_abs_diff_eq!(b.frequencies()[0], (w * w - 2.0 * g).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b.frequencies()[1], w, epsilon = 1e-12);
        assert_abs_diff_eq!(b.frequencies()[2], (w * w + 2.0 * g).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn slowest_mode_is_uniform() {
        let g = erdos_renyi(12, 0.6, 3).unwrap();
        assert_eq!(g.component_count(), 1);
        let net = NetworkModel::new(g, 0.8, 0.5).unwrap();
        let b = net.basis();
        assert_abs_diff_eq!(b.frequencies()[0], 0.8, epsilon = 1e-12);
        for i in 0..12 {
            assert_abs_diff_eq!(b.mode_overlap(i, 0).unwrap(), 1.0 / 12f64.sqrt(), epsilon = 1e-10);
            let row: f64 = (0..12).map(|m| b.mode_overlap(i, m).unwrap().powi(2)).sum();
            assert_abs_diff_eq!(row, 1.0, epsilon = 1e-12);
        }
        assert!(matches!(b.mode_overlap(12, 0), Err(Error::IndexError { .. })));
        assert_eq!(b.slowest_multiplicity(), 1);
    }

    #[test]
    fn disconnected_graph_flags_degenerate_slow_modes() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let net = NetworkModel::new(g, 1.0, 1.0).unwrap();
        assert_eq!(net.basis().slowest_multiplicity(), 2);
        assert!(net.basis().has_degeneracy());
    }

    #[test]
    fn propagator_identity_and_period() {
        let g = erdos_renyi(6, 0.5, 2).unwrap();
        let b = NetworkModel::new(g, 1.0, 0.3).unwrap().basis().clone();
        assert_abs_diff_eq!(b.propagator(0.0), DMatrix::identity(12, 12), epsilon = 1e-12);
        let free = normal_modes(&DMatrix::from_element(1, 1, 4.0)).unwrap();
        assert_abs_diff_eq!(free.propagator(PI), DMatrix::identity(2, 2), epsilon = 1e-10);
    }

    #[test]
    fn ground_state_of_empty_graph_is_vacuum_product() {
        let net = NetworkModel::new(Graph::empty(2), 2.0, 1.0).unwrap();
        let v = GaussianState::vacuum(2.0).unwrap();
        assert_abs_diff_eq!(net.ground_state().cm().clone(), v.tensor(&v).cm().clone(), epsilon = 1e-14);
    }

    #[test]
    fn two_node_ground_state() {
        let net = NetworkModel::new(Graph::path(2), 1.0, 1.0).unwrap();
        let k = net.basis().vectors();
        let expected = k * DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0 / 3f64.sqrt()])) * k.transpose() * 0.5;
        assert_abs_diff_eq!(net.ground_state().cm().view((0, 0), (2, 2)).clone_owned(), expected, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_rotates_on_free_oscillator() {
        let w = 1.7;
        let basis = normal_modes(&DMatrix::from_element(1, 1, w * w)).unwrap();
        let state = GaussianState::coherent(Complex::new(0.6, 0.2), w).unwrap();
        let t = 0.9;
        let out = evolve(&state, &basis.propagator(t)).unwrap();
        let alpha = out.displacement().unwrap();
        let expected = Complex::new(0.6, 0.2) * Complex::from_polar(1.0, -w * t);
        assert_abs_diff_eq!(alpha.re, expected.re, epsilon = 1e-12);
        assert_abs_diff_eq!(alpha.im, expected.im, epsilon = 1e-12);
        assert!(evolve(&state, &DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn tracker_matches_full_propagation() {
        let g = erdos_renyi(7, 0.5, 4).unwrap();
        let net = NetworkModel::new(g, 1.0, 0.6).unwrap();
        let sys = net
            .with_externals(vec![External::coupled(1, 0.2, 1.1), External::coupled(4, -0.15, 1.1)])
            .unwrap();
        let basis = normal_modes(&sys.potential_matrix().unwrap()).unwrap();
        let payload = GaussianState::single_mode(0.8, 0.3, Complex::new(0.4, -0.3), 1.1, 0.0).unwrap();
        let state = net.ground_state().tensor(&payload).tensor(&GaussianState::vacuum(1.1).unwrap());
        let times = [0.0, 0.7, 3.2, 11.9];
        for batch in [true, false] {
            let tracker = Tracker::new(&basis, &state, batch);
            let got = tracker.marginals(&[8, 7], &times);
            for (t, m) in times.iter().zip(&got) {
                let full = evolve(&state, &basis.propagator(*t)).unwrap().marginal(&[8, 7]).unwrap();
                assert_abs_diff_eq!(m.cm().clone(), full.cm().clone(), epsilon = 1e-11);
                assert_abs_diff_eq!(m.means().clone(), full.means().clone(), epsilon = 1e-11);
            }
        }
    }
}
