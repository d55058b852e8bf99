//! Single-step and two-step state transfer through one normal mode.
//!
//! The sender and receiver are external oscillators tuned to the frequency
//! of the chosen normal mode. Each couples to its network node with a
//! strength `k` chosen so that its effective coupling to the mode,
//! `k K[node, mode]`, equals the protocol coupling `g_eff`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, normal_modes, External, NetworkModel, NormalModeBasis, Tracker};
use crate::error::{Error, Result};
use crate::gaussian::{fidelity, fidelity_with_pure, log_negativity, squeezing_of, GaussianState};

/// Overlaps below this magnitude make a node unusable for a mode.
pub const MIN_OVERLAP: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    SingleStep,
    TwoStep,
}

impl ProtocolKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::SingleStep => "single_step",
            ProtocolKind::TwoStep => "two_step",
        }
    }
}

/// How the external coupling `k` is derived from the protocol coupling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRule {
    /// `k = g_eff / K[node, mode]`: effective coupling `g_eff` for every
    /// node and mode.
    #[default]
    Effective,
    /// `k = g_eff / sqrt(n)` regardless of mode and node.
    Literal,
}

fn check_c(c: u32) -> Result<()> {
    if c < 1 {
        return Err(Error::InvalidParameter("protocol integer c must be at least 1".into()));
    }
    Ok(())
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidFrequency(omega));
    }
    Ok(())
}

/// Coupling and duration of the approximate three-oscillator swap:
/// `g = sqrt(2) omega^2 / (2c+1)`, `t = (2c+1) pi / omega`.
pub fn single_step_params(omega: f64, c3: u32) -> Result<(f64, f64)> {
    check_c(c3)?;
    check_omega(omega)?;
    let m = 2.0 * c3 as f64 + 1.0;
    Ok((SQRT_2 * omega * omega / m, m * PI / omega))
}

/// Coupling and per-stage duration of the exact two-oscillator swap:
/// `g = (1+2c) omega^2 / (1+2c+2c^2)`, `t = sqrt(1/2+c+c^2) pi / omega`.
pub fn two_step_params(omega: f64, c2: u32) -> Result<(f64, f64)> {
    check_c(c2)?;
    check_omega(omega)?;
    let c = c2 as f64;
    let g = (1.0 + 2.0 * c) * omega * omega / (1.0 + 2.0 * c + 2.0 * c * c);
    let t = (0.5 + c + c * c).sqrt() * PI / omega;
    Ok((g, t))
}

/// `(t2/t1, g2/(sqrt(2) g1))` for `c2 = c3 = c`.
pub fn asymptotic_ratios(c: u32) -> (f64, f64) {
    let c = c as f64;
    let t_ratio = (1.0 + 1.0 / (2.0 * c + 1.0).powi(2)).sqrt();
    let g_ratio = 1.0 - 1.0 / (2.0 + 4.0 * c * (1.0 + c));
    (t_ratio, g_ratio)
}

/// Parameters of one protocol on one normal mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub kind: ProtocolKind,
    pub c: u32,
    pub mode_index: usize,
    pub g_eff: f64,
    pub t_stage: f64,
    pub omega_res: f64,
}

impl ProtocolParams {
    pub fn new(kind: ProtocolKind, c: u32, mode_index: usize, omega_res: f64) -> Result<Self> {
        let (g_eff, t_stage) = match kind {
            ProtocolKind::SingleStep => single_step_params(omega_res, c)?,
            ProtocolKind::TwoStep => two_step_params(omega_res, c)?,
        };
        Ok(ProtocolParams { kind, c, mode_index, g_eff, t_stage, omega_res })
    }

    /// Time at which the transfer nominally completes.
    pub fn nominal_time(&self) -> f64 {
        match self.kind {
            ProtocolKind::SingleStep => self.t_stage,
            ProtocolKind::TwoStep => 2.0 * self.t_stage,
        }
    }
}

/// External coupling that gives effective coupling `g_eff` between `node`
/// and normal mode `mode` of the isolated network.
pub fn required_k(net: &NetworkModel, node: usize, mode: usize, g_eff: f64) -> Result<f64> {
    let overlap = net.basis().mode_overlap(node, mode)?;
    if overlap.abs() < MIN_OVERLAP {
        return Err(Error::NodeDecoupledFromMode { node, mode, overlap });
    }
    Ok(g_eff / overlap)
}

/// The state handed to the sender.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    Vacuum,
    Squeezed {
        r: f64,
        #[serde(default)]
        phi: f64,
    },
    Coherent {
        alpha_re: f64,
        #[serde(default)]
        alpha_im: f64,
    },
    /// Twin beam: mode 0 is held by an uncoupled ancilla, mode 1 by the
    /// sender.
    TwoModeSqueezed {
        s: f64,
        #[serde(default)]
        phi: f64,
    },
}

impl Payload {
    pub fn validate(&self) -> Result<()> {
        let ok = |name: &str, v: f64, nonneg: bool| {
            if !v.is_finite() || (nonneg && v < 0.0) {
                Err(Error::InvalidParameter(format!("payload {name} = {v}")))
            } else {
                Ok(())
            }
        };
        match *self {
            Payload::Vacuum => Ok(()),
            Payload::Squeezed { r, phi } => ok("r", r, true).and(ok("phi", phi, false)),
            Payload::Coherent { alpha_re, alpha_im } => ok("alpha_re", alpha_re, false).and(ok("alpha_im", alpha_im, false)),
            Payload::TwoModeSqueezed { s, phi } => ok("s", s, true).and(ok("phi", phi, false)),
        }
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Payload::TwoModeSqueezed { .. } => 2,
            _ => 1,
        }
    }

    /// The payload as a state of modes at frequency `omega`.
    pub fn state(&self, omega: f64) -> Result<GaussianState> {
        self.validate()?;
        match *self {
            Payload::Vacuum => GaussianState::vacuum(omega),
            Payload::Squeezed { r, phi } => GaussianState::squeezed_vacuum(r, phi, omega, 0.0),
            Payload::Coherent { alpha_re, alpha_im } => GaussianState::coherent(Complex::new(alpha_re, alpha_im), omega),
            Payload::TwoModeSqueezed { s, phi } => GaussianState::two_mode_squeezed(s, phi, omega),
        }
    }

    /// Fraction of the payload's resource present in `received`: squeezing
    /// for squeezed states, `|alpha|` for coherent states and logarithmic
    /// negativity for twin beams. Payloads without the resource score 1.
    pub fn efficiency(&self, received: &GaussianState) -> Result<f64> {
        match *self {
            Payload::Vacuum => Ok(1.0),
            Payload::Squeezed { r, .. } => {
                if r == 0.0 {
                    Ok(1.0)
                } else {
                    Ok(squeezing_of(received)? / r)
                }
            }
            Payload::Coherent { alpha_re, alpha_im } => {
                let a = Complex::new(alpha_re, alpha_im).norm();
                if a == 0.0 {
                    Ok(1.0)
                } else {
                    Ok(received.displacement()?.norm() / a)
                }
            }
            Payload::TwoModeSqueezed { s, .. } => {
                if s == 0.0 {
                    Ok(1.0)
                } else {
                    Ok(log_negativity(received)? / (2.0 * s))
                }
            }
        }
    }
}

/// Sampling of the receiver after the nominal transfer time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    /// Length in units of `1/omega0`.
    pub length: f64,
    /// Number of uniformly spaced samples, the first at the nominal time.
    pub samples: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window { length: 4.0, samples: 400 }
    }
}

impl Window {
    /// Only the nominal time.
    pub fn nominal() -> Self {
        Window { length: 0.0, samples: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("window needs at least one sample".into()));
        }
        if !(self.length >= 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidParameter(format!("window length {}", self.length)));
        }
        Ok(())
    }

    pub fn times(&self, start: f64, omega0: f64) -> Vec<f64> {
        if self.samples == 1 {
            return vec![start];
        }
        let span = self.length / omega0;
        let last = (self.samples - 1) as f64;
        (0..self.samples).map(|i| start + span * i as f64 / last).collect()
    }
}

/// What to transfer and where.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferSpec {
    pub kind: ProtocolKind,
    pub c: u32,
    pub mode: usize,
    pub sender: usize,
    pub receiver: usize,
    #[serde(default)]
    pub coupling: CouplingRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    pub kind: ProtocolKind,
    pub c: u32,
    pub mode_index: usize,
    pub sender_node: usize,
    pub receiver_node: usize,
    pub omega_res: f64,
    pub g_eff: f64,
    pub k_sender: f64,
    pub k_receiver: f64,
    pub t_nominal: f64,
    pub t_best: f64,
    pub fidelity_best: f64,
    pub fidelity_at_nominal: f64,
    /// Largest resource ratio reached within the window.
    pub efficiency: f64,
    pub efficiency_at_nominal: f64,
    /// Some normal-mode frequencies of the coupled system coincide.
    pub degenerate: bool,
}

/// Couplings of sender and receiver for a transfer.
pub fn couplings(net: &NetworkModel, spec: &TransferSpec, g_eff: f64) -> Result<(f64, f64)> {
    match spec.coupling {
        CouplingRule::Effective => Ok((
            required_k(net, spec.sender, spec.mode, g_eff)?,
            required_k(net, spec.receiver, spec.mode, g_eff)?,
        )),
        CouplingRule::Literal => {
            let k = g_eff / (net.n() as f64).sqrt();
            Ok((k, k))
        }
    }
}

fn check_spec(net: &NetworkModel, spec: &TransferSpec) -> Result<()> {
    let n = net.n();
    for idx in [spec.sender, spec.receiver, spec.mode] {
        if idx >= n {
            return Err(Error::IndexError { index: idx, len: n });
        }
    }
    if spec.sender == spec.receiver {
        return Err(Error::InvalidParameter("sender and receiver must be different nodes".into()));
    }
    check_c(spec.c)
}

/// Runs one transfer on a network.
pub fn run_transfer(net: &NetworkModel, spec: &TransferSpec, payload: &Payload, window: &Window) -> Result<TransferResult> {
    check_spec(net, spec)?;
    let omega = net.mode_frequency(spec.mode)?;
    let params = ProtocolParams::new(spec.kind, spec.c, spec.mode, omega)?;
    let (ks, kr) = couplings(net, spec, params.g_eff)?;
    transfer_with_couplings(net, spec, ks, kr, payload, window)
}

pub fn run_single_step(
    net: &NetworkModel,
    sender: usize,
    receiver: usize,
    mode: usize,
    c3: u32,
    payload: &Payload,
    window: &Window,
) -> Result<TransferResult> {
    let spec = TransferSpec { kind: ProtocolKind::SingleStep, c: c3, mode, sender, receiver, coupling: CouplingRule::Effective };
    run_transfer(net, &spec, payload, window)
}

pub fn run_two_step(
    net: &NetworkModel,
    sender: usize,
    receiver: usize,
    mode: usize,
    c2: u32,
    payload: &Payload,
    window: &Window,
) -> Result<TransferResult> {
    let spec = TransferSpec { kind: ProtocolKind::TwoStep, c: c2, mode, sender, receiver, coupling: CouplingRule::Effective };
    run_transfer(net, &spec, payload, window)
}

/// Single-step transfer of the sender half of a twin beam; the other half
/// stays with an uncoupled ancilla.
#[allow(clippy::too_many_arguments)]
pub fn run_entanglement_transfer(
    net: &NetworkModel,
    sender: usize,
    receiver: usize,
    mode: usize,
    c3: u32,
    s: f64,
    phi: f64,
    window: &Window,
) -> Result<TransferResult> {
    run_single_step(net, sender, receiver, mode, c3, &Payload::TwoModeSqueezed { s, phi }, window)
}

/// Like [`run_transfer`] with explicitly chosen external couplings.
pub fn transfer_with_couplings(
    net: &NetworkModel,
    spec: &TransferSpec,
    k_sender: f64,
    k_receiver: f64,
    payload: &Payload,
    window: &Window,
) -> Result<TransferResult> {
    check_spec(net, spec)?;
    window.validate()?;
    let omega = net.mode_frequency(spec.mode)?;
    let params = ProtocolParams::new(spec.kind, spec.c, spec.mode, omega)?;
    let n = net.n();
    let two_mode = payload.n_modes() == 2;

    // coordinates: network, sender, [ancilla], receiver
    let sender_c = n;
    let receiver_c = n + payload.n_modes();
    let externals = |ks: f64, kr: f64| {
        let mut ext = vec![External::coupled(spec.sender, ks, omega)];
        if two_mode {
            ext.push(External::free(omega));
        }
        ext.push(External::coupled(spec.receiver, kr, omega));
        ext
    };
    let payload_state = payload.state(omega)?;
    let local = if two_mode { payload_state.marginal(&[1, 0])? } else { payload_state.clone() };
    let initial = net.ground_state().tensor(&local).tensor(&GaussianState::vacuum(omega)?);

    let (basis, start, mut degenerate) = match spec.kind {
        ProtocolKind::SingleStep => {
            let sys = net.with_externals(externals(k_sender, k_receiver))?;
            let basis = normal_modes(&sys.potential_matrix()?)?;
            let deg = basis.has_degeneracy();
            (basis, initial, deg)
        }
        ProtocolKind::TwoStep => {
            let first = net.with_externals(externals(k_sender, 0.0))?;
            let b1 = normal_modes(&first.potential_matrix()?)?;
            let mid = evolve(&initial, &b1.propagator(params.t_stage))?;
            let second = net.with_externals(externals(0.0, k_receiver))?;
            let b2 = normal_modes(&second.potential_matrix()?)?;
            let deg = b1.has_degeneracy() || b2.has_degeneracy();
            (b2, mid, deg)
        }
    };
    degenerate |= net.basis().has_degeneracy();

    let probes: Vec<usize> = if two_mode { vec![sender_c + 1, receiver_c] } else { vec![receiver_c] };
    let target = target_state(payload, &payload_state, omega, params.nominal_time())?;
    let stage_offset = params.nominal_time() - params.t_stage;
    let times = window.times(params.t_stage, net.omega0());
    let received = sample(&basis, &start, &probes, &times);
    let mut out = score(payload, &target, &received)?;
    for (t, _) in out.iter_mut() {
        *t += stage_offset;
    }
    summarize(spec, &params, k_sender, k_receiver, degenerate, &out)
}

fn sample(basis: &NormalModeBasis, state: &GaussianState, probes: &[usize], times: &[f64]) -> Vec<(f64, GaussianState)> {
    let tracker = Tracker::new(basis, state, times.len() > 8);
    times.iter().copied().zip(tracker.marginals(probes, times)).collect()
}

/// Target of a transfer: single-mode payloads are compared with themselves;
/// for twin beams the ancilla half keeps rotating freely, so the target is
/// the twin beam with the ancilla advanced by the nominal transfer time.
fn target_state(payload: &Payload, state: &GaussianState, omega: f64, t_nominal: f64) -> Result<GaussianState> {
    if payload.n_modes() == 1 {
        return Ok(state.clone());
    }
    let free = normal_modes(&DMatrix::from_diagonal_element(2, 2, omega * omega))?;
    let mut rot = DMatrix::identity(4, 4);
    let s = free.propagator(t_nominal);
    // only mode 0 (the ancilla) is advanced
    rot[(0, 0)] = s[(0, 0)];
    rot[(0, 2)] = s[(0, 2)];
    rot[(2, 0)] = s[(2, 0)];
    rot[(2, 2)] = s[(2, 2)];
    evolve(state, &rot)
}

/// `(time, fidelity, efficiency)` for each sample.
fn score(payload: &Payload, target: &GaussianState, received: &[(f64, GaussianState)]) -> Result<Vec<(f64, (f64, f64))>> {
    received
        .iter()
        .map(|(t, st)| {
            let f = if payload.n_modes() == 1 { fidelity(target, st)? } else { fidelity_with_pure(target, st)? };
            Ok((*t, (f, payload.efficiency(st)?)))
        })
        .collect()
}

fn summarize(
    spec: &TransferSpec,
    params: &ProtocolParams,
    k_sender: f64,
    k_receiver: f64,
    degenerate: bool,
    samples: &[(f64, (f64, f64))],
) -> Result<TransferResult> {
    let (t_nominal, (f_nominal, e_nominal)) = samples[0];
    let mut best = samples[0];
    let mut eff = e_nominal;
    for s in &samples[1..] {
        if s.1 .0 > best.1 .0 {
            best = *s;
        }
        eff = eff.max(s.1 .1);
    }
    Ok(TransferResult {
        kind: spec.kind,
        c: spec.c,
        mode_index: spec.mode,
        sender_node: spec.sender,
        receiver_node: spec.receiver,
        omega_res: params.omega_res,
        g_eff: params.g_eff,
        k_sender,
        k_receiver,
        t_nominal,
        t_best: best.0,
        fidelity_best: best.1 .0,
        fidelity_at_nominal: f_nominal,
        efficiency: eff,
        efficiency_at_nominal: e_nominal,
        degenerate,
    })
}

/// One sample of an ideal-chain trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub fidelity: f64,
    pub efficiency: f64,
}

/// Sender, resonant mode and receiver as a bare chain of three oscillators
/// at frequency `omega`: the network reduced to its resonant mode.
struct IdealChain {
    params: ProtocolParams,
    omega: f64,
    payload: Payload,
    payload_state: GaussianState,
    initial: GaussianState,
}

impl IdealChain {
    // coordinates: sender 0, mode 1, receiver 2, [ancilla 3]
    fn new(kind: ProtocolKind, c: u32, omega: f64, payload: &Payload) -> Result<Self> {
        let params = ProtocolParams::new(kind, c, 0, omega)?;
        let payload_state = payload.state(omega)?;
        let vac = GaussianState::vacuum(omega)?;
        let chain = vac.tensor(&vac);
        let initial = if payload.n_modes() == 2 {
            let sender = payload_state.marginal(&[1])?;
            let joint = sender.tensor(&chain).tensor(&payload_state.marginal(&[0])?);
            // restore the sender-ancilla correlations
            let mut cm = joint.cm().clone();
            let src = payload_state.cm();
            let map = [3usize, 0]; // payload mode -> chain coordinate
            let dim = 4;
            for a in 0..2 {
                for b in 0..2 {
                    for (qa, qb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        cm[(map[a] + qa * dim, map[b] + qb * dim)] = src[(a + 2 * qa, b + 2 * qb)];
                    }
                }
            }
            GaussianState::new(cm, joint.means().clone(), joint.freqs().to_vec())?
        } else {
            payload_state.tensor(&chain)
        };
        Ok(IdealChain { params, omega, payload: *payload, payload_state, initial })
    }

    fn potential(&self, left: bool, right: bool) -> DMatrix<f64> {
        let dim = self.initial.n_modes();
        let mut m = DMatrix::from_diagonal_element(dim, dim, self.omega * self.omega);
        let g = self.params.g_eff;
        if left {
            m[(0, 1)] = -g;
            m[(1, 0)] = -g;
        }
        if right {
            m[(1, 2)] = -g;
            m[(2, 1)] = -g;
        }
        m
    }

    fn probes(&self) -> Vec<usize> {
        if self.payload.n_modes() == 2 {
            vec![3, 2]
        } else {
            vec![2]
        }
    }

    fn trajectory(&self, times: &[f64]) -> Result<Vec<TrajectoryPoint>> {
        let target = target_state(&self.payload, &self.payload_state, self.omega, self.params.nominal_time())?;
        let probes = self.probes();
        let mut received = Vec::with_capacity(times.len());
        match self.params.kind {
            ProtocolKind::SingleStep => {
                let basis = normal_modes(&self.potential(true, true))?;
                received.extend(sample(&basis, &self.initial, &probes, times));
            }
            ProtocolKind::TwoStep => {
                let t1 = self.params.t_stage;
                let first = normal_modes(&self.potential(true, false))?;
                let second = normal_modes(&self.potential(false, true))?;
                let mid = evolve(&self.initial, &first.propagator(t1))?;
                for &t in times {
                    let st = if t <= t1 {
                        evolve(&self.initial, &first.propagator(t))?
                    } else {
                        evolve(&mid, &second.propagator(t - t1))?
                    };
                    received.push((t, st.marginal(&probes)?));
                }
            }
        }
        Ok(score(&self.payload, &target, &received)?
            .into_iter()
            .map(|(t, (fidelity, efficiency))| TrajectoryPoint { t, fidelity, efficiency })
            .collect())
    }
}

/// Trajectory of a transfer through a single resonant mode with no other
/// modes present. For the two-step protocol `times` run from the start of
/// the first stage.
pub fn ideal_chain_run(kind: ProtocolKind, c: u32, omega: f64, payload: &Payload, times: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter("times must be non-negative".into()));
    }
    IdealChain::new(kind, c, omega, payload)?.trajectory(times)
}

/// Ideal-chain counterpart of [`run_transfer`]: samples the window after
/// the nominal completion time.
pub fn ideal_chain_transfer(kind: ProtocolKind, c: u32, omega: f64, payload: &Payload, window: &Window) -> Result<TransferResult> {
    window.validate()?;
    let chain = IdealChain::new(kind, c, omega, payload)?;
    let times = window.times(chain.params.nominal_time(), omega);
    let traj = chain.trajectory(&times)?;
    let samples: Vec<_> = traj.iter().map(|p| (p.t, (p.fidelity, p.efficiency))).collect();
    let spec = TransferSpec { kind, c, mode: 0, sender: 0, receiver: 2, coupling: CouplingRule::Effective };
    let g = chain.params.g_eff;
    summarize(&spec, &chain.params, g, g, false, &samples)
}
