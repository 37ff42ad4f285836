//! Analytic limiting ground states and initialization pulse sequences.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::basis::{BasisTable, Qubit, SiteState};
use crate::error::StatePrepError;
use crate::propagator::StateVector;

/// The doublet `|n,+->` of a single Jaynes-Cummings site with `n >= 1`
/// excitations, in the frame where the cavity sits at `delta` and the qubit
/// at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolaritonDoublet {
    pub n: usize,
    pub detuning: f64,
    pub coupling: f64,
    /// `chi(n) = sqrt(delta^2 + 4 n g^2)`
    pub chi: f64,
    /// Mixing angle, `sin^2(theta/2) = (1 - delta/chi) / 2`.
    pub theta: f64,
}

impl PolaritonDoublet {
    pub fn new(n: usize, detuning: f64, coupling: f64) -> Result<Self, StatePrepError> {
        if !(coupling > 0.0) || !coupling.is_finite() {
            return Err(StatePrepError::NonPositiveCoupling(coupling));
        }
        assert!(n >= 1, "doublets start at one excitation");
        let chi = (detuning * detuning + 4.0 * n as f64 * coupling * coupling).sqrt();
        let s2 = ((1.0 - detuning / chi) / 2.0).clamp(0.0, 1.0);
        let theta = 2.0 * s2.sqrt().asin();
        Ok(PolaritonDoublet { n, detuning, coupling, chi, theta })
    }

    pub fn cos_half(&self) -> f64 {
        (self.theta / 2.0).cos()
    }

    pub fn sin_half(&self) -> f64 {
        (self.theta / 2.0).sin()
    }

    /// Amplitudes of `|n,->` on `(|n,down>, |n-1,up>)`.
    pub fn lower_amplitudes(&self) -> (f64, f64) {
        (self.sin_half(), -self.cos_half())
    }

    /// Amplitudes of `|n,+>` on `(|n,down>, |n-1,up>)`.
    pub fn upper_amplitudes(&self) -> (f64, f64) {
        (self.cos_half(), self.sin_half())
    }

    /// `(n - 1/2) delta - chi/2`
    pub fn lower_energy(&self) -> f64 {
        (self.n as f64 - 0.5) * self.detuning - 0.5 * self.chi
    }

    /// `(n - 1/2) delta + chi/2`
    pub fn upper_energy(&self) -> f64 {
        (self.n as f64 - 0.5) * self.detuning + 0.5 * self.chi
    }
}

/// Product of `|1,->` over all sites, the `J = 0` ground state at unit filling.
pub fn mi_ground_state(table: &BasisTable, detuning: f64, coupling: f64) -> Result<StateVector, StatePrepError> {
    let sites = table.num_sites();
    if table.excitations() != sites {
        return Err(StatePrepError::NotUnitFilling { sites, excitations: table.excitations() });
    }
    let doublet = PolaritonDoublet::new(1, detuning, coupling)?;
    let (photon_amp, qubit_amp) = doublet.lower_amplitudes();
    let mut amps = vec![Complex64::new(0.0, 0.0); table.dim()];
    let mut config = vec![SiteState::down(0); sites];
    for mask in 0u64..(1u64 << sites) {
        let mut amp = 1.0;
        for (j, site) in config.iter_mut().enumerate() {
            if mask >> j & 1 == 1 {
                *site = SiteState::up(0);
                amp *= qubit_amp;
            } else {
                *site = SiteState::down(1);
                amp *= photon_amp;
            }
        }
        let i = table.find(&config).expect("unit-filling configuration lies in the sector");
        amps[i] = Complex64::new(amp, 0.0);
    }
    Ok(StateVector::new(amps))
}

/// All excitations as photons in the uniform mode: `(sum_j a_j^dag)^N / sqrt(N! L^N)`
/// on the vacuum, the `g = 0` ground state for `J > 0`.
pub fn sf_ground_state(table: &BasisTable) -> StateVector {
    let sites = table.num_sites() as f64;
    let n = table.excitations();
    let ln_fact = |k: usize| (1..=k).map(|x| (x as f64).ln()).sum::<f64>();
    let ln_norm = ln_fact(n) - n as f64 * sites.ln();
    let amps = table
        .states()
        .map(|config| {
            if config.iter().any(|s| s.qubit == Qubit::Up) {
                return Complex64::new(0.0, 0.0);
            }
            let ln_den: f64 = config.iter().map(|s| ln_fact(s.photons as usize)).sum();
            Complex64::new((0.5 * (ln_norm - ln_den)).exp(), 0.0)
        })
        .collect();
    StateVector::new(amps)
}

// ---------------------------------------------------------------------------
// Initialization pulses

/// Drive settings for the two initialization schemes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseParams {
    /// Qubit drive amplitude `epsilon`.
    pub drive: f64,
    /// Drive frequency `omega_L`.
    pub drive_frequency: f64,
    /// Auxiliary qubit splitting `omega_0`.
    pub auxiliary_splitting: f64,
    /// Tunable auxiliary-cavity coupling `g_d`.
    pub tunable_coupling: f64,
}

/// Ratio treated as "much smaller than" by the validity flags.
pub const WEAK_DRIVE_RATIO: f64 = 0.1;

impl PulseParams {
    /// `|epsilon| << g`, which suppresses leakage into `|1,+>`.
    pub fn mi_valid(&self, coupling: f64) -> bool {
        self.drive.abs() <= WEAK_DRIVE_RATIO * coupling.abs()
    }

    /// `|epsilon|, sqrt(N)|g_d| << omega_L`, the rotating-wave conditions.
    pub fn sf_valid(&self, excitations: usize) -> bool {
        let limit = WEAK_DRIVE_RATIO * self.drive_frequency.abs();
        self.drive.abs() <= limit && (excitations as f64).sqrt() * self.tunable_coupling.abs() <= limit
    }
}

fn check_pulse(name: &'static str, value: f64) -> Result<(), StatePrepError> {
    if value == 0.0 || !value.is_finite() {
        return Err(StatePrepError::InvalidPulse { name, value });
    }
    Ok(())
}

/// `exp(-i h t) psi` for a real symmetric `h`.
fn propagate_exact(h: &DMatrix<f64>, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let n = psi.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let c: Complex64 = (0..n).map(|r| psi[r] * v[(r, k)]).sum();
        coeffs[k] = c * Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
    }
    (0..n).map(|r| (0..n).map(|k| coeffs[k] * v[(r, k)]).sum()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MiPulseModel {
    /// `{|g0>, |1,->}` only.
    TwoLevel,
    /// `{|g0>, |1,->, |1,+>}`, exposing leakage into the upper polariton.
    #[default]
    ThreeLevel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MiPulseResult {
    /// Population of `|1,->` at the end of the pulse.
    pub fidelity: f64,
    /// `tau_d1 = pi / (2 |epsilon cos(theta/2)|)`, or the override.
    pub duration: f64,
    /// Population left in `|1,+>`.
    pub leakage: f64,
}

/// Rotating-frame single-site Hamiltonian of the MI pulse, driven at
/// `omega_L = E(1,-) - E(g0)`.
pub fn mi_pulse_hamiltonian(doublet: &PolaritonDoublet, drive: f64, model: MiPulseModel) -> DMatrix<f64> {
    let to_lower = -drive * doublet.cos_half();
    let to_upper = drive * doublet.sin_half();
    match model {
        MiPulseModel::TwoLevel => DMatrix::from_row_slice(2, 2, &[0.0, to_lower, to_lower, 0.0]),
        MiPulseModel::ThreeLevel => DMatrix::from_row_slice(
            3,
            3,
            &[0.0, to_lower, to_upper, to_lower, 0.0, 0.0, to_upper, 0.0, doublet.chi],
        ),
    }
}

/// Rabi rotation `|g0> -> |1,->` on one site.
pub fn simulate_mi_pulse(
    detuning: f64,
    coupling: f64,
    drive: f64,
    duration: Option<f64>,
) -> Result<MiPulseResult, StatePrepError> {
    simulate_mi_pulse_with(MiPulseModel::ThreeLevel, detuning, coupling, drive, duration)
}

pub fn simulate_mi_pulse_with(
    model: MiPulseModel,
    detuning: f64,
    coupling: f64,
    drive: f64,
    duration: Option<f64>,
) -> Result<MiPulseResult, StatePrepError> {
    check_pulse("epsilon", drive)?;
    let doublet = PolaritonDoublet::new(1, detuning, coupling)?;
    let rabi = (drive * doublet.cos_half()).abs();
    let tau = match duration {
        Some(t) => t,
        None => std::f64::consts::FRAC_PI_2 / rabi,
    };
    let h = mi_pulse_hamiltonian(&doublet, drive, model);
    let mut psi0 = vec![Complex64::new(0.0, 0.0); h.nrows()];
    psi0[0] = Complex64::new(1.0, 0.0);
    let psi = propagate_exact(&h, &psi0, tau);
    Ok(MiPulseResult {
        fidelity: psi[1].norm_sqr(),
        duration: tau,
        leakage: psi.get(2).map_or(0.0, |a| a.norm_sqr()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    /// Classical drive on the auxiliary qubit.
    Classical,
    /// Swap through the tunable coupling.
    Quantum,
}

impl SegmentKind {
    pub fn label(self) -> char {
        match self {
            SegmentKind::Classical => 'C',
            SegmentKind::Quantum => 'Q',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSegment {
    pub l: usize,
    pub kind: SegmentKind,
    pub duration: f64,
    /// Overlap with the intended intermediate state after this segment.
    pub cumulative_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SfPulseResult {
    pub fidelity: f64,
    pub total_duration: f64,
    pub segments: Vec<PulseSegment>,
}

/// Index of `|m, q>` in the mode-times-auxiliary space.
fn sf_index(m: usize, up: bool) -> usize {
    2 * m + up as usize
}

/// `H_C = epsilon (s- + s+)` on the auxiliary qubit.
pub fn sf_classical_hamiltonian(excitations: usize, drive: f64) -> DMatrix<f64> {
    let dim = 2 * (excitations + 1);
    let mut h = DMatrix::zeros(dim, dim);
    for m in 0..=excitations {
        let (a, b) = (sf_index(m, false), sf_index(m, true));
        h[(a, b)] = drive;
        h[(b, a)] = drive;
    }
    h
}

/// `H_Q = sqrt(N) g_d (a0^dag s- + a0 s+)`.
pub fn sf_quantum_hamiltonian(excitations: usize, tunable_coupling: f64) -> DMatrix<f64> {
    let dim = 2 * (excitations + 1);
    let mut h = DMatrix::zeros(dim, dim);
    let scale = (excitations as f64).sqrt() * tunable_coupling;
    for m in 1..=excitations {
        let (a, b) = (sf_index(m - 1, true), sf_index(m, false));
        let v = scale * (m as f64).sqrt();
        h[(a, b)] = v;
        h[(b, a)] = v;
    }
    h
}

/// `tau_cl = pi / (2 |epsilon|)`
pub fn classical_segment_duration(drive: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / drive.abs()
}

/// `tau_ql = pi / (2 sqrt(N l) |g_d|)`
pub fn quantum_segment_duration(excitations: usize, l: usize, tunable_coupling: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / (((excitations * l) as f64).sqrt() * tunable_coupling.abs())
}

/// Pumps `N` photons into the uniform mode through an auxiliary qubit by
/// alternating flips (C) and swaps (Q), starting from `|0,down>`.
pub fn simulate_sf_pulse(excitations: usize, drive: f64, tunable_coupling: f64) -> Result<SfPulseResult, StatePrepError> {
    if excitations == 0 {
        return Err(StatePrepError::InvalidPulse { name: "N", value: 0.0 });
    }
    check_pulse("epsilon", drive)?;
    check_pulse("g_d", tunable_coupling)?;
    let hc = sf_classical_hamiltonian(excitations, drive);
    let hq = sf_quantum_hamiltonian(excitations, tunable_coupling);
    let mut psi = vec![Complex64::new(0.0, 0.0); 2 * (excitations + 1)];
    psi[sf_index(0, false)] = Complex64::new(1.0, 0.0);
    let mut segments = Vec::with_capacity(2 * excitations);
    let mut total = 0.0;
    for l in 1..=excitations {
        for kind in [SegmentKind::Classical, SegmentKind::Quantum] {
            let (h, tau, target) = match kind {
                SegmentKind::Classical => (&hc, classical_segment_duration(drive), sf_index(l - 1, true)),
                SegmentKind::Quantum => (
                    &hq,
                    quantum_segment_duration(excitations, l, tunable_coupling),
                    sf_index(l, false),
                ),
            };
            psi = propagate_exact(h, &psi, tau);
            total += tau;
            segments.push(PulseSegment { l, kind, duration: tau, cumulative_fidelity: psi[target].norm_sqr() });
        }
    }
    Ok(SfPulseResult {
        fidelity: psi[sf_index(excitations, false)].norm_sqr(),
        total_duration: total,
        segments,
    })
}
