//! Time evolution `i d/dt psi = H(t) psi` along a ramp plan.
//!
//! Classical fourth-order Runge-Kutta with the Hamiltonian sampled at each
//! stage time. Every step subtracts the instantaneous mean energy
//! `<psi|H|psi>`, which only changes the global phase but keeps `|E dt|`
//! small for the populated levels. The step count starts from a step density
//! per unit time and doubles until two successive runs agree.

use num_complex::Complex64;

use crate::error::PropagationError;
use crate::linalg::{axpy, dot, norm_sqr};
use crate::operators::{DissipationConvention, HamiltonianTemplate, LatticeParams, Translation};
use crate::ramp::RampPlan;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        StateVector { amplitudes }
    }

    pub fn from_real(v: &[f64]) -> Self {
        StateVector::new(crate::linalg::to_complex(v))
    }

    /// `|i>`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut a = vec![Complex64::new(0.0, 0.0); dim];
        a[i] = Complex64::new(1.0, 0.0);
        StateVector::new(a)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        crate::linalg::normalize(&mut out.amplitudes);
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        StateVector::new(self.amplitudes.iter().map(|&a| a * c).collect())
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        dot(&self.amplitudes, &other.amplitudes)
    }
}

/// `|<psi|phi>|^2` on the raw amplitudes; `phi` is taken as normalized.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64, PropagationError> {
    if psi.dim() != phi.dim() {
        return Err(PropagationError::DimensionMismatch { expected: phi.dim(), found: psi.dim() });
    }
    Ok(psi.inner(phi).norm_sqr())
}

/// Non-Hermitian loss settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dissipation {
    pub cavity_decay: f64,
    pub qubit_decay: f64,
    pub convention: DissipationConvention,
}

impl Dissipation {
    pub fn none() -> Self {
        Dissipation {
            cavity_decay: 0.0,
            qubit_decay: 0.0,
            convention: DissipationConvention::default(),
        }
    }

    pub fn is_active(&self) -> bool {
        self.cavity_decay != 0.0 || self.qubit_decay != 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Step count of the first attempt; `None` derives it from `step_density`.
    pub initial_steps: Option<usize>,
    /// Steps per unit time when `initial_steps` is unset.
    pub step_density: f64,
    pub min_steps: usize,
    /// Bound on both the norm drift (Hermitian runs) and the infidelity
    /// between the last two refinement levels.
    pub tolerance: f64,
    /// Doublings of the step count allowed after the first comparison.
    pub max_refinements: usize,
    /// Skip the comparison and accept the first attempt.
    pub fixed_steps: bool,
    /// Norm above which a non-Hermitian run is aborted.
    pub blow_up_norm: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            initial_steps: None,
            step_density: 20.0,
            min_steps: 64,
            tolerance: 1e-8,
            max_refinements: 4,
            fixed_steps: false,
            blow_up_norm: 1e6,
        }
    }
}

impl EvolveOptions {
    pub fn fixed(steps: usize) -> Self {
        EvolveOptions { initial_steps: Some(steps), fixed_steps: true, ..Default::default() }
    }

    /// Fixed steps at `density` per unit time, no refinement.
    pub fn fixed_density(density: f64) -> Self {
        EvolveOptions { step_density: density, fixed_steps: true, ..Default::default() }
    }

    pub fn steps_for(&self, duration: f64) -> usize {
        match self.initial_steps {
            Some(n) => n.max(1),
            None => ((duration.abs() * self.step_density).ceil() as usize).max(self.min_steps).max(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult {
    pub final_state: StateVector,
    /// `||psi(T)||^2 - ||psi(0)||^2`.
    pub norm_drift: f64,
    /// `1 - ||P0 psi(T)||^2 / ||psi(T)||^2`.
    pub symmetric_leakage: f64,
    pub step_count: usize,
    /// Infidelity between the accepted run and the previous refinement level
    /// (zero when steps were fixed).
    pub convergence: f64,
}

/// Evolves states under a [`RampPlan`] using pre-assembled blocks.
pub struct Propagator<'a> {
    template: &'a HamiltonianTemplate,
    translation: Option<&'a Translation>,
    options: EvolveOptions,
}

struct Workspace {
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    hx: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Workspace { k: [z.clone(), z.clone(), z.clone(), z.clone()], stage: z.clone(), hx: z }
    }
}

impl<'a> Propagator<'a> {
    pub fn new(template: &'a HamiltonianTemplate, options: EvolveOptions) -> Self {
        Propagator { template, translation: None, options }
    }

    /// Records symmetric leakage of the final state.
    pub fn with_translation(mut self, translation: &'a Translation) -> Self {
        self.translation = Some(translation);
        self
    }

    pub fn options(&self) -> &EvolveOptions {
        &self.options
    }

    /// Hermitian evolution from `t = 0` to `t = T`.
    pub fn evolve(&self, plan: &RampPlan, psi0: &StateVector) -> Result<EvolutionResult, PropagationError> {
        self.evolve_between(plan, psi0, 0.0, plan.duration, &Dissipation::none())
    }

    /// Evolution under `H - i D`; amplitudes are never renormalized.
    pub fn evolve_dissipative(
        &self,
        plan: &RampPlan,
        psi0: &StateVector,
        dissipation: &Dissipation,
    ) -> Result<EvolutionResult, PropagationError> {
        self.evolve_between(plan, psi0, 0.0, plan.duration, dissipation)
    }

    /// Evolution from `t_start` to `t_end` along `plan`; `t_end < t_start`
    /// integrates backwards.
    pub fn evolve_between(
        &self,
        plan: &RampPlan,
        psi0: &StateVector,
        t_start: f64,
        t_end: f64,
        dissipation: &Dissipation,
    ) -> Result<EvolutionResult, PropagationError> {
        let dim = self.template.dim();
        if psi0.dim() != dim {
            return Err(PropagationError::DimensionMismatch { expected: dim, found: psi0.dim() });
        }
        for t in [t_start, t_end] {
            plan.params_at(t)?;
        }
        let norm0 = psi0.norm_sqr();
        let hermitian = !dissipation.is_active();
        if hermitian && (norm0 - 1.0).abs() > 1e-10 {
            return Err(PropagationError::NotNormalized(norm0));
        }
        let loss = self.loss(plan, dissipation);

        let mut steps = self.options.steps_for(t_end - t_start);
        let mut previous = self.integrate(plan, psi0, t_start, t_end, steps, loss.as_deref())?;
        let mut convergence = 0.0;
        if !self.options.fixed_steps {
            let mut attempt = 0;
            loop {
                steps *= 2;
                let finer = self.integrate(plan, psi0, t_start, t_end, steps, loss.as_deref())?;
                let overlap = finer.inner(&previous).norm_sqr() / (finer.norm_sqr() * previous.norm_sqr());
                convergence = (1.0 - overlap).abs();
                let drift = (finer.norm_sqr() - norm0).abs();
                let drift_ok = !hermitian || drift <= self.options.tolerance;
                previous = finer;
                if convergence <= self.options.tolerance && drift_ok {
                    break;
                }
                attempt += 1;
                if attempt > self.options.max_refinements {
                    return Err(PropagationError::StepUnderflow {
                        steps,
                        convergence,
                        norm_drift: drift,
                        tolerance: self.options.tolerance,
                    });
                }
            }
        }
        let final_state = previous;
        let norm_drift = final_state.norm_sqr() - norm0;
        let symmetric_leakage = match self.translation {
            Some(t) => 1.0 - t.symmetric_weight(final_state.amplitudes()) / final_state.norm_sqr(),
            None => f64::NAN,
        };
        Ok(EvolutionResult { final_state, norm_drift, symmetric_leakage, step_count: steps, convergence })
    }

    fn loss(&self, plan: &RampPlan, dissipation: &Dissipation) -> Option<Vec<f64>> {
        if !dissipation.is_active() {
            return None;
        }
        let params = plan
            .start_params()
            .with_decay(dissipation.cavity_decay, dissipation.qubit_decay);
        self.template.loss_diagonal(&params, dissipation.convention)
    }

    /// `out = -i (H(params) - i D - shift) x`
    fn derivative(
        &self,
        params: &LatticeParams,
        loss: Option<&[f64]>,
        shift: f64,
        x: &[Complex64],
        hx: &mut [Complex64],
        out: &mut [Complex64],
    ) {
        self.template.apply(params, x, hx);
        match loss {
            Some(d) => {
                for r in 0..x.len() {
                    // -i (hx - shift x) + d x   (d <= 0 damps)
                    out[r] = -I * (hx[r] - x[r] * shift) + x[r] * d[r];
                }
            }
            None => {
                for r in 0..x.len() {
                    out[r] = -I * (hx[r] - x[r] * shift);
                }
            }
        }
    }

    fn integrate(
        &self,
        plan: &RampPlan,
        psi0: &StateVector,
        t_start: f64,
        t_end: f64,
        steps: usize,
        loss: Option<&[f64]>,
    ) -> Result<StateVector, PropagationError> {
        let dim = psi0.dim();
        let total = plan.duration;
        let dt = (t_end - t_start) / steps as f64;
        let mut psi = psi0.amplitudes().to_vec();
        let mut ws = Workspace::new(dim);
        let frac = |t: f64| (t / total).clamp(0.0, 1.0);

        for n in 0..steps {
            let t = t_start + n as f64 * dt;
            let p0 = plan.params_at_fraction(frac(t));
            let pm = plan.params_at_fraction(frac(t + 0.5 * dt));
            let p1 = plan.params_at_fraction(frac(t + dt));

            // stage 1 doubles as the mean-energy estimate
            self.template.apply(&p0, &psi, &mut ws.hx);
            let nrm = norm_sqr(&psi);
            let shift = dot(&psi, &ws.hx).re / nrm;
            {
                let k = &mut ws.k[0];
                for r in 0..dim {
                    k[r] = -I * (ws.hx[r] - psi[r] * shift);
                    if let Some(d) = loss {
                        k[r] += psi[r] * d[r];
                    }
                }
            }
            let h = Complex64::new(dt, 0.0);
            for (stage, (params, weight)) in [(&pm, 0.5), (&pm, 0.5), (&p1, 1.0)].into_iter().enumerate() {
                let (done, rest) = ws.k.split_at_mut(stage + 1);
                ws.stage.copy_from_slice(&psi);
                axpy(h * weight, &done[stage], &mut ws.stage);
                self.derivative(params, loss, shift, &ws.stage, &mut ws.hx, &mut rest[0]);
            }
            let c = h / 6.0;
            for r in 0..dim {
                psi[r] += c * (ws.k[0][r] + 2.0 * ws.k[1][r] + 2.0 * ws.k[2][r] + ws.k[3][r]);
            }
            if loss.is_some() && n % 64 == 0 {
                let norm = norm_sqr(&psi);
                if !norm.is_finite() || norm > self.options.blow_up_norm {
                    return Err(PropagationError::NormBlowUp { t: t + dt, norm });
                }
            }
        }
        Ok(StateVector::new(psi))
    }
}

/// Observables recorded at a checkpoint of a ramp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub params: LatticeParams,
    pub norm: f64,
    pub ground_overlap: f64,
    pub symmetric_weight: f64,
}

impl<'a> Propagator<'a> {
    /// Evolves in `segments` equal pieces and calls `observe` after each,
    /// starting with `t = 0`. Refinement is applied per segment.
    pub fn evolve_with_checkpoints<F>(
        &self,
        plan: &RampPlan,
        psi0: &StateVector,
        dissipation: &Dissipation,
        segments: usize,
        mut observe: F,
    ) -> Result<EvolutionResult, PropagationError>
    where
        F: FnMut(f64, &StateVector) -> Result<(), PropagationError>,
    {
        let segments = segments.max(1);
        let mut state = psi0.clone();
        observe(0.0, &state)?;
        let mut step_count = 0;
        let mut convergence: f64 = 0.0;
        let sub = Propagator {
            template: self.template,
            translation: None,
            options: EvolveOptions {
                initial_steps: self.options.initial_steps.map(|n| (n / segments).max(1)),
                ..self.options
            },
        };
        for k in 0..segments {
            let t0 = plan.duration * k as f64 / segments as f64;
            let t1 = plan.duration * (k + 1) as f64 / segments as f64;
            let r = if dissipation.is_active() {
                sub.evolve_between(plan, &state, t0, t1, dissipation)?
            } else {
                // renormalization error below tolerance would otherwise trip the input check
                let n = state.norm();
                let mut s = sub.evolve_between(plan, &state.normalized(), t0, t1, dissipation)?;
                s.final_state = s.final_state.scaled(Complex64::new(n, 0.0));
                s
            };
            step_count += r.step_count;
            convergence = convergence.max(r.convergence);
            state = r.final_state;
            observe(t1, &state)?;
        }
        let norm_drift = state.norm_sqr() - psi0.norm_sqr();
        let symmetric_leakage = match self.translation {
            Some(t) => 1.0 - t.symmetric_weight(state.amplitudes()) / state.norm_sqr(),
            None => f64::NAN,
        };
        Ok(EvolutionResult { final_state: state, norm_drift, symmetric_leakage, step_count, convergence })
    }
}
