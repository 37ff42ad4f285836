//! Power-law parameter ramps.
//!
//! Each tunable parameter follows
//! `p(t) = p(0) [1 - (t/T)^r] + p(T) (t/T)^r`. Because every parameter is a
//! power of the same `t/T`, the curve traced in `(g, J, delta)` space depends
//! only on the ratios of the indices; individual indices only change how fast
//! the curve is traversed.

use crate::error::RampError;
use crate::operators::{HamiltonianPartials, LatticeParams};
use crate::spectrum::GapReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parameter {
    Coupling,
    Hopping,
    Detuning,
}

impl Parameter {
    pub const ALL: [Parameter; 3] = [Parameter::Coupling, Parameter::Hopping, Parameter::Detuning];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Coupling => "g",
            Parameter::Hopping => "J",
            Parameter::Detuning => "Delta",
        }
    }

    pub fn of(self, params: &LatticeParams) -> f64 {
        match self {
            Parameter::Coupling => params.coupling,
            Parameter::Hopping => params.hopping,
            Parameter::Detuning => params.detuning,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RampSchedule {
    pub parameter: Parameter,
    pub start: f64,
    pub end: f64,
    pub index: f64,
}

fn check_index(index: f64) -> Result<(), RampError> {
    if index > 0.0 && index.is_finite() {
        Ok(())
    } else {
        Err(RampError::InvalidIndex(index))
    }
}

fn check_duration(total: f64) -> Result<(), RampError> {
    if total > 0.0 && total.is_finite() {
        Ok(())
    } else {
        Err(RampError::InvalidDuration(total))
    }
}

impl RampSchedule {
    pub fn new(parameter: Parameter, start: f64, end: f64, index: f64) -> Result<Self, RampError> {
        check_index(index)?;
        Ok(RampSchedule { parameter, start, end, index })
    }

    pub fn constant(parameter: Parameter, value: f64) -> Self {
        RampSchedule { parameter, start: value, end: value, index: 1.0 }
    }

    pub fn is_constant(&self) -> bool {
        self.start == self.end
    }

    pub fn span(&self) -> f64 {
        self.end - self.start
    }

    /// Value at normalized time `u = t/T` in `[0, 1]`.
    #[inline]
    pub fn value_at_fraction(&self, u: f64) -> f64 {
        let w = u.powf(self.index);
        self.start * (1.0 - w) + self.end * w
    }

    pub fn value_at(&self, t: f64, total: f64) -> Result<f64, RampError> {
        check_duration(total)?;
        if !(0.0..=total).contains(&t) {
            return Err(RampError::TimeOutOfRange { t, total });
        }
        Ok(self.value_at_fraction(t / total))
    }

    /// Analytic `dp/dt` expressed as a function of the current value `p`.
    ///
    /// Uses the signed form so decreasing ramps get a negative velocity. At
    /// `p = p(0)` the velocity is zero for `r > 1` and diverges for `r < 1`.
    pub fn velocity_at(&self, value: f64, total: f64) -> Result<f64, RampError> {
        check_duration(total)?;
        if self.is_constant() {
            return Ok(0.0);
        }
        let span = self.span();
        let offset = value - self.start;
        let slack = 1e-12 * span.abs().max(1.0);
        // offset must have the sign of span and not exceed it in magnitude
        if offset * span.signum() < -slack || offset.abs() > span.abs() + slack {
            return Err(RampError::ValueOutOfRange { value, start: self.start, end: self.end });
        }
        let r = self.index;
        let dist = (offset * span.signum()).max(0.0);
        if dist == 0.0 {
            if r > 1.0 {
                return Ok(0.0);
            }
            if r < 1.0 {
                return Err(RampError::DivergentVelocity { index: r });
            }
        }
        let magnitude = r * dist.powf((r - 1.0) / r) * span.abs().powf(1.0 / r) / total;
        Ok(magnitude * span.signum())
    }

    /// Fraction of the way from start to end reached by `value`.
    pub fn progress_of(&self, value: f64) -> f64 {
        (value - self.start) / self.span()
    }
}

/// Index minimizing `|p'|` at the gap position `gap`, for a ramp from
/// `start` to `end`: `ln[(end - start) / (gap - start)]`.
pub fn optimal_index(start: f64, end: f64, gap: f64) -> Result<f64, RampError> {
    let ratio = (end - start) / (gap - start);
    let between = (start < gap && gap < end) || (end < gap && gap < start);
    if !between || !ratio.is_finite() {
        return Err(RampError::GapOutsideRamp { gap, start, end });
    }
    Ok(ratio.ln())
}

/// Schedules for `g`, `J` and `delta` sharing one total time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RampPlan {
    pub coupling: RampSchedule,
    pub hopping: RampSchedule,
    pub detuning: RampSchedule,
    pub duration: f64,
}

/// `dH/dt` at the gap and its decomposition over parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRate {
    /// `sum_p p'(p_gp) I_p`
    pub total: f64,
    pub coupling_velocity: f64,
    pub hopping_velocity: f64,
    pub detuning_velocity: f64,
    /// `g'/J'` from the analytic velocities, when both vary.
    pub coupling_over_hopping: Option<f64>,
    /// `(r_g/r_J) (g_gp - g(0)) / (J_gp - J(0))`, when both vary.
    pub predicted_ratio: Option<f64>,
}

impl RampPlan {
    pub fn new(
        coupling: RampSchedule,
        hopping: RampSchedule,
        detuning: RampSchedule,
        duration: f64,
    ) -> Result<Self, RampError> {
        check_duration(duration)?;
        for s in [&coupling, &hopping, &detuning] {
            check_index(s.index)?;
        }
        debug_assert_eq!(coupling.parameter, Parameter::Coupling);
        debug_assert_eq!(hopping.parameter, Parameter::Hopping);
        debug_assert_eq!(detuning.parameter, Parameter::Detuning);
        Ok(RampPlan { coupling, hopping, detuning, duration })
    }

    /// Constant Hamiltonian at `params` for time `duration`.
    pub fn stationary(params: &LatticeParams, duration: f64) -> Result<Self, RampError> {
        RampPlan::new(
            RampSchedule::constant(Parameter::Coupling, params.coupling),
            RampSchedule::constant(Parameter::Hopping, params.hopping),
            RampSchedule::constant(Parameter::Detuning, params.detuning),
            duration,
        )
    }

    pub fn schedule(&self, p: Parameter) -> &RampSchedule {
        match p {
            Parameter::Coupling => &self.coupling,
            Parameter::Hopping => &self.hopping,
            Parameter::Detuning => &self.detuning,
        }
    }

    pub fn schedules(&self) -> [&RampSchedule; 3] {
        [&self.coupling, &self.hopping, &self.detuning]
    }

    pub fn start_params(&self) -> LatticeParams {
        LatticeParams::new(self.coupling.start, self.hopping.start, self.detuning.start)
    }

    pub fn end_params(&self) -> LatticeParams {
        LatticeParams::new(self.coupling.end, self.hopping.end, self.detuning.end)
    }

    /// Parameters at normalized time `u = t/T`.
    #[inline]
    pub fn params_at_fraction(&self, u: f64) -> LatticeParams {
        LatticeParams::new(
            self.coupling.value_at_fraction(u),
            self.hopping.value_at_fraction(u),
            self.detuning.value_at_fraction(u),
        )
    }

    pub fn params_at(&self, t: f64) -> Result<LatticeParams, RampError> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(RampError::TimeOutOfRange { t, total: self.duration });
        }
        Ok(self.params_at_fraction(t / self.duration))
    }

    /// Varying parameter with the largest `|p(T) - p(0)|`; `J` wins ties.
    pub fn reference(&self) -> Option<Parameter> {
        let order = [Parameter::Hopping, Parameter::Coupling, Parameter::Detuning];
        let mut best: Option<(Parameter, f64)> = None;
        for p in order {
            let s = self.schedule(p);
            if s.is_constant() {
                continue;
            }
            let span = s.span().abs();
            if best.map_or(true, |(_, b)| span > b) {
                best = Some((p, span));
            }
        }
        best.map(|(p, _)| p)
    }

    /// Point on the trajectory at progress `s` of the reference parameter.
    ///
    /// All varying parameters share the value of
    /// `[(p - p(0)) / (p(T) - p(0))]^(1/r_p)`, which makes the result depend
    /// only on index ratios.
    pub fn trajectory_point(&self, s: f64) -> Result<LatticeParams, RampError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(RampError::ProgressOutOfRange(s));
        }
        let Some(reference) = self.reference() else {
            return Ok(self.start_params());
        };
        let r_ref = self.schedule(reference).index;
        let point = |sch: &RampSchedule| {
            if sch.is_constant() || s == 0.0 {
                sch.start
            } else {
                sch.start + sch.span() * s.powf(sch.index / r_ref)
            }
        };
        Ok(LatticeParams::new(point(&self.coupling), point(&self.hopping), point(&self.detuning)))
    }

    /// Time at which the trajectory reaches progress `s`.
    pub fn time_of_progress(&self, s: f64) -> Result<f64, RampError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(RampError::ProgressOutOfRange(s));
        }
        let r_ref = self.reference().map_or(1.0, |p| self.schedule(p).index);
        Ok(self.duration * s.powf(1.0 / r_ref))
    }

    /// Same trajectory and duration with every index multiplied by `factor`.
    pub fn with_indices_scaled(&self, factor: f64) -> Result<Self, RampError> {
        let mut out = *self;
        out.coupling.index *= factor;
        out.hopping.index *= factor;
        out.detuning.index *= factor;
        RampPlan::new(out.coupling, out.hopping, out.detuning, out.duration)
    }

    /// Hamiltonian sweep rate at the gap,
    /// `H'_gp = sum_p p'(p_gp) <dH/dp>_gp`.
    pub fn sweep_rate_at_gap(
        &self,
        gap: &GapReport,
        partials: &HamiltonianPartials,
    ) -> Result<SweepRate, RampError> {
        let vel = |p: Parameter| -> Result<f64, RampError> {
            self.schedule(p).velocity_at(p.of(&gap.params), self.duration)
        };
        let coupling_velocity = vel(Parameter::Coupling)?;
        let hopping_velocity = vel(Parameter::Hopping)?;
        let detuning_velocity = vel(Parameter::Detuning)?;
        let total = coupling_velocity * partials.coupling
            + hopping_velocity * partials.hopping
            + detuning_velocity * partials.detuning;
        let both = !self.coupling.is_constant() && !self.hopping.is_constant();
        let (coupling_over_hopping, predicted_ratio) = if both {
            let predicted = (self.coupling.index / self.hopping.index)
                * (gap.params.coupling - self.coupling.start)
                / (gap.params.hopping - self.hopping.start);
            (Some(coupling_velocity / hopping_velocity), Some(predicted))
        } else {
            (None, None)
        };
        Ok(SweepRate {
            total,
            coupling_velocity,
            hopping_velocity,
            detuning_velocity,
            coupling_over_hopping,
            predicted_ratio,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn hop(start: f64, end: f64, index: f64) -> RampSchedule {
        RampSchedule::new(Parameter::Hopping, start, end, index).unwrap()
    }

    #[test]
    fn endpoints_and_midpoints() {
        let s = hop(0.2, 0.7, 2.5);
        assert_eq!(s.value_at(0.0, 3.0).unwrap(), 0.2);
        assert!((s.value_at(3.0, 3.0).unwrap() - 0.7).abs() < 1e-15);
        let lin = hop(0.2, 0.6, 1.0);
        assert!((lin.value_at(1.5, 3.0).unwrap() - 0.4).abs() < 1e-15);
        let quad = hop(0.0, 0.5, 2.0);
        assert!((quad.value_at(0.5, 1.0).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn time_outside_ramp_is_rejected() {
        let s = hop(0.0, 1.0, 1.0);
        assert!(matches!(s.value_at(-0.1, 1.0), Err(RampError::TimeOutOfRange { .. })));
        assert!(matches!(s.value_at(1.1, 1.0), Err(RampError::TimeOutOfRange { .. })));
        assert!(RampSchedule::new(Parameter::Hopping, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn linear_velocity_is_constant() {
        let s = hop(0.1, 0.5, 1.0);
        for p in [0.1, 0.2, 0.45, 0.5] {
            assert!((s.velocity_at(p, 2.0).unwrap() - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn velocity_at_start() {
        assert_eq!(hop(0.0, 0.8, 2.0).velocity_at(0.0, 1.0).unwrap(), 0.0);
        assert!(matches!(
            hop(0.0, 0.8, 0.5).velocity_at(0.0, 1.0),
            Err(RampError::DivergentVelocity { .. })
        ));
        assert!(hop(0.0, 0.8, 2.0).velocity_at(0.9, 1.0).is_err());
    }

    #[test]
    fn velocity_at_mott_to_superfluid_gap() {
        let v = hop(0.0, 0.5, 1.41).velocity_at(0.122, 15.0 * PI).unwrap();
        assert!((v - 0.0099).abs() < 2e-4, "{v}");
    }

    #[test]
    fn decreasing_ramp_has_negative_velocity() {
        let s = hop(0.5, 0.0, 0.7);
        let v = s.velocity_at(0.3, 1.0).unwrap();
        assert!(v < 0.0);
        // centered difference in time at the matching instant
        let u = (s.progress_of(0.3)).powf(1.0 / 0.7);
        let h = 1e-6;
        let fd = (s.value_at_fraction(u + h) - s.value_at_fraction(u - h)) / (2.0 * h);
        assert!((v - fd).abs() < 1e-6 * fd.abs());
    }

    #[test]
    fn optimal_index_values() {
        assert!((optimal_index(0.0, 0.5, 0.122).unwrap() - 1.41).abs() < 0.01);
        assert!((optimal_index(0.5, 0.0, 0.104).unwrap() - 0.234).abs() < 0.002);
        let gap = 0.3 + 0.9 / E;
        assert!((optimal_index(0.3, 1.2, gap).unwrap() - 1.0).abs() < 1e-12);
        assert!(optimal_index(0.0, 0.5, 0.6).is_err());
        assert!(optimal_index(0.0, 0.5, 0.0).is_err());
    }

    fn sf_to_mi(ratio: f64, r_j: f64) -> RampPlan {
        RampPlan::new(
            RampSchedule::new(Parameter::Coupling, 0.0, 1.0, ratio * r_j).unwrap(),
            hop(0.5, 0.0, r_j),
            RampSchedule::constant(Parameter::Detuning, 0.0),
            15.0 * PI,
        )
        .unwrap()
    }

    #[test]
    fn trajectory_endpoints() {
        let plan = sf_to_mi(2.0, 0.8);
        assert_eq!(plan.trajectory_point(0.0).unwrap(), plan.start_params());
        assert_eq!(plan.trajectory_point(1.0).unwrap(), plan.end_params());
        assert_eq!(plan.reference(), Some(Parameter::Coupling));
    }

    #[test]
    fn reference_prefers_hopping_on_ties() {
        let plan = RampPlan::new(
            RampSchedule::new(Parameter::Coupling, 0.0, 0.5, 1.0).unwrap(),
            hop(0.5, 0.0, 1.0),
            RampSchedule::constant(Parameter::Detuning, 0.0),
            1.0,
        )
        .unwrap();
        assert_eq!(plan.reference(), Some(Parameter::Hopping));
    }

    #[test]
    fn trajectory_depends_only_on_ratios() {
        let a = sf_to_mi(1.0, 1.0);
        let b = sf_to_mi(1.0, 2.0);
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            let pa = a.trajectory_point(s).unwrap();
            let pb = b.trajectory_point(s).unwrap();
            assert!((pa.coupling - pb.coupling).abs() < 1e-12);
            assert!((pa.hopping - pb.hopping).abs() < 1e-12);
        }
    }

    #[test]
    fn trajectory_matches_time_elimination() {
        // r_g / r_J = 2: find t with J(t) = 0.25 by bisection, then read g(t).
        let plan = sf_to_mi(2.0, 0.9);
        let (mut lo, mut hi) = (0.0, plan.duration);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if plan.hopping.value_at(mid, plan.duration).unwrap() > 0.25 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g_direct = plan.coupling.value_at(0.5 * (lo + hi), plan.duration).unwrap();
        assert!((g_direct - 0.25).abs() < 1e-10);
        let s = 0.25; // progress of g, the reference
        let p = plan.trajectory_point(s).unwrap();
        assert!((p.hopping - 0.25).abs() < 1e-12);
        assert!((p.coupling - g_direct).abs() < 1e-10);
    }

    #[test]
    fn time_of_progress_inverts_reference_ramp() {
        let plan = sf_to_mi(1.0, 0.6);
        let t = plan.time_of_progress(0.37).unwrap();
        let p = plan.params_at(t).unwrap();
        let q = plan.trajectory_point(0.37).unwrap();
        assert!((p.coupling - q.coupling).abs() < 1e-12);
        assert!((p.hopping - q.hopping).abs() < 1e-12);
    }

    #[test]
    fn sweep_rate_single_parameter() {
        let plan = RampPlan::new(
            RampSchedule::constant(Parameter::Coupling, 1.0),
            hop(0.0, 0.5, 1.41),
            RampSchedule::constant(Parameter::Detuning, 0.0),
            15.0 * PI,
        )
        .unwrap();
        let gap = GapReport { s: 0.244, params: LatticeParams::new(1.0, 0.122, 0.0), gap: 0.31 };
        let partials = HamiltonianPartials { coupling: -5.0, hopping: -2.0, detuning: 3.0 };
        let rate = plan.sweep_rate_at_gap(&gap, &partials).unwrap();
        assert_eq!(rate.coupling_velocity, 0.0);
        assert!((rate.total - rate.hopping_velocity * -2.0).abs() < 1e-15);
        assert!(rate.coupling_over_hopping.is_none());
    }

    #[test]
    fn sweep_rate_ratio_identity() {
        for (ratio, r_j) in [(1.0, 1.0), (0.5, 0.8), (3.0, 0.4)] {
            let plan = sf_to_mi(ratio, r_j);
            let params = plan.trajectory_point(0.41).unwrap();
            let gap = GapReport { s: 0.41, params, gap: 0.25 };
            let partials = HamiltonianPartials { coupling: -4.0, hopping: -3.0, detuning: 0.0 };
            let rate = plan.sweep_rate_at_gap(&gap, &partials).unwrap();
            let got = rate.coupling_over_hopping.unwrap();
            // g(0) = 0 here, so the prediction reduces to (r_g/r_J) g_gp / (J_gp - J(0)).
            let literal = ratio * params.coupling / (params.hopping - 0.5);
            assert!((got - literal).abs() < 1e-10 * literal.abs(), "{got} vs {literal}");
            assert!((rate.predicted_ratio.unwrap() - literal).abs() < 1e-12);
            let doubled = plan.with_indices_scaled(2.0).unwrap();
            let gap2 = GapReport { s: 0.41, params: doubled.trajectory_point(0.41).unwrap(), gap: 0.25 };
            let rate2 = doubled.sweep_rate_at_gap(&gap2, &partials).unwrap();
            assert!((rate2.coupling_over_hopping.unwrap() - got).abs() < 1e-10 * got.abs());
        }
    }
}
