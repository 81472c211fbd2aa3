//! Third-order TVD Runge–Kutta stepping and time-step control.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fv::{CellField1D, FvScheme, LimiterEvent, Residual};
use crate::model::HyperbolicModel;

/// Relative slack below which a leftover time interval is absorbed into
/// the current step instead of producing a sliver step.
const SLIVER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DtPolicy {
    /// `cfl·Δx/α` from the current field.
    Cfl,
    /// `Δx^exponent`, independent of the field.
    Power { exponent: f64 },
    Fixed { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepController {
    pub cfl: f64,
    pub policy: DtPolicy,
    pub t_final: f64,
    /// Cap used when the field carries no waves.
    pub dt_max: f64,
}

impl StepController {
    pub fn new(t_final: f64) -> Self {
        Self {
            cfl: 0.6,
            policy: DtPolicy::Cfl,
            t_final,
            dt_max: f64::INFINITY,
        }
    }

    pub fn with_policy(mut self, policy: DtPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        match self.policy {
            DtPolicy::Fixed { dt } if !(dt > 0.0) => {
                Err(Error::Config(format!("fixed time step must be positive, got {dt}")))
            }
            DtPolicy::Power { exponent } if !(exponent > 0.0) => {
                Err(Error::Config(format!("time-step exponent must be positive, got {exponent}")))
            }
            _ => Ok(()),
        }
    }

    /// Unclipped step for mesh width `dx` and wave-speed bound `alpha`.
    pub fn raw_dt(&self, dx: f64, alpha: f64) -> f64 {
        let dt = match self.policy {
            DtPolicy::Cfl if alpha > 0.0 => self.cfl * dx / alpha,
            DtPolicy::Cfl => f64::INFINITY,
            DtPolicy::Power { exponent } => dx.powf(exponent),
            DtPolicy::Fixed { dt } => dt,
        };
        dt.min(self.dt_max)
    }

    /// Step at time `t`, clipped so the run lands on `t_final`.
    pub fn compute_dt(&self, dx: f64, alpha: f64, t: f64) -> f64 {
        clip(self.raw_dt(dx, alpha), self.t_final - t)
    }
}

/// `min(dt, remaining)` with the sign of `remaining`, absorbing slivers.
fn clip(dt: f64, remaining: f64) -> f64 {
    let left = remaining.abs();
    if dt >= left * (1.0 - SLIVER) {
        remaining
    } else {
        dt.copysign(remaining)
    }
}

/// Outcome of one Runge–Kutta step.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub dt: f64,
    /// Largest interface `α` seen in the first stage.
    pub alpha: f64,
    pub events: Vec<LimiterEvent>,
}

fn axpy(out: &mut [f64], a: f64, x: &[f64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

/// One TVD-RK3 step whose size is chosen from the first-stage `α`.
///
/// The stages are `U* = Uⁿ + Δt L(Uⁿ)`, `U** = ¾Uⁿ + ¼(U* + Δt L(U*))`,
/// `Uⁿ⁺¹ = ⅓Uⁿ + ⅔(U** + Δt L(U**))`, written here in increment form.
/// Limiters and ghost filling run before every evaluation of `L`.
pub fn rk3_step_with<M: HyperbolicModel>(
    scheme: &FvScheme<M>,
    field: &mut CellField1D,
    t: f64,
    choose_dt: impl FnOnce(f64) -> f64,
) -> Result<StepReport> {
    let Residual {
        rate: r1,
        alpha,
        mut events,
    } = scheme.evaluate(field, t)?;
    let dt = choose_dt(alpha);
    if dt == 0.0 {
        return Ok(StepReport { dt, alpha, events });
    }
    if !dt.is_finite() {
        return Err(Error::Config(format!("time step {dt} is not finite")));
    }
    let base = field.interior().to_vec();

    let mut stage = field.clone();
    axpy(stage.interior_mut(), dt, &r1);
    let mut r2 = scheme.evaluate(&mut stage, t + dt)?;
    events.append(&mut r2.events);

    let s = stage.interior_mut();
    s.copy_from_slice(&base);
    for ((o, a), b) in s.iter_mut().zip(&r1).zip(&r2.rate) {
        *o += 0.25 * dt * (a + b);
    }
    let mut r3 = scheme.evaluate(&mut stage, t + 0.5 * dt)?;
    events.append(&mut r3.events);

    let u = field.interior_mut();
    u.copy_from_slice(&base);
    for (((o, a), b), c) in u.iter_mut().zip(&r1).zip(&r2.rate).zip(&r3.rate) {
        *o += dt / 6.0 * (a + b + 4.0 * c);
    }
    Ok(StepReport { dt, alpha, events })
}

/// One TVD-RK3 step of prescribed size.
pub fn rk3_step<M: HyperbolicModel>(
    scheme: &FvScheme<M>,
    field: &mut CellField1D,
    t: f64,
    dt: f64,
) -> Result<StepReport> {
    if dt == 0.0 {
        return Ok(StepReport {
            dt,
            alpha: 0.0,
            events: Vec::new(),
        });
    }
    rk3_step_with(scheme, field, t, |_| dt)
}

/// Summary of a multi-step advance.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AdvanceLog {
    pub steps: usize,
    pub t: f64,
    pub max_alpha: f64,
    pub events: Vec<LimiterEvent>,
}

impl AdvanceLog {
    fn record(&mut self, report: StepReport) {
        let step = self.steps;
        self.events.extend(report.events.into_iter().map(|mut e| {
            e.step = step;
            e
        }));
        self.max_alpha = self.max_alpha.max(report.alpha);
        self.t += report.dt;
        self.steps += 1;
    }
}

/// Advances from `t0` to `controller.t_final`, choosing each step from the
/// current field.
pub fn advance_to<M: HyperbolicModel>(
    scheme: &FvScheme<M>,
    field: &mut CellField1D,
    t0: f64,
    controller: &StepController,
) -> Result<AdvanceLog> {
    controller.validate()?;
    let dx = scheme.mesh().dx();
    let mut log = AdvanceLog {
        t: t0,
        ..Default::default()
    };
    while log.t < controller.t_final {
        let t = log.t;
        let report = rk3_step_with(scheme, field, t, |alpha| controller.compute_dt(dx, alpha, t))?;
        let landed = report.dt == controller.t_final - t;
        log.record(report);
        if landed {
            log.t = controller.t_final;
        }
        log::trace!("step {} t = {:.6}", log.steps, log.t);
    }
    Ok(log)
}

/// Advances by a signed interval `tau`, sub-stepping so that every step
/// satisfies `|Δt| ≤ cfl·Δx/α`.
pub fn advance_by<M: HyperbolicModel>(
    scheme: &FvScheme<M>,
    field: &mut CellField1D,
    t0: f64,
    tau: f64,
    cfl: f64,
) -> Result<AdvanceLog> {
    let dx = scheme.mesh().dx();
    let mut log = AdvanceLog {
        t: t0,
        ..Default::default()
    };
    let mut remaining = tau;
    while remaining != 0.0 {
        let report = rk3_step_with(scheme, field, log.t, |alpha| {
            let bound = if alpha > 0.0 { cfl * dx / alpha } else { f64::INFINITY };
            clip(bound, remaining)
        })?;
        remaining = if report.dt == remaining { 0.0 } else { remaining - report.dt };
        log.record(report);
    }
    log.t = t0 + tau;
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::SgSystem;
    use crate::fv::{Boundary, Mesh1D};
    use crate::model::{Axis, EulerEquations};
    use crate::state::GpcState;

    fn scheme(n: usize) -> FvScheme<EulerEquations> {
        let sys = SgSystem::new(EulerEquations::one_d(1.4), 2, None).unwrap();
        FvScheme::new(sys, Mesh1D::new(n, 0.0, 1.0).unwrap(), Axis::X)
    }

    fn wave_field(n: usize) -> CellField1D {
        let model = EulerEquations::one_d(1.4);
        let states: Vec<GpcState> = (0..n)
            .map(|j| {
                let x = (j as f64 + 0.5) / n as f64;
                let rho = 1.0 + 0.2 * (2.0 * std::f64::consts::PI * x).sin();
                let mut s = GpcState::deterministic(&model.conserved(&[rho, 0.8, 1.0], 0.0), 3);
                s.mode_mut(1)[1] = 0.2 * rho / 3f64.sqrt();
                s
            })
            .collect();
        CellField1D::from_states(&states, Boundary::Periodic, Boundary::Periodic).unwrap()
    }

    #[test]
    fn controller_arithmetic() {
        let c = StepController::new(1.0);
        assert!((c.compute_dt(0.01, 2.0, 0.0) - 0.003).abs() < 1e-18);
        let acc = StepController::new(1.0).with_policy(DtPolicy::Power { exponent: 5.0 / 3.0 });
        assert_eq!(acc.compute_dt(0.05, 7.0, 0.0), 0.05f64.powf(5.0 / 3.0));
        assert_eq!(c.compute_dt(0.01, 2.0, 0.999), 1.0 - 0.999);
        let mut capped = StepController::new(1.0);
        capped.dt_max = 0.1;
        assert_eq!(capped.compute_dt(0.01, 0.0, 0.0), 0.1);
        assert_eq!(StepController::new(0.5).compute_dt(0.01, 0.0, 0.0), 0.5);
        assert!(StepController::new(1.0).with_cfl(1.5).validate().is_err());
        assert!(StepController::new(1.0).with_cfl(0.0).validate().is_err());
    }

    #[test]
    fn clip_keeps_sign_and_absorbs_slivers() {
        assert_eq!(clip(0.1, -1.0), -0.1);
        assert_eq!(clip(0.1, 0.25), 0.1);
        assert_eq!(clip(0.25 * (1.0 - 1e-14), 0.25), 0.25);
        assert_eq!(clip(1.0, -0.3), -0.3);
    }

    #[test]
    fn zero_step_is_identity() {
        let s = scheme(16);
        let mut f = wave_field(16);
        let before = f.interior().to_vec();
        rk3_step(&s, &mut f, 0.0, 0.0).unwrap();
        assert_eq!(f.interior(), &before[..]);
        rk3_step_with(&s, &mut f, 0.0, |_| 0.0).unwrap();
        assert_eq!(f.interior(), &before[..]);
    }

    #[test]
    fn constant_field_is_stationary() {
        let s = scheme(8);
        let model = EulerEquations::one_d(1.4);
        let st = GpcState::deterministic(&model.conserved(&[1.0, 0.5, 1.0], 0.0), 3);
        let mut f = CellField1D::from_states(&vec![st; 8], Boundary::Outflow, Boundary::Outflow).unwrap();
        let before = f.interior().to_vec();
        let log = advance_to(&s, &mut f, 0.0, &StepController::new(0.3)).unwrap();
        assert_eq!(f.interior(), &before[..]);
        assert_eq!(log.t, 0.3);
        assert!(log.steps > 1);
    }

    /// Scalar surrogate `u' = λu` through the same stage formulas.
    fn rk3_scalar(lambda: f64, u: f64, dt: f64) -> f64 {
        let r1 = lambda * u;
        let u1 = u + dt * r1;
        let r2 = lambda * u1;
        let u2 = u + 0.25 * dt * (r1 + r2);
        let r3 = lambda * u2;
        u + dt / 6.0 * (r1 + r2 + 4.0 * r3)
    }

    #[test]
    fn scalar_surrogate_matches_exponential() {
        let got = rk3_scalar(-1.0, 1.0, 1e-2);
        assert!((got - (-0.01f64).exp()).abs() <= 5e-9);
        // increment form equals the convex-combination form
        let (l, u, dt) = (-0.7, 1.3, 0.2);
        let u1 = u + dt * l * u;
        let u2 = 0.75 * u + 0.25 * (u1 + dt * l * u1);
        let u3 = u / 3.0 + 2.0 / 3.0 * (u2 + dt * l * u2);
        assert!((rk3_scalar(l, u, dt) - u3).abs() < 1e-15);
    }

    #[test]
    fn forward_then_backward_returns() {
        let s = scheme(40);
        let mut f = wave_field(40);
        let before = f.interior().to_vec();
        let fwd = advance_by(&s, &mut f, 0.0, 0.01, 0.6).unwrap();
        let bwd = advance_by(&s, &mut f, 0.01, -0.01, 0.6).unwrap();
        assert_eq!(bwd.t, 0.0);
        assert!(fwd.steps >= 1 && bwd.steps >= 1);
        let err = f.interior().iter().zip(&before).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-5, "round trip error {err}");
    }

    #[test]
    fn sub_steps_respect_the_cfl_bound() {
        let s = scheme(20);
        let mut f = wave_field(20);
        let log = advance_by(&s, &mut f, 0.0, -0.2, 0.5).unwrap();
        // α ≥ u + c ≈ 2 gives at least 0.2 / (0.5 · 0.05 / 2) = 16 sub-steps
        assert!(log.steps >= 16, "{}", log.steps);
        assert!((log.t + 0.2).abs() < 1e-15);
    }
}
