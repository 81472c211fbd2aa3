//! Dimensional splitting for two-dimensional systems.
//!
//! Each sweep runs the one-dimensional scheme along every grid line of one
//! axis. The third-order schedule
//!
//! ```text
//! Uⁿ⁺¹ = E_x^{τ₁} E_y^{τ₁+τ₂} E_x^{τ₂} E_y^{τ₃} E_x^{τ₃+τ₄} E_y^{τ₄} Uⁿ
//! ```
//!
//! (operators applied right to left) contains negative sweep times, which
//! are executed by running the same scheme backward in time. The mirrored
//! ordering with `x` and `y` exchanged is used on alternate steps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fv::{Boundary, CellField1D, FvScheme, Mesh1D};
use crate::model::{Axis, HyperbolicModel};
use crate::state::GpcState;
use crate::time::{advance_by, AdvanceLog, DtPolicy, StepController};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh2D {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
}

impl Mesh2D {
    pub fn new(nx: usize, ny: usize, x_range: (f64, f64), y_range: (f64, f64)) -> Result<Self> {
        Mesh1D::new(nx, x_range.0, x_range.1)?;
        Mesh1D::new(ny, y_range.0, y_range.1)?;
        Ok(Self {
            nx,
            ny,
            x_range,
            y_range,
        })
    }

    pub fn x_mesh(&self) -> Mesh1D {
        Mesh1D {
            n_cells: self.nx,
            lower: self.x_range.0,
            upper: self.x_range.1,
        }
    }

    pub fn y_mesh(&self) -> Mesh1D {
        Mesh1D {
            n_cells: self.ny,
            lower: self.y_range.0,
            upper: self.y_range.1,
        }
    }

    pub fn dx(&self) -> f64 {
        self.x_mesh().dx()
    }

    pub fn dy(&self) -> f64 {
        self.y_mesh().dx()
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x_mesh().center(i), self.y_mesh().center(j))
    }
}

/// Cell averages on an `nx × ny` grid, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField2D {
    nx: usize,
    ny: usize,
    n_vars: usize,
    n_modes: usize,
    data: Vec<f64>,
}

impl CellField2D {
    pub fn zeros(nx: usize, ny: usize, n_vars: usize, n_modes: usize) -> Self {
        Self {
            nx,
            ny,
            n_vars,
            n_modes,
            data: vec![0.0; nx * ny * n_vars * n_modes],
        }
    }

    pub fn from_data(nx: usize, ny: usize, n_vars: usize, n_modes: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * ny * n_vars * n_modes {
            return Err(Error::MeshMismatch(format!(
                "{} values for a {nx}×{ny} grid of {}-coefficient cells",
                data.len(),
                n_vars * n_modes
            )));
        }
        Ok(Self {
            nx,
            ny,
            n_vars,
            n_modes,
            data,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn stride(&self) -> usize {
        self.n_vars * self.n_modes
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let s = self.stride();
        let k = j * self.nx + i;
        &self.data[k * s..(k + 1) * s]
    }

    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let s = self.stride();
        let k = j * self.nx + i;
        &mut self.data[k * s..(k + 1) * s]
    }

    pub fn state(&self, i: usize, j: usize) -> GpcState {
        GpcState::from_flat(self.n_vars, self.cell(i, j).to_vec())
    }

    /// Number of grid lines along `axis` and cells per line.
    pub fn lines(&self, axis: Axis) -> (usize, usize) {
        match axis {
            Axis::X => (self.ny, self.nx),
            Axis::Y => (self.nx, self.ny),
        }
    }

    /// Coefficients of line `l` along `axis`, cell after cell.
    pub fn line(&self, axis: Axis, l: usize) -> Vec<f64> {
        let (_, len) = self.lines(axis);
        let mut out = Vec::with_capacity(len * self.stride());
        for k in 0..len {
            let (i, j) = match axis {
                Axis::X => (k, l),
                Axis::Y => (l, k),
            };
            out.extend_from_slice(self.cell(i, j));
        }
        out
    }

    pub fn set_line(&mut self, axis: Axis, l: usize, values: &[f64]) {
        let s = self.stride();
        let (_, len) = self.lines(axis);
        for k in 0..len {
            let (i, j) = match axis {
                Axis::X => (k, l),
                Axis::Y => (l, k),
            };
            self.cell_mut(i, j).copy_from_slice(&values[k * s..(k + 1) * s]);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// `E_x^{Δt/2} E_y^{Δt} E_x^{Δt/2}`.
    #[default]
    Strang,
    /// Six-sweep third-order schedule with negative substeps.
    ThirdOrder,
}

/// Which of the two mirrored third-order orderings a step uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Outermost (last applied) sweep along `x`.
    #[default]
    XOuter,
    YOuter,
}

impl Parity {
    pub fn flipped(self) -> Self {
        match self {
            Parity::XOuter => Parity::YOuter,
            Parity::YOuter => Parity::XOuter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSchedule {
    pub dt: f64,
    pub taus: [f64; 4],
    pub mode: SplitMode,
    pub parity: Parity,
}

/// The four third-order substep lengths for a step of size `dt`.
pub fn split_coefficients(dt: f64) -> [f64; 4] {
    let r13 = 13f64.sqrt();
    let q = (2.0 * (1.0 + r13)).sqrt();
    let t1 = 2.0 * dt / (5.0 - r13 + q);
    let t2 = (7.0 + r13 - q) / 12.0 * dt;
    let t3 = t1 * t1 / (t2 - t1);
    let t4 = dt - (t1 + t2 + t3);
    [t1, t2, t3, t4]
}

impl SplitSchedule {
    pub fn new(dt: f64, mode: SplitMode, parity: Parity) -> Self {
        Self {
            dt,
            taus: split_coefficients(dt),
            mode,
            parity,
        }
    }

    /// Sweeps in application order.
    pub fn sweeps(&self) -> Vec<(Axis, f64)> {
        let [t1, t2, t3, t4] = self.taus;
        match self.mode {
            SplitMode::Strang => {
                let dt = self.dt;
                vec![(Axis::X, 0.5 * dt), (Axis::Y, dt), (Axis::X, 0.5 * dt)]
            }
            SplitMode::ThirdOrder => {
                let (outer, inner) = match self.parity {
                    Parity::XOuter => (Axis::X, Axis::Y),
                    Parity::YOuter => (Axis::Y, Axis::X),
                };
                vec![
                    (inner, t4),
                    (outer, t3 + t4),
                    (inner, t3),
                    (outer, t2),
                    (inner, t1 + t2),
                    (outer, t1),
                ]
            }
        }
    }
}

/// Split solver: one 1D scheme per axis plus boundary policies.
#[derive(Debug, Clone)]
pub struct SplitSolver<M> {
    x: FvScheme<M>,
    y: FvScheme<M>,
    boundary_x: (Boundary, Boundary),
    boundary_y: (Boundary, Boundary),
    pub cfl: f64,
    pub mode: SplitMode,
    /// Start parity and whether it flips every step.
    pub parity: Parity,
    pub alternate: bool,
}

impl<M: HyperbolicModel> SplitSolver<M> {
    pub fn new(
        x: FvScheme<M>,
        y: FvScheme<M>,
        boundary_x: (Boundary, Boundary),
        boundary_y: (Boundary, Boundary),
    ) -> Result<Self> {
        if x.axis() != Axis::X || y.axis() != Axis::Y {
            return Err(Error::Config("sweep schemes must act along x and y".into()));
        }
        Ok(Self {
            x,
            y,
            boundary_x,
            boundary_y,
            cfl: 0.6,
            mode: SplitMode::Strang,
            parity: Parity::XOuter,
            alternate: true,
        })
    }

    pub fn with_mode(mut self, mode: SplitMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mesh(&self) -> Mesh2D {
        let (mx, my) = (self.x.mesh(), self.y.mesh());
        Mesh2D {
            nx: mx.n_cells,
            ny: my.n_cells,
            x_range: (mx.lower, mx.upper),
            y_range: (my.lower, my.upper),
        }
    }

    pub fn scheme(&self, axis: Axis) -> &FvScheme<M> {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    fn check_shape(&self, field: &CellField2D) -> Result<()> {
        let m = self.mesh();
        if field.nx != m.nx || field.ny != m.ny || field.stride() != self.x.system().state_len() {
            return Err(Error::MeshMismatch(format!(
                "field is {}×{} with {} coefficients per cell, solver expects {}×{} with {}",
                field.nx,
                field.ny,
                field.stride(),
                m.nx,
                m.ny,
                self.x.system().state_len()
            )));
        }
        Ok(())
    }

    /// Runs the 1D scheme for time `tau` on every line along `axis`.
    pub fn sweep(&self, field: &mut CellField2D, axis: Axis, tau: f64, t: f64) -> Result<AdvanceLog> {
        self.check_shape(field)?;
        if tau == 0.0 {
            return Ok(AdvanceLog {
                t: t + tau,
                ..Default::default()
            });
        }
        let (scheme, (left, right)) = match axis {
            Axis::X => (&self.x, &self.boundary_x),
            Axis::Y => (&self.y, &self.boundary_y),
        };
        let (n_lines, _) = field.lines(axis);
        let (nv, nm) = (field.n_vars, field.n_modes);
        let results: Vec<(Vec<f64>, AdvanceLog)> = (0..n_lines)
            .into_par_iter()
            .map(|l| {
                let run = || -> Result<_> {
                    let mut line =
                        CellField1D::from_interior(nv, nm, &field.line(axis, l), left.clone(), right.clone())?;
                    let log = advance_by(scheme, &mut line, t, tau, self.cfl)?;
                    Ok((line.interior().to_vec(), log))
                };
                run().map_err(|e| e.on_line(l))
            })
            .collect::<Result<_>>()?;
        let mut total = AdvanceLog {
            t: t + tau,
            ..Default::default()
        };
        for (l, (values, log)) in results.into_iter().enumerate() {
            field.set_line(axis, l, &values);
            total.steps = total.steps.max(log.steps);
            total.max_alpha = total.max_alpha.max(log.max_alpha);
            total.events.extend(log.events.into_iter().map(|mut e| {
                e.line = Some(l);
                e
            }));
        }
        Ok(total)
    }

    /// One split step of size `dt` using `parity` for the third-order ordering.
    pub fn step(&self, field: &mut CellField2D, t: f64, dt: f64, parity: Parity) -> Result<AdvanceLog> {
        let schedule = SplitSchedule::new(dt, self.mode, parity);
        let mut log = AdvanceLog {
            t,
            ..Default::default()
        };
        let mut elapsed = [0.0; 2];
        for (axis, tau) in schedule.sweeps() {
            let k = axis as usize;
            let s = self.sweep(field, axis, tau, t + elapsed[k])?;
            elapsed[k] += tau;
            log.steps += s.steps;
            log.max_alpha = log.max_alpha.max(s.max_alpha);
            log.events.extend(s.events);
        }
        log.t = t + dt;
        Ok(log)
    }

    /// Scaled wave-speed bounds `(α_x, α_y)` from the cell averages, each
    /// taken after the cell-average limiter the next sweep will apply.
    pub fn cell_alphas(&self, field: &CellField2D) -> Result<(f64, f64)> {
        self.check_shape(field)?;
        let s = field.stride();
        let pairs: Vec<(f64, f64)> = field
            .data
            .par_chunks_exact(s)
            .enumerate()
            .map(|(k, c)| {
                let run = || -> Result<(f64, f64)> {
                    let mut c = c.to_vec();
                    if self.x.limiters().average {
                        self.x.limit_cell_average(&mut c)?;
                    }
                    Ok((
                        self.x.system().state_wave_speed(&c, Axis::X)?,
                        self.y.system().state_wave_speed(&c, Axis::Y)?,
                    ))
                };
                run().map_err(|e| e.in_cell(k))
            })
            .collect::<Result<_>>()?;
        let (ax, ay) = pairs.into_iter().fold((0.0f64, 0.0f64), |(a, b), (x, y)| (a.max(x), b.max(y)));
        Ok((crate::assembly::ALPHA_SAFETY * ax, crate::assembly::ALPHA_SAFETY * ay))
    }

    /// Step size for the current field under `controller`.
    pub fn compute_dt(&self, field: &CellField2D, controller: &StepController, t: f64) -> Result<f64> {
        let m = self.mesh();
        let (dx, dy) = (m.dx(), m.dy());
        let raw = match controller.policy {
            DtPolicy::Cfl => {
                let (ax, ay) = self.cell_alphas(field)?;
                let rate = (ax / dx).max(ay / dy);
                controller.raw_dt(1.0, rate)
            }
            _ => controller.raw_dt(dx.min(dy), 0.0),
        };
        Ok(StepController {
            policy: DtPolicy::Fixed { dt: raw },
            ..*controller
        }
        .compute_dt(1.0, 0.0, t))
    }

    /// Advances to `controller.t_final`; sweeps sub-step on their own CFL
    /// bound, so `cfl` here only sets the outer step.
    pub fn advance_to(&self, field: &mut CellField2D, t0: f64, controller: &StepController) -> Result<AdvanceLog> {
        controller.validate()?;
        let mut log = AdvanceLog {
            t: t0,
            ..Default::default()
        };
        let mut parity = self.parity;
        let mut sweeps = 0;
        while log.t < controller.t_final {
            let dt = self.compute_dt(field, controller, log.t)?;
            let s = self.step(field, log.t, dt, parity)?;
            let step = log.steps;
            log.events.extend(s.events.into_iter().map(|mut e| {
                e.step = step;
                e
            }));
            log.max_alpha = log.max_alpha.max(s.max_alpha);
            sweeps += s.steps;
            log.steps += 1;
            log.t = if dt == controller.t_final - log.t {
                controller.t_final
            } else {
                log.t + dt
            };
            if self.alternate {
                parity = parity.flipped();
            }
        }
        log::debug!("{} split steps, {} line sub-steps", log.steps, sweeps);
        Ok(log)
    }
}
