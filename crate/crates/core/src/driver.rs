//! Run configuration and experiment orchestration: single runs,
//! convergence and order studies, and comparisons between runs.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::SgSystem;
use crate::basis::{gauss_rule, mean_std, project, ChaosBasis, LegendreBasis, QuadratureRule};
use crate::error::{Error, Result};
use crate::fv::{Boundary, CellField1D, FvScheme, InflowFn, LimiterEvent, LimiterKind, LimiterSettings, Mesh1D};
use crate::model::{Axis, EulerEquations, SpaceDim};
use crate::problems::{builtin_problem, exact_smooth, BoundaryKind, InitialData, ProblemSetup};
use crate::reference::{collocation_solve, restrict_1d, restrict_2d, shock_tube_stats, weighted_mean_std, CollocationPlan};
use crate::splitting::{CellField2D, Mesh2D, Parity, SplitMode, SplitSolver};
use crate::state::GpcState;
use crate::time::{advance_to, AdvanceLog, DtPolicy, StepController};

/// `ξ` nodes for projecting initial, boundary and exact data.
pub const PROJECTION_NODES: usize = 64;

/// Spatial Gauss points per cell (or sub-interval) for cell averages.
const CELL_GAUSS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Stochastic Galerkin finite-volume solver.
    #[default]
    Sg,
    /// Collocation over the deterministic finite-difference solver.
    Collocation,
    /// Closed-form solution, where one exists.
    Exact,
}

/// Everything needed to reproduce a run. All keys are optional in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    /// gPC order `M`.
    pub order: usize,
    /// Cells along `x`.
    pub cells: usize,
    /// Cells along `y` for 2D problems; defaults to `cells`.
    pub cells_y: Option<usize>,
    pub cfl: f64,
    pub dt_policy: DtPolicy,
    /// Gauss nodes for the Galerkin integrals; default `max(2(M+1), 8)`.
    pub xi_nodes: Option<usize>,
    pub limiters: LimiterSettings,
    pub split_mode: SplitMode,
    pub start_parity: Parity,
    pub alternate_parity: bool,
    pub solver: SolverKind,
    pub collocation_nodes: usize,
    /// Overrides the problem's final time.
    pub final_time: Option<f64>,
    /// Extra output times before the final time (Galerkin solver only).
    pub snapshot_times: Vec<f64>,
    pub out: Option<String>,
    pub vtk: bool,
    /// Echo the configuration without time stepping.
    pub dry_run: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: "smooth".into(),
            order: 4,
            cells: 100,
            cells_y: None,
            cfl: 0.6,
            dt_policy: DtPolicy::Cfl,
            xi_nodes: None,
            limiters: LimiterSettings::default(),
            split_mode: SplitMode::Strang,
            start_parity: Parity::XOuter,
            alternate_parity: true,
            solver: SolverKind::Sg,
            collocation_nodes: crate::reference::DEFAULT_COLLOCATION_NODES,
            final_time: None,
            snapshot_times: Vec::new(),
            out: None,
            vtk: false,
            dry_run: false,
        }
    }
}

impl RunConfig {
    pub fn for_problem(problem: &str) -> Self {
        Self {
            problem: problem.into(),
            ..Self::default()
        }
    }

    /// Problem with the final-time override applied.
    pub fn setup(&self) -> Result<ProblemSetup> {
        let mut p = builtin_problem(&self.problem)?;
        if let Some(t) = self.final_time {
            p.final_time = t;
        }
        Ok(p)
    }

    pub fn grid(&self, problem: &ProblemSetup) -> (usize, usize) {
        match problem.dim {
            SpaceDim::One => (self.cells, 1),
            SpaceDim::Two => (self.cells, self.cells_y.unwrap_or(self.cells)),
        }
    }

    pub fn controller(&self, problem: &ProblemSetup) -> StepController {
        StepController::new(problem.final_time)
            .with_cfl(self.cfl)
            .with_policy(self.dt_policy)
    }

    pub fn validate(&self) -> Result<ProblemSetup> {
        let p = self.setup()?;
        self.controller(&p).validate()?;
        if self.cells == 0 || self.cells_y == Some(0) {
            return Err(Error::Config("mesh needs at least one cell per direction".into()));
        }
        if p.dim == SpaceDim::One && self.cells_y.is_some_and(|n| n != 1) {
            return Err(Error::Config(format!("problem `{}` is one-dimensional", p.name)));
        }
        if !(p.final_time >= 0.0) {
            return Err(Error::Config(format!("final time must be nonnegative, got {}", p.final_time)));
        }
        if self.xi_nodes == Some(0) || self.collocation_nodes == 0 {
            return Err(Error::Config("quadrature rules need at least one node".into()));
        }
        if self.snapshot_times.iter().any(|&t| !(t > 0.0 && t < p.final_time)) {
            return Err(Error::Config("snapshot times must lie strictly inside (0, final time)".into()));
        }
        if !self.snapshot_times.is_empty() && self.solver != SolverKind::Sg {
            return Err(Error::Config("snapshots are only produced by the Galerkin solver".into()));
        }
        if self.solver == SolverKind::Exact && !has_exact_solution(&p) {
            return Err(Error::Config(format!("problem `{}` has no exact solution", p.name)));
        }
        Ok(p)
    }
}

/// Mean and standard deviation of the conserved variables per cell,
/// interleaved `[cell][variable]`, cells row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTable {
    pub time: f64,
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub dim: SpaceDim,
    pub variables: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn variable_names(dim: SpaceDim) -> Vec<String> {
    let names: &[&str] = match dim {
        SpaceDim::One => &["rho", "rho_u", "E"],
        SpaceDim::Two => &["rho", "rho_u", "rho_v", "E"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

impl FieldTable {
    fn new(problem: &ProblemSetup, grid: (usize, usize), time: f64, mean: Vec<f64>, std: Vec<f64>) -> Self {
        Self {
            time,
            nx: grid.0,
            ny: grid.1,
            x_range: problem.x_range,
            y_range: problem.y_range,
            dim: problem.dim,
            variables: variable_names(problem.dim),
            mean,
            std,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / self.ny as f64
    }

    /// Area (2D) or length (1D) of one cell.
    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            SpaceDim::One => self.dx(),
            SpaceDim::Two => self.dx() * self.dy(),
        }
    }

    pub fn x_center(&self, i: usize) -> f64 {
        self.x_range.0 + (i as f64 + 0.5) * self.dx()
    }

    pub fn y_center(&self, j: usize) -> f64 {
        self.y_range.0 + (j as f64 + 0.5) * self.dy()
    }

    pub fn mean_of(&self, var: usize) -> Vec<f64> {
        self.mean.iter().skip(var).step_by(self.n_vars()).copied().collect()
    }

    pub fn std_of(&self, var: usize) -> Vec<f64> {
        self.std.iter().skip(var).step_by(self.n_vars()).copied().collect()
    }

    /// This table restricted by overlap-weighted averaging to `nx × ny`.
    pub fn restricted(&self, nx: usize, ny: usize) -> Result<Self> {
        if (nx, ny) == (self.nx, self.ny) {
            return Ok(self.clone());
        }
        let nv = self.n_vars();
        let (mean, std) = match self.dim {
            SpaceDim::One => (
                restrict_1d(&self.mean, nv, self.nx, nx)?,
                restrict_1d(&self.std, nv, self.nx, nx)?,
            ),
            SpaceDim::Two => (
                restrict_2d(&self.mean, nv, (self.nx, self.ny), (nx, ny))?,
                restrict_2d(&self.std, nv, (self.nx, self.ny), (nx, ny))?,
            ),
        };
        Ok(Self {
            nx,
            ny,
            mean,
            std,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LimiterSummary {
    pub node_activations: usize,
    pub average_activations: usize,
    /// Last step index with an activation of each kind.
    pub last_node_step: Option<usize>,
    pub last_average_step: Option<usize>,
    pub events: Vec<LimiterEvent>,
}

impl LimiterSummary {
    pub fn from_events(events: Vec<LimiterEvent>) -> Self {
        let mut s = Self::default();
        for e in &events {
            match e.kind {
                LimiterKind::Node => {
                    s.node_activations += 1;
                    s.last_node_step = s.last_node_step.max(Some(e.step));
                }
                LimiterKind::Average => {
                    s.average_activations += 1;
                    s.last_average_step = s.last_average_step.max(Some(e.step));
                }
            }
        }
        s.events = events;
        s
    }
}

/// Deterministic run metadata written to `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config: RunConfig,
    pub problem: ProblemSetup,
    pub steps: usize,
    pub final_time: f64,
    pub max_alpha: f64,
    pub limiter: LimiterSummary,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputBundle {
    pub table: FieldTable,
    pub snapshots: Vec<FieldTable>,
    pub meta: RunMeta,
    pub timings: Timings,
    /// Final gPC coefficients per cell (Galerkin runs only).
    pub coefficients: Option<Vec<f64>>,
}

fn has_exact_solution(p: &ProblemSetup) -> bool {
    p.dim == SpaceDim::One
        && match p.initial {
            InitialData::SmoothSine => p.boundary_x.0 == BoundaryKind::Periodic && !p.gamma.is_random(),
            InitialData::ShockTube { .. } => !p.gamma.is_random(),
            _ => false,
        }
}

/// Splits `[a, b]` at the interior points of `cuts`.
fn segments(a: f64, b: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Cell average of `f` over `[a, b]` with Gauss on each segment.
fn average_1d(f: impl Fn(f64) -> Vec<f64>, a: f64, b: f64, cuts: &[f64], g: &QuadratureRule, n: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    for (lo, hi) in segments(a, b, cuts) {
        let frac = (hi - lo) / (b - a);
        for (&t, &w) in g.nodes.iter().zip(&g.weights) {
            let v = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
            for (o, x) in acc.iter_mut().zip(v) {
                *o += frac * w * x;
            }
        }
    }
    acc
}

/// Values of `ξ` at which a random interface crosses `a` or `b`.
fn xi_kinks(problem: &ProblemSetup, a: f64, b: f64) -> Vec<f64> {
    match problem.initial {
        InitialData::ShockTube {
            interface_base,
            interface_slope,
            ..
        } if interface_slope != 0.0 => [a, b]
            .iter()
            .map(|x| (x - interface_base) / interface_slope)
            .filter(|xi| xi.abs() < 1.0)
            .collect(),
        _ => Vec::new(),
    }
}

/// `rule` repeated on each piece of `[-1, 1]` cut at `kinks`, weights
/// scaled to sum to one.
fn composite_rule(rule: &QuadratureRule, kinks: &[f64]) -> QuadratureRule {
    if kinks.is_empty() {
        return rule.clone();
    }
    let mut out = QuadratureRule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for (lo, hi) in segments(-1.0, 1.0, kinks) {
        let m = rule.mapped(lo, hi);
        out.nodes.extend(m.nodes);
        out.weights.extend(m.weights.iter().map(|w| w * 0.5 * (hi - lo)));
    }
    out
}

/// Galerkin projection of the initial cell averages of a 1D problem.
pub fn project_initial_1d(problem: &ProblemSetup, basis: &LegendreBasis, mesh: &Mesh1D) -> Result<Vec<f64>> {
    let base = gauss_rule(PROJECTION_NODES)?;
    let g = gauss_rule(CELL_GAUSS)?;
    let nv = problem.n_vars();
    let cells: Vec<Vec<f64>> = (0..mesh.n_cells)
        .into_par_iter()
        .map(|j| {
            let (a, b) = (mesh.face(j), mesh.face(j) + mesh.dx());
            let rule = composite_rule(&base, &xi_kinks(problem, a, b));
            project(basis, &rule, nv, |xi| {
                average_1d(|x| problem.initial_conserved(x, 0.0, xi), a, b, &problem.breakpoints_x(xi), &g, nv)
            })
            .into_vec()
        })
        .collect();
    Ok(cells.concat())
}

/// Galerkin projection of the initial cell averages of a 2D problem.
pub fn project_initial_2d(problem: &ProblemSetup, basis: &LegendreBasis, mesh: &Mesh2D) -> Result<CellField2D> {
    let base = gauss_rule(PROJECTION_NODES)?;
    let g = gauss_rule(CELL_GAUSS)?;
    let nv = problem.n_vars();
    let (mx, my) = (mesh.x_mesh(), mesh.y_mesh());
    let cells: Vec<Vec<f64>> = (0..mesh.nx * mesh.ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % mesh.nx, k / mesh.nx);
            let (xa, xb) = (mx.face(i), mx.face(i) + mx.dx());
            let (ya, yb) = (my.face(j), my.face(j) + my.dx());
            let rule = composite_rule(&base, &xi_kinks(problem, xa, xb));
            project(basis, &rule, nv, |xi| {
                let bx = problem.breakpoints_x(xi);
                let by = problem.breakpoints_y(xi);
                average_1d(
                    |y| average_1d(|x| problem.initial_conserved(x, y, xi), xa, xb, &bx, &g, nv),
                    ya,
                    yb,
                    &by,
                    &g,
                    nv,
                )
            })
            .into_vec()
        })
        .collect();
    CellField2D::from_data(mesh.nx, mesh.ny, nv, basis.n_terms(), cells.concat())
}

fn boundary(kind: BoundaryKind, problem: &ProblemSetup, basis: &LegendreBasis) -> Result<Boundary> {
    Ok(match kind {
        BoundaryKind::Periodic => Boundary::Periodic,
        BoundaryKind::Outflow => Boundary::Outflow,
        BoundaryKind::Driver => {
            if problem.driver.is_none() {
                return Err(Error::Config(format!("problem `{}` has no driver data", problem.name)));
            }
            let rule = gauss_rule(PROJECTION_NODES)?;
            let (p, b) = (problem.clone(), *basis);
            let nv = problem.n_vars();
            let f: InflowFn = Arc::new(move |t| {
                project(&b, &rule, nv, |xi| p.driver_conserved(t, xi).expect("driver data")).into_vec()
            });
            Boundary::Inflow(f)
        }
    })
}

fn table_from_coefficients(problem: &ProblemSetup, grid: (usize, usize), time: f64, coeffs: &[f64], n_modes: usize) -> FieldTable {
    let nv = problem.n_vars();
    let mut mean = Vec::with_capacity(coeffs.len() / n_modes);
    let mut std = Vec::with_capacity(coeffs.len() / n_modes);
    for c in coeffs.chunks_exact(nv * n_modes) {
        let (m, s) = mean_std(&GpcState::from_flat(nv, c.to_vec()));
        mean.extend(m);
        std.extend(s);
    }
    FieldTable::new(problem, grid, time, mean, std)
}

struct SgOutcome {
    coeffs: Vec<f64>,
    log: AdvanceLog,
    snapshots: Vec<(f64, Vec<f64>)>,
}

/// One-dimensional Galerkin scheme for `problem` on `mesh`.
pub fn scheme_1d(problem: &ProblemSetup, config: &RunConfig, mesh: Mesh1D) -> Result<FvScheme<EulerEquations>> {
    let sys = SgSystem::new(problem.model(), config.order, config.xi_nodes)?;
    Ok(FvScheme::new(sys, mesh, Axis::X).with_limiters(config.limiters))
}

/// Split 2D Galerkin solver for `problem` on `mesh`.
pub fn solver_2d(problem: &ProblemSetup, config: &RunConfig, mesh: Mesh2D) -> Result<SplitSolver<EulerEquations>> {
    let basis = LegendreBasis::new(config.order);
    let sys = SgSystem::new(problem.model(), config.order, config.xi_nodes)?;
    let bx = (
        boundary(problem.boundary_x.0, problem, &basis)?,
        boundary(problem.boundary_x.1, problem, &basis)?,
    );
    let by = (
        boundary(problem.boundary_y.0, problem, &basis)?,
        boundary(problem.boundary_y.1, problem, &basis)?,
    );
    let mut s = SplitSolver::new(
        FvScheme::new(sys.clone(), mesh.x_mesh(), Axis::X).with_limiters(config.limiters),
        FvScheme::new(sys, mesh.y_mesh(), Axis::Y).with_limiters(config.limiters),
        bx,
        by,
    )?
    .with_mode(config.split_mode);
    s.cfl = config.cfl;
    s.parity = config.start_parity;
    s.alternate = config.alternate_parity;
    Ok(s)
}

fn run_sg_1d(problem: &ProblemSetup, config: &RunConfig) -> Result<SgOutcome> {
    let mesh = Mesh1D::new(config.cells, problem.x_range.0, problem.x_range.1)?;
    let basis = LegendreBasis::new(config.order);
    let scheme = scheme_1d(problem, config, mesh)?;
    let init = project_initial_1d(problem, &basis, &mesh)?;
    let mut field = CellField1D::from_interior(
        problem.n_vars(),
        basis.n_terms(),
        &init,
        boundary(problem.boundary_x.0, problem, &basis)?,
        boundary(problem.boundary_x.1, problem, &basis)?,
    )?;
    let mut total = AdvanceLog::default();
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    let mut stops = config.snapshot_times.clone();
    stops.sort_by(f64::total_cmp);
    stops.push(problem.final_time);
    for stop in stops {
        let controller = StepController {
            t_final: stop,
            ..config.controller(problem)
        };
        let log = advance_to(&scheme, &mut field, t, &controller)?;
        let offset = total.steps;
        total.events.extend(log.events.into_iter().map(|mut e| {
            e.step += offset;
            e
        }));
        total.steps += log.steps;
        total.max_alpha = total.max_alpha.max(log.max_alpha);
        t = log.t;
        if stop < problem.final_time {
            snapshots.push((t, field.interior().to_vec()));
        }
    }
    total.t = t;
    Ok(SgOutcome {
        coeffs: field.interior().to_vec(),
        log: total,
        snapshots,
    })
}

fn run_sg_2d(problem: &ProblemSetup, config: &RunConfig) -> Result<SgOutcome> {
    let (nx, ny) = config.grid(problem);
    let mesh = Mesh2D::new(nx, ny, problem.x_range, problem.y_range)?;
    let basis = LegendreBasis::new(config.order);
    let solver = solver_2d(problem, config, mesh)?;
    let mut field = project_initial_2d(problem, &basis, &mesh)?;
    let mut total = AdvanceLog::default();
    let mut snapshots = Vec::new();
    let mut t = 0.0;
    let mut stops = config.snapshot_times.clone();
    stops.sort_by(f64::total_cmp);
    stops.push(problem.final_time);
    for stop in stops {
        let controller = StepController {
            t_final: stop,
            ..config.controller(problem)
        };
        let log = solver.advance_to(&mut field, t, &controller)?;
        let offset = total.steps;
        total.events.extend(log.events.into_iter().map(|mut e| {
            e.step += offset;
            e
        }));
        total.steps += log.steps;
        total.max_alpha = total.max_alpha.max(log.max_alpha);
        t = log.t;
        if stop < problem.final_time {
            snapshots.push((t, field.as_slice().to_vec()));
        }
    }
    total.t = t;
    Ok(SgOutcome {
        coeffs: field.as_slice().to_vec(),
        log: total,
        snapshots,
    })
}

/// Exact mean and standard deviation of the conserved cell averages.
pub fn exact_table(problem: &ProblemSetup, cells: usize) -> Result<FieldTable> {
    if !has_exact_solution(problem) {
        return Err(Error::Config(format!("problem `{}` has no exact solution", problem.name)));
    }
    let mesh = Mesh1D::new(cells, problem.x_range.0, problem.x_range.1)?;
    let rule = gauss_rule(PROJECTION_NODES)?;
    let t = problem.final_time;
    let gamma = problem.gamma.base;
    let (mean, std) = match problem.initial {
        InitialData::ShockTube {
            left,
            right,
            interface_base,
            interface_slope,
        } if t > 0.0 => {
            let st = shock_tube_stats(
                left,
                right,
                gamma,
                |xi| interface_base + interface_slope * xi,
                &mesh,
                t,
                &rule,
            )?;
            (st.mean, st.std)
        }
        _ => {
            let g = gauss_rule(CELL_GAUSS)?;
            let model = problem.model();
            let samples: Vec<Vec<f64>> = rule
                .nodes
                .par_iter()
                .map(|&xi| {
                    let state = |x: f64| match problem.initial {
                        InitialData::SmoothSine => model.conserved(&exact_smooth(x, t, xi), xi),
                        _ => problem.initial_conserved(x, 0.0, xi),
                    };
                    (0..cells)
                        .flat_map(|j| {
                            let a = mesh.face(j);
                            average_1d(state, a, a + mesh.dx(), &problem.breakpoints_x(xi), &g, 3)
                        })
                        .collect()
                })
                .collect();
            weighted_mean_std(&samples, &rule.weights)
        }
    };
    Ok(FieldTable::new(problem, (cells, 1), t, mean, std))
}

/// Executes one configured run.
pub fn run_case(config: &RunConfig) -> Result<OutputBundle> {
    let start = Instant::now();
    let problem = config.validate()?;
    let grid = config.grid(&problem);
    let setup_seconds = start.elapsed().as_secs_f64();
    let meta = |steps, max_alpha, events| RunMeta {
        config: config.clone(),
        problem: problem.clone(),
        steps,
        final_time: problem.final_time,
        max_alpha,
        limiter: LimiterSummary::from_events(events),
    };
    if config.dry_run {
        let n = grid.0 * grid.1 * problem.n_vars();
        return Ok(OutputBundle {
            table: FieldTable::new(&problem, grid, 0.0, vec![0.0; n], vec![0.0; n]),
            snapshots: Vec::new(),
            meta: meta(0, 0.0, Vec::new()),
            timings: Timings {
                setup_seconds,
                solve_seconds: 0.0,
            },
            coefficients: None,
        });
    }
    let solve = Instant::now();
    let bundle = match config.solver {
        SolverKind::Sg => {
            let out = match problem.dim {
                SpaceDim::One => run_sg_1d(&problem, config)?,
                SpaceDim::Two => run_sg_2d(&problem, config)?,
            };
            let nm = config.order + 1;
            let snapshots = out
                .snapshots
                .iter()
                .map(|(t, c)| table_from_coefficients(&problem, grid, *t, c, nm))
                .collect();
            OutputBundle {
                table: table_from_coefficients(&problem, grid, out.log.t, &out.coeffs, nm),
                snapshots,
                meta: meta(out.log.steps, out.log.max_alpha, out.log.events),
                timings: Timings::default(),
                coefficients: Some(out.coeffs),
            }
        }
        SolverKind::Collocation => {
            let plan = CollocationPlan::gauss(config.collocation_nodes)?;
            let r = collocation_solve(&problem, &plan, grid, config.cfl)?;
            let steps = r.runs.iter().map(|run| run.steps).max().unwrap_or(0);
            OutputBundle {
                table: FieldTable::new(&problem, grid, problem.final_time, r.mean, r.std),
                snapshots: Vec::new(),
                meta: meta(steps, 0.0, Vec::new()),
                timings: Timings::default(),
                coefficients: None,
            }
        }
        SolverKind::Exact => OutputBundle {
            table: exact_table(&problem, grid.0)?,
            snapshots: Vec::new(),
            meta: meta(0, 0.0, Vec::new()),
            timings: Timings::default(),
            coefficients: None,
        },
    };
    Ok(OutputBundle {
        timings: Timings {
            setup_seconds,
            solve_seconds: solve.elapsed().as_secs_f64(),
        },
        ..bundle
    })
}

/// Reference run for `config`: the exact solution when one exists,
/// otherwise collocation.
pub fn reference_case(config: &RunConfig) -> Result<OutputBundle> {
    let problem = config.setup()?;
    let solver = if has_exact_solution(&problem) {
        SolverKind::Exact
    } else {
        SolverKind::Collocation
    };
    run_case(&RunConfig {
        solver,
        snapshot_times: Vec::new(),
        ..config.clone()
    })
}

/// One row of a convergence or order study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub cells: usize,
    pub order: usize,
    pub mean_error: f64,
    pub std_error: f64,
    /// `log2(e_prev / e)`, empty on the first row and in order studies.
    pub mean_rate: Option<f64>,
    pub std_rate: Option<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyTable {
    pub problem: String,
    pub variable: String,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    /// Plain-text table with errors and observed rates.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{:>6} {:>4} {:>12} {:>7} {:>12} {:>7}\n",
            "N_c", "M", "mean l1", "rate", "std l1", "rate"
        );
        let rate = |r: Option<f64>| r.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
        for r in &self.rows {
            s.push_str(&format!(
                "{:>6} {:>4} {:>12.4e} {:>7} {:>12.4e} {:>7}\n",
                r.cells,
                r.order,
                r.mean_error,
                rate(r.mean_rate),
                r.std_error,
                rate(r.std_rate)
            ));
        }
        s
    }
}

fn density_errors(run: &FieldTable, exact: &FieldTable) -> Result<(f64, f64)> {
    let vol = run.cell_volume();
    let e_mean = crate::reference::l1_distance(&run.mean_of(0), &exact.mean_of(0), vol)?;
    let e_std = crate::reference::l1_distance(&run.std_of(0), &exact.std_of(0), vol)?;
    Ok((e_mean, e_std))
}

/// l1 errors of mean and standard deviation of density over a list of
/// meshes, against the exact solution.
pub fn convergence_study(config: &RunConfig, cells: &[usize]) -> Result<StudyTable> {
    let mut rows: Vec<StudyRow> = Vec::with_capacity(cells.len());
    for &n in cells {
        let cfg = RunConfig {
            cells: n,
            solver: SolverKind::Sg,
            snapshot_times: Vec::new(),
            ..config.clone()
        };
        let problem = cfg.validate()?;
        let run = run_case(&cfg)?;
        let exact = exact_table(&problem, n)?;
        let (mean_error, std_error) = density_errors(&run.table, &exact)?;
        let prev = rows.last();
        rows.push(StudyRow {
            cells: n,
            order: cfg.order,
            mean_error,
            std_error,
            mean_rate: prev.map(|p| (p.mean_error / mean_error).log2()),
            std_rate: prev.map(|p| (p.std_error / std_error).log2()),
            steps: run.meta.steps,
        });
        log::info!("N_c = {n}: mean {mean_error:.4e}, std {std_error:.4e}");
    }
    Ok(StudyTable {
        problem: config.problem.clone(),
        variable: "rho".into(),
        rows,
    })
}

/// l1 errors of density statistics for a list of gPC orders on one mesh.
pub fn order_study(config: &RunConfig, orders: &[usize]) -> Result<StudyTable> {
    let problem = config.validate()?;
    let exact = exact_table(&problem, config.cells)?;
    let mut rows = Vec::with_capacity(orders.len());
    for &m in orders {
        let cfg = RunConfig {
            order: m,
            solver: SolverKind::Sg,
            snapshot_times: Vec::new(),
            ..config.clone()
        };
        let run = run_case(&cfg)?;
        let (mean_error, std_error) = density_errors(&run.table, &exact)?;
        rows.push(StudyRow {
            cells: config.cells,
            order: m,
            mean_error,
            std_error,
            mean_rate: None,
            std_rate: None,
            steps: run.meta.steps,
        });
        log::info!("M = {m}: mean {mean_error:.4e}, std {std_error:.4e}");
    }
    Ok(StudyTable {
        problem: config.problem.clone(),
        variable: "rho".into(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SliceSpec {
    /// Whole 1D field, or the `y = x` diagonal of a square 2D grid.
    #[default]
    Diagonal,
    /// Row `j` of a 2D grid.
    Row { j: usize },
    /// Column `i` of a 2D grid.
    Column { i: usize },
}

/// Differences between two tables for one variable set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDiff {
    pub variable: String,
    pub mean_l1: f64,
    pub mean_linf: f64,
    pub std_l1: f64,
    pub std_linf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRow {
    /// Arclength along the slice scaled to `[0, 1]`.
    pub s: f64,
    pub a_mean: Vec<f64>,
    pub a_std: Vec<f64>,
    pub b_mean: Vec<f64>,
    pub b_std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub nx: usize,
    pub ny: usize,
    pub variables: Vec<VariableDiff>,
    pub slice: Vec<SliceRow>,
}

fn slice_cells(t: &FieldTable, spec: SliceSpec) -> Result<Vec<(usize, f64)>> {
    let idx = |i: usize, j: usize| j * t.nx + i;
    Ok(match (t.dim, spec) {
        (SpaceDim::One, _) => (0..t.nx).map(|i| (i, (i as f64 + 0.5) / t.nx as f64)).collect(),
        (SpaceDim::Two, SliceSpec::Diagonal) => {
            if t.nx != t.ny {
                return Err(Error::MeshMismatch("diagonal slices need a square grid".into()));
            }
            (0..t.nx).map(|i| (idx(i, i), (i as f64 + 0.5) / t.nx as f64)).collect()
        }
        (SpaceDim::Two, SliceSpec::Row { j }) if j < t.ny => {
            (0..t.nx).map(|i| (idx(i, j), (i as f64 + 0.5) / t.nx as f64)).collect()
        }
        (SpaceDim::Two, SliceSpec::Column { i }) if i < t.nx => {
            (0..t.ny).map(|j| (idx(i, j), (j as f64 + 0.5) / t.ny as f64)).collect()
        }
        _ => return Err(Error::MeshMismatch(format!("slice {spec:?} outside the grid"))),
    })
}

/// l1/l∞ differences of mean and standard deviation fields, restricting
/// the finer table onto the coarser mesh when they differ, plus a slice.
pub fn compare(a: &FieldTable, b: &FieldTable, spec: SliceSpec) -> Result<CompareReport> {
    if a.dim != b.dim || a.x_range != b.x_range || (a.dim == SpaceDim::Two && a.y_range != b.y_range) {
        return Err(Error::MeshMismatch("tables cover different domains".into()));
    }
    if a.variables != b.variables {
        return Err(Error::MeshMismatch("tables hold different variables".into()));
    }
    let (nx, ny) = (a.nx.min(b.nx), a.ny.min(b.ny));
    let (ra, rb) = (a.restricted(nx, ny)?, b.restricted(nx, ny)?);
    let vol = ra.cell_volume();
    let variables = (0..ra.n_vars())
        .map(|k| {
            let (ma, mb, sa, sb) = (ra.mean_of(k), rb.mean_of(k), ra.std_of(k), rb.std_of(k));
            Ok(VariableDiff {
                variable: ra.variables[k].clone(),
                mean_l1: crate::reference::l1_distance(&ma, &mb, vol)?,
                mean_linf: crate::reference::linf_distance(&ma, &mb)?,
                std_l1: crate::reference::l1_distance(&sa, &sb, vol)?,
                std_linf: crate::reference::linf_distance(&sa, &sb)?,
            })
        })
        .collect::<Result<_>>()?;
    let nv = ra.n_vars();
    let slice = slice_cells(&ra, spec)?
        .into_iter()
        .map(|(c, s)| SliceRow {
            s,
            a_mean: ra.mean[c * nv..(c + 1) * nv].to_vec(),
            a_std: ra.std[c * nv..(c + 1) * nv].to_vec(),
            b_mean: rb.mean[c * nv..(c + 1) * nv].to_vec(),
            b_std: rb.std[c * nv..(c + 1) * nv].to_vec(),
        })
        .collect();
    Ok(CompareReport {
        nx,
        ny,
        variables,
        slice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_round_trip() {
        let c = RunConfig::default();
        assert_eq!(c.cfl, 0.6);
        assert_eq!(c.collocation_nodes, 40);
        assert_eq!(c.split_mode, SplitMode::Strang);
        let parsed: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(parsed, c);
        let partial: RunConfig = serde_json::from_str(r#"{"problem": "sod", "order": 8, "cells": 200}"#).unwrap();
        assert_eq!((partial.problem.as_str(), partial.order, partial.cells), ("sod", 8, 200));
        assert_eq!(partial.cfl, 0.6);
        let echo = serde_json::to_string(&partial).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&echo).unwrap(), partial);
        assert!(serde_json::from_str::<RunConfig>(r#"{"cels": 3}"#).is_err());
        let accuracy: RunConfig =
            serde_json::from_str(r#"{"dt_policy": {"kind": "power", "exponent": 1.6666666666666667}}"#).unwrap();
        assert_eq!(accuracy.dt_policy, DtPolicy::Power { exponent: 5.0 / 3.0 });
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.cfl = 1.5));
        assert!(bad(|c| c.cells = 0));
        assert!(bad(|c| c.cells_y = Some(4)));
        assert!(bad(|c| c.problem = "nope".into()));
        assert!(bad(|c| c.snapshot_times = vec![0.5]));
        assert!(bad(|c| {
            c.problem = "rp1_gamma".into();
            c.solver = SolverKind::Exact;
        }));
        assert!(!bad(|c| c.snapshot_times = vec![0.1]));
    }

    #[test]
    fn projection_of_shock_tube_splits_cells() {
        let p = builtin_problem("sod").unwrap();
        let basis = LegendreBasis::new(2);
        let mesh = Mesh1D::new(10, 0.0, 1.0).unwrap();
        let c = project_initial_1d(&p, &basis, &mesh).unwrap();
        // cell [0.4, 0.5]: interface 0.5 + 0.05ξ covers a fraction (1 - ξ)/2
        // of the cell's right part for ξ < 0, so the mean density is
        // 1 - 0.875 · E[max(-ξ, 0)·0.05/0.1]
        let want = 1.0 - 0.875 * 0.5 * 0.25;
        assert!((c[4 * 9] - want).abs() < 1e-12, "{}", c[4 * 9]);
        assert!((c[0] - 1.0).abs() < 1e-14);
        assert!((c[9 * 9] - 0.125).abs() < 1e-14);
    }

    #[test]
    fn smooth_run_shape_and_exact_table() {
        let cfg = RunConfig {
            cells: 20,
            order: 2,
            ..RunConfig::default()
        };
        let out = run_case(&cfg).unwrap();
        assert_eq!(out.table.mean.len(), 20 * 3);
        assert_eq!(out.table.variables, vec!["rho", "rho_u", "E"]);
        let exact = exact_table(&cfg.validate().unwrap(), 20).unwrap();
        let (em, es) = density_errors(&out.table, &exact).unwrap();
        assert!(em < 1e-3 && es < 1e-3, "{em} {es}");
    }

    #[test]
    fn dry_run_does_not_step() {
        let cfg = RunConfig {
            dry_run: true,
            ..RunConfig::default()
        };
        let out = run_case(&cfg).unwrap();
        assert_eq!(out.meta.steps, 0);
        assert!(out.coefficients.is_none());
    }

    #[test]
    fn compare_identical_and_restricted() {
        let p = builtin_problem("smooth").unwrap();
        let t = exact_table(&p, 30).unwrap();
        let r = compare(&t, &t, SliceSpec::Diagonal).unwrap();
        assert!(r.variables.iter().all(|v| v.mean_l1 == 0.0 && v.std_linf == 0.0));
        assert_eq!(r.slice.len(), 30);
        let fine = exact_table(&p, 45).unwrap();
        let r = compare(&t, &fine, SliceSpec::Diagonal).unwrap();
        assert_eq!(r.nx, 30);
        assert!(r.variables.iter().all(|v| v.mean_l1 < 1e-3 && v.std_l1 < 1e-3), "{:?}", r.variables);
    }

    #[test]
    fn snapshot_tables_are_recorded() {
        let cfg = RunConfig {
            cells: 10,
            order: 1,
            final_time: Some(0.05),
            snapshot_times: vec![0.02],
            ..RunConfig::default()
        };
        let out = run_case(&cfg).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert!((out.snapshots[0].time - 0.02).abs() < 1e-15);
        assert!((out.table.time - 0.05).abs() < 1e-15);
    }
}
