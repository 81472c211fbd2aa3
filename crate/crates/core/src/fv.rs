//! Path-conservative finite-volume WENO discretization in one space
//! dimension.
//!
//! Cell averages are reconstructed componentwise to the four Gauss–Lobatto
//! nodes of each cell. The semi-discrete rate of cell `j` is
//!
//! ```text
//! L_j = -(1/Δx) [ B̂⁺_{j-½}(Û⁺ - Û⁻)_{j-½} + B̂⁻_{j+½}(Û⁺ - Û⁻)_{j+½} ]
//!       - Σ_m ω_m B̂(Û(x_m)) ∂Û/∂x(x_m)
//! ```
//!
//! with `ω_m` the Lobatto weights normalized to sum to one and the
//! derivative taken from the cubic interpolant through the node values.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{SgSystem, ALPHA_SAFETY};
use crate::error::{Error, Result};
use crate::model::{Axis, HyperbolicModel};
use crate::state::GpcState;
use crate::weno::LobattoWeno;

/// Ghost cells on each side.
pub const GHOST: usize = 3;

/// Parameter tolerance of the limiter bisections.
pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 60;

/// Uniform mesh with faces `x_{j+½} = lower + (j+1)Δx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    pub n_cells: usize,
    pub lower: f64,
    pub upper: f64,
}

impl Mesh1D {
    pub fn new(n_cells: usize, lower: f64, upper: f64) -> Result<Self> {
        if n_cells == 0 || !(upper > lower) {
            return Err(Error::Config(format!(
                "mesh needs at least one cell and lower < upper (got {n_cells} cells on [{lower}, {upper}])"
            )));
        }
        Ok(Self {
            n_cells,
            lower,
            upper,
        })
    }

    pub fn dx(&self) -> f64 {
        (self.upper - self.lower) / self.n_cells as f64
    }

    /// Left face of cell `j`.
    pub fn face(&self, j: usize) -> f64 {
        self.lower + j as f64 * self.dx()
    }

    pub fn center(&self, j: usize) -> f64 {
        self.lower + (j as f64 + 0.5) * self.dx()
    }
}

/// Ghost state supplier for inflow boundaries: time to flattened coefficients.
pub type InflowFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Boundary {
    Periodic,
    /// Zero-order extrapolation.
    Outflow,
    Inflow(InflowFn),
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => f.write_str("Periodic"),
            Boundary::Outflow => f.write_str("Outflow"),
            Boundary::Inflow(_) => f.write_str("Inflow(..)"),
        }
    }
}

/// Cell averages with `GHOST` ghost cells on each side.
#[derive(Debug, Clone)]
pub struct CellField1D {
    n_cells: usize,
    n_vars: usize,
    n_modes: usize,
    data: Vec<f64>,
    left: Boundary,
    right: Boundary,
}

impl CellField1D {
    pub fn new(n_cells: usize, n_vars: usize, n_modes: usize, left: Boundary, right: Boundary) -> Result<Self> {
        if matches!(left, Boundary::Periodic) != matches!(right, Boundary::Periodic) {
            return Err(Error::Config("periodic boundaries must be paired".into()));
        }
        Ok(Self {
            n_cells,
            n_vars,
            n_modes,
            data: vec![0.0; (n_cells + 2 * GHOST) * n_vars * n_modes],
            left,
            right,
        })
    }

    /// Field from interior coefficients laid out cell after cell.
    pub fn from_interior(
        n_vars: usize,
        n_modes: usize,
        interior: &[f64],
        left: Boundary,
        right: Boundary,
    ) -> Result<Self> {
        let stride = n_vars * n_modes;
        if stride == 0 || !interior.len().is_multiple_of(stride) {
            return Err(Error::MeshMismatch(format!(
                "{} values do not split into cells of {stride}",
                interior.len()
            )));
        }
        let mut f = Self::new(interior.len() / stride, n_vars, n_modes, left, right)?;
        f.interior_mut().copy_from_slice(interior);
        Ok(f)
    }

    pub fn from_states(states: &[GpcState], left: Boundary, right: Boundary) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::MeshMismatch("empty field".into()))?;
        let (n_vars, n_modes) = (first.n_vars(), first.n_modes());
        let mut flat = Vec::with_capacity(states.len() * n_vars * n_modes);
        for s in states {
            if s.n_vars() != n_vars || s.n_modes() != n_modes {
                return Err(Error::MeshMismatch("cells have different shapes".into()));
            }
            flat.extend_from_slice(s.as_slice());
        }
        Self::from_interior(n_vars, n_modes, &flat, left, right)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Coefficients per cell.
    pub fn stride(&self) -> usize {
        self.n_vars * self.n_modes
    }

    pub fn boundaries(&self) -> (&Boundary, &Boundary) {
        (&self.left, &self.right)
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        self.padded(j + GHOST)
    }

    pub fn cell_mut(&mut self, j: usize) -> &mut [f64] {
        let s = self.stride();
        let p = j + GHOST;
        &mut self.data[p * s..(p + 1) * s]
    }

    /// Cell at padded index `p`; interior cells are `GHOST..GHOST + n_cells`.
    pub fn padded(&self, p: usize) -> &[f64] {
        let s = self.stride();
        &self.data[p * s..(p + 1) * s]
    }

    pub fn interior(&self) -> &[f64] {
        let s = self.stride();
        &self.data[GHOST * s..(GHOST + self.n_cells) * s]
    }

    pub fn interior_mut(&mut self) -> &mut [f64] {
        let s = self.stride();
        &mut self.data[GHOST * s..(GHOST + self.n_cells) * s]
    }

    pub fn state(&self, j: usize) -> GpcState {
        GpcState::from_flat(self.n_vars, self.cell(j).to_vec())
    }

    pub fn to_states(&self) -> Vec<GpcState> {
        (0..self.n_cells).map(|j| self.state(j)).collect()
    }

    /// Fills ghost cells for boundary data at time `t`.
    pub fn fill_ghosts(&mut self, t: f64) {
        let s = self.stride();
        let n = self.n_cells;
        for g in 0..GHOST {
            // left ghost at padded g, right ghost at padded GHOST + n + g
            let (lsrc, rsrc) = match (&self.left, &self.right) {
                (Boundary::Periodic, _) => (
                    Some(GHOST + (n - (GHOST - g) % n) % n),
                    Some(GHOST + g % n),
                ),
                _ => (
                    matches!(self.left, Boundary::Outflow).then_some(GHOST),
                    matches!(self.right, Boundary::Outflow).then_some(GHOST + n - 1),
                ),
            };
            if let Some(src) = lsrc {
                self.data.copy_within(src * s..(src + 1) * s, g * s);
            }
            if let Some(src) = rsrc {
                let dst = GHOST + n + g;
                self.data.copy_within(src * s..(src + 1) * s, dst * s);
            }
        }
        for (side, bc) in [(0usize, self.left.clone()), (1, self.right.clone())] {
            if let Boundary::Inflow(f) = bc {
                let ghost = f(t);
                assert_eq!(ghost.len(), s, "inflow state has the wrong length");
                for g in 0..GHOST {
                    let p = if side == 0 { g } else { GHOST + n + g };
                    self.data[p * s..(p + 1) * s].copy_from_slice(&ghost);
                }
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.interior().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimiterSettings {
    pub node: bool,
    pub average: bool,
}

impl Default for LimiterSettings {
    fn default() -> Self {
        Self {
            node: true,
            average: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimiterKind {
    /// Lobatto node values scaled toward the cell average.
    Node,
    /// Higher modes of a cell average scaled toward its mean mode.
    Average,
}

/// One limiter activation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimiterEvent {
    pub step: usize,
    /// Grid line of a 2D sweep.
    pub line: Option<usize>,
    pub cell: usize,
    pub kind: LimiterKind,
    pub theta: f64,
}

impl LimiterEvent {
    fn new(cell: usize, kind: LimiterKind, theta: f64) -> Self {
        Self {
            step: 0,
            line: None,
            cell,
            kind,
            theta,
        }
    }
}

/// Semi-discrete rates of all interior cells.
#[derive(Debug, Clone)]
pub struct Residual {
    pub rate: Vec<f64>,
    /// Largest interface `α` used for upwinding.
    pub alpha: f64,
    pub events: Vec<LimiterEvent>,
}

/// Largest `θ ∈ [0, 1]` with `inside(θ)`, given `inside(0)`.
fn bisect(mut inside: impl FnMut(f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

struct Interface {
    plus: Vec<f64>,
    minus: Vec<f64>,
    alpha: f64,
}

/// Spatial operator for one axis of a gPC-SG system.
#[derive(Debug, Clone)]
pub struct FvScheme<M> {
    system: SgSystem<M>,
    weno: LobattoWeno,
    mesh: Mesh1D,
    axis: Axis,
    limiters: LimiterSettings,
}

impl<M: HyperbolicModel> FvScheme<M> {
    pub fn new(system: SgSystem<M>, mesh: Mesh1D, axis: Axis) -> Self {
        Self {
            system,
            weno: LobattoWeno::new(),
            mesh,
            axis,
            limiters: LimiterSettings::default(),
        }
    }

    pub fn with_limiters(mut self, limiters: LimiterSettings) -> Self {
        self.limiters = limiters;
        self
    }

    pub fn system(&self) -> &SgSystem<M> {
        &self.system
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn limiters(&self) -> LimiterSettings {
        self.limiters
    }

    /// Same operator on another mesh.
    pub fn on_mesh(&self, mesh: Mesh1D) -> Self
    where
        M: Clone,
    {
        Self { mesh, ..self.clone() }
    }

    /// Repairs a cell average outside the admissible set by scaling its
    /// higher modes. Returns `θ̃` when the average was changed.
    pub fn limit_cell_average(&self, coeffs: &mut [f64]) -> Result<Option<f64>> {
        if self.system.membership(coeffs).is_inside() {
            return Ok(None);
        }
        let nv = self.system.n_vars();
        let mut mean_only = vec![0.0; coeffs.len()];
        mean_only[..nv].copy_from_slice(&coeffs[..nv]);
        if let crate::assembly::Membership::Outside { xi } = self.system.membership(&mean_only) {
            return Err(Error::UnrecoverableMean { xi });
        }
        let mut trial = mean_only.clone();
        let theta = bisect(|th| {
            for (t, c) in trial[nv..].iter_mut().zip(&coeffs[nv..]) {
                *t = th * c;
            }
            self.system.membership(&trial).is_inside()
        });
        for c in &mut coeffs[nv..] {
            *c *= theta;
        }
        Ok(Some(theta))
    }

    /// Scales the node values toward `average` until all are admissible.
    /// `nodes` holds the four node states back to back. Returns `θ`.
    pub fn limit_node_values(&self, average: &[f64], nodes: &mut [f64]) -> f64 {
        let dim = average.len();
        let mut theta: f64 = 1.0;
        let mut trial = vec![0.0; dim];
        for node in nodes.chunks_exact(dim) {
            if self.system.membership(node).is_inside() {
                continue;
            }
            let th = bisect(|th| {
                if th >= theta {
                    return false;
                }
                for ((t, a), v) in trial.iter_mut().zip(average).zip(node) {
                    *t = a + th * (v - a);
                }
                self.system.membership(&trial).is_inside()
            });
            theta = theta.min(th);
        }
        if theta < 1.0 {
            for node in nodes.chunks_exact_mut(dim) {
                for (v, a) in node.iter_mut().zip(average) {
                    *v = a + theta * (*v - a);
                }
            }
        }
        theta
    }

    /// Unlimited WENO node values of the cell at padded index `p`.
    pub fn reconstruct(&self, field: &CellField1D, p: usize) -> Vec<f64> {
        let dim = field.stride();
        let mut out = vec![0.0; 4 * dim];
        let cells: [&[f64]; 5] = std::array::from_fn(|k| field.padded(p + k - 2));
        for c in 0..dim {
            let s = [cells[0][c], cells[1][c], cells[2][c], cells[3][c], cells[4][c]];
            let v = self.weno.reconstruct(&s);
            for m in 0..4 {
                out[m * dim + c] = v[m];
            }
        }
        out
    }

    /// Applies the cell-average limiter to every interior cell and fills the
    /// ghost cells at time `t`.
    pub fn prepare(&self, field: &mut CellField1D, t: f64) -> Result<Vec<LimiterEvent>> {
        let mut events = Vec::new();
        if self.limiters.average {
            let dim = field.stride();
            let results: Vec<Result<Option<f64>>> = field
                .interior_mut()
                .par_chunks_exact_mut(dim)
                .map(|c| self.limit_cell_average(c))
                .collect();
            for (j, r) in results.into_iter().enumerate() {
                if let Some(theta) = r.map_err(|e| e.in_cell(j))? {
                    events.push(LimiterEvent::new(j, LimiterKind::Average, theta));
                }
            }
        }
        field.fill_ghosts(t);
        Ok(events)
    }

    /// Rates of a prepared field (ghosts filled, averages admissible).
    pub fn residual(&self, field: &CellField1D) -> Result<Residual> {
        let n = field.n_cells();
        let dim = field.stride();
        if dim != self.system.state_len() || n != self.mesh.n_cells {
            return Err(Error::MeshMismatch(format!(
                "field has {n} cells of {dim} coefficients, scheme expects {} of {}",
                self.mesh.n_cells,
                self.system.state_len()
            )));
        }
        // node values of cells -1..=n, index c ↔ cell c - 1
        let recon: Vec<(Vec<f64>, f64)> = (0..n + 2)
            .into_par_iter()
            .map(|c| {
                let p = GHOST - 1 + c;
                let mut nodes = self.reconstruct(field, p);
                let theta = if self.limiters.node {
                    self.limit_node_values(field.padded(p), &mut nodes)
                } else {
                    1.0
                };
                (nodes, theta)
            })
            .collect();
        let mut events = Vec::new();
        for (c, (_, theta)) in recon.iter().enumerate() {
            if *theta < 1.0 && (1..=n).contains(&c) {
                events.push(LimiterEvent::new(c - 1, LimiterKind::Node, *theta));
            }
        }

        // face i sits between cells i - 1 and i
        let faces: Vec<Interface> = (0..=n)
            .into_par_iter()
            .map(|i| {
                let left = &recon[i].0[3 * dim..];
                let right = &recon[i + 1].0[..dim];
                self.interface(left, right).map_err(|e| e.in_cell(i.min(n - 1)))
            })
            .collect::<Result<_>>()?;
        let alpha = faces.iter().fold(0.0, |a: f64, f| a.max(f.alpha));

        let inv_dx = 1.0 / self.mesh.dx();
        let weights = self.weno.rule.weights;
        let deriv = self.weno.rule.deriv;
        let rates: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let nodes = &recon[j + 1].0;
                let mut r: Vec<f64> = faces[j]
                    .plus
                    .iter()
                    .zip(&faces[j + 1].minus)
                    .map(|(p, m)| p + m)
                    .collect();
                let mut du = vec![0.0; dim];
                for m in 0..4 {
                    let um = &nodes[m * dim..(m + 1) * dim];
                    let mut nonzero = false;
                    for (c, d) in du.iter_mut().enumerate() {
                        *d = (0..4).map(|k| deriv[m][k] * (nodes[k * dim + c] - um[c])).sum();
                        nonzero |= *d != 0.0;
                    }
                    if nonzero {
                        let b = self.system.apply_b(um, &du, self.axis)?;
                        for (ri, bi) in r.iter_mut().zip(b) {
                            *ri += weights[m] * bi;
                        }
                    }
                }
                for v in &mut r {
                    *v *= -inv_dx;
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rate = Vec::with_capacity(n * dim);
        for r in rates {
            rate.extend(r);
        }
        Ok(Residual {
            rate,
            alpha,
            events,
        })
    }

    fn interface(&self, left: &[f64], right: &[f64]) -> Result<Interface> {
        let jump: Vec<f64> = right.iter().zip(left).map(|(r, l)| r - l).collect();
        let (fluct, raw) = if jump.iter().all(|&d| d == 0.0) {
            (vec![0.0; jump.len()], self.system.state_wave_speed(left, self.axis)?)
        } else {
            self.system.path_fluctuation(left, right, self.axis)?
        };
        let alpha = ALPHA_SAFETY * raw;
        let plus = fluct.iter().zip(&jump).map(|(f, d)| 0.5 * (f + alpha * d)).collect();
        let minus = fluct.iter().zip(&jump).map(|(f, d)| 0.5 * (f - alpha * d)).collect();
        Ok(Interface { plus, minus, alpha })
    }

    /// Limits averages, fills ghosts, and evaluates the rates.
    pub fn evaluate(&self, field: &mut CellField1D, t: f64) -> Result<Residual> {
        let mut events = self.prepare(field, t)?;
        let mut res = self.residual(field)?;
        events.append(&mut res.events);
        res.events = events;
        Ok(res)
    }

    /// Largest cell-average wave speed, scaled by the safety factor.
    pub fn cell_alpha(&self, field: &CellField1D) -> Result<f64> {
        let dim = field.stride();
        let speeds: Vec<f64> = field
            .interior()
            .par_chunks_exact(dim)
            .enumerate()
            .map(|(j, c)| self.system.state_wave_speed(c, self.axis).map_err(|e| e.in_cell(j)))
            .collect::<Result<_>>()?;
        Ok(ALPHA_SAFETY * speeds.into_iter().fold(0.0, f64::max))
    }
}
