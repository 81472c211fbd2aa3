//! Deterministic finite-difference WENO5 solver with global Lax–Friedrichs
//! flux splitting and TVD-RK3, used at each collocation node.
//!
//! Unknowns are point values at cell centers. The flux at `x_{i+½}` is
//! `F⁺ + F⁻`, with `F±` the fifth-order upwind-biased WENO interpolants of
//! `f± = ½(f(u) ± αu)`, applied componentwise.

use crate::error::{Error, Result};
use crate::model::{Axis, EulerEquations, HyperbolicModel, SpaceDim, MAX_VARS};
use crate::problems::{BoundaryKind, ProblemSetup};
use crate::weno::{smoothness, WenoPoint};

const G: usize = 3;

/// Final point values, interleaved `[j][i][variable]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdRun {
    pub nx: usize,
    pub ny: usize,
    pub n_vars: usize,
    pub values: Vec<f64>,
    pub steps: usize,
}

struct FdSolver<'a> {
    problem: &'a ProblemSetup,
    model: EulerEquations,
    xi: f64,
    nx: usize,
    ny: usize,
    nv: usize,
    dx: f64,
    dy: f64,
    face: WenoPoint,
}

impl<'a> FdSolver<'a> {
    fn two_d(&self) -> bool {
        self.problem.dim == SpaceDim::Two
    }

    fn initial(&self) -> Vec<f64> {
        let mut u = Vec::with_capacity(self.nx * self.ny * self.nv);
        let (x0, y0) = (self.problem.x_range.0, self.problem.y_range.0);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let x = x0 + (i as f64 + 0.5) * self.dx;
                let y = y0 + (j as f64 + 0.5) * self.dy;
                u.extend(self.problem.initial_conserved(x, y, self.xi));
            }
        }
        u
    }

    /// Copies line `l` along `axis` into `buf` with ghost points for time `t`.
    fn load_line(&self, u: &[f64], axis: Axis, l: usize, t: f64, buf: &mut Vec<f64>) -> usize {
        let nv = self.nv;
        let (n, bc) = match axis {
            Axis::X => (self.nx, self.problem.boundary_x),
            Axis::Y => (self.ny, self.problem.boundary_y),
        };
        buf.clear();
        buf.resize((n + 2 * G) * nv, 0.0);
        for k in 0..n {
            let idx = match axis {
                Axis::X => l * self.nx + k,
                Axis::Y => k * self.nx + l,
            };
            buf[(k + G) * nv..(k + G + 1) * nv].copy_from_slice(&u[idx * nv..(idx + 1) * nv]);
        }
        let driver = |side: BoundaryKind| -> Option<Vec<f64>> {
            (side == BoundaryKind::Driver).then(|| self.problem.driver_conserved(t, self.xi)).flatten()
        };
        for g in 0..G {
            let (ls, rs) = match bc.0 {
                BoundaryKind::Periodic => (G + (n - (G - g) % n) % n, G + g % n),
                _ => (G, G + n - 1),
            };
            let left = driver(bc.0).unwrap_or_else(|| buf[ls * nv..(ls + 1) * nv].to_vec());
            let right = driver(bc.1).unwrap_or_else(|| buf[rs * nv..(rs + 1) * nv].to_vec());
            buf[g * nv..(g + 1) * nv].copy_from_slice(&left);
            let d = G + n + g;
            buf[d * nv..(d + 1) * nv].copy_from_slice(&right);
        }
        n
    }

    fn line_alpha(&self, line: &[f64], axis: Axis) -> Result<f64> {
        let mut a: f64 = 0.0;
        for u in line.chunks_exact(self.nv) {
            a = a.max(self.model.max_wave_speed(u, self.xi, axis)?);
        }
        Ok(a)
    }

    /// Adds `-(F_{i+½} - F_{i-½})/h` for the `n` interior points of `line`.
    fn line_rate(&self, line: &[f64], n: usize, axis: Axis, alpha: f64, h: f64, rate: &mut [f64]) -> Result<()> {
        let nv = self.nv;
        let np = n + 2 * G;
        let mut fp = vec![0.0; np * nv];
        let mut fm = vec![0.0; np * nv];
        let mut f = [0.0; MAX_VARS];
        for p in 0..np {
            let u = &line[p * nv..(p + 1) * nv];
            self.model.flux(u, self.xi, axis, &mut f[..nv])?;
            for k in 0..nv {
                fp[p * nv + k] = 0.5 * (f[k] + alpha * u[k]);
                fm[p * nv + k] = 0.5 * (f[k] - alpha * u[k]);
            }
        }
        // face q between padded points G - 1 + q and G + q, q = 0..=n
        let mut prev = [0.0; MAX_VARS];
        for q in 0..=n {
            let p = G - 1 + q;
            let mut flux = [0.0; MAX_VARS];
            for k in 0..nv {
                let sp = [
                    fp[(p - 2) * nv + k],
                    fp[(p - 1) * nv + k],
                    fp[p * nv + k],
                    fp[(p + 1) * nv + k],
                    fp[(p + 2) * nv + k],
                ];
                let sm = [
                    fm[(p + 3) * nv + k],
                    fm[(p + 2) * nv + k],
                    fm[(p + 1) * nv + k],
                    fm[p * nv + k],
                    fm[(p - 1) * nv + k],
                ];
                flux[k] = self.face.value(&sp, &smoothness(&sp)) + self.face.value(&sm, &smoothness(&sm));
            }
            if q > 0 {
                let i = q - 1;
                for k in 0..nv {
                    rate[i * nv + k] -= (flux[k] - prev[k]) / h;
                }
            }
            prev = flux;
        }
        Ok(())
    }

    fn rate(&self, u: &[f64], t: f64) -> Result<(Vec<f64>, f64, f64)> {
        let nv = self.nv;
        let mut rate = vec![0.0; u.len()];
        let mut buf = Vec::new();
        let axes: &[Axis] = if self.two_d() { &[Axis::X, Axis::Y] } else { &[Axis::X] };
        let mut alphas = [0.0f64; 2];
        for (a, &axis) in axes.iter().enumerate() {
            let n_lines = match axis {
                Axis::X => self.ny,
                Axis::Y => self.nx,
            };
            let mut alpha: f64 = 0.0;
            for l in 0..n_lines {
                self.load_line(u, axis, l, t, &mut buf);
                alpha = alpha.max(self.line_alpha(&buf, axis)?);
            }
            alphas[a] = alpha;
            let h = if axis == Axis::X { self.dx } else { self.dy };
            let mut line_rate = Vec::new();
            for l in 0..n_lines {
                let n = self.load_line(u, axis, l, t, &mut buf);
                line_rate.clear();
                line_rate.resize(n * nv, 0.0);
                self.line_rate(&buf, n, axis, alpha, h, &mut line_rate)?;
                for k in 0..n {
                    let idx = match axis {
                        Axis::X => l * self.nx + k,
                        Axis::Y => k * self.nx + l,
                    };
                    for c in 0..nv {
                        rate[idx * nv + c] += line_rate[k * nv + c];
                    }
                }
            }
        }
        Ok((rate, alphas[0], alphas[1]))
    }

    fn run(&self, cfl: f64) -> Result<FdRun> {
        let t_final = self.problem.final_time;
        let mut u = self.initial();
        let mut t = 0.0;
        let mut steps = 0;
        while t < t_final {
            let (r1, ax, ay) = self.rate(&u, t)?;
            let speed = ax / self.dx + if self.two_d() { ay / self.dy } else { 0.0 };
            let mut dt = if speed > 0.0 { cfl / speed } else { t_final - t };
            if dt >= (t_final - t) * (1.0 - 1e-12) {
                dt = t_final - t;
            }
            let u1: Vec<f64> = u.iter().zip(&r1).map(|(a, r)| a + dt * r).collect();
            let (r2, _, _) = self.rate(&u1, t + dt)?;
            let u2: Vec<f64> = u
                .iter()
                .zip(&u1)
                .zip(&r2)
                .map(|((a, b), r)| 0.75 * a + 0.25 * (b + dt * r))
                .collect();
            let (r3, _, _) = self.rate(&u2, t + 0.5 * dt)?;
            for ((a, b), r) in u.iter_mut().zip(&u2).zip(&r3) {
                *a = *a / 3.0 + 2.0 / 3.0 * (b + dt * r);
            }
            t = if dt == t_final - t { t_final } else { t + dt };
            steps += 1;
        }
        Ok(FdRun {
            nx: self.nx,
            ny: self.ny,
            n_vars: self.nv,
            values: u,
            steps,
        })
    }
}

/// Solves the deterministic problem obtained by fixing `ξ` on an
/// `nx × ny` grid (`ny = 1` in 1D) up to the problem's final time.
pub fn fd_solve(problem: &ProblemSetup, xi: f64, cells: (usize, usize), cfl: f64) -> Result<FdRun> {
    let (nx, ny) = cells;
    let two_d = problem.dim == SpaceDim::Two;
    if nx == 0 || ny == 0 || (!two_d && ny != 1) {
        return Err(Error::Config(format!("invalid grid {nx}×{ny} for this problem")));
    }
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    let solver = FdSolver {
        problem,
        model: problem.model(),
        xi,
        nx,
        ny,
        nv: problem.n_vars(),
        dx: (problem.x_range.1 - problem.x_range.0) / nx as f64,
        dy: (problem.y_range.1 - problem.y_range.0) / ny as f64,
        face: WenoPoint::new(0.5),
    };
    solver.run(cfl)
}
