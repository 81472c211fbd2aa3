//! Exact Riemann solver for the one-dimensional ideal-gas Euler equations.

use serde::{Deserialize, Serialize};

use crate::basis::{gauss_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::fv::Mesh1D;

use super::norms::weighted_mean_std;

/// Relative tolerance on the star pressure.
pub const STAR_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// Star region and wave pattern of one Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannSolution {
    pub left: [f64; 3],
    pub right: [f64; 3],
    pub gamma: f64,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
}

fn sound_speed(gamma: f64, s: &[f64; 3]) -> f64 {
    (gamma * s[2] / s[0]).sqrt()
}

/// Pressure function `f_K(p)` and its derivative.
fn pressure_function(gamma: f64, s: &[f64; 3], p: f64) -> (f64, f64) {
    let (rho, pk) = (s[0], s[2]);
    if p > pk {
        let a = 2.0 / ((gamma + 1.0) * rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * pk;
        let q = (a / (p + b)).sqrt();
        ((p - pk) * q, q * (1.0 - 0.5 * (p - pk) / (p + b)))
    } else {
        let c = sound_speed(gamma, s);
        let z = (gamma - 1.0) / (2.0 * gamma);
        let r = p / pk;
        (
            2.0 * c / (gamma - 1.0) * (r.powf(z) - 1.0),
            r.powf(-(gamma + 1.0) / (2.0 * gamma)) / (rho * c),
        )
    }
}

fn star_density(gamma: f64, s: &[f64; 3], p: f64) -> f64 {
    let r = p / s[2];
    if p > s[2] {
        let g = (gamma - 1.0) / (gamma + 1.0);
        s[0] * (r + g) / (g * r + 1.0)
    } else {
        s[0] * r.powf(1.0 / gamma)
    }
}

impl RiemannSolution {
    /// Solves for the star state with Newton's method safeguarded by
    /// bisection, starting from the two-rarefaction approximation.
    pub fn solve(left: [f64; 3], right: [f64; 3], gamma: f64) -> Result<Self> {
        for s in [&left, &right] {
            if !(s[0] > 0.0 && s[2] > 0.0) {
                return Err(Error::Inadmissible {
                    density: s[0],
                    pressure: s[2],
                    xi: 0.0,
                });
            }
        }
        let (cl, cr) = (sound_speed(gamma, &left), sound_speed(gamma, &right));
        let du = right[1] - left[1];
        if 2.0 * (cl + cr) / (gamma - 1.0) <= du {
            return Err(Error::Vacuum);
        }
        let f = |p: f64| {
            let (fl, dl) = pressure_function(gamma, &left, p);
            let (fr, dr) = pressure_function(gamma, &right, p);
            (fl + fr + du, dl + dr)
        };
        let z = (gamma - 1.0) / (2.0 * gamma);
        let guess = ((cl + cr - 0.5 * (gamma - 1.0) * du) / (cl / left[2].powf(z) + cr / right[2].powf(z)))
            .powf(1.0 / z);
        // f is increasing; bracket the root
        let mut lo = 0.0;
        let mut hi = left[2].max(right[2]).max(guess);
        while f(hi).0 < 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        let mut p = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
        let mut converged = false;
        for _ in 0..MAX_ITER {
            let (val, der) = f(p);
            if val == 0.0 {
                converged = true;
                break;
            }
            if val < 0.0 {
                lo = p;
            } else {
                hi = p;
            }
            let mut next = p - val / der;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let change = (next - p).abs();
            p = next;
            if change <= STAR_TOL * p {
                converged = true;
                break;
            }
        }
        debug_assert!(converged, "star pressure iteration did not converge");
        let (fl, _) = pressure_function(gamma, &left, p);
        let (fr, _) = pressure_function(gamma, &right, p);
        let kind = |s: &[f64; 3]| if p > s[2] { WaveKind::Shock } else { WaveKind::Rarefaction };
        Ok(Self {
            left,
            right,
            gamma,
            p_star: p,
            u_star: 0.5 * (left[1] + right[1]) + 0.5 * (fr - fl),
            rho_star_left: star_density(gamma, &left, p),
            rho_star_right: star_density(gamma, &right, p),
            left_wave: kind(&left),
            right_wave: kind(&right),
        })
    }

    /// Speeds of all discontinuities and kinks, left to right.
    pub fn wave_speeds(&self) -> Vec<f64> {
        let g = self.gamma;
        let mut out = Vec::with_capacity(5);
        let (l, r) = (&self.left, &self.right);
        let (cl, cr) = (sound_speed(g, l), sound_speed(g, r));
        match self.left_wave {
            WaveKind::Shock => {
                out.push(l[1] - cl * ((g + 1.0) / (2.0 * g) * self.p_star / l[2] + (g - 1.0) / (2.0 * g)).sqrt())
            }
            WaveKind::Rarefaction => {
                out.push(l[1] - cl);
                out.push(self.u_star - cl * (self.p_star / l[2]).powf((g - 1.0) / (2.0 * g)));
            }
        }
        out.push(self.u_star);
        match self.right_wave {
            WaveKind::Shock => {
                out.push(r[1] + cr * ((g + 1.0) / (2.0 * g) * self.p_star / r[2] + (g - 1.0) / (2.0 * g)).sqrt())
            }
            WaveKind::Rarefaction => {
                out.push(self.u_star + cr * (self.p_star / r[2]).powf((g - 1.0) / (2.0 * g)));
                out.push(r[1] + cr);
            }
        }
        out
    }

    /// Primitive state `(ρ, u, p)` at similarity coordinate `s = x/t`.
    pub fn sample(&self, s: f64) -> [f64; 3] {
        let g = self.gamma;
        let ps = self.p_star;
        if s <= self.u_star {
            let l = &self.left;
            let cl = sound_speed(g, l);
            match self.left_wave {
                WaveKind::Shock => {
                    let sl = l[1] - cl * ((g + 1.0) / (2.0 * g) * ps / l[2] + (g - 1.0) / (2.0 * g)).sqrt();
                    if s <= sl {
                        *l
                    } else {
                        [self.rho_star_left, self.u_star, ps]
                    }
                }
                WaveKind::Rarefaction => {
                    let head = l[1] - cl;
                    let tail = self.u_star - cl * (ps / l[2]).powf((g - 1.0) / (2.0 * g));
                    if s <= head {
                        *l
                    } else if s >= tail {
                        [self.rho_star_left, self.u_star, ps]
                    } else {
                        let k = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * cl) * (l[1] - s);
                        let rho = l[0] * k.powf(2.0 / (g - 1.0));
                        let u = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l[1] + s);
                        [rho, u, l[2] * k.powf(2.0 * g / (g - 1.0))]
                    }
                }
            }
        } else {
            let r = &self.right;
            let cr = sound_speed(g, r);
            match self.right_wave {
                WaveKind::Shock => {
                    let sr = r[1] + cr * ((g + 1.0) / (2.0 * g) * ps / r[2] + (g - 1.0) / (2.0 * g)).sqrt();
                    if s >= sr {
                        *r
                    } else {
                        [self.rho_star_right, self.u_star, ps]
                    }
                }
                WaveKind::Rarefaction => {
                    let head = r[1] + cr;
                    let tail = self.u_star + cr * (ps / r[2]).powf((g - 1.0) / (2.0 * g));
                    if s >= head {
                        *r
                    } else if s <= tail {
                        [self.rho_star_right, self.u_star, ps]
                    } else {
                        let k = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * cr) * (r[1] - s);
                        let rho = r[0] * k.powf(2.0 / (g - 1.0));
                        let u = 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r[1] + s);
                        [rho, u, r[2] * k.powf(2.0 * g / (g - 1.0))]
                    }
                }
            }
        }
    }
}

/// Exact self-similar solution at `s = x/t`.
pub fn exact_riemann(left: [f64; 3], right: [f64; 3], gamma: f64, s: f64) -> Result<[f64; 3]> {
    Ok(RiemannSolution::solve(left, right, gamma)?.sample(s))
}

/// Mean and standard deviation over `ξ` of exact cell averages of the
/// conserved variables, laid out `[cell][variable]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ExactStats {
    pub fn density_mean(&self) -> Vec<f64> {
        self.mean.iter().step_by(3).copied().collect()
    }

    pub fn density_std(&self) -> Vec<f64> {
        self.std.iter().step_by(3).copied().collect()
    }
}

/// Statistics of a shock tube whose interface sits at `interface(ξ)`.
///
/// Cell averages are integrated with 5-point Gauss on the sub-intervals
/// between wave fronts, so they are exact up to round-off in smooth parts.
pub fn shock_tube_stats(
    left: [f64; 3],
    right: [f64; 3],
    gamma: f64,
    interface: impl Fn(f64) -> f64,
    mesh: &Mesh1D,
    t: f64,
    rule: &QuadratureRule,
) -> Result<ExactStats> {
    if !(t > 0.0) {
        return Err(Error::Config(format!("exact statistics need t > 0, got {t}")));
    }
    let sol = RiemannSolution::solve(left, right, gamma)?;
    let speeds = sol.wave_speeds();
    let gx = gauss_rule(5)?;
    let n = mesh.n_cells;
    let dx = mesh.dx();
    let mut samples = Vec::with_capacity(rule.len());
    for &xi in &rule.nodes {
        let mut field = vec![0.0; 3 * n];
        let x0 = interface(xi);
        let fronts: Vec<f64> = speeds.iter().map(|s| x0 + s * t).collect();
        for j in 0..n {
            let (a, b) = (mesh.face(j), mesh.face(j) + dx);
            let mut cuts = vec![a];
            cuts.extend(fronts.iter().copied().filter(|&f| f > a && f < b));
            cuts.push(b);
            let avg = &mut field[3 * j..3 * j + 3];
            for seg in cuts.windows(2) {
                let (lo, hi) = (seg[0], seg[1]);
                let h = 0.5 * (hi - lo);
                for (&q, &qw) in gx.nodes.iter().zip(&gx.weights) {
                    let x = 0.5 * (lo + hi) + h * q;
                    let p = sol.sample((x - x0) / t);
                    let cons = [p[0], p[0] * p[1], p[2] / (gamma - 1.0) + 0.5 * p[0] * p[1] * p[1]];
                    let frac = qw * (hi - lo) / dx;
                    for k in 0..3 {
                        avg[k] += frac * cons[k];
                    }
                }
            }
        }
        samples.push(field);
    }
    let (mean, std) = weighted_mean_std(&samples, &rule.weights);
    Ok(ExactStats { mean, std })
}

/// Sod statistics with interface `0.5 + 0.05ξ`.
pub fn exact_sod_stats(mesh: &Mesh1D, t: f64, gamma: f64, rule: &QuadratureRule) -> Result<ExactStats> {
    shock_tube_stats(
        [1.0, 0.0, 1.0],
        [0.125, 0.0, 0.1],
        gamma,
        |xi| 0.5 + 0.05 * xi,
        mesh,
        t,
        rule,
    )
}
