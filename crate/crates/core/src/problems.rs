//! Built-in uncertain Euler problems and the smooth exact solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AdiabaticIndex, EulerEquations, SpaceDim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Periodic,
    Outflow,
    /// Ghost cells carry the time-periodic driver state.
    Driver,
}

/// `(ρ, u, p)(t) = (ρ₀, a·sin(2π w(ξ) t), p₀)` with `w(ξ) = w₀ + w₁ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverSpec {
    pub density: f64,
    pub amplitude: f64,
    pub pressure: f64,
    pub freq_base: f64,
    pub freq_slope: f64,
}

impl DriverSpec {
    pub fn primitive(&self, t: f64, xi: f64) -> [f64; 3] {
        let w = self.freq_base + self.freq_slope * xi;
        [
            self.density,
            self.amplitude * (2.0 * PI * w * t).sin(),
            self.pressure,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RiemannConfig {
    /// Four rarefactions, velocity `-0.7259 → -0.7259 + 0.1ξ`.
    RarefactionVelocity,
    /// Four rarefactions, `Γ(ξ) = 1.4 + 0.1ξ`.
    RarefactionGamma,
    /// Two rarefactions and two contacts, density scaled by `1 + 0.1ξ`.
    ContactDensity,
    /// Two rarefactions and two contacts, `Γ(ξ) = 1.4 + 0.1ξ`.
    ContactGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialData {
    /// `ρ = 1 + 0.2 sin(2πx)`, `u = 0.8 + 0.2ξ`, `p = 1`.
    SmoothSine,
    /// Fluid at rest.
    Quiescent { density: f64, pressure: f64 },
    /// Shock tube with the interface at `base + slope·ξ`.
    ShockTube {
        left: [f64; 3],
        right: [f64; 3],
        interface_base: f64,
        interface_slope: f64,
    },
    /// Four-quadrant data split at `x = 0.5`, `y = 0.5`.
    Quadrants(RiemannConfig),
    /// Smooth periodic 2D flow with nonlinear acoustics.
    SmoothWave2d,
}

/// Fully specified uncertain problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSetup {
    pub name: String,
    pub dim: SpaceDim,
    pub gamma: AdiabaticIndex,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub final_time: f64,
    /// Left and right.
    pub boundary_x: (BoundaryKind, BoundaryKind),
    /// Bottom and top; unused in 1D.
    pub boundary_y: (BoundaryKind, BoundaryKind),
    pub initial: InitialData,
    pub driver: Option<DriverSpec>,
}

pub const BUILTIN_PROBLEMS: &[&str] = &[
    "smooth",
    "driver",
    "sod",
    "rp1_velocity",
    "rp1_gamma",
    "rp2_density",
    "rp2_gamma",
    "smooth2d",
    "sod2d",
];

const SOD_LEFT: [f64; 3] = [1.0, 0.0, 1.0];
const SOD_RIGHT: [f64; 3] = [0.125, 0.0, 0.1];

pub fn builtin_problem(name: &str) -> Result<ProblemSetup> {
    use BoundaryKind::*;
    let one_d = |name: &str, gamma, x_range, t, bx, initial, driver| ProblemSetup {
        name: name.to_string(),
        dim: SpaceDim::One,
        gamma,
        x_range,
        y_range: (0.0, 1.0),
        final_time: t,
        boundary_x: bx,
        boundary_y: (Periodic, Periodic),
        initial,
        driver,
    };
    let two_d = |name: &str, gamma, t, b, initial| ProblemSetup {
        name: name.to_string(),
        dim: SpaceDim::Two,
        gamma,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        final_time: t,
        boundary_x: b,
        boundary_y: b,
        initial,
        driver: None,
    };
    let c14 = AdiabaticIndex::constant(1.4);
    let g_rand = AdiabaticIndex::linear(1.4, 0.1);
    let sod = InitialData::ShockTube {
        left: SOD_LEFT,
        right: SOD_RIGHT,
        interface_base: 0.5,
        interface_slope: 0.05,
    };
    Ok(match name {
        "smooth" => one_d(
            name,
            c14,
            (0.0, 1.0),
            0.2,
            (Periodic, Periodic),
            InitialData::SmoothSine,
            None,
        ),
        "driver" => one_d(
            name,
            AdiabaticIndex::constant(5.0 / 3.0),
            (0.0, 5.0),
            4.0,
            (Driver, Outflow),
            InitialData::Quiescent {
                density: 1.0,
                pressure: 0.6,
            },
            Some(DriverSpec {
                density: 1.0,
                amplitude: 0.02,
                pressure: 0.6,
                freq_base: 1.0,
                freq_slope: 0.1,
            }),
        ),
        "sod" => one_d(name, c14, (0.0, 1.0), 0.18, (Outflow, Outflow), sod, None),
        "rp1_velocity" => two_d(
            name,
            c14,
            0.2,
            (Outflow, Outflow),
            InitialData::Quadrants(RiemannConfig::RarefactionVelocity),
        ),
        "rp1_gamma" => two_d(
            name,
            g_rand,
            0.2,
            (Outflow, Outflow),
            InitialData::Quadrants(RiemannConfig::RarefactionGamma),
        ),
        "rp2_density" => two_d(
            name,
            c14,
            0.2,
            (Outflow, Outflow),
            InitialData::Quadrants(RiemannConfig::ContactDensity),
        ),
        "rp2_gamma" => two_d(
            name,
            g_rand,
            0.2,
            (Outflow, Outflow),
            InitialData::Quadrants(RiemannConfig::ContactGamma),
        ),
        "smooth2d" => two_d(
            name,
            c14,
            0.1,
            (Periodic, Periodic),
            InitialData::SmoothWave2d,
        ),
        "sod2d" => {
            let mut p = two_d(name, c14, 0.18, (Outflow, Outflow), sod);
            p.boundary_y = (Periodic, Periodic);
            p
        }
        other => return Err(Error::UnknownProblem(other.to_string())),
    })
}

/// Primitive quadrant states `(ρ, u, v, p)` for NE, NW, SW, SE.
fn quadrant_states(config: RiemannConfig, xi: f64) -> [[f64; 4]; 4] {
    match config {
        RiemannConfig::RarefactionVelocity | RiemannConfig::RarefactionGamma => {
            let w = if config == RiemannConfig::RarefactionVelocity {
                -0.7259 + 0.1 * xi
            } else {
                -0.7259
            };
            [
                [1.0, 0.0, 0.0, 1.0],
                [0.5197, w, 0.0, 0.4],
                [1.0, w, w, 1.0],
                [0.5197, 0.0, w, 0.4],
            ]
        }
        RiemannConfig::ContactDensity | RiemannConfig::ContactGamma => {
            let s = if config == RiemannConfig::ContactDensity {
                1.0 + 0.1 * xi
            } else {
                1.0
            };
            [
                [0.5197 * s, 0.1, 0.1, 0.4],
                [1.0 * s, -0.6259, 0.1, 1.0],
                [0.8 * s, 0.1, 0.1, 1.0],
                [1.0 * s, 0.1, -0.6259, 1.0],
            ]
        }
    }
}

impl ProblemSetup {
    pub fn model(&self) -> EulerEquations {
        EulerEquations::new(self.dim, self.gamma)
    }

    pub fn n_vars(&self) -> usize {
        match self.dim {
            SpaceDim::One => 3,
            SpaceDim::Two => 4,
        }
    }

    /// Primitive initial state at `(x, y)`; `y` is ignored in 1D.
    pub fn initial_primitive(&self, x: f64, y: f64, xi: f64) -> Vec<f64> {
        let prim3 = |p: [f64; 3]| match self.dim {
            SpaceDim::One => p.to_vec(),
            SpaceDim::Two => vec![p[0], p[1], 0.0, p[2]],
        };
        match self.initial {
            InitialData::SmoothSine => prim3([
                1.0 + 0.2 * (2.0 * PI * x).sin(),
                0.8 + 0.2 * xi,
                1.0,
            ]),
            InitialData::Quiescent { density, pressure } => prim3([density, 0.0, pressure]),
            InitialData::ShockTube {
                left,
                right,
                interface_base,
                interface_slope,
            } => {
                if x < interface_base + interface_slope * xi {
                    prim3(left)
                } else {
                    prim3(right)
                }
            }
            InitialData::Quadrants(config) => {
                let q = quadrant_states(config, xi);
                let idx = match (x > 0.5, y > 0.5) {
                    (true, true) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, false) => 3,
                };
                q[idx].to_vec()
            }
            InitialData::SmoothWave2d => vec![
                1.0 + 0.2 * (2.0 * PI * (x + y)).sin(),
                0.5 + 0.1 * xi,
                0.3,
                1.0 + 0.1 * (2.0 * PI * x).sin() * (2.0 * PI * y).sin(),
            ],
        }
    }

    pub fn initial_conserved(&self, x: f64, y: f64, xi: f64) -> Vec<f64> {
        self.model()
            .conserved(&self.initial_primitive(x, y, xi), xi)
    }

    /// Locations of initial discontinuities along x (for sub-cell quadrature).
    pub fn breakpoints_x(&self, xi: f64) -> Vec<f64> {
        match self.initial {
            InitialData::ShockTube {
                interface_base,
                interface_slope,
                ..
            } => vec![interface_base + interface_slope * xi],
            InitialData::Quadrants(_) => vec![0.5],
            _ => Vec::new(),
        }
    }

    pub fn breakpoints_y(&self, _xi: f64) -> Vec<f64> {
        match self.initial {
            InitialData::Quadrants(_) => vec![0.5],
            _ => Vec::new(),
        }
    }

    /// Conserved driver state for ghost cells.
    pub fn driver_conserved(&self, t: f64, xi: f64) -> Option<Vec<f64>> {
        let d = self.driver?;
        let p = d.primitive(t, xi);
        let prim = match self.dim {
            SpaceDim::One => p.to_vec(),
            SpaceDim::Two => vec![p[0], p[1], 0.0, p[2]],
        };
        Some(self.model().conserved(&prim, xi))
    }

    /// Whether any input depends on `ξ`.
    pub fn is_random(&self) -> bool {
        match self.initial {
            InitialData::SmoothSine | InitialData::SmoothWave2d => true,
            InitialData::ShockTube {
                interface_slope, ..
            } => interface_slope != 0.0 || self.gamma.is_random(),
            InitialData::Quadrants(c) => {
                self.gamma.is_random()
                    || matches!(
                        c,
                        RiemannConfig::RarefactionVelocity | RiemannConfig::ContactDensity
                    )
            }
            InitialData::Quiescent { .. } => {
                self.gamma.is_random() || self.driver.is_some_and(|d| d.freq_slope != 0.0)
            }
        }
    }
}

/// Exact primitive solution `(ρ, u, p)` of the smooth problem.
pub fn exact_smooth(x: f64, t: f64, xi: f64) -> [f64; 3] {
    let u = 0.8 + 0.2 * xi;
    [1.0 + 0.2 * (2.0 * PI * (x - u * t)).sin(), u, 1.0]
}
