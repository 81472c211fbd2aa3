//! Hyperbolic system contract and the ideal-gas Euler equations.
//!
//! Every evaluation takes the random variable `ξ` so that closures such as
//! the adiabatic index can depend on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of conserved variables any bundled model uses.
pub const MAX_VARS: usize = 4;

/// Floors defining the interior of the admissible set.
pub const DENSITY_FLOOR: f64 = 1e-13;
pub const PRESSURE_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceDim {
    One,
    Two,
}

type Mat = [[f64; MAX_VARS]; MAX_VARS];

/// Eigenvalues and left eigenvectors (rows of `L`) of the flux Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenStructure {
    pub n: usize,
    pub values: [f64; MAX_VARS],
    pub left: Mat,
}

impl EigenStructure {
    pub fn spectral_radius(&self) -> f64 {
        self.values[..self.n].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `A₀ = LᵀL` and `A₁ = LᵀΛL`.
    pub fn symmetrizers(&self) -> Symmetrizers {
        let n = self.n;
        let mut a0 = [[0.0; MAX_VARS]; MAX_VARS];
        let mut a1 = [[0.0; MAX_VARS]; MAX_VARS];
        for r in 0..n {
            for c in r..n {
                let mut s0 = 0.0;
                let mut s1 = 0.0;
                for k in 0..n {
                    let p = self.left[k][r] * self.left[k][c];
                    s0 += p;
                    s1 += self.values[k] * p;
                }
                a0[r][c] = s0;
                a0[c][r] = s0;
                a1[r][c] = s1;
                a1[c][r] = s1;
            }
        }
        Symmetrizers { n, a0, a1 }
    }
}

/// Symmetric pair `(A₀, A₁)` with `A₀⁻¹A₁` similar to the flux Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symmetrizers {
    pub n: usize,
    pub a0: Mat,
    pub a1: Mat,
}

/// A quasilinear hyperbolic system `U_t + F(U; ξ)_x (+ G(U; ξ)_y) = 0`.
pub trait HyperbolicModel: Send + Sync {
    fn n_vars(&self) -> usize;

    fn flux(&self, u: &[f64], xi: f64, axis: Axis, out: &mut [f64]) -> Result<()>;

    fn eigen(&self, u: &[f64], xi: f64, axis: Axis) -> Result<EigenStructure>;

    /// `max_ℓ |λ_ℓ(u; ξ)|` without forming eigenvectors.
    fn max_wave_speed(&self, u: &[f64], xi: f64, axis: Axis) -> Result<f64>;

    fn is_admissible(&self, u: &[f64], xi: f64) -> bool;

    fn symmetrizers(&self, u: &[f64], xi: f64, axis: Axis) -> Result<Symmetrizers> {
        Ok(self.eigen(u, xi, axis)?.symmetrizers())
    }
}

/// `Γ(ξ) = base + slope·ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticIndex {
    pub base: f64,
    pub slope: f64,
}

impl AdiabaticIndex {
    pub const fn constant(gamma: f64) -> Self {
        Self {
            base: gamma,
            slope: 0.0,
        }
    }

    pub const fn linear(base: f64, slope: f64) -> Self {
        Self { base, slope }
    }

    #[inline]
    pub fn at(&self, xi: f64) -> f64 {
        self.base + self.slope * xi
    }

    pub fn is_random(&self) -> bool {
        self.slope != 0.0
    }
}

/// Compressible Euler equations closed by `p = (Γ - 1) ρ e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerEquations {
    pub dim: SpaceDim,
    pub gamma: AdiabaticIndex,
}

impl EulerEquations {
    pub fn new(dim: SpaceDim, gamma: AdiabaticIndex) -> Self {
        Self { dim, gamma }
    }

    pub fn one_d(gamma: f64) -> Self {
        Self::new(SpaceDim::One, AdiabaticIndex::constant(gamma))
    }

    pub fn two_d(gamma: f64) -> Self {
        Self::new(SpaceDim::Two, AdiabaticIndex::constant(gamma))
    }

    fn n(&self) -> usize {
        match self.dim {
            SpaceDim::One => 3,
            SpaceDim::Two => 4,
        }
    }

    /// Pressure from conserved variables.
    #[inline]
    pub fn pressure(&self, u: &[f64], xi: f64) -> f64 {
        let kinetic = match self.dim {
            SpaceDim::One => 0.5 * u[1] * u[1] / u[0],
            SpaceDim::Two => 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0],
        };
        (self.gamma.at(xi) - 1.0) * (u[self.n() - 1] - kinetic)
    }

    /// Primitive `(ρ, u[, v], p)` to conserved `(ρ, ρu[, ρv], E)`.
    pub fn conserved(&self, prim: &[f64], xi: f64) -> Vec<f64> {
        let g = self.gamma.at(xi);
        match self.dim {
            SpaceDim::One => {
                let (rho, u, p) = (prim[0], prim[1], prim[2]);
                vec![rho, rho * u, p / (g - 1.0) + 0.5 * rho * u * u]
            }
            SpaceDim::Two => {
                let (rho, u, v, p) = (prim[0], prim[1], prim[2], prim[3]);
                vec![
                    rho,
                    rho * u,
                    rho * v,
                    p / (g - 1.0) + 0.5 * rho * (u * u + v * v),
                ]
            }
        }
    }

    /// Conserved to primitive `(ρ, u[, v], p)`.
    pub fn primitive(&self, u: &[f64], xi: f64) -> Vec<f64> {
        let p = self.pressure(u, xi);
        match self.dim {
            SpaceDim::One => vec![u[0], u[1] / u[0], p],
            SpaceDim::Two => vec![u[0], u[1] / u[0], u[2] / u[0], p],
        }
    }

    fn check(&self, u: &[f64], xi: f64) -> Result<f64> {
        let p = self.pressure(u, xi);
        if u[0] > DENSITY_FLOOR && p > PRESSURE_FLOOR && p.is_finite() {
            Ok(p)
        } else {
            Err(Error::Inadmissible {
                density: u[0],
                pressure: p,
                xi,
            })
        }
    }

    /// Normal and tangential momentum slots for the given axis.
    #[inline]
    fn slots(&self, axis: Axis) -> (usize, usize) {
        match axis {
            Axis::X => (1, 2),
            Axis::Y => (2, 1),
        }
    }
}

impl HyperbolicModel for EulerEquations {
    fn n_vars(&self) -> usize {
        self.n()
    }

    fn flux(&self, u: &[f64], xi: f64, axis: Axis, out: &mut [f64]) -> Result<()> {
        let p = self.check(u, xi)?;
        match self.dim {
            SpaceDim::One => {
                let vel = u[1] / u[0];
                out[0] = u[1];
                out[1] = u[1] * vel + p;
                out[2] = vel * (u[2] + p);
            }
            SpaceDim::Two => {
                let (nrm, tan) = self.slots(axis);
                let vn = u[nrm] / u[0];
                out[0] = u[nrm];
                out[nrm] = u[nrm] * vn + p;
                out[tan] = u[tan] * vn;
                out[3] = vn * (u[3] + p);
            }
        }
        Ok(())
    }

    fn eigen(&self, u: &[f64], xi: f64, axis: Axis) -> Result<EigenStructure> {
        let p = self.check(u, xi)?;
        let g = self.gamma.at(xi);
        let rho = u[0];
        let c = (g * p / rho).sqrt();
        let b1 = (g - 1.0) / (c * c);
        let mut left = [[0.0; MAX_VARS]; MAX_VARS];
        let mut values = [0.0; MAX_VARS];
        let n = self.n();
        match self.dim {
            SpaceDim::One => {
                let vel = u[1] / rho;
                let b2 = 0.5 * b1 * vel * vel;
                values[..3].copy_from_slice(&[vel - c, vel, vel + c]);
                left[0][..3].copy_from_slice(&[
                    0.5 * (b2 + vel / c),
                    -0.5 * (b1 * vel + 1.0 / c),
                    0.5 * b1,
                ]);
                left[1][..3].copy_from_slice(&[1.0 - b2, b1 * vel, -b1]);
                left[2][..3].copy_from_slice(&[
                    0.5 * (b2 - vel / c),
                    -0.5 * (b1 * vel - 1.0 / c),
                    0.5 * b1,
                ]);
            }
            SpaceDim::Two => {
                let (nrm, tan) = self.slots(axis);
                let vn = u[nrm] / rho;
                let vt = u[tan] / rho;
                let b2 = 0.5 * b1 * (vn * vn + vt * vt);
                values = [vn - c, vn, vn, vn + c];
                let mut row = |r: usize, rho_c: f64, n_c: f64, t_c: f64, e_c: f64| {
                    left[r][0] = rho_c;
                    left[r][nrm] = n_c;
                    left[r][tan] = t_c;
                    left[r][3] = e_c;
                };
                row(
                    0,
                    0.5 * (b2 + vn / c),
                    -0.5 * (b1 * vn + 1.0 / c),
                    -0.5 * b1 * vt,
                    0.5 * b1,
                );
                row(1, 1.0 - b2, b1 * vn, b1 * vt, -b1);
                row(2, -vt, 0.0, 1.0, 0.0);
                row(
                    3,
                    0.5 * (b2 - vn / c),
                    -0.5 * (b1 * vn - 1.0 / c),
                    -0.5 * b1 * vt,
                    0.5 * b1,
                );
            }
        }
        for r in left.iter_mut().take(n) {
            let norm = r[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
            r[..n].iter_mut().for_each(|v| *v /= norm);
        }
        Ok(EigenStructure { n, values, left })
    }

    fn max_wave_speed(&self, u: &[f64], xi: f64, axis: Axis) -> Result<f64> {
        let p = self.check(u, xi)?;
        let c = (self.gamma.at(xi) * p / u[0]).sqrt();
        let vn = match (self.dim, axis) {
            (SpaceDim::One, _) | (SpaceDim::Two, Axis::X) => u[1] / u[0],
            (SpaceDim::Two, Axis::Y) => u[2] / u[0],
        };
        Ok(vn.abs() + c)
    }

    fn is_admissible(&self, u: &[f64], xi: f64) -> bool {
        u.iter().all(|v| v.is_finite()) && self.check(u, xi).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fd_jacobian(m: &EulerEquations, u: &[f64], xi: f64, axis: Axis) -> DMatrix<f64> {
        let n = m.n_vars();
        let mut jac = DMatrix::zeros(n, n);
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        for c in 0..n {
            let h = 1e-6 * u[c].abs().max(1.0);
            let mut up = u.to_vec();
            let mut um = u.to_vec();
            up[c] += h;
            um[c] -= h;
            m.flux(&up, xi, axis, &mut fp).unwrap();
            m.flux(&um, xi, axis, &mut fm).unwrap();
            for r in 0..n {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        jac
    }

    fn to_dmat(n: usize, a: &Mat) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |r, c| a[r][c])
    }

    fn random_state(rng: &mut ChaCha8Rng, m: &EulerEquations, xi: f64) -> Vec<f64> {
        let rho = rng.gen_range(0.1..3.0);
        let p = rng.gen_range(0.05..3.0);
        match m.dim {
            SpaceDim::One => m.conserved(&[rho, rng.gen_range(-2.0..2.0), p], xi),
            SpaceDim::Two => m.conserved(
                &[rho, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), p],
                xi,
            ),
        }
    }

    #[test]
    fn flux_examples() {
        let m = EulerEquations::one_d(1.4);
        let u = m.conserved(&[1.0, 0.0, 1.0], 0.0);
        assert!((u[2] - 2.5).abs() < 1e-15 && u[0] == 1.0 && u[1] == 0.0);
        let mut f = [0.0; 3];
        m.flux(&u, 0.0, Axis::X, &mut f).unwrap();
        assert_eq!(f[0], 0.0);
        assert!((f[1] - 1.0).abs() < 1e-15 && f[2] == 0.0);

        let u = m.conserved(&[1.0, 1.0, 1.0], 0.0);
        assert!((u[2] - 3.0).abs() < 1e-15);
        m.flux(&u, 0.0, Axis::X, &mut f).unwrap();
        for (a, b) in f.iter().zip([1.0, 2.0, 4.0]) {
            assert!((a - b).abs() < 1e-14);
        }

        let m2 = EulerEquations::two_d(1.4);
        let u = m2.conserved(&[1.0, 0.3, 0.0, 0.7], 0.0);
        let mut g = [0.0; 4];
        m2.flux(&u, 0.0, Axis::Y, &mut g).unwrap();
        assert_eq!([g[0], g[1], g[3]], [0.0; 3]);
        assert!((g[2] - 0.7).abs() < 1e-15);
        assert!(m.flux(&[-1.0, 0.0, 1.0], 0.0, Axis::X, &mut f).is_err());
    }

    #[test]
    fn eigen_examples() {
        let m = EulerEquations::one_d(1.4);
        let e = m.eigen(&[1.0, 0.0, 2.5], 0.0, Axis::X).unwrap();
        let c = 1.4f64.sqrt();
        for (a, b) in e.values[..3].iter().zip([-c, 0.0, c]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((c - 1.18322).abs() < 1e-5);

        let s = 0.7;
        let shifted = m.eigen(&m.conserved(&[1.0, s, 1.0], 0.0), 0.0, Axis::X).unwrap();
        for k in 0..3 {
            assert!((shifted.values[k] - (e.values[k] + s)).abs() < 1e-14);
        }
        for r in 0..3 {
            let norm: f64 = e.left[r][..3].iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn admissibility_examples() {
        let m = EulerEquations::one_d(1.4);
        assert!(m.is_admissible(&[1.0, 0.0, 2.5], 0.0));
        assert!(!m.is_admissible(&[-1.0, 0.0, 2.5], 0.0));
        assert!(!m.is_admissible(&[1.0, 2.0, 2.0], 0.0));
        assert!(matches!(
            m.eigen(&[1.0, 2.0, 2.0], 0.0, Axis::X),
            Err(Error::Inadmissible { .. })
        ));
    }

    #[test]
    fn left_eigenvectors_diagonalize_fd_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [SpaceDim::One, SpaceDim::Two] {
            let m = EulerEquations::new(dim, AdiabaticIndex::linear(1.4, 0.1));
            let n = m.n_vars();
            for _ in 0..1000 {
                let xi = rng.gen_range(-1.0..=1.0);
                let u = random_state(&mut rng, &m, xi);
                for axis in [Axis::X, Axis::Y] {
                    if dim == SpaceDim::One && axis == Axis::Y {
                        continue;
                    }
                    let a = fd_jacobian(&m, &u, xi, axis);
                    let e = m.eigen(&u, xi, axis).unwrap();
                    let l = to_dmat(n, &e.left);
                    let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| e.values[i]));
                    let resid = &l * &a - &lam * &l;
                    let a_norm = a.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
                    assert!(resid.amax() <= 1e-7 * a_norm, "residual {} vs |A| {a_norm}", resid.amax());

                    // Jacobian reassembled from the eigenstructure matches the FD Jacobian.
                    let rebuilt = l.clone().try_inverse().unwrap() * &lam * &l;
                    assert!((&rebuilt - &a).amax() <= 1e-6 * a_norm);
                }
            }
        }
    }

    #[test]
    fn symmetrizers_are_symmetric_spd_and_similar_to_jacobian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [SpaceDim::One, SpaceDim::Two] {
            let m = EulerEquations::new(dim, AdiabaticIndex::linear(1.4, 0.1));
            let n = m.n_vars();
            for _ in 0..300 {
                let xi = rng.gen_range(-1.0..=1.0);
                let u = random_state(&mut rng, &m, xi);
                let s = m.symmetrizers(&u, xi, Axis::X).unwrap();
                let a0 = to_dmat(n, &s.a0);
                let a1 = to_dmat(n, &s.a1);
                assert_eq!((&a0 - a0.transpose()).amax(), 0.0);
                assert!((&a1 - a1.transpose()).amax() <= 1e-14 * a1.amax().max(1.0));
                assert!(a0.clone().cholesky().is_some());
                assert!(a0.clone().symmetric_eigenvalues().min() > 0.0);

                let b = a0.clone().try_inverse().unwrap() * &a1;
                let mut got: Vec<f64> = b.complex_eigenvalues().iter().map(|z| z.re).collect();
                let mut want: Vec<f64> = m.eigen(&u, xi, Axis::X).unwrap().values[..n].to_vec();
                got.sort_by(f64::total_cmp);
                want.sort_by(f64::total_cmp);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-8 * (1.0 + w.abs()), "{got:?} vs {want:?}");
                }
            }
        }
    }

    #[test]
    fn y_direction_is_rotated_x_direction() {
        let m = EulerEquations::two_d(1.4);
        let u = m.conserved(&[1.2, 0.3, -0.4, 0.9], 0.0);
        let swapped = [u[0], u[2], u[1], u[3]];
        let ey = m.eigen(&u, 0.0, Axis::Y).unwrap();
        let ex = m.eigen(&swapped, 0.0, Axis::X).unwrap();
        assert_eq!(ey.values, ex.values);
        for r in 0..4 {
            assert_eq!(ey.left[r][1], ex.left[r][2]);
            assert_eq!(ey.left[r][2], ex.left[r][1]);
        }
    }
}
