//! Coefficient storage for one spatial location.

use serde::{Deserialize, Serialize};

/// gPC coefficients `û_0, …, û_M` of an `N`-component state, flattened
/// mode-major: all components of mode 0, then mode 1, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpcState {
    n_vars: usize,
    coeffs: Vec<f64>,
}

impl GpcState {
    pub fn zeros(n_vars: usize, n_modes: usize) -> Self {
        Self {
            n_vars,
            coeffs: vec![0.0; n_vars * n_modes],
        }
    }

    /// Builds a state from a flat mode-major vector.
    ///
    /// Panics if the length is not a multiple of `n_vars`.
    pub fn from_flat(n_vars: usize, coeffs: Vec<f64>) -> Self {
        assert!(n_vars > 0 && coeffs.len().is_multiple_of(n_vars));
        Self { n_vars, coeffs }
    }

    /// State whose only nonzero mode is the mean.
    pub fn deterministic(mean: &[f64], n_modes: usize) -> Self {
        let mut s = Self::zeros(mean.len(), n_modes);
        s.mode_mut(0).copy_from_slice(mean);
        s
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len() / self.n_vars
    }

    pub fn order(&self) -> usize {
        self.n_modes() - 1
    }

    pub fn mode(&self, i: usize) -> &[f64] {
        &self.coeffs[i * self.n_vars..(i + 1) * self.n_vars]
    }

    pub fn mode_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coeffs[i * self.n_vars..(i + 1) * self.n_vars]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}
