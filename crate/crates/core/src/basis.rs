//! Orthonormal Legendre chaos on `Θ = [-1, 1]` with the uniform probability
//! measure `dμ = dξ / 2`, plus the Gauss rules used to integrate against it.

use crate::error::{Error, Result};
use crate::state::GpcState;

/// Uniform probability measure on `[-1, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UniformMeasure;

impl UniformMeasure {
    pub const LOWER: f64 = -1.0;
    pub const UPPER: f64 = 1.0;

    pub fn density(&self) -> f64 {
        0.5
    }

    pub fn contains(&self, xi: f64) -> bool {
        (Self::LOWER..=Self::UPPER).contains(&xi)
    }
}

/// A polynomial chaos basis in one random variable.
///
/// Only the Legendre family is provided; the trait is where tensor bases for
/// several random variables would plug in.
pub trait ChaosBasis: Send + Sync {
    /// Highest polynomial degree `M`.
    fn order(&self) -> usize;

    fn n_terms(&self) -> usize {
        self.order() + 1
    }

    /// Writes `φ_0(ξ), …, φ_M(ξ)` into `out` without domain checks.
    fn eval_all_unchecked(&self, xi: f64, out: &mut [f64]);

    fn eval(&self, i: usize, xi: f64) -> Result<f64>;
}

/// `φ_i = √(2i+1) P_i`, orthonormal under `dξ / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegendreBasis {
    order: usize,
}

impl LegendreBasis {
    pub fn new(order: usize) -> Self {
        Self { order }
    }

    pub fn measure(&self) -> UniformMeasure {
        UniformMeasure
    }

    /// `φ_j(ξ_q)` tabulated row-major as `[q * n_terms + j]`.
    pub fn tabulate(&self, xis: &[f64]) -> Vec<f64> {
        let n = self.n_terms();
        let mut out = vec![0.0; xis.len() * n];
        for (q, &xi) in xis.iter().enumerate() {
            self.eval_all_unchecked(xi, &mut out[q * n..(q + 1) * n]);
        }
        out
    }
}

impl ChaosBasis for LegendreBasis {
    fn order(&self) -> usize {
        self.order
    }

    fn eval_all_unchecked(&self, xi: f64, out: &mut [f64]) {
        let mut p_prev = 1.0;
        out[0] = 1.0;
        if self.order == 0 {
            return;
        }
        let mut p = xi;
        out[1] = 3f64.sqrt() * xi;
        for n in 1..self.order {
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0) * xi * p - nf * p_prev) / (nf + 1.0);
            p_prev = p;
            p = next;
            out[n + 1] = (2.0 * nf + 3.0).sqrt() * p;
        }
    }

    fn eval(&self, i: usize, xi: f64) -> Result<f64> {
        if i > self.order {
            return Err(Error::IndexOutOfRange {
                index: i,
                order: self.order,
            });
        }
        if !UniformMeasure.contains(xi) {
            return Err(Error::OutsideDomain { xi });
        }
        let mut buf = vec![0.0; self.order + 1];
        self.eval_all_unchecked(xi, &mut buf);
        Ok(buf[i])
    }
}

/// Nodes and measure-normalized weights (summing to one).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Maps the rule onto `[a, b]`, weights still summing to one.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.clone(),
        }
    }
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]` for the uniform probability
/// measure; exact for polynomials of degree `2n - 1`.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::EmptyRule);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = nf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        if x * x != 1.0 {
            dp = nf * (x * p - pm1) / (x * x - 1.0);
        }
        // 2 / ((1 - x²) P'²), halved for the probability measure
        let w = 1.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss rule for `∫_0^1 · ds`, used along straight paths in state space.
pub fn gauss_rule_unit(n: usize) -> Result<QuadratureRule> {
    Ok(gauss_rule(n)?.mapped(0.0, 1.0))
}

/// `u_M(ξ) = Σ_i û_i φ_i(ξ)`.
pub fn gpc_eval(state: &GpcState, basis: &LegendreBasis, xi: f64) -> Result<Vec<f64>> {
    if !UniformMeasure.contains(xi) {
        return Err(Error::OutsideDomain { xi });
    }
    if state.n_modes() != basis.n_terms() {
        return Err(Error::Config(format!(
            "state has {} modes but the basis has {}",
            state.n_modes(),
            basis.n_terms()
        )));
    }
    let mut phi = vec![0.0; basis.n_terms()];
    basis.eval_all_unchecked(xi, &mut phi);
    let mut out = vec![0.0; state.n_vars()];
    eval_with_table(state.as_slice(), state.n_vars(), &phi, &mut out);
    Ok(out)
}

/// Evaluates flat coefficients against pre-tabulated basis values.
#[inline]
pub(crate) fn eval_with_table(coeffs: &[f64], n_vars: usize, phi: &[f64], out: &mut [f64]) {
    out[..n_vars].fill(0.0);
    for (mode, &p) in coeffs.chunks_exact(n_vars).zip(phi) {
        for (o, &c) in out.iter_mut().zip(mode) {
            *o += c * p;
        }
    }
}

/// Mean `û_0` and standard deviation `sqrt(Σ_{i≥1} û_i²)`, componentwise.
pub fn mean_std(state: &GpcState) -> (Vec<f64>, Vec<f64>) {
    let n = state.n_vars();
    let mean = state.mode(0).to_vec();
    let mut var = vec![0.0; n];
    for i in 1..state.n_modes() {
        for (v, c) in var.iter_mut().zip(state.mode(i)) {
            *v += c * c;
        }
    }
    (mean, var.into_iter().map(f64::sqrt).collect())
}

/// Projects a function of `ξ` onto the basis: `û_i = ∫ f(ξ) φ_i(ξ) dμ`.
pub fn project<F>(basis: &LegendreBasis, rule: &QuadratureRule, n_vars: usize, mut f: F) -> GpcState
where
    F: FnMut(f64) -> Vec<f64>,
{
    let nt = basis.n_terms();
    let mut out = GpcState::zeros(n_vars, nt);
    let mut phi = vec![0.0; nt];
    for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
        basis.eval_all_unchecked(xi, &mut phi);
        let value = f(xi);
        for (i, &p) in phi.iter().enumerate() {
            for (o, v) in out.mode_mut(i).iter_mut().zip(&value) {
                *o += w * p * v;
            }
        }
    }
    out
}
