//! Stochastic Galerkin assembly of the symmetrized system.
//!
//! For a gPC state `Û` the blocks are
//! `Â_k[i][j] = ∫ φ_i φ_j A_k(u_M(ξ); ξ) dμ`, `k = 0, 1`, with
//! `A₀ = LᵀL` and `A₁ = LᵀΛL` built from the left eigenvectors of the
//! physical flux Jacobian. `Â₀` is symmetric positive definite and `Â₁`
//! symmetric whenever `u_M(ξ)` is admissible, so `Â₀⁻¹Â₁` has real spectrum.
//!
//! The integrals are evaluated with a Gauss rule in `ξ`; the integrands are
//! not polynomial for Euler, so the rule is chosen generously.

use crate::basis::{eval_with_table, gauss_rule, gauss_rule_unit, ChaosBasis, LegendreBasis, QuadratureRule};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, DenseMatrix};
use crate::model::{Axis, HyperbolicModel, MAX_VARS};
use crate::state::GpcState;

/// Number of equispaced points added to the admissibility check set.
pub const CHECK_EQUISPACED: usize = 33;

/// Gauss nodes along the straight path between interface states.
pub const PATH_NODES: usize = 3;

/// Multiplier applied to the sampled wave-speed bound before it is used for
/// upwinding and time-step control.
pub const ALPHA_SAFETY: f64 = 1.05;

/// Default number of `ξ` nodes for the Galerkin integrals.
pub fn default_xi_nodes(order: usize) -> usize {
    (2 * (order + 1)).max(8)
}

/// Gauss rule on `s ∈ [0, 1]` for the path-averaged matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRule {
    pub s_nodes: Vec<f64>,
    pub s_weights: Vec<f64>,
}

impl PathRule {
    pub fn gauss(q: usize) -> Result<Self> {
        let r = gauss_rule_unit(q)?;
        Ok(Self {
            s_nodes: r.nodes,
            s_weights: r.weights,
        })
    }
}

#[derive(Debug, Clone)]
pub struct GalerkinMatrices {
    pub a0_hat: DenseMatrix,
    pub a1_hat: DenseMatrix,
}

/// Lax–Friedrichs splitting `B̂± = ½(B̂_Ψ ± αI)`.
#[derive(Debug, Clone)]
pub struct FluctuationSplit {
    pub b_minus: DenseMatrix,
    pub b_plus: DenseMatrix,
    pub alpha: f64,
}

pub fn lf_split(bpsi: &DenseMatrix, alpha: f64) -> FluctuationSplit {
    assert!(alpha >= 0.0, "splitting coefficient must be nonnegative");
    let n = bpsi.dim();
    let mut b_minus = bpsi.clone();
    let mut b_plus = bpsi.clone();
    for (m, p) in b_minus.as_mut_slice().iter_mut().zip(b_plus.as_mut_slice()) {
        *m *= 0.5;
        *p *= 0.5;
    }
    for i in 0..n {
        b_minus[(i, i)] -= 0.5 * alpha;
        b_plus[(i, i)] += 0.5 * alpha;
    }
    FluctuationSplit {
        b_minus,
        b_plus,
        alpha,
    }
}

/// Result of testing membership in the lifted admissible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Membership {
    Inside,
    /// First check point where `u_M(ξ)` is inadmissible.
    Outside { xi: f64 },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

/// Tabulated `ξ` points with basis values.
#[derive(Debug, Clone)]
struct Tabulated {
    xis: Vec<f64>,
    phi: Vec<f64>,
}

impl Tabulated {
    fn new(basis: &LegendreBasis, xis: Vec<f64>) -> Self {
        let phi = basis.tabulate(&xis);
        Self { xis, phi }
    }
}

/// Galerkin system for one hyperbolic model and one gPC order.
#[derive(Debug, Clone)]
pub struct SgSystem<M> {
    model: M,
    basis: LegendreBasis,
    n_vars: usize,
    xi_rule: QuadratureRule,
    rule: Tabulated,
    check: Tabulated,
    alpha_pts: Tabulated,
    path: PathRule,
}

impl<M: HyperbolicModel> SgSystem<M> {
    /// Uses `default_xi_nodes(order)` unless `xi_nodes` is given.
    pub fn new(model: M, order: usize, xi_nodes: Option<usize>) -> Result<Self> {
        let n_xi = xi_nodes.unwrap_or_else(|| default_xi_nodes(order));
        let xi_rule = gauss_rule(n_xi)?;
        Self::with_rule(model, order, xi_rule, PathRule::gauss(PATH_NODES)?)
    }

    pub fn with_rule(model: M, order: usize, xi_rule: QuadratureRule, path: PathRule) -> Result<Self> {
        let basis = LegendreBasis::new(order);
        let n_vars = model.n_vars();
        if n_vars > MAX_VARS {
            return Err(Error::Config(format!("model has {n_vars} variables, at most {MAX_VARS} supported")));
        }
        let mut check_xis = xi_rule.nodes.clone();
        check_xis.extend([-1.0, 1.0]);
        check_xis.extend(
            (0..CHECK_EQUISPACED).map(|k| -1.0 + 2.0 * k as f64 / (CHECK_EQUISPACED - 1) as f64),
        );
        let mut alpha_xis = xi_rule.nodes.clone();
        alpha_xis.extend([-1.0, 1.0]);
        Ok(Self {
            rule: Tabulated::new(&basis, xi_rule.nodes.clone()),
            check: Tabulated::new(&basis, check_xis),
            alpha_pts: Tabulated::new(&basis, alpha_xis),
            model,
            basis,
            n_vars,
            xi_rule,
            path,
        })
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn basis(&self) -> &LegendreBasis {
        &self.basis
    }

    pub fn xi_rule(&self) -> &QuadratureRule {
        &self.xi_rule
    }

    pub fn path_rule(&self) -> &PathRule {
        &self.path
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_terms()
    }

    /// Length `(M+1)N` of a flattened gPC state.
    pub fn state_len(&self) -> usize {
        self.n_vars * self.n_modes()
    }

    /// The `ξ` points used for admissibility checks.
    pub fn check_points(&self) -> &[f64] {
        &self.check.xis
    }

    /// Tests `Σ û_i φ_i(ξ) ∈ 𝒢` on the finite check set.
    pub fn check_admissible(&self, state: &GpcState) -> Membership {
        self.membership(state.as_slice())
    }

    pub(crate) fn membership(&self, coeffs: &[f64]) -> Membership {
        let nm = self.n_modes();
        let mut u = [0.0; MAX_VARS];
        for (q, &xi) in self.check.xis.iter().enumerate() {
            eval_with_table(coeffs, self.n_vars, &self.check.phi[q * nm..(q + 1) * nm], &mut u);
            if !self.model.is_admissible(&u[..self.n_vars], xi) {
                return Membership::Outside { xi };
            }
        }
        Membership::Inside
    }

    /// Adds `weight·Â₀(state)` into the upper triangle of `a0` and, when
    /// requested, `weight·Â₁(state)·v` into `a1v`.
    fn accumulate(
        &self,
        coeffs: &[f64],
        axis: Axis,
        weight: f64,
        a0: &mut [f64],
        a1v: Option<(&[f64], &mut [f64])>,
    ) -> Result<()> {
        let n = self.n_vars;
        let nm = self.n_modes();
        let dim = n * nm;
        let mut u = [0.0; MAX_VARS];
        let mut a1v = a1v;
        for (q, (&xi, &w)) in self.xi_rule.nodes.iter().zip(&self.xi_rule.weights).enumerate() {
            let phi = &self.rule.phi[q * nm..(q + 1) * nm];
            eval_with_table(coeffs, n, phi, &mut u);
            let sym = self.model.symmetrizers(&u[..n], xi, axis)?;
            let wq = w * weight;
            for i in 0..nm {
                let wi = wq * phi[i];
                for j in i..nm {
                    let c = wi * phi[j];
                    for r in 0..n {
                        let row = &mut a0[(i * n + r) * dim + j * n..(i * n + r) * dim + j * n + n];
                        for (dst, &s) in row.iter_mut().zip(&sym.a0[r][..n]) {
                            *dst += c * s;
                        }
                    }
                }
            }
            if let Some((v, out)) = a1v.as_mut() {
                let mut vq = [0.0; MAX_VARS];
                eval_with_table(v, n, phi, &mut vq);
                let mut y = [0.0; MAX_VARS];
                for r in 0..n {
                    y[r] = (0..n).map(|c| sym.a1[r][c] * vq[c]).sum();
                }
                for i in 0..nm {
                    let wi = wq * phi[i];
                    for r in 0..n {
                        out[i * n + r] += wi * y[r];
                    }
                }
            }
        }
        Ok(())
    }

    fn accumulate_a1(&self, coeffs: &[f64], axis: Axis, weight: f64, a1: &mut [f64]) -> Result<()> {
        let n = self.n_vars;
        let nm = self.n_modes();
        let dim = n * nm;
        let mut u = [0.0; MAX_VARS];
        for (q, (&xi, &w)) in self.xi_rule.nodes.iter().zip(&self.xi_rule.weights).enumerate() {
            let phi = &self.rule.phi[q * nm..(q + 1) * nm];
            eval_with_table(coeffs, n, phi, &mut u);
            let sym = self.model.symmetrizers(&u[..n], xi, axis)?;
            for i in 0..nm {
                for j in 0..nm {
                    let c = w * weight * phi[i] * phi[j];
                    for r in 0..n {
                        for cc in 0..n {
                            a1[(i * n + r) * dim + j * n + cc] += c * sym.a1[r][cc];
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn mirror_upper(&self, a: &mut [f64]) {
        let dim = self.state_len();
        for r in 0..dim {
            for c in 0..r {
                a[r * dim + c] = a[c * dim + r];
            }
        }
    }

    /// Assembles `Â₀` and `Â₁` at one state.
    pub fn assemble(&self, state: &GpcState, axis: Axis) -> Result<GalerkinMatrices> {
        let dim = self.state_len();
        let mut a0 = vec![0.0; dim * dim];
        let mut a1 = vec![0.0; dim * dim];
        self.accumulate(state.as_slice(), axis, 1.0, &mut a0, None)?;
        self.mirror_upper(&mut a0);
        self.accumulate_a1(state.as_slice(), axis, 1.0, &mut a1)?;
        Ok(GalerkinMatrices {
            a0_hat: DenseMatrix::from_row_major(dim, a0),
            a1_hat: DenseMatrix::from_row_major(dim, a1),
        })
    }

    /// `Â₀⁻¹ Â₁` at one state.
    pub fn b_matrix(&self, state: &GpcState, axis: Axis) -> Result<DenseMatrix> {
        let g = self.assemble(state, axis)?;
        Ok(Cholesky::of(&g.a0_hat)?.solve_matrix(&g.a1_hat))
    }

    /// `Â₀⁻¹ Â₁ v` at one state without forming the matrix.
    pub fn apply_b(&self, coeffs: &[f64], v: &[f64], axis: Axis) -> Result<Vec<f64>> {
        let dim = self.state_len();
        let mut a0 = vec![0.0; dim * dim];
        let mut out = vec![0.0; dim];
        self.accumulate(coeffs, axis, 1.0, &mut a0, Some((v, &mut out)))?;
        Cholesky::factor(dim, &a0)?.solve_in_place(&mut out);
        Ok(out)
    }

    fn path_state(left: &[f64], right: &[f64], s: f64, out: &mut [f64]) {
        for ((o, l), r) in out.iter_mut().zip(left).zip(right) {
            *o = l + s * (r - l);
        }
    }

    /// Path-averaged `(Â₀^Ψ, Â₁^Ψ)` along the straight segment.
    pub fn path_averaged(&self, left: &GpcState, right: &GpcState, axis: Axis) -> Result<GalerkinMatrices> {
        let dim = self.state_len();
        let mut a0 = vec![0.0; dim * dim];
        let mut a1 = vec![0.0; dim * dim];
        let mut psi = vec![0.0; dim];
        for (&s, &w) in self.path.s_nodes.iter().zip(&self.path.s_weights) {
            Self::path_state(left.as_slice(), right.as_slice(), s, &mut psi);
            if let Membership::Outside { xi } = self.membership(&psi) {
                return Err(Error::PathInadmissible { s, xi });
            }
            self.accumulate(&psi, axis, w, &mut a0, None)?;
            self.accumulate_a1(&psi, axis, w, &mut a1)?;
        }
        self.mirror_upper(&mut a0);
        Ok(GalerkinMatrices {
            a0_hat: DenseMatrix::from_row_major(dim, a0),
            a1_hat: DenseMatrix::from_row_major(dim, a1),
        })
    }

    /// Intermediate matrix `B̂_Ψ = (Â₀^Ψ)⁻¹ Â₁^Ψ`, via an SPD solve.
    pub fn path_matrix(&self, left: &GpcState, right: &GpcState, axis: Axis) -> Result<DenseMatrix> {
        let g = self.path_averaged(left, right, axis)?;
        Ok(Cholesky::of(&g.a0_hat)?.solve_matrix(&g.a1_hat))
    }

    /// Sampled bound `max_{ℓ,m,ξ} |λ_ℓ(u_M^{(m)}(ξ); ξ)|` over the path
    /// states, with `ξ` ranging over the quadrature nodes and `±1`.
    pub fn alpha_bound(&self, left: &GpcState, right: &GpcState, axis: Axis) -> Result<f64> {
        self.alpha_raw(left.as_slice(), right.as_slice(), axis)
    }

    pub(crate) fn alpha_raw(&self, left: &[f64], right: &[f64], axis: Axis) -> Result<f64> {
        let dim = self.state_len();
        let mut psi = vec![0.0; dim];
        let mut alpha: f64 = 0.0;
        for &s in &self.path.s_nodes {
            Self::path_state(left, right, s, &mut psi);
            alpha = alpha.max(self.state_wave_speed(&psi, axis).map_err(|e| match e {
                Error::Inadmissible { xi, .. } => Error::PathInadmissible { s, xi },
                other => other,
            })?);
        }
        Ok(alpha)
    }

    /// `max_{ℓ,ξ} |λ_ℓ(u_M(ξ); ξ)|` for a single state.
    pub(crate) fn state_wave_speed(&self, coeffs: &[f64], axis: Axis) -> Result<f64> {
        let n = self.n_vars;
        let nm = self.n_modes();
        let mut u = [0.0; MAX_VARS];
        let mut alpha: f64 = 0.0;
        for (q, &xi) in self.alpha_pts.xis.iter().enumerate() {
            eval_with_table(coeffs, n, &self.alpha_pts.phi[q * nm..(q + 1) * nm], &mut u);
            alpha = alpha.max(self.model.max_wave_speed(&u[..n], xi, axis)?);
        }
        Ok(alpha)
    }

    /// Hot-path interface kernel: returns `B̂_Ψ (right - left)` and the
    /// sampled `α` (before the safety factor).
    pub(crate) fn path_fluctuation(&self, left: &[f64], right: &[f64], axis: Axis) -> Result<(Vec<f64>, f64)> {
        let dim = self.state_len();
        let jump: Vec<f64> = right.iter().zip(left).map(|(r, l)| r - l).collect();
        let mut a0 = vec![0.0; dim * dim];
        let mut out = vec![0.0; dim];
        let mut psi = vec![0.0; dim];
        let mut alpha: f64 = 0.0;
        for (&s, &w) in self.path.s_nodes.iter().zip(&self.path.s_weights) {
            Self::path_state(left, right, s, &mut psi);
            self.accumulate(&psi, axis, w, &mut a0, Some((&jump, &mut out)))?;
            alpha = alpha.max(self.state_wave_speed(&psi, axis)?);
        }
        Cholesky::factor(dim, &a0)?.solve_in_place(&mut out);
        Ok((out, alpha))
    }
}
