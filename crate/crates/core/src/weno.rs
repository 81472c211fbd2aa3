//! Fifth-order WENO reconstruction kernel shared by the finite-volume scheme
//! and the finite-difference reference solver.
//!
//! Positions are in cell units: the reconstructed cell is `[-1/2, 1/2]` and
//! the five-cell stencil has centers `-2, …, 2`.

/// Regularization of the nonlinear weights.
pub const WENO_EPS: f64 = 1e-6;

/// Four-point Gauss–Lobatto rule on `[-1/2, 1/2]`; exact to degree 5.
#[derive(Debug, Clone, PartialEq)]
pub struct LobattoRule {
    pub nodes: [f64; 4],
    /// Normalized to sum to one.
    pub weights: [f64; 4],
    /// `deriv[m][k] = ℓ_k'(x_m)`, Lagrange basis derivatives per unit length.
    pub deriv: [[f64; 4]; 4],
}

impl Default for LobattoRule {
    fn default() -> Self {
        Self::new()
    }
}

impl LobattoRule {
    pub fn new() -> Self {
        let a = 5f64.sqrt() / 10.0;
        let nodes = [-0.5, -a, a, 0.5];
        let weights = [1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0];
        let mut deriv = [[0.0; 4]; 4];
        for (m, row) in deriv.iter_mut().enumerate() {
            for (k, d) in row.iter_mut().enumerate() {
                *d = lagrange_derivative(&nodes, k, nodes[m]);
            }
        }
        Self {
            nodes,
            weights,
            deriv,
        }
    }
}

fn lagrange_derivative(nodes: &[f64; 4], k: usize, x: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..4 {
        if i == k {
            continue;
        }
        let mut term = 1.0 / (nodes[k] - nodes[i]);
        for j in 0..4 {
            if j != k && j != i {
                term *= (x - nodes[j]) / (nodes[k] - nodes[j]);
            }
        }
        total += term;
    }
    total
}

/// Average of `x^p` over the unit cell centered at `offset`.
fn monomial_average(offset: f64, p: usize) -> f64 {
    let k = p as i32 + 1;
    ((offset + 0.5).powi(k) - (offset - 0.5).powi(k)) / k as f64
}

/// Coefficients `c` with `p(x) = Σ c_i ū_i` for the polynomial whose cell
/// averages over `offsets` are `ū`.
fn point_coefficients(offsets: &[f64], x: f64) -> Vec<f64> {
    let n = offsets.len();
    // rows: averaged monomials per cell; solve Vᵀ c = (x^0, …, x^{n-1})
    let mut a = vec![vec![0.0; n + 1]; n];
    for (p, row) in a.iter_mut().enumerate() {
        for (i, &o) in offsets.iter().enumerate() {
            row[i] = monomial_average(o, p);
        }
        row[n] = x.powi(p as i32);
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// Linear weights and candidate stencils for one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WenoPoint {
    pub position: f64,
    pub linear: [f64; 3],
    /// `candidates[k]` acts on stencil cells `k..k+3` of the five.
    pub candidates: [[f64; 3]; 3],
}

impl WenoPoint {
    /// Panics if the linear weights at `position` are not all positive.
    pub fn new(position: f64) -> Self {
        let full = point_coefficients(&[-2.0, -1.0, 0.0, 1.0, 2.0], position);
        let mut candidates = [[0.0; 3]; 3];
        for (k, cand) in candidates.iter_mut().enumerate() {
            let offsets: Vec<f64> = (0..3).map(|i| (k + i) as f64 - 2.0).collect();
            cand.copy_from_slice(&point_coefficients(&offsets, position));
        }
        let g0 = full[0] / candidates[0][0];
        let g2 = full[4] / candidates[2][2];
        let linear = [g0, 1.0 - g0 - g2, g2];
        assert!(
            linear.iter().all(|&g| g > 0.0),
            "WENO linear weights not positive at {position}"
        );
        Self {
            position,
            linear,
            candidates,
        }
    }

    /// Candidate values minus the center average; the coefficients of each
    /// candidate sum to one, so constants give exact zeros.
    #[inline]
    fn candidate_deviations(&self, s: &[f64; 5]) -> [f64; 3] {
        let d = [s[0] - s[2], s[1] - s[2], 0.0, s[3] - s[2], s[4] - s[2]];
        let mut v = [0.0; 3];
        for (k, out) in v.iter_mut().enumerate() {
            let c = &self.candidates[k];
            *out = c[0] * d[k] + c[1] * d[k + 1] + c[2] * d[k + 2];
        }
        v
    }

    /// Fifth-order linear reconstruction (no limiting).
    pub fn linear_value(&self, s: &[f64; 5]) -> f64 {
        let v = self.candidate_deviations(s);
        s[2] + (self.linear[0] * v[0] + self.linear[1] * v[1] + self.linear[2] * v[2])
    }

    /// Nonlinear value given precomputed smoothness indicators.
    #[inline]
    pub fn value(&self, s: &[f64; 5], beta: &[f64; 3]) -> f64 {
        let v = self.candidate_deviations(s);
        let mut a = [0.0; 3];
        for k in 0..3 {
            let d = WENO_EPS + beta[k];
            a[k] = self.linear[k] / (d * d);
        }
        let sum = a[0] + a[1] + a[2];
        s[2] + (a[0] * v[0] + a[1] * v[1] + a[2] * v[2]) / sum
    }
}

/// Jiang–Shu smoothness indicators of the three candidate stencils.
#[inline]
pub fn smoothness(s: &[f64; 5]) -> [f64; 3] {
    let [a, b, c, d, e] = *s;
    let sq = |x: f64| x * x;
    [
        13.0 / 12.0 * sq(a - 2.0 * b + c) + 0.25 * sq(a - 4.0 * b + 3.0 * c),
        13.0 / 12.0 * sq(b - 2.0 * c + d) + 0.25 * sq(b - d),
        13.0 / 12.0 * sq(c - 2.0 * d + e) + 0.25 * sq(3.0 * c - 4.0 * d + e),
    ]
}

/// WENO5 point values at the four Gauss–Lobatto nodes of a cell.
#[derive(Debug, Clone)]
pub struct LobattoWeno {
    pub rule: LobattoRule,
    points: [WenoPoint; 4],
}

impl Default for LobattoWeno {
    fn default() -> Self {
        Self::new()
    }
}

impl LobattoWeno {
    pub fn new() -> Self {
        let rule = LobattoRule::new();
        let points = rule.nodes.map(WenoPoint::new);
        Self { rule, points }
    }

    /// Nonlinear reconstruction of one scalar from five cell averages.
    #[inline]
    pub fn reconstruct(&self, s: &[f64; 5]) -> [f64; 4] {
        let beta = smoothness(s);
        [
            self.points[0].value(s, &beta),
            self.points[1].value(s, &beta),
            self.points[2].value(s, &beta),
            self.points[3].value(s, &beta),
        ]
    }

    pub fn reconstruct_linear(&self, s: &[f64; 5]) -> [f64; 4] {
        self.points.map(|p| p.linear_value(s))
    }
}
