//! Fixtures shared by the benchmarks.

use stochgal::driver::{project_initial_1d, scheme_1d};
use stochgal::{
    builtin_problem, Boundary, CellField1D, ChaosBasis, EulerEquations, FvScheme, GpcState, LegendreBasis, Mesh1D,
    RunConfig,
};

/// Galerkin scheme and projected initial field of the Sod problem.
pub fn sod_case(order: usize, cells: usize) -> (FvScheme<EulerEquations>, CellField1D) {
    let problem = builtin_problem("sod").expect("builtin");
    let cfg = RunConfig {
        order,
        cells,
        ..RunConfig::default()
    };
    let mesh = Mesh1D::new(cells, problem.x_range.0, problem.x_range.1).expect("mesh");
    let scheme = scheme_1d(&problem, &cfg, mesh).expect("scheme");
    let basis = LegendreBasis::new(order);
    let init = project_initial_1d(&problem, &basis, &mesh).expect("projection");
    let field = CellField1D::from_interior(3, basis.n_terms(), &init, Boundary::Outflow, Boundary::Outflow)
        .expect("field");
    (scheme, field)
}

/// An admissible state with nonzero higher modes.
pub fn sample_state(model: &EulerEquations, order: usize) -> GpcState {
    let mut st = GpcState::deterministic(&model.conserved(&[1.0, 0.3, 1.0], 0.0), order + 1);
    for k in 1..=order {
        let s = 0.1 / (k * k) as f64;
        st.mode_mut(k).copy_from_slice(&[s, 0.5 * s, s]);
    }
    st
}
