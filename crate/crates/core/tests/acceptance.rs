//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test -p stochgal-core --test acceptance -- 3 4`.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stochgal::basis::{gauss_rule, project};
use stochgal::driver::{
    exact_table, project_initial_1d, project_initial_2d, scheme_1d, solver_2d, variable_names, SolverKind,
};
use stochgal::reference::{collocation_solve, l1_distance, CollocationPlan};
use stochgal::weno::{LobattoRule, LobattoWeno};
use stochgal::{
    advance_by, builtin_problem, compare, convergence_study, order_study, run_case, split_coefficients, AdiabaticIndex,
    Axis, Boundary, CellField1D, ChaosBasis, DtPolicy, EulerEquations, GpcState, LegendreBasis, Mesh1D, Mesh2D,
    Parity, RunConfig, SgSystem, SliceSpec, SpaceDim, SplitMode, SplitSchedule, StepController,
};

// Criterion 1
const SMOOTH_CELLS: [usize; 5] = [10, 20, 40, 80, 160];
const SMOOTH_MEAN: [f64; 5] = [3.1144e-3, 1.4266e-4, 4.3836e-6, 1.3642e-7, 4.2527e-9];
const SMOOTH_FACTOR: f64 = 3.0;
const SMOOTH_MIN_RATE: f64 = 4.5;
// Criterion 2
const ORDERS_CELLS: usize = 320;
const ORDER_SWEEP: [usize; 8] = [1, 2, 3, 4, 5, 6, 7, 8];
const ORDERS_SMALL_M: [usize; 2] = [1, 2];
const ORDERS_MIN_DROP: f64 = 2.0;
const ORDERS_PLATEAU_SPREAD: f64 = 0.5;
// Criteria 3 and 4
const N_RANDOM: usize = 100;
const SYMMETRY_TOL: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-8;
const ALPHA_TOL: f64 = 1e-10;
const LEMMA_GAP: f64 = 1e-3;
// Criterion 5
const SOD_ORDER: usize = 8;
const SOD_CELLS: usize = 200;
const SOD_ERROR_FACTOR: f64 = 3.0;
const SOD_PEAKS: usize = 3;
// std regions are runs of cells above this fraction of the maximum std,
// merged across gaps of at most SOD_PEAK_GAP cells
const SOD_PEAK_LEVEL: f64 = 0.25;
const SOD_PEAK_GAP: usize = 2;
const SOD_LIMITER_FRACTION: f64 = 0.02;
// Criterion 6
const RP_ORDER: usize = 3;
const RP_CELLS: usize = 100;
const RP_FINE_CELLS: usize = 150;
const RP_FACTOR: f64 = 3.0;
// Criterion 7
const WENO_EXACT_TOL: f64 = 1e-11;
const WENO_MIN_RATE: f64 = 4.8;
const RK_MIN_RATE: f64 = 2.8;
// Criterion 8
const TAU_SUM_TOL: f64 = 1e-14;
const EQUIV_TOL: f64 = 1e-12;
const SPLIT_MIN_RATE: f64 = 2.7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rates(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn smooth_convergence() -> Outcome {
    let cfg = RunConfig {
        problem: "smooth".into(),
        order: 4,
        dt_policy: DtPolicy::Power { exponent: 5.0 / 3.0 },
        ..RunConfig::default()
    };
    let t = convergence_study(&cfg, &SMOOTH_CELLS).expect("convergence study");
    println!("{}", t.render());
    let mut pass = true;
    let mut worst: f64 = 1.0;
    for (row, &expected) in t.rows.iter().zip(&SMOOTH_MEAN) {
        let ratio = (row.mean_error / expected).max(expected / row.mean_error);
        worst = worst.max(ratio);
        pass &= ratio <= SMOOTH_FACTOR;
    }
    let last = t.rows.last().unwrap();
    let (rm, rs) = (last.mean_rate.unwrap(), last.std_rate.unwrap());
    pass &= rm >= SMOOTH_MIN_RATE && rs >= SMOOTH_MIN_RATE;
    outcome(
        pass,
        format!(
            "worst ratio to expected errors {worst:.2} (<= {SMOOTH_FACTOR}), last rates mean {rm:.2} std {rs:.2} (>= {SMOOTH_MIN_RATE})"
        ),
    )
}

fn order_convergence() -> Outcome {
    let cfg = RunConfig {
        problem: "smooth".into(),
        cells: ORDERS_CELLS,
        ..RunConfig::default()
    };
    let t = order_study(&cfg, &ORDER_SWEEP).expect("order study");
    println!("{}", t.render());
    let mean: Vec<f64> = t.rows.iter().map(|r| r.mean_error).collect();
    let std: Vec<f64> = t.rows.iter().map(|r| r.std_error).collect();
    let mut pass = true;
    let mut drops = Vec::new();
    for &m in &ORDERS_SMALL_M {
        let k = ORDER_SWEEP.iter().position(|&o| o == m).unwrap();
        let (dm, ds) = (mean[k] / mean[k + 1], std[k] / std[k + 1]);
        drops.push(format!("M={m}->{}: {dm:.1}x/{ds:.1}x", m + 1));
        pass &= dm >= ORDERS_MIN_DROP && ds >= ORDERS_MIN_DROP;
    }
    // plateau: the last three orders agree to within the spread
    let tail = |e: &[f64]| {
        let t = &e[e.len() - 3..];
        let (lo, hi) = t.iter().fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        (hi - lo) / hi
    };
    let (pm, ps) = (tail(&mean), tail(&std));
    pass &= pm <= ORDERS_PLATEAU_SPREAD && ps <= ORDERS_PLATEAU_SPREAD;
    outcome(
        pass,
        format!(
            "drops {} (>= {ORDERS_MIN_DROP}x), plateau spread mean {pm:.2e} std {ps:.2e} (<= {ORDERS_PLATEAU_SPREAD})",
            drops.join(", ")
        ),
    )
}

fn random_gamma_system(order: usize) -> SgSystem<EulerEquations> {
    SgSystem::new(
        EulerEquations::new(SpaceDim::One, AdiabaticIndex::linear(1.4, 0.1)),
        order,
        None,
    )
    .expect("system")
}

/// Random admissible state: primitive variables are random Legendre series
/// in `ξ`, converted to conserved form and projected.
fn random_state(rng: &mut ChaCha8Rng, sys: &SgSystem<EulerEquations>) -> GpcState {
    let basis = *sys.basis();
    let rule = gauss_rule(64).unwrap();
    let model = *sys.model();
    loop {
        let nm = basis.n_terms();
        let mut series = |lo: f64, hi: f64, spread: f64| -> Vec<f64> {
            let mut c = vec![rng.gen_range(lo..hi)];
            for k in 1..nm {
                c.push(rng.gen_range(-spread..spread) / (k * k) as f64);
            }
            c
        };
        let rho = series(0.3, 2.0, 0.3);
        let u = series(-1.5, 1.5, 0.5);
        let p = series(0.3, 2.0, 0.3);
        let eval = |c: &[f64], xi: f64| {
            let mut phi = vec![0.0; nm];
            basis.eval_all_unchecked(xi, &mut phi);
            c.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>()
        };
        let st = project(&basis, &rule, 3, |xi| {
            let prim = [eval(&rho, xi).max(0.05), eval(&u, xi), eval(&p, xi).max(0.05)];
            model.conserved(&prim, xi)
        });
        if sys.check_admissible(&st).is_inside() {
            return st;
        }
    }
}

fn to_na(m: &stochgal::linalg::DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

fn spectral_radius(m: &DMatrix<f64>) -> (f64, f64) {
    let ev = m.complex_eigenvalues();
    let rho = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let imag = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (rho, imag)
}

fn hyperbolicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut worst_sym, mut worst_imag, mut min_eig) = (0.0f64, 0.0f64, f64::MAX);
    let mut pass = true;
    for k in 0..N_RANDOM {
        let order = 1 + k % 5;
        let sys = random_gamma_system(order);
        let st = random_state(&mut rng, &sys);
        let g = sys.assemble(&st, Axis::X).expect("assemble");
        let (a0, a1) = (to_na(&g.a0_hat), to_na(&g.a1_hat));
        let sym0 = (&a0 - a0.transpose()).abs().max() / a0.abs().max();
        let sym1 = (&a1 - a1.transpose()).abs().max() / a1.abs().max();
        worst_sym = worst_sym.max(sym0).max(sym1);
        let lam_min = a0.clone().symmetric_eigen().eigenvalues.min();
        min_eig = min_eig.min(lam_min / a0.abs().max());
        let b = to_na(&sys.b_matrix(&st, Axis::X).expect("B"));
        let (rho, imag) = spectral_radius(&b);
        worst_imag = worst_imag.max(imag / rho);
        pass &= sym0 <= SYMMETRY_TOL && sym1 <= SYMMETRY_TOL && lam_min > 0.0 && imag <= IMAG_TOL * rho;
    }
    outcome(
        pass,
        format!(
            "{N_RANDOM} states, M in 1..=5: max relative asymmetry {worst_sym:.1e} (<= {SYMMETRY_TOL:e}), min scaled eig(A0) {min_eig:.2e} (> 0), max |Im λ(B)|/ρ {worst_imag:.1e} (<= {IMAG_TOL:e})"
        ),
    )
}

fn wave_speed_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut pass = true;
    let (mut min_margin, mut lemma_ok) = (f64::MAX, 0usize);
    for k in 0..N_RANDOM {
        let order = 1 + k % 5;
        let sys = random_gamma_system(order);
        let (l, r) = (random_state(&mut rng, &sys), random_state(&mut rng, &sys));
        let alpha = sys.alpha_bound(&l, &r, Axis::X).expect("alpha");
        let g = sys.path_averaged(&l, &r, Axis::X).expect("path");
        let bpsi = to_na(&sys.path_matrix(&l, &r, Axis::X).expect("B_Psi"));
        let (rho, _) = spectral_radius(&bpsi);
        min_margin = min_margin.min((alpha - rho) / rho);
        pass &= alpha >= rho - ALPHA_TOL * rho;
        // λÂ₀ ± Â₁ is PSD exactly when λ >= ρ(Â₀⁻¹Â₁)
        let (a0, a1) = (to_na(&g.a0_hat), to_na(&g.a1_hat));
        let min_eig = |lam: f64| {
            let p = (&a0 * lam + &a1).symmetric_eigen().eigenvalues.min();
            let m = (&a0 * lam - &a1).symmetric_eigen().eigenvalues.min();
            p.min(m)
        };
        let above = min_eig(rho + LEMMA_GAP) >= 0.0;
        let below = min_eig(rho - LEMMA_GAP) < 0.0;
        if above && below {
            lemma_ok += 1;
        }
        pass &= above && below;
    }
    outcome(
        pass,
        format!(
            "{N_RANDOM} pairs: min (α − ρ(B_Ψ))/ρ = {min_margin:.2e} (>= -{ALPHA_TOL:e}); two-sided PSD check at ρ ± {LEMMA_GAP:e} held for {lemma_ok}/{N_RANDOM}"
        ),
    )
}

/// Separated regions where `v` exceeds `frac` of its maximum, merging
/// regions closer than `gap` cells.
fn peak_regions(v: &[f64], frac: f64, gap: usize) -> Vec<(usize, usize)> {
    let thr = frac * v.iter().cloned().fold(0.0, f64::max);
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        if x <= thr {
            continue;
        }
        match out.last_mut() {
            Some(last) if i <= last.1 + gap => last.1 = i,
            _ => out.push((i, i)),
        }
    }
    out
}

fn sod() -> Outcome {
    let cfg = RunConfig {
        problem: "sod".into(),
        order: SOD_ORDER,
        cells: SOD_CELLS,
        ..RunConfig::default()
    };
    let problem = cfg.validate().expect("config");
    let sg = run_case(&cfg).expect("sg run");
    let exact = exact_table(&problem, SOD_CELLS).expect("exact");
    let colloc = run_case(&RunConfig {
        solver: SolverKind::Collocation,
        ..cfg.clone()
    })
    .expect("collocation run");
    let err = |t: &stochgal::FieldTable| compare(t, &exact, SliceSpec::Diagonal).unwrap().variables[0].mean_l1;
    let (e_sg, e_col) = (err(&sg.table), err(&colloc.table));
    let threshold = SOD_ERROR_FACTOR * e_col;
    let peaks = peak_regions(&sg.table.std_of(0), SOD_PEAK_LEVEL, SOD_PEAK_GAP);
    let exact_peaks = peak_regions(&exact.std_of(0), SOD_PEAK_LEVEL, SOD_PEAK_GAP);
    let lim = &sg.meta.limiter;
    let cutoff = (SOD_LIMITER_FRACTION * sg.meta.steps as f64).floor() as usize;
    let confined = lim.last_average_step.is_none_or(|s| s <= cutoff);
    let pass = e_sg <= threshold && peaks.len() == SOD_PEAKS && confined;
    outcome(
        pass,
        format!(
            "mean ρ l1 {e_sg:.3e} vs threshold {threshold:.3e} (= {SOD_ERROR_FACTOR} × collocation error {e_col:.3e}); std peak regions {} (exact {}) at cells {peaks:?}; \
             cell-average limiter: {} activations, last step {:?} of {} (cutoff {cutoff}); node limiter: {} activations",
            peaks.len(),
            exact_peaks.len(),
            lim.average_activations,
            lim.last_average_step,
            sg.meta.steps,
            lim.node_activations,
        ),
    )
}

fn riemann_2d() -> Outcome {
    let mut pass = true;
    let mut lines = Vec::new();
    for name in ["rp1_velocity", "rp1_gamma"] {
        let start = Instant::now();
        let cfg = RunConfig {
            problem: name.into(),
            order: RP_ORDER,
            cells: RP_CELLS,
            split_mode: SplitMode::Strang,
            ..RunConfig::default()
        };
        let problem = cfg.validate().expect("config");
        let plan = CollocationPlan::default();
        let coarse = collocation_solve(&problem, &plan, (RP_CELLS, RP_CELLS), cfg.cfl).expect("collocation");
        let fine = collocation_solve(&problem, &plan, (RP_FINE_CELLS, RP_FINE_CELLS), cfg.cfl).expect("collocation");
        let table = |r: &stochgal::reference::CollocationResult| stochgal::FieldTable {
            time: problem.final_time,
            nx: r.nx,
            ny: r.ny,
            x_range: problem.x_range,
            y_range: problem.y_range,
            dim: SpaceDim::Two,
            variables: variable_names(SpaceDim::Two),
            mean: r.mean.clone(),
            std: r.std.clone(),
        };
        let (tc, tf) = (table(&coarse), table(&fine));
        let self_diff = compare(&tc, &tf, SliceSpec::Diagonal).unwrap().variables[0].mean_l1;
        let sg = run_case(&cfg).expect("sg run");
        let diff = compare(&sg.table, &tc, SliceSpec::Diagonal).unwrap().variables[0].mean_l1;
        let threshold = RP_FACTOR * self_diff;
        let ok = diff <= threshold && sg.table.mean.iter().all(|v| v.is_finite());
        pass &= ok;
        lines.push(format!(
            "{name}: SG vs collocation {diff:.3e} (<= {threshold:.3e} = {RP_FACTOR} × self-difference {self_diff:.3e}) [{:.0}s]",
            start.elapsed().as_secs_f64()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn averages(f: impl Fn(f64) -> f64, center: f64, h: f64) -> [f64; 5] {
    let g = gauss_rule(8).unwrap();
    std::array::from_fn(|k| {
        let c = center + (k as f64 - 2.0) * h;
        g.integrate(|t| f(c + 0.5 * h * t))
    })
}

fn kernels() -> Outcome {
    let weno = LobattoWeno::new();
    let rule = LobattoRule::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    // polynomial exactness: linear weights up to degree 4, nonlinear
    // weights up to degree 2 (every candidate stencil is exact there)
    let mut exact_err: f64 = 0.0;
    for degree in 0..=4 {
        for _ in 0..20 {
            let c: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = |x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
            let s = averages(p, 0.0, 1.0);
            let lin = weno.reconstruct_linear(&s);
            for (m, &x) in rule.nodes.iter().enumerate() {
                exact_err = exact_err.max((lin[m] - p(x)).abs());
            }
            if degree <= 2 {
                let non = weno.reconstruct(&s);
                for (m, &x) in rule.nodes.iter().enumerate() {
                    exact_err = exact_err.max((non[m] - p(x)).abs());
                }
            }
        }
    }
    // convergence of the nonlinear reconstruction on sin(2πx)
    let f = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let errs: Vec<f64> = [40usize, 80, 160, 320]
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            (0..n)
                .map(|j| {
                    let xc = (j as f64 + 0.5) * h;
                    let r = weno.reconstruct(&averages(f, xc, h));
                    (0..4).map(|m| (r[m] - f(xc + rule.nodes[m] * h)).abs()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let weno_rate = *rates(&errs).last().unwrap();
    // RK3 self-convergence at fixed mesh
    let dts = [4e-3, 2e-3, 1e-3, 5e-4];
    let sols: Vec<Vec<f64>> = dts
        .iter()
        .map(|&dt| {
            let cfg = RunConfig {
                problem: "smooth".into(),
                order: 2,
                cells: 40,
                dt_policy: DtPolicy::Fixed { dt },
                final_time: Some(0.2),
                ..RunConfig::default()
            };
            run_case(&cfg).expect("run").coefficients.unwrap()
        })
        .collect();
    let diffs: Vec<f64> = sols.windows(2).map(|w| l1_distance(&w[0], &w[1], 1.0 / 40.0).unwrap()).collect();
    let rk_rate = *rates(&diffs).last().unwrap();
    // constant field
    let problem = builtin_problem("smooth").unwrap();
    let scheme = scheme_1d(&problem, &RunConfig::default(), Mesh1D::new(16, 0.0, 1.0).unwrap()).unwrap();
    let model = problem.model();
    let mut st = GpcState::deterministic(&model.conserved(&[1.3, 0.4, 0.9], 0.0), 5);
    st.mode_mut(1).copy_from_slice(&[0.05, 0.02, 0.04]);
    st.mode_mut(3).copy_from_slice(&[-0.01, 0.01, 0.02]);
    let data: Vec<f64> = (0..16).flat_map(|_| st.as_slice().to_vec()).collect();
    let mut field = CellField1D::from_interior(3, 5, &data, Boundary::Periodic, Boundary::Periodic).unwrap();
    let res = scheme.evaluate(&mut field, 0.0).expect("residual");
    let constant_zero = res.rate.iter().all(|&r| r == 0.0);
    let pass = exact_err <= WENO_EXACT_TOL && weno_rate >= WENO_MIN_RATE && rk_rate >= RK_MIN_RATE && constant_zero;
    outcome(
        pass,
        format!(
            "polynomial exactness {exact_err:.1e} (<= {WENO_EXACT_TOL:e}), WENO rate {weno_rate:.2} (>= {WENO_MIN_RATE}), RK3 self-convergence {rk_rate:.2} (>= {RK_MIN_RATE}), constant residual exactly zero: {constant_zero}"
        ),
    )
}

fn splitting() -> Outcome {
    // coefficient sums
    let mut tau_err: f64 = 0.0;
    for &dt in &[1e-3, 0.0123, 0.5, 2.0] {
        for mode in [SplitMode::Strang, SplitMode::ThirdOrder] {
            for parity in [Parity::XOuter, Parity::YOuter] {
                let sched = SplitSchedule::new(dt, mode, parity);
                for axis in [Axis::X, Axis::Y] {
                    let sum: f64 = sched.sweeps().iter().filter(|s| s.0 == axis).map(|s| s.1).sum();
                    tau_err = tau_err.max((sum - dt).abs() / dt);
                }
            }
        }
        let tau = split_coefficients(dt);
        tau_err = tau_err.max((tau.iter().sum::<f64>() - dt).abs() / dt);
    }
    // y-invariant 2D Sod against the 1D solver after one Strang step
    let cfg = RunConfig {
        order: 3,
        cells: 60,
        cells_y: Some(4),
        ..RunConfig::default()
    };
    let p2 = builtin_problem("sod2d").unwrap();
    let p1 = builtin_problem("sod").unwrap();
    let basis = LegendreBasis::new(cfg.order);
    let mesh2 = Mesh2D::new(60, 4, p2.x_range, p2.y_range).unwrap();
    let solver = solver_2d(&p2, &cfg, mesh2).unwrap();
    let mut f2 = project_initial_2d(&p2, &basis, &mesh2).unwrap();
    let dt = solver.compute_dt(&f2, &StepController::new(1.0), 0.0).unwrap();
    solver.step(&mut f2, 0.0, dt, Parity::XOuter).unwrap();
    let mesh1 = Mesh1D::new(60, 0.0, 1.0).unwrap();
    let s1 = scheme_1d(&p1, &cfg, mesh1).unwrap();
    let init = project_initial_1d(&p1, &basis, &mesh1).unwrap();
    let mut f1 = CellField1D::from_interior(3, 4, &init, Boundary::Outflow, Boundary::Outflow).unwrap();
    advance_by(&s1, &mut f1, 0.0, 0.5 * dt, cfg.cfl).unwrap();
    advance_by(&s1, &mut f1, 0.5 * dt, 0.5 * dt, cfg.cfl).unwrap();
    let mut equiv: f64 = 0.0;
    let mut v_max: f64 = 0.0;
    for j in 0..4 {
        for i in 0..60 {
            let c2 = f2.cell(i, j);
            let c1 = f1.cell(i);
            for mode in 0..4 {
                for (k2, k1) in [(0, 0), (1, 1), (3, 2)] {
                    equiv = equiv.max((c2[mode * 4 + k2] - c1[mode * 3 + k1]).abs());
                }
                v_max = v_max.max(c2[mode * 4 + 2].abs());
            }
        }
    }
    // temporal self-convergence of the third-order schedule
    let dts = [0.01, 0.005, 0.0025, 0.00125];
    let sols: Vec<Vec<f64>> = dts
        .iter()
        .map(|&dt| {
            let cfg = RunConfig {
                problem: "smooth2d".into(),
                order: 1,
                cells: 16,
                split_mode: SplitMode::ThirdOrder,
                dt_policy: DtPolicy::Fixed { dt },
                ..RunConfig::default()
            };
            run_case(&cfg).expect("run").coefficients.unwrap()
        })
        .collect();
    let diffs: Vec<f64> = sols
        .windows(2)
        .map(|w| l1_distance(&w[0], &w[1], 1.0 / 256.0).unwrap())
        .collect();
    let r = rates(&diffs);
    let split_rate = *r.last().unwrap();
    let pass = tau_err <= TAU_SUM_TOL && equiv <= EQUIV_TOL && v_max == 0.0 && split_rate >= SPLIT_MIN_RATE;
    outcome(
        pass,
        format!(
            "Σ τ = Δt to {tau_err:.1e} (<= {TAU_SUM_TOL:e}); y-invariant 2D vs 1D {equiv:.1e} (<= {EQUIV_TOL:e}), max |ρv| {v_max:e}; third-order self-convergence rates {r:.2?} (last >= {SPLIT_MIN_RATE})"
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 8] = [
    (1, "smooth problem convergence table", smooth_convergence),
    (2, "spectral convergence in the gPC order", order_convergence),
    (3, "symmetric hyperbolicity of the Galerkin system", hyperbolicity),
    (4, "wave-speed bound for the path matrix", wave_speed_bound),
    (5, "Sod shock tube with a random interface", sod),
    (6, "2D Riemann problems against collocation", riemann_2d),
    (7, "WENO and Runge-Kutta kernels", kernels),
    (8, "dimensional splitting", splitting),
];

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    let mut summary = Vec::new();
    for (id, name, run) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let line = format!(
            "{} criterion {id} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        println!("{line}");
        failed += usize::from(!o.pass);
        summary.push(line);
    }
    println!("\nacceptance summary");
    for line in &summary {
        println!("{line}");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
