use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use stochgal::driver::{reference_case, RunMeta};
use stochgal::output::{parse_table_csv, write_bundle, write_compare, write_study};
use stochgal::{compare, convergence_study, order_study, run_case, RunConfig, SliceSpec, SolverKind, SplitMode};

#[derive(Parser)]
#[command(name = "stochgal", version, about = "Stochastic Galerkin solvers for the Euler equations with uncertain inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write its outputs.
    Run(RunArgs),
    /// Convergence study over meshes, or over gPC orders with `--orders`.
    Converge(ConvergeArgs),
    /// Compare two output directories written by `run` or `reference`.
    Compare(CompareArgs),
    /// Run the reference solution: exact where available, else collocation.
    Reference(CommonArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// gPC order M.
    #[arg(long)]
    order: Option<usize>,
    /// Cells along x (and y for 2D problems unless `--cells-y` is given).
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    cells_y: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// Dimensional splitting mode for 2D problems.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    final_time: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    /// Also write a legacy VTK file for 2D fields.
    #[arg(long)]
    vtk: bool,
    /// Echo the effective configuration without time stepping.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated mesh sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 40, 80, 160])]
    meshes: Vec<usize>,
    /// Comma-separated gPC orders; switches to an order study on one mesh.
    #[arg(long, value_delimiter = ',')]
    orders: Vec<usize>,
    /// Time step Δx^p instead of the CFL bound.
    #[arg(long)]
    dt_power: Option<f64>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// `diagonal`, `row:J` or `column:I`.
    #[arg(long, default_value = "diagonal")]
    slice: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strang,
    Thirdorder,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Sg,
    Collocation,
    Exact,
}

fn load_config(args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg: RunConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(v) = &args.problem {
        cfg.problem = v.clone();
    }
    if let Some(v) = args.order {
        cfg.order = v;
    }
    if let Some(v) = args.cells {
        cfg.cells = v;
    }
    if let Some(v) = args.cells_y {
        cfg.cells_y = Some(v);
    }
    if let Some(v) = args.cfl {
        cfg.cfl = v;
    }
    if let Some(v) = args.mode {
        cfg.split_mode = match v {
            ModeArg::Strang => SplitMode::Strang,
            ModeArg::Thirdorder => SplitMode::ThirdOrder,
        };
    }
    if let Some(v) = args.final_time {
        cfg.final_time = Some(v);
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.display().to_string());
    }
    Ok(cfg)
}

fn out_dir(cfg: &RunConfig, fallback: &str) -> PathBuf {
    cfg.out.as_ref().map_or_else(|| PathBuf::from(fallback), PathBuf::from)
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    if let Some(s) = args.solver {
        cfg.solver = match s {
            SolverArg::Sg => SolverKind::Sg,
            SolverArg::Collocation => SolverKind::Collocation,
            SolverArg::Exact => SolverKind::Exact,
        };
    }
    cfg.vtk |= args.vtk;
    cfg.dry_run |= args.dry_run;
    if cfg.dry_run {
        cfg.validate()?;
        println!("{}", serde_json::to_string_pretty(&cfg)?);
        return Ok(());
    }
    let bundle = run_case(&cfg)?;
    let dir = out_dir(&cfg, "out");
    let files = write_bundle(&bundle, &dir, cfg.vtk)?;
    println!(
        "{}: {} steps to t = {}, {} limiter activations, {:.2}s; wrote {}",
        cfg.problem,
        bundle.meta.steps,
        bundle.table.time,
        bundle.meta.limiter.events.len(),
        bundle.timings.solve_seconds,
        files.field.display()
    );
    Ok(())
}

fn converge(args: ConvergeArgs) -> Result<()> {
    let mut cfg = load_config(&args.common)?;
    if let Some(p) = args.dt_power {
        cfg.dt_policy = stochgal::DtPolicy::Power { exponent: p };
    }
    let table = if args.orders.is_empty() {
        convergence_study(&cfg, &args.meshes)?
    } else {
        order_study(&cfg, &args.orders)?
    };
    print!("{}", table.render());
    if let Some(dir) = &cfg.out {
        write_study(&table, Path::new(dir))?;
    }
    Ok(())
}

fn reference(args: CommonArgs) -> Result<()> {
    let cfg = load_config(&args)?;
    let bundle = reference_case(&cfg)?;
    let dir = out_dir(&cfg, "reference");
    let files = write_bundle(&bundle, &dir, cfg.vtk)?;
    println!(
        "{}: {:?} reference written to {}",
        cfg.problem,
        bundle.meta.config.solver,
        files.field.display()
    );
    Ok(())
}

fn parse_slice(s: &str) -> Result<SliceSpec> {
    Ok(match s.split_once(':') {
        None if s == "diagonal" => SliceSpec::Diagonal,
        Some(("row", j)) => SliceSpec::Row { j: j.parse()? },
        Some(("column", i)) => SliceSpec::Column { i: i.parse()? },
        _ => bail!("slice must be `diagonal`, `row:J` or `column:I`, got `{s}`"),
    })
}

fn load_run(dir: &Path) -> Result<stochgal::FieldTable> {
    let meta: RunMeta = serde_json::from_str(
        &fs::read_to_string(dir.join("meta.json")).with_context(|| format!("reading {}/meta.json", dir.display()))?,
    )?;
    let csv = fs::read_to_string(dir.join("field.csv")).with_context(|| format!("reading {}/field.csv", dir.display()))?;
    Ok(parse_table_csv(
        &csv,
        meta.problem.x_range,
        meta.problem.y_range,
        meta.problem.final_time,
    )?)
}

fn compare_runs(args: CompareArgs) -> Result<()> {
    let (a, b) = (load_run(&args.a)?, load_run(&args.b)?);
    let report = compare(&a, &b, parse_slice(&args.slice)?)?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "var", "mean l1", "mean linf", "std l1", "std linf");
    for v in &report.variables {
        println!(
            "{:>8} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            v.variable, v.mean_l1, v.mean_linf, v.std_l1, v.std_linf
        );
    }
    if let Some(dir) = &args.out {
        write_compare(&report, &a.variables, dir)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Converge(a) => converge(a),
        Command::Compare(a) => compare_runs(a),
        Command::Reference(a) => reference(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
