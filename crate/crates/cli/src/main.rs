//! `gmod`: command-line front end for groupoid moduli and algebroid checks.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use groupoid_moduli::algebroid::checks::{DEFAULT_H, DEFAULT_POINTS, DEFAULT_SEED, DEFAULT_TOL};
use groupoid_moduli::DEFAULT_LIMIT;
use serde::Serialize;
use serde_json::{json, Value};

use input::InputError;
use report::{Report, Status, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "gmod", version, about = "Moduli of flat groupoid connections on surfaces and Lie algebroid checks")]
struct Cli {
    /// Worker threads (defaults to GMOD_THREADS, then the number of CPUs).
    #[arg(long, global = true, env = "GMOD_THREADS")]
    threads: Option<usize>,
    /// Cap on enumeration work before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_LIMIT)]
    limit: u64,
    /// Where to write the JSON report.
    #[arg(long, global = true, default_value = "report.json")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(untagged)]
enum Command {
    /// Check the groupoid axioms of a composition table.
    Validate(GroupoidArgs),
    /// Orbits of the objects under the arrows.
    Leaves(GroupoidArgs),
    /// Isotropy groups and the conjugation isomorphisms inside each leaf.
    Isotropy(GroupoidArgs),
    /// The bisection group and its action on objects.
    Bisections(GroupoidArgs),
    /// Flat connections on a closed surface up to gauge, via holonomy.
    ModuliClosed(ClosedArgs),
    /// Flat connections on a surface with one boundary circle.
    ModuliOpen(OpenArgs),
    /// Flat connections on a strip between two boundary conditions.
    ModuliInterval(IntervalArgs),
    /// Enumerate flat lattice fields and their gauge orbits.
    LatticeEnumerate(LatticeArgs),
    /// Match lattice gauge orbits against holonomy classes.
    Compare(CompareArgs),
    /// Finite-difference check of the Lie algebroid equations.
    AlgebroidCheck(AlgebroidArgs),
    /// Jacobi identity of a Poisson bivector and its cotangent algebroid.
    PoissonCheck(NumericArgs),
    /// Jacobi identity of the linear Poisson structure on the dual bundle.
    DualPoisson(NumericArgs),
    /// Residual of the discretised morphism equations on a grid.
    MorphismResidual(MorphismArgs),
    /// Growth of the morphism residual under an infinitesimal gauge step.
    GaugeOrder(GaugeArgs),
}

#[derive(Args, Serialize)]
struct GroupoidArgs {
    #[arg(long)]
    groupoid: PathBuf,
}

#[derive(Args, Serialize)]
struct ClosedArgs {
    #[arg(long)]
    groupoid: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=16))]
    genus: u64,
}

#[derive(Args, Serialize)]
struct OpenArgs {
    #[arg(long)]
    groupoid: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=16))]
    genus: u64,
    /// Boundary subgroupoid: `base`, `full` or a file.
    #[arg(long)]
    sub: String,
}

#[derive(Args, Serialize)]
struct IntervalArgs {
    #[arg(long)]
    groupoid: PathBuf,
    #[arg(long)]
    sub0: String,
    #[arg(long)]
    sub1: String,
}

#[derive(Args, Serialize)]
struct LatticeArgs {
    #[arg(long)]
    groupoid: PathBuf,
    #[arg(long)]
    surface: PathBuf,
    /// Boundary subgroupoid for bordered surfaces (default `full`).
    #[arg(long)]
    sub: Option<String>,
    /// Fix spanning-tree edges to identities instead of listing orbits.
    #[arg(long)]
    gauge_fixed: bool,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    #[arg(long)]
    groupoid: PathBuf,
    #[arg(long)]
    surface: PathBuf,
    #[arg(long)]
    sub: Option<String>,
}

#[derive(Args, Serialize)]
struct NumericArgs {
    #[arg(long = "in")]
    #[serde(rename = "in")]
    input: PathBuf,
    /// Finite-difference step.
    #[arg(long, default_value_t = DEFAULT_H)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Random sample points in the unit ball.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct AlgebroidArgs {
    #[command(flatten)]
    #[serde(flatten)]
    numeric: NumericArgs,
    /// Adapted chart `{"transverse": [...], "sub_basis": [...]}` for a
    /// subalgebroid check.
    #[arg(long)]
    chart: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct MorphismArgs {
    #[arg(long)]
    algebroid: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Number of grid levels for a convergence study (analytic fields only).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..=8))]
    refine: Option<u64>,
    #[arg(long, default_value_t = 1.8)]
    order_min: f64,
    #[arg(long, default_value_t = 2.2)]
    order_max: f64,
}

#[derive(Args, Serialize)]
struct GaugeArgs {
    #[arg(long)]
    algebroid: PathBuf,
    #[arg(long)]
    field: PathBuf,
    /// JSON array with one gauge-parameter expression per bundle index.
    #[arg(long)]
    beta: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = groupoid_moduli::algebroid::morphism::examples::EPSILONS)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 1.8)]
    slope_min: f64,
    #[arg(long, default_value_t = 2.2)]
    slope_max: f64,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Leaves(_) => "leaves",
            Command::Isotropy(_) => "isotropy",
            Command::Bisections(_) => "bisections",
            Command::ModuliClosed(_) => "moduli-closed",
            Command::ModuliOpen(_) => "moduli-open",
            Command::ModuliInterval(_) => "moduli-interval",
            Command::LatticeEnumerate(_) => "lattice-enumerate",
            Command::Compare(_) => "compare",
            Command::AlgebroidCheck(_) => "algebroid-check",
            Command::PoissonCheck(_) => "poisson-check",
            Command::DualPoisson(_) => "dual-poisson",
            Command::MorphismResidual(_) => "morphism-residual",
            Command::GaugeOrder(_) => "gauge-order",
        }
    }

    /// Arguments plus the enumeration limit. Thread count and output path
    /// are left out so that reports do not depend on them.
    fn config(&self, limit: u64) -> Value {
        let mut config = serde_json::to_value(self).expect("arguments serialise");
        if let Value::Object(map) = &mut config {
            map.insert("limit".into(), json!(limit));
        }
        config
    }
}

fn check_numeric(h: f64, tol: f64) -> Result<(), InputError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(InputError::Argument(format!("--h must be a positive number, got {h}")));
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(InputError::Argument(format!("--tol must be a non-negative number, got {tol}")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<report::Outcome, InputError> {
    let limit = cli.limit;
    match &cli.command {
        Command::Validate(a) => commands::validate(&a.groupoid),
        Command::Leaves(a) => commands::leaves(&a.groupoid),
        Command::Isotropy(a) => commands::isotropy(&a.groupoid),
        Command::Bisections(a) => commands::bisections(&a.groupoid),
        Command::ModuliClosed(a) => commands::moduli_closed(&a.groupoid, a.genus as usize, limit),
        Command::ModuliOpen(a) => commands::moduli_open(&a.groupoid, a.genus as usize, &a.sub, limit),
        Command::ModuliInterval(a) => commands::moduli_interval(&a.groupoid, &a.sub0, &a.sub1),
        Command::LatticeEnumerate(a) => {
            commands::lattice_enumerate(&a.groupoid, &a.surface, a.sub.as_deref(), a.gauge_fixed, limit)
        }
        Command::Compare(a) => commands::compare(&a.groupoid, &a.surface, a.sub.as_deref(), limit),
        Command::AlgebroidCheck(a) => {
            let n = &a.numeric;
            check_numeric(n.h, n.tol)?;
            commands::algebroid_check(&n.input, n.h, n.tol, n.points, n.seed, a.chart.as_deref())
        }
        Command::PoissonCheck(n) => {
            check_numeric(n.h, n.tol)?;
            commands::poisson_check(&n.input, n.h, n.tol, n.points, n.seed)
        }
        Command::DualPoisson(n) => {
            check_numeric(n.h, n.tol)?;
            commands::dual_poisson(&n.input, n.h, n.tol, n.points, n.seed)
        }
        Command::MorphismResidual(a) => {
            check_numeric(1.0, a.tol)?;
            let levels = a.refine.map(|l| l as usize);
            commands::morphism_residual(&a.algebroid, &a.field, a.tol, levels, (a.order_min, a.order_max))
        }
        Command::GaugeOrder(a) => {
            if a.eps.len() < 2 || a.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                return Err(InputError::Argument("--eps needs at least two positive values".into()));
            }
            commands::gauge_order(&a.algebroid, &a.field, &a.beta, &a.eps, (a.slope_min, a.slope_max))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let status = if outcome.passed { Status::Pass } else { Status::Fail };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: cli.command.name(),
        config: cli.command.config(cli.limit),
        status,
        result: outcome.result,
    };
    if let Err(e) = report.write(&cli.out) {
        eprintln!("error: cannot write {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("{}: {} (report: {})", report.command, if outcome.passed { "PASS" } else { "FAIL" }, cli.out.display());
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
