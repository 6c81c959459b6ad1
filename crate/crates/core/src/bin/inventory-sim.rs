//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or validation errors.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use inventory_sim::config::{self, PolicyKind, Product};
use inventory_sim::demand::{read_history, synthesize_history, write_history, ProductHistory};
use inventory_sim::diagnostics::assess_convergence;
use inventory_sim::domain::Policy;
use inventory_sim::engine::{simulate_year, simulate_year_conditional};
use inventory_sim::montecarlo::{evaluate_policy, ReplicationPlan, ReplicationSummary};
use inventory_sim::optimize::{
    bayesian_optimize, grid_search, quadratic_objective, BayesOptions, OptimizationResult, Point,
    SearchSpace, DEFAULT_GRID_STEP,
};
use inventory_sim::report::{
    self, ConvergenceSummary, OptimizeReport, ProductOptimum, ProductSummary, SimulateReport,
    StatsReport,
};
use inventory_sim::{demand, Error};

#[derive(Parser)]
#[command(name = "inventory-sim", version, about = "Simulate and optimize (p,Q) and (r,Q) inventory policies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate demand statistics from a history CSV.
    Estimate {
        history: PathBuf,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Synthesize a history CSV whose statistics match the config's products.
    Fixture {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 365)]
        days: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate one policy per product over Monte Carlo replications.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Continuous)]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value_t = Sampling::Random)]
        sampling: Sampling,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the first replication's daily trace per product here.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Search (r, Q) for maximal expected profit.
    Optimize {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Grid)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        step: u64,
        #[arg(long, default_value_t = 30)]
        budget: usize,
        #[arg(long = "init", default_value_t = 10)]
        init_count: usize,
        /// `RMIN:RMAX,QMIN:QMAX`, applied to every selected product.
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<Bounds>,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Profit)]
        objective: ObjectiveArg,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write `<id>_history.csv` per product here.
        #[arg(long)]
        history_dir: Option<PathBuf>,
    },
    /// Evaluate expected profit on the full (r, Q) lattice.
    Surface {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        step: u64,
        #[arg(long, value_parser = parse_bounds)]
        bounds: Option<Bounds>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit convergence series for the replication profits.
    Diagnose {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Continuous)]
        policy: PolicyArg,
        #[arg(long)]
        output_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, env = "INVENTORY_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Restrict to one product id.
    #[arg(long)]
    product: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Periodic,
    PeriodicUpTo,
    Continuous,
    ContinuousRestore,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Periodic => PolicyKind::Periodic,
            PolicyArg::PeriodicUpTo => PolicyKind::PeriodicUpTo,
            PolicyArg::Continuous => PolicyKind::Continuous,
            PolicyArg::ContinuousRestore => PolicyKind::ContinuousRestore,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sampling {
    Random,
    Conditional,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Grid,
    Bayes,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Profit,
    /// Deterministic concave test surface peaking at 30%/70% of the bounds.
    Quadratic,
}

#[derive(Clone, Copy)]
struct Bounds {
    r: (u64, u64),
    q: (u64, u64),
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let range = |part: &str| -> Result<(u64, u64), String> {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| format!("expected MIN:MAX, got `{part}`"))?;
        let parse = |v: &str| v.trim().parse::<u64>().map_err(|e| format!("`{v}`: {e}"));
        Ok((parse(lo)?, parse(hi)?))
    };
    let (r, q) = s
        .split_once(',')
        .ok_or_else(|| "expected RMIN:RMAX,QMIN:QMAX".to_string())?;
    Ok(Bounds { r: range(r)?, q: range(q)? })
}

struct Run {
    seed: u64,
    plan: ReplicationPlan,
    products: Vec<Product>,
}

impl RunArgs {
    fn load(&self) -> Result<Run, Error> {
        let config = config::load(&self.config)?;
        let seed = self.seed.or(config.seed).unwrap_or(0);
        let replications = self.replications.unwrap_or(config.replications);
        let workers = self.workers.or(config.workers);
        let products: Vec<Product> = match &self.product {
            None => config.products.clone(),
            Some(id) => {
                let p = config
                    .products
                    .iter()
                    .find(|p| &p.spec.id == id)
                    .ok_or_else(|| Error::Config(format!("no product `{id}` in config")))?;
                vec![p.clone()]
            }
        };
        if let Some(n) = workers {
            // Later calls fail only if the pool already exists, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        let plan = ReplicationPlan::new(replications, seed).with_workers(workers);
        Ok(Run { seed, plan, products })
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        Some(p) => Ok(Box::new(File::create(p).map_err(|e| Error::Io { path: p.into(), source: e })?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Error::Io { path: path.unwrap_or(Path::new("<stdout>")).into(), source: e })
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })
}

fn create_file(path: PathBuf) -> Result<File, Error> {
    File::create(&path).map_err(|e| Error::Io { path, source: e })
}

fn cmd_estimate(history: &Path, output: Option<&Path>) -> Result<(), Error> {
    let products = read_history(history)?;
    let mut reports = Vec::with_capacity(products.len());
    for p in &products {
        let stats = demand::estimate_stats(&p.demands)?;
        eprintln!(
            "{:<8} p={:.2} mean={:.2} std={:.2} annual={:.0}",
            p.id,
            stats.demand_probability,
            stats.mean_daily,
            stats.std_daily,
            stats.expected_annual()
        );
        reports.push(StatsReport::new(&p.id, &stats));
    }
    emit(output, &report::to_json(&reports)?)
}

fn cmd_fixture(run: &RunArgs, days: usize, output: Option<&Path>) -> Result<(), Error> {
    let run = run.load()?;
    let mut histories = Vec::with_capacity(run.products.len());
    for (i, p) in run.products.iter().enumerate() {
        let seed = inventory_sim::replication_seed(run.seed, i as u64);
        histories.push(ProductHistory {
            id: p.spec.id.clone(),
            demands: synthesize_history(&p.stats, days, seed)?,
        });
    }
    let mut out = open_output(output)?;
    write_history(&mut out, &histories)
}

fn cmd_simulate(
    run: &RunArgs,
    kind: PolicyKind,
    sampling: Sampling,
    output: Option<&Path>,
    trace_dir: Option<&Path>,
) -> Result<(), Error> {
    let run = run.load()?;
    let conditional = sampling == Sampling::Conditional;
    let started = Instant::now();
    let mut products = Vec::with_capacity(run.products.len());
    for p in &run.products {
        let model = p.demand_model(conditional)?;
        let params = p.params()?;
        let policy = p.policy(kind);
        let summary = evaluate_policy(&p.spec, &policy, &model, &params, &run.plan)?;
        eprintln!(
            "{:<8} mean profit {:>14.2}  std {:>12.2}  lost {:>6.2}%",
            p.spec.id,
            summary.mean_profit,
            summary.std_profit,
            100.0 * summary.mean_lost_fraction
        );
        if let Some(dir) = trace_dir {
            create_dir(dir)?;
            let seed = run.plan.seed_for(&policy, 0);
            let result = if conditional {
                simulate_year_conditional(&p.spec, &policy, &model, seed, &params)?
            } else {
                simulate_year(&p.spec, &policy, &model.generate_year(seed), &params)?
            };
            report::write_trace_csv(create_file(dir.join(format!("{}_trace.csv", p.spec.id)))?, &result)?;
        }
        products.push(ProductSummary { id: p.spec.id.clone(), policy, summary });
    }
    let total = products.iter().map(|p| p.summary.mean_profit).sum();
    eprintln!("total expected profit {total:.2}");
    eprintln!("wall time {:.3} s ({} sampling)", started.elapsed().as_secs_f64(), sampling_name(sampling));
    let report = SimulateReport {
        policy: kind.name().to_string(),
        sampling: sampling_name(sampling).to_string(),
        seed: run.seed,
        replications: run.plan.n_replications,
        products,
        total_expected_profit: total,
    };
    emit(output, &report::to_json(&report)?)
}

fn sampling_name(s: Sampling) -> &'static str {
    match s {
        Sampling::Random => "random",
        Sampling::Conditional => "conditional",
    }
}

fn search_space(p: &Product, bounds: Option<Bounds>, step: u64) -> Result<SearchSpace, Error> {
    match bounds {
        Some(b) => SearchSpace::new(b.r, b.q, step),
        None => p.search_space(step),
    }
}

/// Expected profit of `ContinuousFixedQ(r, Q)` under the run's CRN plan.
fn profit_objective<'a>(
    p: &'a Product,
    plan: &'a ReplicationPlan,
) -> Result<impl Fn(Point) -> Result<ReplicationSummary, Error> + Sync + 'a, Error> {
    let model = p.demand_model(false)?;
    let params = p.params()?;
    Ok(move |pt: Point| {
        let policy = Policy::ContinuousFixedQ { reorder_point: pt.r, order_quantity: pt.q };
        evaluate_policy(&p.spec, &policy, &model, &params, plan)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    run: &RunArgs,
    method: MethodArg,
    step: u64,
    budget: usize,
    init_count: usize,
    bounds: Option<Bounds>,
    objective: ObjectiveArg,
    output: Option<&Path>,
    history_dir: Option<&Path>,
) -> Result<(), Error> {
    let run = run.load()?;
    let mut products = Vec::with_capacity(run.products.len());
    for p in &run.products {
        let space = search_space(p, bounds, step)?;
        let optimize = |f: &(dyn Fn(Point) -> Result<ReplicationSummary, Error> + Sync)| -> Result<OptimizationResult, Error> {
            match method {
                MethodArg::Grid => grid_search(&space, f),
                MethodArg::Bayes => bayesian_optimize(
                    &space,
                    f,
                    &BayesOptions::new(budget, init_count, run.seed),
                ),
            }
        };
        let result = match objective {
            ObjectiveArg::Profit => optimize(&profit_objective(p, &run.plan)?)?,
            ObjectiveArg::Quadratic => optimize(&quadratic_objective(&space, 0.3, 0.7))?,
        };
        eprintln!(
            "{:<8} best r={} Q={}  mean profit {:.2}  ({} evaluations)",
            p.spec.id,
            result.best_point.r,
            result.best_point.q,
            result.best_summary.mean_profit,
            result.history.len()
        );
        if let Some(dir) = history_dir {
            create_dir(dir)?;
            report::write_history_csv(create_file(dir.join(format!("{}_history.csv", p.spec.id)))?, &result)?;
        }
        products.push(ProductOptimum {
            id: p.spec.id.clone(),
            best_point: result.best_point,
            best_summary: result.best_summary,
            evaluations: result.history.len(),
        });
    }
    let total_profit = products.iter().map(|p| p.best_summary.mean_profit).sum();
    let report = OptimizeReport {
        method: match method {
            MethodArg::Grid => inventory_sim::optimize::Method::Grid,
            MethodArg::Bayes => inventory_sim::optimize::Method::Bayesian,
        },
        seed: run.seed,
        replications: run.plan.n_replications,
        products,
        total_profit,
    };
    emit(output, &report::to_json(&report)?)
}

fn cmd_surface(run: &RunArgs, step: u64, bounds: Option<Bounds>, output: Option<&Path>) -> Result<(), Error> {
    let run = run.load()?;
    if run.products.len() != 1 {
        return Err(Error::Config("surface needs exactly one product (use --product)".into()));
    }
    let p = &run.products[0];
    let space = search_space(p, bounds, step)?;
    let result = grid_search(&space, profit_objective(p, &run.plan)?)?;
    let mut out = open_output(output)?;
    report::write_surface_csv(&mut out, &result)
}

fn cmd_diagnose(run: &RunArgs, kind: PolicyKind, output_dir: &Path) -> Result<(), Error> {
    let run = run.load()?;
    create_dir(output_dir)?;
    let mut summaries = Vec::with_capacity(run.products.len());
    for p in &run.products {
        let summary = evaluate_policy(&p.spec, &p.policy(kind), &p.demand_model(false)?, &p.params()?, &run.plan)?;
        let conv = assess_convergence(&summary.profits)?;
        report::write_convergence_csvs(output_dir, &p.spec.id, &conv)?;
        eprintln!(
            "{:<8} mean {:.2}  se {:.2}  acf in band {:.0}%  converged {}",
            p.spec.id,
            conv.final_mean,
            conv.final_standard_error,
            100.0 * conv.autocorrelation_in_band,
            conv.converged
        );
        summaries.push(ConvergenceSummary::new(&p.spec.id, &conv));
    }
    emit(Some(&output_dir.join("convergence.json")), &report::to_json(&summaries)?)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Estimate { history, output } => cmd_estimate(&history, output.as_deref()),
        Command::Fixture { run, days, output } => cmd_fixture(&run, days, output.as_deref()),
        Command::Simulate { run, policy, sampling, output, trace_dir } => {
            cmd_simulate(&run, policy.into(), sampling, output.as_deref(), trace_dir.as_deref())
        }
        Command::Optimize {
            run,
            method,
            step,
            budget,
            init_count,
            bounds,
            objective,
            output,
            history_dir,
        } => cmd_optimize(
            &run,
            method,
            step,
            budget,
            init_count,
            bounds,
            objective,
            output.as_deref(),
            history_dir.as_deref(),
        ),
        Command::Surface { run, step, bounds, output } => cmd_surface(&run, step, bounds, output.as_deref()),
        Command::Diagnose { run, policy, output_dir } => cmd_diagnose(&run, policy.into(), &output_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
