//! Command-line front end: decide, solve, validate, brute-force, reduce,
//! extract, and generate, with one machine-readable JSON report per run on
//! stdout. Exit code 0 means feasible/valid/success, 1 means
//! infeasible/invalid/no-partition, 2 means a usage, I/O, or contract
//! error.

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use platoon_sched::decide::Decider;
use platoon_sched::hardness::{extract_partition, reduce_partition, Reduction};
use platoon_sched::model::{generate_instance, Instance, Schedule, Time, Topology, TopologyKind};
use platoon_sched::oracle::{brute_force_optimal, DEFAULT_ORDER_CAP};
use platoon_sched::search::{decide_at, minimize_delay, Strategy};
use platoon_sched::validate::check_valid;

#[derive(Parser)]
#[command(
    name = "platoon",
    version,
    about = "Exact min-max-delay schedules for platoons crossing one intersection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether a schedule with delay at most DELAY exists.
    Decide {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        delay: i64,
        #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
        algorithm: Algorithm,
    },
    /// Compute the minimum achievable delay and a witness schedule.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = StrategyArg::Hybrid)]
        strategy: StrategyArg,
        /// Write the witness schedule to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Check a schedule against the validity conditions.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Brute-force the exact optimum over all admission orders.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        max_orders: u64,
        /// Write the witness schedule to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build the hard combined-intersection instance for a multiset.
    Reduce {
        /// Comma-separated positive integers, e.g. "1,1,2".
        #[arg(long)]
        set: String,
        /// Write the instance to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover an equal-sum split from a schedule for a reduced instance.
    Extract {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Generate a random instance, deterministically from a seed.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Merge-lane count, for the parameterized kinds.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        max_release: i64,
        #[arg(long)]
        max_length: i64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Auto,
    Greedy,
    Dp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Hybrid,
    Bisect,
    Comparison,
}

impl From<StrategyArg> for Strategy {
    fn from(arg: StrategyArg) -> Strategy {
        match arg {
            StrategyArg::Hybrid => Strategy::Hybrid,
            StrategyArg::Bisect => Strategy::Bisect,
            StrategyArg::Comparison => Strategy::Comparison,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    YMerge,
    KMerge,
    TwoWayCrossing,
    MultiCross,
}

impl From<Kind> for TopologyKind {
    fn from(kind: Kind) -> TopologyKind {
        match kind {
            Kind::YMerge => TopologyKind::YMerge,
            Kind::KMerge => TopologyKind::KMerge,
            Kind::TwoWayCrossing => TopologyKind::TwoWayCrossing,
            Kind::MultiCross => TopologyKind::MultiCross,
        }
    }
}

type CliResult = Result<ExitCode, Box<dyn Error>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Decide {
            instance,
            delay,
            algorithm,
        } => cmd_decide(&instance, Time::new(delay), algorithm),
        Command::Solve {
            instance,
            strategy,
            emit,
        } => cmd_solve(&instance, strategy.into(), emit.as_deref()),
        Command::Validate { instance, schedule } => cmd_validate(&instance, &schedule),
        Command::Oracle {
            instance,
            max_orders,
            emit,
        } => cmd_oracle(&instance, max_orders, emit.as_deref()),
        Command::Reduce { set, out } => cmd_reduce(&set, out.as_deref()),
        Command::Extract { instance, schedule } => cmd_extract(&instance, &schedule),
        Command::Gen {
            kind,
            k,
            n,
            seed,
            max_release,
            max_length,
            out,
        } => cmd_gen(
            kind,
            k,
            n,
            seed,
            Time::new(max_release),
            Time::new(max_length),
            &out,
        ),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Box<dyn Error>> {
    let bytes =
        fs::read(path).map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    Instance::from_json(&bytes).map_err(|err| format!("{}: {err}", path.display()).into())
}

fn load_schedule(path: &Path) -> Result<Schedule, Box<dyn Error>> {
    let bytes =
        fs::read(path).map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    Schedule::from_json(&bytes).map_err(|err| format!("{}: {err}", path.display()).into())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Box<dyn Error>> {
    fs::write(path, bytes).map_err(|err| format!("cannot write {}: {err}", path.display()).into())
}

fn pick_decider(inst: &Instance, algorithm: Algorithm) -> Result<Decider, Box<dyn Error>> {
    let decider = match algorithm {
        Algorithm::Auto => Decider::auto(inst.topology())?,
        Algorithm::Greedy => Decider::GreedyY,
        Algorithm::Dp => match inst.topology() {
            Topology::YMerge | Topology::KMerge { .. } => Decider::MergeDp,
            Topology::TwoWayCrossing => Decider::CrossingDp,
            Topology::MultiCross { .. } => Decider::auto(inst.topology())?,
        },
    };
    Ok(decider)
}

fn report(value: serde_json::Value) {
    println!("{value}");
}

fn cmd_decide(instance: &Path, delay: Time, algorithm: Algorithm) -> CliResult {
    let inst = load_instance(instance)?;
    let decider = pick_decider(&inst, algorithm)?;
    match decide_at(&inst, decider, delay)? {
        platoon_sched::Outcome::Feasible(schedule) => {
            let max_delay = check_valid(&inst, &schedule)
                .max_delay
                .expect("decider schedules are valid");
            report(json!({
                "command": "decide",
                "result": "feasible",
                "delay": delay,
                "algorithm": decider.name(),
                "max_delay": max_delay,
                "schedule": schedule,
            }));
            Ok(ExitCode::SUCCESS)
        }
        platoon_sched::Outcome::Infeasible => {
            report(json!({
                "command": "decide",
                "result": "infeasible",
                "delay": delay,
                "algorithm": decider.name(),
            }));
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_solve(instance: &Path, strategy: Strategy, emit: Option<&Path>) -> CliResult {
    let inst = load_instance(instance)?;
    let decider = Decider::auto(inst.topology())?;
    let solved = minimize_delay(&inst, decider, strategy)?;
    if let Some(path) = emit {
        write_file(path, &solved.schedule.to_json())?;
    }
    report(json!({
        "command": "solve",
        "result": "optimal",
        "d_star": solved.d_star,
        "algorithm": decider.name(),
        "schedule": solved.schedule,
    }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(instance: &Path, schedule: &Path) -> CliResult {
    let inst = load_instance(instance)?;
    let sched = load_schedule(schedule)?;
    let result = check_valid(&inst, &sched);
    if result.is_valid() {
        report(json!({
            "command": "validate",
            "result": "valid",
            "max_delay": result.max_delay,
        }));
        Ok(ExitCode::SUCCESS)
    } else {
        for violation in &result.violations {
            eprintln!("violation: {}", violation.detail);
        }
        report(json!({
            "command": "validate",
            "result": "invalid",
            "violations": result.violations,
        }));
        Ok(ExitCode::from(1))
    }
}

fn cmd_oracle(instance: &Path, max_orders: u64, emit: Option<&Path>) -> CliResult {
    let inst = load_instance(instance)?;
    let optimal = brute_force_optimal(&inst, max_orders)?;
    if let Some(path) = emit {
        write_file(path, &optimal.schedule.to_json())?;
    }
    report(json!({
        "command": "oracle",
        "result": "optimal",
        "d_star": optimal.d_star,
        "orders": optimal.orders_tried,
        "schedule": optimal.schedule,
    }));
    Ok(ExitCode::SUCCESS)
}

fn parse_set(set: &str) -> Result<Vec<i64>, Box<dyn Error>> {
    set.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|_| format!("`{part}` is not an integer").into())
        })
        .collect()
}

fn cmd_reduce(set: &str, out: Option<&Path>) -> CliResult {
    let entries = parse_set(set)?;
    match reduce_partition(&entries)? {
        Reduction::TriviallyNoPartition { sum } => {
            report(json!({
                "command": "reduce",
                "result": "trivially-no-partition",
                "sum": sum,
            }));
            Ok(ExitCode::from(1))
        }
        Reduction::Instance { instance, meta } => {
            let mut body = json!({
                "command": "reduce",
                "result": "reduced",
                "q": meta.q,
                "d_max": meta.d_max,
                "platoons": instance.platoons().len(),
            });
            match out {
                Some(path) => {
                    write_file(path, &instance.to_json())?;
                    body["out"] = json!(path.display().to_string());
                }
                None => body["instance"] = serde_json::to_value(&instance)?,
            }
            report(body);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_extract(instance: &Path, schedule: &Path) -> CliResult {
    let inst = load_instance(instance)?;
    let sched = load_schedule(schedule)?;
    let meta = inst
        .meta()
        .ok_or("instance carries no reduction metadata")?
        .clone();
    match extract_partition(&meta, &inst, &sched)? {
        Some((u, v)) => {
            report(json!({
                "command": "extract",
                "result": "partition",
                "u": u,
                "v": v,
            }));
            Ok(ExitCode::SUCCESS)
        }
        None => {
            report(json!({
                "command": "extract",
                "result": "none",
                "d_max": meta.d_max,
            }));
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_gen(
    kind: Kind,
    k: Option<u32>,
    n: u32,
    seed: u64,
    max_release: Time,
    max_length: Time,
    out: &Path,
) -> CliResult {
    let topology = Topology::new(kind.into(), k)?;
    let inst = generate_instance(&topology, n, seed, max_release, max_length)?;
    write_file(out, &inst.to_json())?;
    report(json!({
        "command": "gen",
        "result": "ok",
        "n": n,
        "seed": seed,
        "schedule_length": inst.schedule_length(),
        "out": out.display().to_string(),
    }));
    Ok(ExitCode::SUCCESS)
}
