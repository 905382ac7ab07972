use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use intersched::experiment::{
    export_graphs, format_duration, run_golden, run_sweep, GoldenExpectations, ScenarioSpec,
};
use intersched::fleet::{self, LaneMix};
use intersched::sim::{simulate, write_trajectory_file, ArrivalModel, SimInput, SimOptions};
use intersched::Scheduler;

#[derive(Parser)]
#[command(
    name = "intersched",
    version,
    about = "Conflict-free passing orders for a 12-lane intersection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output directory.
    #[arg(long, env = "INTERSCHED_OUT_DIR", default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over fleet sizes, seeds and schedulers.
    Sweep {
        /// Scenario file (TOML). Flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        p: Option<f64>,
        /// Fleet size; repeat for several.
        #[arg(long)]
        n: Vec<usize>,
        /// Number of seeds, starting at --seed.
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Scheduler; repeat for several. Defaults to all.
        #[arg(long)]
        scheduler: Vec<Scheduler>,
        /// Write runtime_ms as 0 so repeated sweeps are byte-identical.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Recompute the reference scenario and compare with expected values.
    Golden {
        /// JSON file with expectations; defaults to the built-in reference.
        #[arg(long)]
        expect: Option<PathBuf>,
    },
    /// Simulate one run and write metrics (and optionally a trajectory).
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 84)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "mm")]
        scheduler: Scheduler,
        /// Trajectory sampling interval in seconds.
        #[arg(long)]
        trajectory: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Write conflict sets, CDG, CUG and schedules as text files.
    ExportGraphs {
        /// Random fleet size; the reference scenario when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

type Res = Result<ExitCode, Box<dyn std::error::Error>>;

fn load_spec(config: Option<&Path>) -> Result<ScenarioSpec, Box<dyn std::error::Error>> {
    Ok(match config {
        Some(path) => ScenarioSpec::load(path)?,
        None => ScenarioSpec::default(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep {
            config,
            p,
            n,
            seeds,
            seed,
            scheduler,
            no_timing,
            output,
        } => sweep(config, p, n, seeds, seed, scheduler, no_timing, &output.out),
        Command::Golden { expect } => golden(expect),
        Command::Simulate {
            config,
            p,
            n,
            seed,
            scheduler,
            trajectory,
            output,
        } => simulate_one(config, p, n, seed, scheduler, trajectory, &output.out),
        Command::ExportGraphs { n, seed, output } => export(n, seed, &output.out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    config: Option<PathBuf>,
    p: Option<f64>,
    n: Vec<usize>,
    seeds: Option<u64>,
    seed: u64,
    scheduler: Vec<Scheduler>,
    no_timing: bool,
    out: &Path,
) -> Res {
    let mut spec = load_spec(config.as_deref())?;
    if let Some(p) = p {
        spec.p = p;
    }
    if !n.is_empty() {
        spec.n = n;
    }
    if let Some(k) = seeds {
        spec.seeds = (seed..seed + k).collect();
    }
    if !scheduler.is_empty() {
        spec.schedulers = scheduler;
    }
    if no_timing {
        spec.timing = false;
    }
    let started = Instant::now();
    let result = run_sweep(&spec)?;
    for path in result.write_to_dir(out)? {
        println!("wrote {}", path.display());
    }
    for a in &result.aggregates {
        println!(
            "{:<9} n={:<4} d_all={:>7.2} evac={:>8.2}s",
            a.scheduler.name(),
            a.n,
            a.d_all_mean,
            a.evac_mean
        );
    }
    println!(
        "{} runs in {}",
        result.rows.len(),
        format_duration(started.elapsed())
    );
    Ok(ExitCode::SUCCESS)
}

fn golden(expect: Option<PathBuf>) -> Res {
    let exp = match expect {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => GoldenExpectations::example1(),
    };
    let report = run_golden(&exp)?;
    print!("{}", report.to_text());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn simulate_one(
    config: Option<PathBuf>,
    p: Option<f64>,
    n: usize,
    seed: u64,
    scheduler: Scheduler,
    trajectory: Option<f64>,
    out: &Path,
) -> Res {
    let spec = load_spec(config.as_deref())?;
    let input = SimInput::Arrivals(ArrivalModel {
        p: p.unwrap_or(spec.p),
        seed,
        n_total: n,
    });
    let options = SimOptions {
        trajectory_interval: trajectory,
    };
    let outcome = simulate(&input, scheduler, &spec.sim, options)?;
    std::fs::create_dir_all(out)?;
    let metrics = out.join("metrics.json");
    std::fs::write(
        &metrics,
        serde_json::to_string_pretty(&outcome.metrics.to_flat_json())? + "\n",
    )?;
    println!("wrote {}", metrics.display());
    if trajectory.is_some() {
        let path = out.join("trajectory.csv");
        write_trajectory_file(&outcome.trajectory, &path)?;
        println!("wrote {}", path.display());
    }
    let m = &outcome.metrics;
    println!(
        "{}: n={} d_all={} evac={:.2}s violations={}",
        scheduler, m.n_vehicles, m.d_all, m.evacuation_time, m.safety_violations
    );
    Ok(if m.safety_violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn export(n: Option<usize>, seed: u64, out: &Path) -> Res {
    let records = match n {
        Some(n) => fleet::random_fleet(&mut ChaCha8Rng::seed_from_u64(seed), n, LaneMix::All),
        None => fleet::example1(),
    };
    for path in export_graphs(&records, out)? {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
