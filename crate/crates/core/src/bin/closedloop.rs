use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use closedloop::harness::experiment::{run_experiment, run_seed, run_suite};
use closedloop::harness::export::{load_runs, write_svgs};
use closedloop::harness::{builtin_scenarios, export_outputs, pearson, summarize, RunRecord, ScenarioSpec};
use closedloop::planner::StrategyKind;
use closedloop::simulator::SimConfig;

#[derive(Parser)]
#[command(version, about = "Plan and run Task chains on the built-in scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One run of one strategy.
    Run {
        /// Built-in scenario name or path to a scenario JSON file.
        #[arg(long)]
        scenario: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
        strategy: u8,
        #[arg(long, default_value_t = 0)]
        variant: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Every scenario, strategy, start variant and repetition.
    Suite {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Redraw the SVGs of a runs.json file.
    Plot {
        #[arg(long)]
        run: PathBuf,
        /// Defaults to the directory holding the JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_run(r: &RunRecord) {
    println!(
        "{:<11} {} v{} r{}  states={:<3} objects={:<4} time={:>7.3}ms  {}  {}",
        r.scenario,
        r.strategy,
        r.variant,
        r.repetition,
        r.n_states,
        r.n_objects,
        r.planning_time * 1e3,
        if r.success { "success" } else { "failure" },
        r.outcome
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = SimConfig::default();
    let result = match cli.command {
        Command::Run { scenario, strategy, variant, seed, out } => (|| {
            let spec = ScenarioSpec::resolve(&scenario)?;
            let kind = StrategyKind::from_index(strategy as usize)?;
            let rec = run_experiment(&spec, kind, variant, 0, seed, &cfg)?;
            print_run(&rec);
            let records = vec![rec];
            export_outputs(&records, &summarize(&records), &out)?;
            Ok(())
        })(),
        Command::Suite { out, repetitions, seed } => (|| {
            let records = run_suite(&builtin_scenarios(), repetitions, seed, &cfg)?;
            records.iter().for_each(print_run);
            let rows = summarize(&records);
            let planned: Vec<&RunRecord> = records.iter().filter(|r| r.map.is_some()).collect();
            let times: Vec<f64> = planned.iter().map(|r| r.planning_time).collect();
            let states: Vec<f64> = planned.iter().map(|r| r.n_states as f64).collect();
            let objects: Vec<f64> = planned.iter().map(|r| r.n_objects as f64).collect();
            if let (Ok(a), Ok(b)) = (pearson(&times, &states), pearson(&times, &objects)) {
                println!("pearson(time, states) = {a:.3}  pearson(time, objects) = {b:.3}");
            }
            let files = export_outputs(&records, &rows, &out)?;
            println!("wrote {} files to {} (seeds from {})", files.len(), out.display(), run_seed(seed, 0));
            Ok(())
        })(),
        Command::Plot { run, out } => (|| {
            let records = load_runs(&run)?;
            let dir = out.unwrap_or_else(|| run.parent().map(PathBuf::from).unwrap_or_default());
            let files = write_svgs(&records, &dir)?;
            println!("wrote {} files to {}", files.len(), dir.display());
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let e: closedloop::Error = e;
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
