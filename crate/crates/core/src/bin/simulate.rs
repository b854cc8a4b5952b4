use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use trainlink::harness::{run_experiment_report, write_csv, write_metadata, ExperimentSpec, SweepKind};
use trainlink::scenario::ScenarioConfig;
use trainlink::Error;

/// Runs a parameter sweep and writes `<experiment>.csv` and
/// `<experiment>.metadata.json` into the output directory.
///
/// Log verbosity follows TRAINLINK_LOG (for example `TRAINLINK_LOG=info`).
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Scenario config JSON; replaces the experiment's base scenario.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Preset name (blocked_count, flow_count, uav_position, slot_budget,
    /// sinr_min, oracle_compare) or path to an experiment JSON file.
    #[arg(long, default_value = "blocked_count")]
    experiment: String,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    trials: Option<usize>,

    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Also run the exhaustive optimum.
    #[arg(long)]
    oracle: bool,

    /// Let the exhaustive optimum run above its flow-count limit.
    #[arg(long)]
    allow_oversize: bool,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(args: &Args) -> Result<(String, ExperimentSpec), Error> {
    let (name, mut spec) = match args.experiment.parse::<SweepKind>() {
        Ok(kind) => (kind.name().to_string(), ExperimentSpec::preset(kind)),
        Err(_) => {
            let path = Path::new(&args.experiment);
            if !path.exists() {
                return Err(Error::InvalidConfig(format!(
                    "{:?} is neither a preset nor a file",
                    args.experiment
                )));
            }
            let name = path.file_stem().map_or("experiment".into(), |s| s.to_string_lossy().into_owned());
            (name, ExperimentSpec::from_json(&read(path)?)?)
        }
    };
    if let Some(path) = &args.config {
        spec.base = ScenarioConfig::from_json(&read(path)?)?;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(trials) = args.trials {
        spec.trials = trials;
    }
    spec.include_oracle |= args.oracle;
    spec.oracle.allow_oversize |= args.allow_oversize;
    Ok((name, spec))
}

fn run(args: &Args) -> Result<(), Error> {
    let (name, spec) = load_spec(args)?;
    spec.validate()?;
    log::info!("running {name}: {} points x {} trials", spec.sweep_values.len(), spec.trials);
    let report = run_experiment_report(&spec)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let csv = args.out.join(format!("{name}.csv"));
    write_csv(&report.rows, &csv)?;
    write_metadata(&spec, &spec.base.radio, Some(&report), &args.out.join(format!("{name}.metadata.json")))?;
    if let Some(d) = report.oracle_deviation {
        println!("average deviation from optimum: {:.4}", d);
    }
    println!("wrote {}", csv.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRAINLINK_LOG", "warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidConfig(_) | Error::InvalidInput(_) | Error::Json(_) => 2,
                Error::SizeGuard { .. } => 3,
                _ => 1,
            })
        }
    }
}
