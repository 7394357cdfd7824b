use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use critcentre::harness::{self, Campaign, Command, Params};
use critcentre::jets::PointsDocument;
use critcentre::liealg::{Family, LieAlgebraSpec, SpecDocument};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "critcentre", version, about = "Verification campaigns for critical-level vacuum modules")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Structure constants, invariant form and restricted structure.
    Validate,
    /// Randomized Borcherds identity residuals.
    Borcherds,
    /// Centre dimensions against the restricted-monomial prediction.
    Centre,
    /// Jet-scheme invariants, derivative rewriting and the Jacobian criterion.
    Jets,
    /// Segal-Sugawara families: centrality, symbols, reduction.
    Sugawara,
}

#[derive(clap::Args, Debug)]
struct Flags {
    #[arg(long, global = true, default_value = "sl")]
    family: Family,
    #[arg(long, global = true, default_value_t = 2)]
    size: usize,
    /// Prime characteristic, or 0 for the rationals.
    #[arg(long = "char", global = true, default_value_t = 5)]
    characteristic: u64,
    /// `critical` or a rational level.
    #[arg(long, global = true, default_value = "critical", allow_hyphen_values = true)]
    level: String,
    #[arg(long, global = true, default_value_t = 1)]
    trunc: u32,
    #[arg(long, global = true, default_value_t = 4)]
    weight_cap: u32,
    #[arg(long, global = true, default_value_t = 4)]
    degree_cap: u32,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "CRITCENTRE_WORKERS", default_value_t = 1)]
    workers: usize,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, default_value_t = 20)]
    points: usize,
    #[arg(long, global = true, default_value_t = 20_000)]
    capacity: usize,
    /// Expected report; any byte difference fails the run.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    /// Where to write the report (default: stdout). Relative paths are
    /// resolved against CRITCENTRE_OUT_DIR when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON object of parameters; its keys override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// JSON algebra document used instead of --family/--size/--char.
    #[arg(long, global = true)]
    spec_file: Option<PathBuf>,
    /// JSON list of points for the Jacobian check, replacing the sampled ones.
    #[arg(long, global = true)]
    points_file: Option<PathBuf>,
    #[arg(long, global = true, env = "CRITCENTRE_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Validate => Command::Validate,
            Sub::Borcherds => Command::Borcherds,
            Sub::Centre => Command::Centre,
            Sub::Jets => Command::Jets,
            Sub::Sugawara => Command::Sugawara,
        }
    }
}

fn params_from(flags: &Flags) -> Result<Params, String> {
    let params = Params {
        family: flags.family,
        size: flags.size,
        characteristic: flags.characteristic,
        level: flags.level.clone(),
        trunc: flags.trunc,
        weight_cap: flags.weight_cap,
        degree_cap: flags.degree_cap,
        seed: flags.seed,
        workers: flags.workers,
        trials: flags.trials,
        points: flags.points,
        capacity: flags.capacity,
    };
    let Some(path) = &flags.config else {
        return Ok(params);
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let overrides: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let Value::Object(overrides) = overrides else {
        return Err(format!("{}: expected a JSON object", path.display()));
    };
    let mut merged = serde_json::to_value(&params).map_err(|e| e.to_string())?;
    let obj = merged.as_object_mut().expect("params serialise to an object");
    obj.insert("workers".into(), params.workers.into());
    obj.extend(overrides);
    serde_json::from_value(merged).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_spec(path: &Path) -> Result<LieAlgebraSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc: SpecDocument = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    LieAlgebraSpec::from_document(&doc).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_points(path: &Path) -> Result<PointsDocument, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_out(flags: &Flags, path: &Path) -> PathBuf {
    match &flags.out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = &cli.flags;
    let params = match params_from(flags) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut campaign = Campaign::new(cli.command.command(), params);
    if let Some(path) = &flags.spec_file {
        match load_spec(path) {
            Ok(spec) => campaign = campaign.with_spec(spec),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if let Some(path) = &flags.points_file {
        match load_points(path) {
            Ok(points) => campaign = campaign.with_points(points),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let report = match harness::run(&campaign) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(harness::error_exit_code(&e) as u8);
        }
    };
    for (phase, ms) in &report.timings {
        eprintln!("time {phase}: {ms} ms");
    }
    for check in report.failures() {
        eprintln!("FAILED {}: {}", check.name, check.witness.as_deref().unwrap_or(""));
    }
    let json = report.to_json();
    match &flags.out {
        Some(path) => {
            let path = resolve_out(flags, path);
            if let Err(e) = std::fs::write(&path, &json) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    let mut code = report.exit_code();
    if let Some(golden) = &flags.golden {
        match std::fs::read_to_string(golden) {
            Ok(expected) if expected == json => {}
            Ok(_) => {
                eprintln!("golden mismatch: {}", golden.display());
                code = 1;
            }
            Err(e) => {
                eprintln!("error: {}: {e}", golden.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(code as u8)
}
