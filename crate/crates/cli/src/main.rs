use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdhf_cli::output::{resolve_out, write_tables, Manifest};
use tdhf_cli::scenarios::scenario_table;
use tdhf_cli::verify::run_all;
use tdhf_cli::{find_scenario, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "tdhf", version, about = "Hartree-Fock dynamics runs and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one preset, optionally overridden by a TOML config.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the preset table as CSV.
    ListScenarios,
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            scenario,
            seed,
            out,
        } => run(config.as_deref(), scenario.as_deref(), seed, out.as_deref()),
        Command::ListScenarios => {
            print!("{}", scenario_table());
            Ok(true)
        }
        Command::Verify { seed, out } => verify(seed, out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tdhf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn build_config(config: Option<&Path>, scenario: Option<&str>, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let mut cfg = match (config, scenario) {
        (Some(path), Some(id)) => {
            let cfg = RunConfig::load(path)?;
            if cfg.scenario != id {
                return Err(CliError::Usage(format!(
                    "--scenario {id} disagrees with scenario `{}` in {}",
                    cfg.scenario,
                    path.display()
                )));
            }
            cfg
        }
        (Some(path), None) => RunConfig::load(path)?,
        (None, Some(id)) => (find_scenario(id)?.defaults)(),
        (None, None) => return Err(CliError::Usage("run needs --config or --scenario".into())),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(config: Option<&Path>, scenario: Option<&str>, seed: Option<u64>, out: Option<&Path>) -> Result<bool, CliError> {
    let cfg = build_config(config, scenario, seed)?;
    let dir = resolve_out(out, Some(&cfg)).join(&cfg.scenario);
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let mut manifest = Manifest::new("run", &cfg.scenario, cfg.seed, Some(cfg.clone()));
    let outcome = (find_scenario(&cfg.scenario)?.run)(&cfg);
    let output = match outcome {
        Ok(o) => o,
        Err(e) => {
            manifest.add_error(&cfg.scenario, &e);
            std::fs::write(dir.join("abort.txt"), format!("{e}\n{e:?}\n"))?;
            manifest.write(&dir)?;
            return Err(e);
        }
    };
    write_tables(&dir, "", &output.tables, &mut manifest)?;
    manifest.add_audits(&cfg.scenario, &output.audits);
    manifest.write(&dir)?;
    for a in &output.audits {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!("wrote {}", dir.display());
    Ok(manifest.passed)
}

fn verify(seed: u64, out: Option<&Path>) -> Result<bool, CliError> {
    if seed > i64::MAX as u64 {
        return Err(CliError::Usage("--seed must be at most 2^63 - 1".into()));
    }
    let dir = resolve_out(out, None).join("verify");
    std::fs::create_dir_all(&dir)?;
    let mut manifest = Manifest::new("verify", "acceptance", seed, None);
    for r in run_all(seed) {
        println!("{}", r.line());
        match &r.outcome {
            Ok(o) => {
                write_tables(&dir, &r.dir_name(), &o.tables, &mut manifest)?;
                manifest.add_audits(&r.dir_name(), &o.audits);
            }
            Err(e) => manifest.add_error(&r.dir_name(), e),
        }
    }
    manifest.write(&dir)?;
    Ok(manifest.passed)
}
