use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kpp_core::eigen::write_convergence_csv;
use kpp_core::media::PeriodicProfile;
use kpp_spread::plot::convergence_svg;
use kpp_spread::presets::describe_preset;
use kpp_spread::{convergence_study, list_presets, load_configs, preset, run_scenario, CliError, ScenarioConfig};
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "kpp-spread", version, about = "KPP spreading speeds in slowly varying media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, or a JSON array of scenarios in parallel
    Run {
        config: PathBuf,
        /// Output directory; batches get one subdirectory per scenario
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Exit with code 4 if any configured check fails
        #[arg(long)]
        check: bool,
        /// Scenarios run concurrently
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List presets, describe one, or dump its config with --emit
    Preset {
        name: Option<String>,
        #[arg(long)]
        emit: bool,
    },
    /// Finite-period speeds w_L of a periodic profile against w_inf
    #[command(name = "wL")]
    WL {
        profile: PathBuf,
        #[arg(long = "L", value_delimiter = ',', default_value = "5,20,80")]
        periods: Vec<f64>,
        /// Also write convergence.csv and convergence.svg here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_one(cfg: &ScenarioConfig, dir: &Path) -> Result<usize, CliError> {
    let art = run_scenario(cfg)?;
    art.write(dir)?;
    let r = &art.report;
    let mut line = format!("{}:", r.scenario);
    if let Some(reg) = &r.regime {
        line += &format!(" regime={}", reg.label());
    }
    if let Some(w) = r.bounds.as_ref().and_then(|b| b.w_infinity) {
        line += &format!(" w_inf={w:.6}");
    }
    if let Some(e) = &r.empirical {
        line += &format!(" w_low_est={:.4} w_up_est={:.4}", e.w_low_est, e.w_up_est);
    }
    for c in &r.checks {
        line += &format!(" [{} {}]", if c.pass { "ok" } else { "FAILED" }, c.name);
    }
    println!("{line} -> {}", dir.display());
    Ok(r.failed_checks())
}

fn run(config: &Path, out: &Path, check: bool, jobs: usize) -> Result<(), CliError> {
    let configs = load_configs(config)?;
    let batch = configs.len() > 1;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} jobs: {e}")))?;
    let results: Vec<Result<usize, CliError>> = pool.install(|| {
        configs
            .par_iter()
            .map(|cfg| {
                let dir = if batch { out.join(&cfg.scenario) } else { out.to_path_buf() };
                run_one(cfg, &dir)
            })
            .collect()
    });
    let mut failed = 0;
    let mut first_error = None;
    for r in results {
        match r {
            Ok(n) => failed += n,
            Err(e) if first_error.is_none() => first_error = Some(e),
            Err(e) => eprintln!("error: {e}"),
        }
    }
    if let Some(e) = first_error {
        return Err(e);
    }
    if check && failed > 0 {
        return Err(CliError::Checks(failed));
    }
    Ok(())
}

fn show_preset(name: Option<String>, emit: bool) -> Result<(), CliError> {
    let Some(name) = name else {
        for n in list_presets() {
            println!("{n:<22} {}", describe_preset(n).unwrap_or(""));
        }
        return Ok(());
    };
    let cfg = preset(&name)?;
    if emit {
        let json = serde_json::to_string_pretty(&cfg).expect("config serializes");
        match writeln!(io::stdout().lock(), "{json}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        }
    } else {
        println!("{name}: {}", describe_preset(&name).unwrap_or("two-value medium with geometric ratios"));
    }
    Ok(())
}

fn w_l(profile: &Path, periods: &[f64], out: Option<&Path>) -> Result<(), CliError> {
    let text = fs::read_to_string(profile)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", profile.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let profile: PeriodicProfile = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| CliError::Config(format!("profile {}: {}", e.path(), e.inner())))?;
    let rows = convergence_study(&profile, periods)?;
    write_convergence_csv(io::stdout().lock(), &rows)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let mut f = io::BufWriter::new(fs::File::create(dir.join("convergence.csv"))?);
        write_convergence_csv(&mut f, &rows)?;
        f.flush()?;
        fs::write(dir.join("convergence.svg"), convergence_svg(&rows))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, check, jobs } => run(&config, &out, check, jobs),
        Command::Preset { name, emit } => show_preset(name, emit),
        Command::WL { profile, periods, out } => w_l(&profile, &periods, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
