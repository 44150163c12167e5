use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optomech::commands::{self, format_check};
use optomech::model::selftest::Mutation;
use optomech::Error;

/// Cavity optomechanics simulator and calibration pipeline.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Component spectra and closed-form variances for one configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Synthetic sweep datasets for a scenario.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        force: bool,
    },
    /// Full calibration chain on a scenario directory.
    Calibrate {
        dataset: PathBuf,
        /// Pipeline settings; defaults to `pipeline.json` in the dataset.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report directory; defaults to `<dataset>/report`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Built-in consistency checks.
    Selftest {
        /// Perturb one closed form so that its check must fail.
        #[arg(long)]
        mutate: Option<Mutation>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate { config, out, force } => {
            let (summary, files) = commands::simulate(&config, &out, force)?;
            if let Some(w) = summary.warning {
                eprintln!("warning: {w:?}");
            }
            println!(
                "{}: C = {:.6e}, integrated {:.9e} (closed form {:.9e})",
                summary.regime,
                summary.cooperativity,
                summary.integrated_first,
                summary.closed_form.total_first()
            );
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Synth { config, out, seed, force } => {
            let s = commands::synth(&config, &out, seed, force)?;
            for (name, n) in [("pump", s.pump), ("temperature", s.temperature), ("power", s.power)] {
                if let Some(n) = n {
                    println!("{name}: {n} traces");
                }
            }
            println!("wrote {}", out.display());
        }
        Command::Calibrate { dataset, config, out, force } => {
            let r = commands::calibrate(&dataset, config.as_deref(), out.as_deref(), force)?;
            for w in &r.report.warnings {
                eprintln!("warning [{}] {}", w.stage.name(), w.message);
            }
            let s = &r.summary;
            println!("damping per power   {:.6e} Hz/unit", s.damping_per_power_hz);
            println!("coupling per power  {:.6e} Hz^2/unit", s.coupling_per_power_hz2);
            println!("flux per kelvin     {:.6e}", s.flux_per_kelvin);
            println!("flux per C          {:.6e}", s.flux_per_cooperativity);
            println!("n_m_T0              {:.4}", s.n_m_T0);
            println!("X2_ref              {:.4}", s.x2_ref);
            println!("evasion demonstrated: {}", s.evasion_demonstrated);
        }
        Command::Selftest { mutate } => {
            let checks = commands::selftest(mutate)?;
            for c in &checks {
                println!("{}", format_check(c));
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(Error::ChecksFailed(failed));
            }
            println!("all {} checks passed", checks.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
