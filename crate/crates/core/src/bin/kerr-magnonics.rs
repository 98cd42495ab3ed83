use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kerr_magnonics::cli::{
    cmd_linear, cmd_shift, cmd_spectrum, cmd_steady, cmd_sweep, parse_grid, plot_script, BranchChoice, PlotKind,
    THREADS_ENV,
};
use kerr_magnonics::config::load_config;
use kerr_magnonics::probe::Polariton;
use kerr_magnonics::sweep::{Direction, SweepParameter};
use kerr_magnonics::{Error, Result};

#[derive(Parser)]
#[command(name = "kerr-magnonics", version, about = "Kerr magnon-polariton steady states, sweeps and probe spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Parameter file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a matplotlib script that plots the CSV (requires --output).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// All steady states at one drive power.
    Steady {
        #[command(flatten)]
        common: Common,
        /// Drive power in mW (default: the config value).
        #[arg(long)]
        power: Option<f64>,
    },
    /// Hysteretic parameter sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// power (mW), omega_d (GHz), omega_c (GHz) or gamma_c (MHz).
        #[arg(long, default_value = "power")]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// up, down or both.
        #[arg(long, default_value = "both")]
        direction: String,
    },
    /// Probe transmission spectrum.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        power: Option<f64>,
        /// Branch index (any branch, stable or not) or `all` (every stable branch).
        #[arg(long, default_value = "all")]
        branch: String,
        /// from:to:points, probe detuning from the drive in MHz.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Polariton frequency shift versus drive power.
    Shift {
        #[command(flatten)]
        common: Common,
        /// LP, MP or HP.
        #[arg(long, default_value = "HP")]
        sigma: String,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        #[arg(long, default_value = "both")]
        direction: String,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Kerr-free spin current, closed form against the polynomial root.
    Linear {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        power: Option<f64>,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(Error::Usage(format!("{THREADS_ENV} must be a positive integer")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let (common, kind, table) = match cli.command {
        Command::Steady { common, power } => {
            let p = load_config(&common.config)?;
            let t = cmd_steady(&p, power)?;
            (common, PlotKind::Steady, t)
        }
        Command::Sweep { common, param, from, to, points, direction } => {
            let p = load_config(&common.config)?;
            let t = cmd_sweep(&p, SweepParameter::parse(&param)?, from, to, points, Direction::parse(&direction)?)?;
            (common, PlotKind::Sweep, t)
        }
        Command::Spectrum { common, power, branch, grid } => {
            let p = load_config(&common.config)?;
            let grid = grid.as_deref().map(parse_grid).transpose()?;
            let t = cmd_spectrum(&p, power, BranchChoice::parse(&branch)?, grid)?;
            (common, PlotKind::Spectrum, t)
        }
        Command::Shift { common, sigma, from, to, points, direction, grid } => {
            let p = load_config(&common.config)?;
            let sigma = Polariton::parse(&sigma)
                .ok_or_else(|| Error::Usage(format!("--sigma expects LP, MP or HP, got `{sigma}`")))?;
            let grid = grid.as_deref().map(parse_grid).transpose()?;
            let t = cmd_shift(&p, sigma, from, to, points, Direction::parse(&direction)?, grid)?;
            (common, PlotKind::Shift, t)
        }
        Command::Linear { common, power } => {
            let p = load_config(&common.config)?;
            let t = cmd_linear(&p, power)?;
            (common, PlotKind::Linear, t)
        }
    };
    let csv = table.to_csv();
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    match &common.output {
        Some(path) => std::fs::write(path, csv).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    if let Some(script) = &common.plot {
        let Some(out) = &common.output else {
            return Err(Error::Usage("--plot needs --output".into()));
        };
        std::fs::write(script, plot_script(kind, &out.display().to_string()))
            .map_err(|e| Error::Usage(format!("{}: {e}", script.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
