use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ghostloc::harness::{
    render_episode, render_sweep, run_episode, sweep_samples, sweep_threshold, ExperimentConfig,
};
use ghostloc::io::table::sig6;
use ghostloc::{Error, Result};

/// Moving-target ghost imaging: localization, speckle compensation and accumulation.
#[derive(Debug, Parser)]
#[command(name = "ghostloc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one episode and write images, tables and a manifest to output_dir.
    Simulate(RunArgs),
    /// Sweep the screening threshold t.
    SweepT {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated thresholds.
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
        values: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Sweep the samples per segment k.
    SweepK {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated sample counts.
        #[arg(long, value_delimiter = ',', default_values_t = [50, 100, 200, 300, 500])]
        values: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
    /// Re-run the episode described by a resolved config (e.g. a previous run's
    /// config.txt) and write its outputs.
    Render {
        /// Resolved config file to reproduce.
        #[arg(long)]
        from: PathBuf,
        /// Output directory; defaults to the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Config file plus per-key overrides. Flag names mirror the config keys.
#[derive(Debug, Args)]
struct RunArgs {
    /// Flat key = value config file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

macro_rules! overrides {
    ($($field:ident),* $(,)?) => {
        #[derive(Debug, Args)]
        struct Overrides {
            $(
                #[arg(long = stringify!($field))]
                $field: Option<String>,
            )*
        }

        impl Overrides {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field), v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

overrides!(
    fov_width,
    fov_height,
    macro_pixel,
    bernoulli_p,
    on_value,
    off_value,
    target,
    target_size,
    target_bitmap,
    trajectory,
    start_x,
    start_y,
    velocity_x,
    velocity_y,
    amplitude,
    omega,
    waypoints,
    r,
    k,
    t,
    noise,
    noise_sigma,
    noise_seed,
    fill,
    ref_x,
    ref_y,
    shift_sign,
    mean_mode,
    compensation,
    fallback_argmax,
    seed,
    output_dir,
);

impl RunArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        for (key, value) in self.overrides.pairs() {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

// Summaries go through a locked handle so a closed pipe ends output quietly.
fn simulate(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    let result = run_episode(cfg)?;
    let manifest = render_episode(&result, dir)?;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "prmse                 {}", sig6(result.prmse));
    let _ = writeln!(
        out,
        "mean rough psnr (dB)  {}",
        sig6(result.mean_rough_psnr_db())
    );
    let _ = writeln!(
        out,
        "accumulated psnr (dB) {}",
        sig6(result.accumulated_psnr_db)
    );
    let _ = writeln!(
        out,
        "uncompensated (dB)    {}",
        sig6(result.uncompensated_psnr_db)
    );
    if result.fallback_count() > 0 {
        let _ = writeln!(out, "fallback segments     {}", result.fallback_count());
    }
    let _ = writeln!(
        out,
        "wrote {} files to {}",
        manifest.entries.len(),
        dir.display()
    );
    Ok(())
}

fn print_sweep(result: &ghostloc::harness::SweepResult) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(
        out,
        "{:>8} {:>12} {:>12} {:>5} {:>7}",
        result.param.name(),
        "mean_prmse",
        "std_prmse",
        "ok",
        "failed"
    );
    for p in &result.points {
        let _ = writeln!(
            out,
            "{:>8} {:>12} {:>12} {:>5} {:>7}",
            sig6(p.value),
            sig6(p.mean_prmse),
            sig6(p.std_prmse),
            p.n_ok,
            p.n_failed
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.resolve()?;
            simulate(&cfg, &cfg.output_dir)
        }
        Command::SweepT {
            run,
            values,
            trials,
        } => {
            let cfg = run.resolve()?;
            let result = sweep_threshold(&cfg, &values, trials)?;
            print_sweep(&result);
            render_sweep(&result, &cfg, &cfg.output_dir)?;
            Ok(())
        }
        Command::SweepK {
            run,
            values,
            trials,
        } => {
            let cfg = run.resolve()?;
            let result = sweep_samples(&cfg, &values, trials)?;
            print_sweep(&result);
            render_sweep(&result, &cfg, &cfg.output_dir)?;
            Ok(())
        }
        Command::Render { from, out } => {
            let mut cfg = ExperimentConfig::from_file(&from)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            cfg.validate()?;
            simulate(&cfg, &cfg.output_dir)
        }
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
            if let Error::Degenerate { .. } = e {
                eprintln!("hint: set fallback_argmax = true to continue past degenerate segments");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
