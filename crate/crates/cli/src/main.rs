//! `wqed run <file>` and `wqed sweep <file>`.
//!
//! Exit codes: 0 on success, 2 when the scenario cannot be read or is
//! invalid, 3 when the integration fails, 1 when output cannot be written.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wqed::scenario::{self, Scenario, ScenarioError, ScenarioResult};

#[derive(Parser)]
#[command(name = "wqed", version, about = "Driven emitter chains in a chiral waveguide")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario; writes <stem>.csv and <stem>.summary.json.
    Run(Common),
    /// Repeat a scenario for every Γ_r/Γ_l ratio in its [sweep] section.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML, or JSON as echoed in a summary).
    file: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Overrides integrator.dt.
    #[arg(long)]
    dt: Option<f64>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

impl Common {
    fn load(&self) -> ScenarioResult<Scenario> {
        let scn = Scenario::load(&self.file)?;
        let scn = match self.dt {
            Some(dt) => scn.with_dt(dt)?,
            None => scn,
        };
        scn.resolved()
    }

    fn stem(&self) -> String {
        self.file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into())
    }
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(args: &Common) -> ScenarioResult<()> {
    let scn = args.load()?;
    let out = scenario::run(&scn)?;
    let paths = scenario::write_run(&args.out_dir, &args.stem(), &scn, &out)?;
    if !args.quiet {
        for p in &out.peaks {
            println!("{:<24} max {} at t = {}", p.series, scenario::format_sig12(p.peak.value), scenario::format_sig12(p.peak.time));
        }
        report(&paths);
    }
    Ok(())
}

fn sweep(args: &Common) -> ScenarioResult<()> {
    let scn = args.load()?;
    let sw = scenario::sweep(&scn)?;
    let paths = scenario::write_sweep(&args.out_dir, &args.stem(), &scn, &sw)?;
    if !args.quiet {
        println!("{:>8}  {:>14}  {:>10}", "ratio", format!("{}_max", sw.series), "t_at_max");
        for p in &sw.points {
            println!(
                "{:>8}  {:>14}  {:>10}",
                scenario::format_sig12(p.ratio),
                format!("{:.6}", p.peak.value),
                format!("{:.3}", p.peak.time)
            );
        }
        report(&paths);
    }
    Ok(())
}

fn describe(file: &Path, e: &ScenarioError) -> String {
    match e {
        ScenarioError::Parse { .. } => format!("{}: {e}", file.display()),
        _ => e.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, result) = match &cli.command {
        Command::Run(a) => (a, run(a)),
        Command::Sweep(a) => (a, sweep(a)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&args.file, &e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
