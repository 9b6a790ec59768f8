use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use nsac::experiments::{
    self, check_audit, run_manufactured, run_perturbation, run_simulation, run_wsu, ExperimentConfig, MmsSettings,
    PairReport,
};
use nsac::io::{self, convergence_rows, entropy_rows, write_energy, write_rows, write_vtk, RunManifest};
use nsac::{Error, Result};

/// Navier–Stokes–Allen–Cahn runs and verification studies.
#[derive(Parser, Debug)]
#[command(name = "nsac", version)]
struct Cli {
    /// Config file, or `default` for the built-in configuration.
    #[arg(long, global = true, default_value = "default")]
    config: String,
    /// Output directory; overrides `output.dir` and is overridden by NSAC_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Run the configured initial data, writing energy.csv and VTK snapshots.
    Simulate,
    /// Run and fail with exit code 2 if the discrete energy law is violated.
    EnergyAudit,
    /// Compare every refinement level against the finest one.
    Wsu,
    /// Perturb the initial velocity and fit the growth bound.
    Perturb,
    /// Itemised relative entropy inequality on the two finest levels.
    ReiCheck,
    /// Manufactured-solution convergence orders in space and time.
    Mms,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::EnergyAudit => "energy-audit",
            Command::Wsu => "wsu",
            Command::Perturb => "perturb",
            Command::ReiCheck => "rei-check",
            Command::Mms => "mms",
        }
    }
}

struct Run {
    cfg: ExperimentConfig,
    out: PathBuf,
    quiet: bool,
    manifest: RunManifest,
}

impl Run {
    fn say(&mut self, line: String) {
        if !self.quiet {
            println!("{line}");
        }
        self.manifest.summary.push(line);
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.files.push(PathBuf::from(name));
        self.out.join(name)
    }

    fn write_pair(&mut self, suffix: &str, report: &PairReport) -> Result<()> {
        let p = self.path(&format!("entropy{suffix}.csv"));
        write_rows(&p, &entropy_rows(&report.trace, &report.fit))?;
        let p = self.path(&format!("rei{suffix}.csv"));
        write_rows(&p, &report.rei)
    }
}

fn load_config(source: &str) -> Result<ExperimentConfig> {
    if source == "default" {
        Ok(ExperimentConfig::default())
    } else {
        io::parse_config(Path::new(source))
    }
}

fn simulate(run: &mut Run, audit: bool) -> Result<()> {
    if audit && run.cfg.init == experiments::InitKind::Manufactured {
        return Err(Error::InvalidParameter(
            "init.kind: the energy audit needs unforced initial data, got manufactured".into(),
        ));
    }
    let every = run.cfg.output_every;
    let mut snapshots = Vec::new();
    let out = run.out.clone();
    let summary = run_simulation(&run.cfg, |k, state| {
        if every > 0 && k % every == 0 {
            let name = format!("snapshot_{k:06}.vtk");
            write_vtk(&out.join(&name), state)?;
            snapshots.push(PathBuf::from(name));
        }
        Ok(())
    })?;
    run.manifest.files.extend(snapshots);
    let p = run.path("energy.csv");
    write_energy(&p, summary.energy.reports())?;
    let last = summary.energy.reports().last().copied().unwrap_or_default();
    run.say(format!("steps = {} dt = {:e}", summary.steps, summary.dt));
    run.say(format!("final energy = {:.10e}", last.total()));
    run.say(format!("energy audit violation = {:.3e}", summary.audit));
    run.say(format!(
        "maximum principle: {} violations, worst excursion {:.3e}",
        summary.max_principle.violations, summary.max_principle.worst_excursion
    ));
    run.say(format!("max CFL = {:.4}", summary.max_cfl));
    if audit {
        check_audit(&summary)?;
        run.say("energy audit passed".into());
    }
    Ok(())
}

fn execute(command: Command, run: &mut Run) -> Result<()> {
    std::fs::create_dir_all(&run.out).map_err(|e| Error::Io {
        path: run.out.clone(),
        source: e,
    })?;
    match command {
        Command::Simulate => simulate(run, false)?,
        Command::EnergyAudit => simulate(run, true)?,
        Command::Wsu => {
            let report = run_wsu(&run.cfg)?;
            for level in &report.levels {
                run.write_pair(&format!("_{}", level.n), level)?;
                run.say(format!(
                    "level {}: max E = {:.4e}, slack deficit = {:.4e}, k = {:.4}",
                    level.n,
                    level.max_entropy(),
                    level.slack_deficit(),
                    level.fit.k
                ));
            }
            run.say(format!("ratios of max E between levels = {:?}", report.ratios()));
            run.say(format!("monotone decrease = {}", report.is_monotone()));
        }
        Command::ReiCheck => {
            let levels = &run.cfg.levels;
            if levels.len() < 2 {
                return Err(Error::InvalidParameter(
                    "grid.levels: need a coarse level and a reference".into(),
                ));
            }
            let mut cfg = run.cfg.clone();
            cfg.levels = levels[levels.len() - 2..].to_vec();
            let report = run_wsu(&cfg)?;
            let level = &report.levels[0];
            run.write_pair("", level)?;
            run.say(format!(
                "level {} against {}: worst slack / (1 + |lhs|) = {:.4e}, deficit = {:.4e}",
                level.n,
                cfg.levels[1],
                level.worst_relative_slack(),
                level.slack_deficit()
            ));
        }
        Command::Perturb => {
            let report = run_perturbation(&run.cfg, run.cfg.delta)?;
            run.write_pair("", &report)?;
            run.say(format!(
                "delta = {:e}: E(0) = {:.4e}, final E/E(0) = {:.4}, k = {:.4}, bound violated = {}",
                run.cfg.delta,
                report.trace.entropy[0],
                report.normalized_entropy().last().copied().unwrap_or(f64::NAN),
                report.fit.k,
                report.fit.violated
            ));
        }
        Command::Mms => {
            let report = run_manufactured(&run.cfg, &MmsSettings::default())?;
            let p = run.path("mms_spatial.csv");
            write_rows(&p, &convergence_rows(&report.spatial))?;
            let p = run.path("mms_temporal.csv");
            write_rows(&p, &convergence_rows(&report.temporal))?;
            run.say(format!("spatial orders = {:?}", report.spatial.orders));
            run.say(format!("temporal order = {:.4}", report.temporal.order()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = load_config(&cli.config).and_then(|cfg| {
        let out = std::env::var_os("NSAC_OUT")
            .map(PathBuf::from)
            .or(cli.out.clone())
            .unwrap_or_else(|| cfg.output_dir.clone());
        let mut run = Run {
            manifest: RunManifest::start(cli.command.name(), &cfg),
            cfg,
            out,
            quiet: cli.quiet,
        };
        let started = Instant::now();
        let outcome = execute(cli.command, &mut run);
        run.manifest.wall_seconds = started.elapsed().as_secs_f64();
        if let Err(e) = &outcome {
            run.manifest.summary.push(format!("error: {e}"));
        }
        let manifest = run.out.join("manifest.txt");
        if run.out.is_dir() {
            run.manifest.write(&manifest)?;
        }
        outcome
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nsac: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
