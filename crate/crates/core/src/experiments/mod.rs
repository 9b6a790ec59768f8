//! Experiment drivers: single runs with energy bookkeeping, the multi-level
//! weak–strong study, the perturbation study and manufactured-solution
//! convergence.

pub mod config;
pub mod init;
pub mod restrict;

pub use config::{ExperimentConfig, InitKind};
pub use init::{initial_state, perturbation_direction, stream_velocity, Manufactured, Profile};
pub use restrict::{restrict_faces, restrict_scalar, restrict_state};

use crate::diagnostics::{
    check_max_principle, energy_audit, gronwall_fit, max_principle_bounds, EnergyTrace, GronwallFit, MaxPrincipleCheck,
    PairAnalyser, ReiReport, RelEntropyTrace,
};
use crate::error::{Error, Result};
use crate::grid::{face_dot, integrate, Grid};
use crate::potential::DoubleWell;
use crate::solver::{step, step_with, FluidParams, Forcing, State, StepOptions};

/// Largest admissible relative energy audit violation.
pub const AUDIT_TOLERANCE: f64 = 1e-6;
/// Slack allowed around the maximum principle bounds.
pub const MAX_PRINCIPLE_TOLERANCE: f64 = 1e-6;

struct Setup {
    well: DoubleWell,
    params: FluidParams,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    cfg.validate()?;
    Ok(Setup {
        well: cfg.well()?,
        params: cfg.params()?,
    })
}

fn require_unforced(cfg: &ExperimentConfig, what: &str) -> Result<()> {
    if cfg.init == InitKind::Manufactured {
        return Err(Error::InvalidParameter(format!(
            "init.kind: {what} needs unforced initial data, got manufactured"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SimulationSummary {
    pub final_state: State,
    pub energy: EnergyTrace,
    /// Largest relative energy audit violation over the run.
    pub audit: f64,
    pub max_principle: MaxPrincipleCheck,
    pub max_cfl: f64,
    pub steps: usize,
    pub dt: f64,
}

/// Run the configured initial data on `grid.n` cells up to `time.t_end`.
/// `observer` sees the initial state and every new level with its step index.
/// Manufactured data is driven by its steady source terms.
pub fn run_simulation(
    cfg: &ExperimentConfig,
    mut observer: impl FnMut(usize, &State) -> Result<()>,
) -> Result<SimulationSummary> {
    let Setup { well, params } = setup(cfg)?;
    let dt = cfg.dt;
    let steps = cfg.steps_for(dt);
    let mut state = initial_state(cfg, cfg.n)?;
    let bounds = max_principle_bounds(&state.c, &well)?;
    let source = (cfg.init == InitKind::Manufactured).then(|| Manufactured::from_config(cfg, Profile::Steady));
    let mut energy = EnergyTrace::new(&state, &well, &params);
    let mut max_principle = MaxPrincipleCheck::default();
    let mut max_cfl: f64 = 0.0;
    observer(0, &state)?;
    for k in 1..=steps {
        let forcing = match &source {
            Some(m) => m.forcing(*state.grid(), state.t + dt, &well),
            None => Forcing::default(),
        };
        let (next, report) = step_with(&state, &well, &params, dt, StepOptions::default(), &forcing)?;
        energy.record(&next, &report, &well, &params);
        let check = check_max_principle([&next.c], &bounds, MAX_PRINCIPLE_TOLERANCE);
        max_principle.violations += check.violations;
        max_principle.worst_excursion = max_principle.worst_excursion.max(check.worst_excursion);
        max_cfl = max_cfl.max(report.cfl);
        state = next;
        observer(k, &state)?;
    }
    Ok(SimulationSummary {
        final_state: state,
        audit: energy_audit(energy.reports()),
        energy,
        max_principle,
        max_cfl,
        steps,
        dt,
    })
}

/// Fails with [`Error::AuditFailed`] if the run gained energy beyond the tolerance.
pub fn check_audit(summary: &SimulationSummary) -> Result<()> {
    if summary.audit > AUDIT_TOLERANCE || summary.audit.is_nan() {
        return Err(Error::AuditFailed {
            violation: summary.audit,
            tolerance: AUDIT_TOLERANCE,
        });
    }
    Ok(())
}

/// Unforced run whose energy audit must pass.
pub fn run_energy_audit(cfg: &ExperimentConfig) -> Result<SimulationSummary> {
    require_unforced(cfg, "the energy audit")?;
    let summary = run_simulation(cfg, |_, _| Ok(()))?;
    check_audit(&summary)?;
    Ok(summary)
}

/// Relative entropy bookkeeping of one pair of runs.
#[derive(Clone, Debug)]
pub struct PairReport {
    pub n: usize,
    pub dt: f64,
    pub rei: Vec<ReiReport>,
    pub trace: RelEntropyTrace,
    pub fit: GronwallFit,
}

impl PairReport {
    fn new(n: usize, dt: f64, (rei, trace): (Vec<ReiReport>, RelEntropyTrace)) -> Result<Self> {
        let fit = gronwall_fit(&trace)?;
        Ok(PairReport { n, dt, rei, trace, fit })
    }

    pub fn max_entropy(&self) -> f64 {
        self.trace.entropy.iter().cloned().fold(0.0, f64::max)
    }

    /// `max(0, -min slack)`.
    pub fn slack_deficit(&self) -> f64 {
        self.rei.iter().map(|r| -r.slack).fold(0.0, f64::max)
    }

    /// Smallest `slack / (1 + |lhs|)` over the samples.
    pub fn worst_relative_slack(&self) -> f64 {
        self.rei
            .iter()
            .map(|r| r.slack / (1.0 + r.lhs().abs()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `E(t) / E(0)`.
    pub fn normalized_entropy(&self) -> Vec<f64> {
        let e0 = self.trace.entropy[0];
        self.trace.entropy.iter().map(|e| e / e0).collect()
    }
}

/// Weak–strong study: every level against the finest run restricted to it.
#[derive(Clone, Debug)]
pub struct WsuReport {
    /// Coarse to fine; the last entry compares the reference with itself.
    pub levels: Vec<PairReport>,
}

impl WsuReport {
    /// `max_t E(level k) / max_t E(level k+1)` over consecutive levels
    /// other than the reference.
    pub fn ratios(&self) -> Vec<f64> {
        let coarse = &self.levels[..self.levels.len() - 1];
        coarse
            .windows(2)
            .map(|w| w[0].max_entropy() / w[1].max_entropy())
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.levels.windows(2).all(|w| w[0].max_entropy() > w[1].max_entropy())
    }

    pub fn level(&self, n: usize) -> Option<&PairReport> {
        self.levels.iter().find(|l| l.n == n)
    }
}

/// Runs every level of `grid.levels` from the restricted initial data of the
/// finest one, which serves as the strong solution. All runs advance in
/// lockstep so that no trajectory is stored.
pub fn run_wsu(cfg: &ExperimentConfig) -> Result<WsuReport> {
    require_unforced(cfg, "the weak-strong study")?;
    let Setup { well, params } = setup(cfg)?;
    if cfg.levels.len() < 2 {
        return Err(Error::InvalidParameter(
            "grid.levels: need a coarse level and a reference".into(),
        ));
    }
    let finest = *cfg.levels.last().unwrap();
    let fine_dt = cfg.dt_for(finest);
    let fine_steps = cfg.steps_for(fine_dt);
    let mut fine = initial_state(cfg, finest)?;

    struct Level<'a> {
        n: usize,
        ratio: usize,
        dt: f64,
        grid: Grid,
        weak: State,
        analyser: PairAnalyser<'a, DoubleWell>,
    }
    let mut levels = Vec::new();
    for &n in &cfg.levels[..cfg.levels.len() - 1] {
        if !finest.is_multiple_of(n) {
            return Err(Error::InvalidParameter(format!(
                "grid.levels: {n} does not divide {finest}"
            )));
        }
        let ratio = finest / n;
        let dt = cfg.dt_for(n);
        if cfg.steps_for(dt) * ratio != fine_steps {
            return Err(Error::Sampling(format!(
                "level {n} does not share the time levels of {finest}"
            )));
        }
        let grid = cfg.grid(n)?;
        let weak = restrict_state(&fine, grid)?;
        let analyser = PairAnalyser::new(&weak, &weak, &well, &params)?;
        levels.push(Level {
            n,
            ratio,
            dt,
            grid,
            weak,
            analyser,
        });
    }
    let mut reference = PairAnalyser::new(&fine, &fine, &well, &params)?;

    for k in 1..=fine_steps {
        fine = step(&fine, &well, &params, fine_dt)?.0;
        reference.push(&fine, None, &fine)?;
        for level in levels.iter_mut().filter(|l| k % l.ratio == 0) {
            let (weak, report) = step(&level.weak, &well, &params, level.dt)?;
            level.weak = weak;
            let strong = restrict_state(&fine, level.grid)?;
            level
                .analyser
                .push(&level.weak, Some(&report.material_derivative), &strong)?;
        }
    }

    let mut out = Vec::with_capacity(levels.len() + 1);
    for level in levels {
        out.push(PairReport::new(level.n, level.dt, level.analyser.finish())?);
    }
    out.push(PairReport::new(finest, fine_dt, reference.finish())?);
    Ok(WsuReport { levels: out })
}

/// Two independent runs from the same data on the coarsest level, compared
/// level by level.
pub fn run_twin(cfg: &ExperimentConfig) -> Result<PairReport> {
    require_unforced(cfg, "the twin check")?;
    let Setup { well, params } = setup(cfg)?;
    let n = cfg.levels[0];
    let dt = cfg.dt_for(n);
    let mut first = initial_state(cfg, n)?;
    let mut second = initial_state(cfg, n)?;
    let mut analyser = PairAnalyser::new(&first, &second, &well, &params)?;
    for _ in 0..cfg.steps_for(dt) {
        let (a, report) = step(&first, &well, &params, dt)?;
        let (b, _) = step(&second, &well, &params, dt)?;
        first = a;
        second = b;
        analyser.push(&first, Some(&report.material_derivative), &second)?;
    }
    PairReport::new(n, dt, analyser.finish())
}

/// The configured initial data as strong solution against the same data
/// with velocity perturbed by `delta` times a unit-energy solenoidal field.
pub fn run_perturbation(cfg: &ExperimentConfig, delta: f64) -> Result<PairReport> {
    require_unforced(cfg, "the perturbation study")?;
    let Setup { well, params } = setup(cfg)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "perturbation.delta: must be positive, got {delta}"
        )));
    }
    let dt = cfg.dt;
    let mut strong = initial_state(cfg, cfg.n)?;
    let direction = perturbation_direction(*strong.grid());
    let mut weak = State::new(0.0, strong.u.axpy(delta, &direction), strong.c.clone())?;
    let mut analyser = PairAnalyser::new(&weak, &strong, &well, &params)?;
    for _ in 0..cfg.steps_for(dt) {
        let (w, report) = step(&weak, &well, &params, dt)?;
        let (s, _) = step(&strong, &well, &params, dt)?;
        weak = w;
        strong = s;
        analyser.push(&weak, Some(&report.material_derivative), &strong)?;
    }
    PairReport::new(cfg.n, dt, analyser.finish())
}

/// Errors of a refinement sequence and the observed orders between
/// consecutive entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    /// Mesh width or time step of each entry.
    pub sizes: Vec<f64>,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
}

impl ConvergenceStudy {
    pub fn new(sizes: Vec<f64>, errors: Vec<f64>) -> Self {
        let orders = sizes
            .windows(2)
            .zip(errors.windows(2))
            .map(|(s, e)| (e[0] / e[1]).ln() / (s[0] / s[1]).ln())
            .collect();
        ConvergenceStudy { sizes, errors, orders }
    }

    /// Order between the last two entries.
    pub fn order(&self) -> f64 {
        self.orders.last().copied().unwrap_or(f64::NAN)
    }
}

/// Horizons and step of the manufactured-solution studies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmsSettings {
    /// End time of the spatial study, run with the level-scaled step.
    pub spatial_horizon: f64,
    /// End time of the temporal study.
    pub temporal_horizon: f64,
    /// Largest step of the temporal study; it is halved twice.
    pub temporal_dt: f64,
    /// Amplitude of the time modulation in the temporal study.
    pub modulation: f64,
}

impl Default for MmsSettings {
    fn default() -> Self {
        MmsSettings {
            spatial_horizon: 0.05,
            temporal_horizon: 0.1,
            temporal_dt: 1e-3,
            modulation: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmsReport {
    /// Error against the exact solution over `grid.levels`.
    pub spatial: ConvergenceStudy,
    /// Differences of successive halvings of the step on the finest level.
    pub temporal: ConvergenceStudy,
}

fn distance(a: &State, b: &State) -> f64 {
    let e = a.u.axpy(-1.0, &b.u);
    let d = a.c.zip_map(&b.c, |x, y| (x - y) * (x - y));
    (face_dot(&e, &e) + integrate(&d)).sqrt()
}

fn run_forced(
    m: &Manufactured,
    g: Grid,
    well: &DoubleWell,
    params: &FluidParams,
    dt: f64,
    steps: usize,
) -> Result<State> {
    let mut state = m.exact(g, 0.0)?;
    for _ in 0..steps {
        let forcing = m.forcing(g, state.t + dt, well);
        state = step_with(&state, well, params, dt, StepOptions::default(), &forcing)?.0;
    }
    Ok(state)
}

/// Spatial order from the steady manufactured solution on `grid.levels`,
/// temporal order by self-convergence of the modulated one on the finest level.
pub fn run_manufactured(cfg: &ExperimentConfig, settings: &MmsSettings) -> Result<MmsReport> {
    let Setup { well, params } = setup(cfg)?;
    if cfg.dim != 2 {
        return Err(Error::InvalidParameter(
            "grid.dim: manufactured solutions are two-dimensional".into(),
        ));
    }
    let steady = Manufactured::from_config(cfg, Profile::Steady);
    let mut sizes = Vec::new();
    let mut errors = Vec::new();
    for &n in &cfg.levels {
        let g = cfg.grid(n)?;
        let dt = cfg.dt_for(n);
        let steps = ((settings.spatial_horizon / dt).round() as usize).max(1);
        let end = run_forced(&steady, g, &well, &params, dt, steps)?;
        let exact = steady.exact(g, end.t)?;
        sizes.push(g.h()[0]);
        errors.push(distance(&end, &exact));
    }
    let spatial = ConvergenceStudy::new(sizes, errors);

    let modulated = Manufactured::from_config(
        cfg,
        Profile::Oscillating {
            amplitude: settings.modulation,
        },
    );
    let g = cfg.grid(*cfg.levels.last().unwrap())?;
    let mut finals = Vec::new();
    let mut dts = Vec::new();
    for halvings in 0..3 {
        let dt = settings.temporal_dt / f64::from(1u32 << halvings);
        let steps = ((settings.temporal_horizon / dt).round() as usize).max(1);
        finals.push(run_forced(&modulated, g, &well, &params, dt, steps)?);
        dts.push(dt);
    }
    let diffs = vec![distance(&finals[0], &finals[1]), distance(&finals[1], &finals[2])];
    let temporal = ConvergenceStudy::new(dts[..2].to_vec(), diffs);
    Ok(MmsReport { spatial, temporal })
}
