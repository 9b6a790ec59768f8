use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::{DoubleWell, WellKind};
use crate::solver::FluidParams;

/// Initial data library.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    /// Fluid at rest in the upper well.
    Equilibrium,
    /// Disk (ball) of one phase with a tanh profile, fluid at rest.
    Bubble,
    /// Small seeded uniform noise around 0, fluid at rest.
    Spinodal,
    /// Single vortex from a stream function, single phase.
    Vortex,
    /// Smooth analytic fields driven by source terms.
    Manufactured,
}

impl InitKind {
    pub const ALL: [InitKind; 5] = [
        InitKind::Equilibrium,
        InitKind::Bubble,
        InitKind::Spinodal,
        InitKind::Vortex,
        InitKind::Manufactured,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InitKind::Equilibrium => "equilibrium",
            InitKind::Bubble => "bubble",
            InitKind::Spinodal => "spinodal",
            InitKind::Vortex => "vortex",
            InitKind::Manufactured => "manufactured",
        }
    }
}

impl std::str::FromStr for InitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InitKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown initial data kind {s:?}")))
    }
}

/// Everything a run needs. Keys of the config file are given in brackets.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// [grid.dim]
    pub dim: usize,
    /// [grid.n] resolution of single-grid runs; also the reference
    /// resolution for `dt`.
    pub n: usize,
    /// [grid.levels] resolutions of refinement studies, strictly increasing.
    pub levels: Vec<usize>,
    /// [grid.length] edge length of the square (cubic) domain.
    pub length: f64,
    /// [fluid.nu]
    pub nu: f64,
    /// [fluid.eps]
    pub eps: f64,
    /// [time.dt] step at resolution `n`; other resolutions keep `dt * n` fixed.
    pub dt: f64,
    /// [time.t_end]
    pub t_end: f64,
    /// [potential.kind]
    pub potential: WellKind,
    /// [potential.f1], [potential.f2]
    pub interval: (f64, f64),
    /// [init.kind]
    pub init: InitKind,
    /// [init.seed]
    pub seed: u64,
    /// [init.radius] bubble radius.
    pub radius: f64,
    /// [init.noise] half-width of the spinodal noise.
    pub noise: f64,
    /// [init.stream] stream-function amplitude of vortex and manufactured data.
    pub stream: f64,
    /// [perturbation.delta]
    pub delta: f64,
    /// [output.dir]
    pub output_dir: PathBuf,
    /// [output.every] steps between VTK snapshots; 0 disables them.
    pub output_every: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: 2,
            n: 64,
            levels: vec![32, 64, 128],
            length: 1.0,
            nu: 0.01,
            eps: 0.05,
            dt: 2.5e-4,
            t_end: 0.5,
            potential: WellKind::Quartic,
            interval: (-2.0, 2.0),
            init: InitKind::Bubble,
            seed: 42,
            radius: 0.25,
            noise: 0.05,
            stream: 0.3,
            delta: 1e-2,
            output_dir: PathBuf::from("out"),
            output_every: 0,
        }
    }
}

impl ExperimentConfig {
    /// Check every value range; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::InvalidParameter(format!("{key}: {msg}")));
        if self.dim != 2 && self.dim != 3 {
            return bad("grid.dim", format!("must be 2 or 3, got {}", self.dim));
        }
        if self.n < 4 {
            return bad("grid.n", format!("need at least 4 cells, got {}", self.n));
        }
        if self.levels.is_empty() || self.levels[0] < 4 || self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return bad(
                "grid.levels",
                format!("must be strictly increasing and at least 4, got {:?}", self.levels),
            );
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return bad("grid.length", format!("must be positive, got {}", self.length));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad("fluid.nu", format!("must be positive, got {}", self.nu));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("fluid.eps", format!("must be positive, got {}", self.eps));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("time.dt", format!("must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("time.t_end", format!("must be positive, got {}", self.t_end));
        }
        if let Err(e) = DoubleWell::quartic(self.interval.0, self.interval.1) {
            return bad("potential.f1", e.to_string());
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad("init.radius", format!("must be positive, got {}", self.radius));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("init.noise", format!("must be non-negative, got {}", self.noise));
        }
        if !self.stream.is_finite() {
            return bad("init.stream", format!("must be finite, got {}", self.stream));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(
                "perturbation.delta",
                format!("must be non-negative, got {}", self.delta),
            );
        }
        if self.init == InitKind::Manufactured && self.dim != 2 {
            return bad("init.kind", "manufactured data is two-dimensional".into());
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FluidParams> {
        FluidParams::new(self.nu, self.eps)
    }

    pub fn well(&self) -> Result<DoubleWell> {
        match self.potential {
            WellKind::Quartic => DoubleWell::quartic(self.interval.0, self.interval.1),
        }
    }

    /// Grid with `n` cells per axis on the configured domain.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::uniform(self.dim, n, self.length)
    }

    /// Step at resolution `n`, keeping `dt * n` fixed.
    pub fn dt_for(&self, n: usize) -> f64 {
        self.dt * self.n as f64 / n as f64
    }

    /// Number of steps of size `dt` covering the horizon.
    pub fn steps_for(&self, dt: f64) -> usize {
        ((self.t_end / dt).round() as usize).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_documented_values() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(
            (c.eps, c.nu, c.n, c.dt, c.t_end, c.seed),
            (0.05, 0.01, 64, 2.5e-4, 0.5, 42)
        );
        assert_eq!(c.potential, WellKind::Quartic);
    }

    #[test]
    fn time_step_scales_with_resolution() {
        let c = ExperimentConfig::default();
        assert_eq!(c.dt_for(64), 2.5e-4);
        assert_eq!(c.dt_for(32), 5e-4);
        assert_eq!(c.dt_for(128), 1.25e-4);
        assert_eq!(c.steps_for(c.dt_for(32)), 1000);
    }

    #[test]
    fn invalid_values_name_their_key() {
        let mut c = ExperimentConfig {
            nu: -1.0,
            ..Default::default()
        };
        assert!(c.validate().unwrap_err().to_string().contains("fluid.nu"));
        c.nu = 0.01;
        c.levels = vec![64, 32];
        assert!(c.validate().unwrap_err().to_string().contains("grid.levels"));
        c.levels = vec![32];
        c.interval = (-0.5, 2.0);
        assert!(c.validate().unwrap_err().to_string().contains("potential"));
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for k in InitKind::ALL {
            assert_eq!(k.name().parse::<InitKind>().unwrap(), k);
        }
        assert!("droplet".parse::<InitKind>().is_err());
    }
}
