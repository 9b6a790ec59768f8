//! Initial data and the manufactured solution.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, InitKind};
use crate::error::Result;
use crate::grid::{face_dot, FaceVectorField, Grid, ScalarBc, ScalarField, VectorBc};
use crate::potential::Potential;
use crate::solver::{Forcing, State};

/// Face velocity `curl psi`, built from differences of `psi` between the
/// edges bounding each face so that its discrete divergence vanishes
/// identically. In 3D the planar flow is damped towards the `z` walls by
/// `weight(z)`.
pub fn stream_velocity(g: Grid, psi: impl Fn(f64, f64) -> f64, weight: impl Fn(f64) -> f64) -> FaceVectorField {
    let h = g.h().to_vec();
    FaceVectorField::from_fn(g, VectorBc::DirichletZero, |a, x| {
        let w = if g.dim() == 3 { weight(x[2]) } else { 1.0 };
        match a {
            0 => w * (psi(x[0], x[1] + 0.5 * h[1]) - psi(x[0], x[1] - 0.5 * h[1])) / h[1],
            1 => -w * (psi(x[0] + 0.5 * h[0], x[1]) - psi(x[0] - 0.5 * h[0], x[1])) / h[0],
            _ => 0.0,
        }
    })
}

fn bump(length: f64) -> impl Fn(f64) -> f64 {
    move |s| (PI * s / length).sin().powi(2)
}

/// Initial state for the configured kind on a grid with `n` cells per axis.
pub fn initial_state(cfg: &ExperimentConfig, n: usize) -> Result<State> {
    let g = cfg.grid(n)?;
    let len = cfg.length;
    let rest = FaceVectorField::zeros(g, VectorBc::DirichletZero);
    let upper = ScalarField::constant(g, 1.0, ScalarBc::NeumannZero);
    match cfg.init {
        InitKind::Equilibrium => State::new(0.0, rest, upper),
        InitKind::Bubble => {
            let width = 2f64.sqrt() * cfg.eps;
            let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| {
                let r2: f64 = (0..g.dim()).map(|a| (x[a] - 0.5 * len).powi(2)).sum();
                ((cfg.radius - r2.sqrt()) / width).tanh()
            });
            State::new(0.0, rest, c)
        }
        InitKind::Spinodal => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let values = (0..g.cell_count())
                .map(|_| {
                    if cfg.noise > 0.0 {
                        rng.gen_range(-cfg.noise..=cfg.noise)
                    } else {
                        0.0
                    }
                })
                .collect();
            State::new(0.0, rest, ScalarField::new(g, values, ScalarBc::NeumannZero)?)
        }
        InitKind::Vortex => {
            let b = bump(len);
            let psi = |x: f64, y: f64| cfg.stream * b(x) * b(y);
            State::new(0.0, stream_velocity(g, psi, bump(len)), upper)
        }
        InitKind::Manufactured => Manufactured::from_config(cfg, Profile::Steady).exact(g, 0.0),
    }
}

/// Solenoidal perturbation direction with unit kinetic energy.
pub fn perturbation_direction(g: Grid) -> FaceVectorField {
    let len = g.length()[0];
    let ly = g.length()[1];
    let psi = move |x: f64, y: f64| (PI * x / len).sin().powi(2) * (2.0 * PI * y / ly).sin().powi(2);
    let v = stream_velocity(g, psi, bump(if g.dim() == 3 { g.length()[2] } else { 1.0 }));
    let ke = 0.5 * face_dot(&v, &v);
    v.scale(1.0 / ke.sqrt())
}

/// Time profile of the manufactured solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Steady,
    /// `1 + amplitude sin(2 pi t)`.
    Oscillating {
        amplitude: f64,
    },
}

impl Profile {
    fn value(&self, t: f64) -> f64 {
        match self {
            Profile::Steady => 1.0,
            Profile::Oscillating { amplitude } => 1.0 + amplitude * (2.0 * PI * t).sin(),
        }
    }

    fn rate(&self, t: f64) -> f64 {
        match self {
            Profile::Steady => 0.0,
            Profile::Oscillating { amplitude } => 2.0 * PI * amplitude * (2.0 * PI * t).cos(),
        }
    }
}

/// Smooth two-dimensional solution `psi = A P(x) P(y) g(t)` with
/// `P = sin^2(pi s / L)` for the flow and
/// `c = c0 + B cos(pi x / L) cos(pi y / L) g(t)`, together with the body terms
/// that make it exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manufactured {
    pub stream: f64,
    pub concentration: f64,
    pub offset: f64,
    pub length: f64,
    pub nu: f64,
    pub eps: f64,
    pub profile: Profile,
}

/// `P`, `P'`, `P''`, `P'''` for `P(s) = sin^2(k s)`.
fn sin2(k: f64, s: f64) -> [f64; 4] {
    let (s2, c2) = (2.0 * k * s).sin_cos();
    let sk = (k * s).sin();
    [sk * sk, k * s2, 2.0 * k * k * c2, -4.0 * k * k * k * s2]
}

impl Manufactured {
    /// The concentration stays in `[0.65, 0.95]`, inside the convex part of
    /// the quartic well.
    pub const CONCENTRATION_AMPLITUDE: f64 = 0.15;
    pub const CONCENTRATION_OFFSET: f64 = 0.8;

    pub fn from_config(cfg: &ExperimentConfig, profile: Profile) -> Self {
        Manufactured {
            stream: cfg.stream,
            concentration: Self::CONCENTRATION_AMPLITUDE,
            offset: Self::CONCENTRATION_OFFSET,
            length: cfg.length,
            nu: cfg.nu,
            eps: cfg.eps,
            profile,
        }
    }

    fn k(&self) -> f64 {
        PI / self.length
    }

    fn psi(&self, x: f64, y: f64, t: f64) -> f64 {
        let k = self.k();
        self.stream * self.profile.value(t) * (k * x).sin().powi(2) * (k * y).sin().powi(2)
    }

    /// `c`, `c_x`, `c_y`, `lap c` without the time factor.
    fn conc(&self, x: f64, y: f64) -> [f64; 4] {
        let k = self.k();
        let (sx, cx) = (k * x).sin_cos();
        let (sy, cy) = (k * y).sin_cos();
        let b = self.concentration;
        [
            b * cx * cy,
            -b * k * sx * cy,
            -b * k * cx * sy,
            -2.0 * k * k * b * cx * cy,
        ]
    }

    /// Velocity and its first and second derivatives at a point: returns
    /// `[u, u_x, u_y, lap u]` for the component along `axis`, without the
    /// time factor.
    fn vel(&self, axis: usize, x: f64, y: f64) -> [f64; 4] {
        let k = self.k();
        let a = self.stream;
        let px = sin2(k, x);
        let py = sin2(k, y);
        if axis == 0 {
            [
                a * px[0] * py[1],
                a * px[1] * py[1],
                a * px[0] * py[2],
                a * (px[2] * py[1] + px[0] * py[3]),
            ]
        } else {
            [
                -a * px[1] * py[0],
                -a * px[2] * py[0],
                -a * px[1] * py[1],
                -a * (px[3] * py[0] + px[1] * py[2]),
            ]
        }
    }

    /// Exact state at time `t`: the velocity is the discrete curl of the
    /// stream function, the concentration is sampled at cell centres.
    pub fn exact(&self, g: Grid, t: f64) -> Result<State> {
        let u = stream_velocity(g, |x, y| self.psi(x, y, t), |_| 1.0);
        let gt = self.profile.value(t);
        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| {
            self.offset + gt * self.conc(x[0], x[1])[0]
        });
        State::new(t, u, c)
    }

    /// Body terms at time `t` that balance the continuous equations.
    pub fn forcing(&self, g: Grid, t: f64, well: &impl Potential) -> Forcing {
        let gt = self.profile.value(t);
        let rate = self.profile.rate(t);
        let eps = self.eps;
        let mu = |c: [f64; 4]| -eps * gt * c[3] + well.derivative(self.offset + gt * c[0]) / eps;
        let concentration = ScalarField::from_fn(g, ScalarBc::None, |x| {
            let c = self.conc(x[0], x[1]);
            let u = self.vel(0, x[0], x[1])[0] * gt;
            let v = self.vel(1, x[0], x[1])[0] * gt;
            rate * c[0] + gt * (u * c[1] + v * c[2]) + mu(c)
        });
        let momentum = FaceVectorField::from_fn(g, VectorBc::None, |a, x| {
            let w = self.vel(a, x[0], x[1]);
            let u = self.vel(0, x[0], x[1])[0] * gt;
            let v = self.vel(1, x[0], x[1])[0] * gt;
            let c = self.conc(x[0], x[1]);
            let grad_c = gt * c[1 + a];
            rate * w[0] + gt * (u * w[1] + v * w[2]) - 0.5 * self.nu * gt * w[3] - mu(c) * grad_c
        });
        Forcing {
            concentration: Some(concentration),
            momentum: Some(momentum),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{divergence, integrate};
    use crate::potential::DoubleWell;

    fn cfg(kind: InitKind) -> ExperimentConfig {
        ExperimentConfig {
            init: kind,
            ..Default::default()
        }
    }

    #[test]
    fn bubble_is_inside_positive_outside_negative() {
        let s = initial_state(&cfg(InitKind::Bubble), 32).unwrap();
        let g = *s.grid();
        let centre = g.cells().index([16, 16, 0]);
        let corner = g.cells().index([0, 0, 0]);
        assert!(s.c.values()[centre] > 0.99);
        assert!(s.c.values()[corner] < -0.99);
        assert_eq!(s.u.max_abs(), 0.0);
    }

    #[test]
    fn spinodal_noise_is_seeded_and_bounded() {
        let a = initial_state(&cfg(InitKind::Spinodal), 16).unwrap();
        let b = initial_state(&cfg(InitKind::Spinodal), 16).unwrap();
        assert_eq!(a.c, b.c);
        assert!(a.c.max_abs() <= 0.05);
        let other = ExperimentConfig {
            seed: 7,
            ..cfg(InitKind::Spinodal)
        };
        assert_ne!(initial_state(&other, 16).unwrap().c, a.c);
    }

    #[test]
    fn stream_velocities_are_discretely_solenoidal() {
        let vortex = initial_state(&cfg(InitKind::Vortex), 24).unwrap();
        assert!(vortex.u.max_abs() > 0.1);
        assert!(divergence(&vortex.u).max_abs() < 1e-12);
        let c3 = ExperimentConfig {
            dim: 3,
            ..cfg(InitKind::Vortex)
        };
        let v3 = initial_state(&c3, 8).unwrap();
        assert!(divergence(&v3.u).max_abs() < 1e-12);
        let p = perturbation_direction(*vortex.grid());
        assert!(divergence(&p).max_abs() < 1e-10);
        assert!((0.5 * face_dot(&p, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_sits_in_the_upper_well() {
        let s = initial_state(&cfg(InitKind::Equilibrium), 8).unwrap();
        assert!(s.c.values().iter().all(|v| *v == 1.0));
    }

    #[test]
    fn manufactured_sources_vanish_for_rest_in_a_well() {
        // zero amplitudes leave c at a critical point of the well
        let m = Manufactured {
            stream: 0.0,
            concentration: 0.0,
            offset: 1.0,
            length: 1.0,
            nu: 0.01,
            eps: 0.05,
            profile: Profile::Oscillating { amplitude: 0.5 },
        };
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        let f = m.forcing(g, 0.3, &DoubleWell::default());
        assert_eq!(f.concentration.unwrap().max_abs(), 0.0);
        assert_eq!(f.momentum.unwrap().max_abs(), 0.0);
    }

    #[test]
    fn manufactured_velocity_derivatives_match_differences() {
        let m = Manufactured::from_config(&ExperimentConfig::default(), Profile::Steady);
        let (x, y, h) = (0.31, 0.62, 1e-4);
        for axis in 0..2 {
            let w = m.vel(axis, x, y);
            let f = |x: f64, y: f64| m.vel(axis, x, y)[0];
            let wx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
            let wy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
            let lap = (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
            assert!((w[1] - wx).abs() < 1e-6);
            assert!((w[2] - wy).abs() < 1e-6);
            assert!((w[3] - lap).abs() < 1e-3 * (1.0 + lap.abs()));
        }
        // velocity is the curl of the stream function
        let psi = |x: f64, y: f64| m.psi(x, y, 0.0);
        assert!((m.vel(0, x, y)[0] - (psi(x, y + h) - psi(x, y - h)) / (2.0 * h)).abs() < 1e-6);
        assert!((m.vel(1, x, y)[0] + (psi(x + h, y) - psi(x - h, y)) / (2.0 * h)).abs() < 1e-6);
    }

    #[test]
    fn manufactured_concentration_averages_to_its_offset() {
        let m = Manufactured::from_config(&ExperimentConfig::default(), Profile::Steady);
        let g = Grid::uniform(2, 16, 1.0).unwrap();
        let s = m.exact(g, 0.0).unwrap();
        assert!((integrate(&s.c) - m.offset).abs() < 1e-12);
        assert!(s.c.min() >= 0.65 && s.c.max() <= 0.95);
    }
}
