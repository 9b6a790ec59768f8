//! Time integration of the coupled Navier–Stokes / Allen–Cahn system.
//!
//! One step is a first-order splitting: a stabilised linearly implicit
//! Allen–Cahn update transported by the old velocity, then a momentum update
//! (skew-symmetric advection linearised about the old velocity, implicit
//! viscosity, capillary force) followed by a Chorin pressure projection.
//! With the advected velocity taken at the new level the advection term does
//! no work.

pub mod linear;
pub mod operators;

use crate::error::{Error, Result};
use crate::grid::{divergence, gradient, FaceVectorField, Grid, ScalarBc, ScalarField, VectorBc};
use crate::potential::Potential;

pub use linear::{bicgstab, conjugate_gradient};
pub use operators::{
    capillary_force, cfl_number, convective_derivative, skew_advection, vector_laplacian, weighted_gradient,
};

/// Relative residual of every linear solve in a step.
pub const SOLVER_TOLERANCE: f64 = 1e-10;
/// Steps whose advective CFL number exceeds this are rejected.
pub const CFL_LIMIT: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluidParams {
    nu: f64,
    eps: f64,
}

impl FluidParams {
    pub fn new(nu: f64, eps: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("viscosity must be positive, got {nu}")));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "interface width must be positive, got {eps}"
            )));
        }
        Ok(FluidParams { nu, eps })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl Default for FluidParams {
    fn default() -> Self {
        FluidParams { nu: 0.01, eps: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: FaceVectorField,
    pub c: ScalarField,
    pub p: ScalarField,
}

impl State {
    /// State at time `t` with zero pressure. Fails if the fields live on
    /// different grids.
    pub fn new(t: f64, u: FaceVectorField, c: ScalarField) -> Result<Self> {
        if u.grid() != c.grid() {
            return Err(Error::GridMismatch("velocity and concentration grids differ".into()));
        }
        let g = *c.grid();
        Ok(State {
            t,
            u: u.with_bc(VectorBc::DirichletZero),
            c: c.with_bc(ScalarBc::NeumannZero),
            p: ScalarField::zeros(g, ScalarBc::None),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.c.grid()
    }

    /// `max |div u| / (1 + max|u| / min h)`: at most 1e-8 after a projection.
    pub fn divergence_defect(&self) -> f64 {
        let g = self.grid();
        divergence(&self.u).max_abs() / (1.0 + self.u.max_abs() / g.min_h())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// `(c_new - c) / dt + u . grad c` over the step.
    pub material_derivative: ScalarField,
    pub poisson_iterations: usize,
    pub cfl: f64,
}

/// How the capillary force enters the momentum equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CapillaryForm {
    /// `avg(mu) grad c_old`, with `mu` the discrete chemical potential of the
    /// Allen–Cahn update. Its work exactly cancels the transport term of the
    /// concentration energy.
    #[default]
    ChemicalPotential,
    /// `-eps avg(lap c_new) grad c_new`.
    Korteweg,
}

/// Extra body terms for manufactured solutions, evaluated at the new time level.
#[derive(Clone, Debug, Default)]
pub struct Forcing {
    pub concentration: Option<ScalarField>,
    pub momentum: Option<FaceVectorField>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepOptions {
    pub capillary: CapillaryForm,
}

fn max_iterations(g: &Grid) -> usize {
    10 * g.cell_count()
}

struct AllenCahnUpdate {
    c_new: ScalarField,
    material_derivative: ScalarField,
    chemical_potential: ScalarField,
}

fn allen_cahn_update(
    state: &State,
    well: &impl Potential,
    params: &FluidParams,
    dt: f64,
    source: Option<&ScalarField>,
) -> Result<AllenCahnUpdate> {
    check_dt(dt)?;
    let g = *state.grid();
    let eps = params.eps;
    let sigma = well.lipschitz() / (2.0 * eps);
    let diag = 1.0 / dt + sigma;
    let transport = convective_derivative(&state.u, &state.c);
    let c = state.c.values();
    let mut rhs: Vec<f64> = c
        .iter()
        .zip(transport.values())
        .map(|(&ci, &adv)| diag * ci - adv - well.derivative(ci) / eps)
        .collect();
    if let Some(s) = source {
        rhs.iter_mut().zip(s.values()).for_each(|(r, s)| *r += s);
    }
    let mut c_new = c.to_vec();
    conjugate_gradient(
        "helmholtz",
        |x, out| {
            operators::apply_neg_laplacian(&g, x, out);
            out.iter_mut().zip(x).for_each(|(o, xi)| *o = eps * *o + diag * xi);
        },
        &rhs,
        &mut c_new,
        SOLVER_TOLERANCE,
        max_iterations(&g),
        false,
    )?;
    let material: Vec<f64> = c_new
        .iter()
        .zip(c)
        .zip(transport.values())
        .map(|((cn, co), adv)| (cn - co) / dt + adv)
        .collect();
    // mu = -m, plus the source so that mu is the potential the flow sees
    let mu: Vec<f64> = match source {
        Some(s) => material.iter().zip(s.values()).map(|(m, s)| s - m).collect(),
        None => material.iter().map(|m| -m).collect(),
    };
    Ok(AllenCahnUpdate {
        c_new: ScalarField::from_raw(g, c_new, ScalarBc::NeumannZero),
        material_derivative: ScalarField::from_raw(g, material, ScalarBc::None),
        chemical_potential: ScalarField::from_raw(g, mu, ScalarBc::None),
    })
}

/// Stabilised semi-implicit Allen–Cahn update with the current velocity.
/// Returns the new concentration and the discrete material derivative.
pub fn allen_cahn_step(
    state: &State,
    well: &impl Potential,
    params: &FluidParams,
    dt: f64,
) -> Result<(ScalarField, ScalarField)> {
    let up = allen_cahn_update(state, well, params, dt, None)?;
    Ok((up.c_new, up.material_derivative))
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")))
    }
}

fn check_cfl(u: &FaceVectorField, dt: f64) -> Result<f64> {
    let cfl = cfl_number(u, dt);
    if !cfl.is_finite() || cfl > CFL_LIMIT {
        return Err(Error::CflViolation { cfl, limit: CFL_LIMIT });
    }
    Ok(cfl)
}

/// Velocity and pressure update for a given body force. Returns the new
/// velocity, pressure and the Poisson iteration count.
fn advance_velocity(
    state: &State,
    force: &FaceVectorField,
    params: &FluidParams,
    dt: f64,
) -> Result<(FaceVectorField, ScalarField, usize)> {
    let g = *state.grid();
    let half_nu = 0.5 * params.nu;
    let mut comps = Vec::with_capacity(g.dim());
    for a in 0..g.dim() {
        let mut rhs: Vec<f64> = state
            .u
            .component(a)
            .iter()
            .zip(force.component(a))
            .map(|(u, f)| u / dt + f)
            .collect();
        crate::grid::stencil::zero_boundary_nodes(&mut rhs, g.faces(a), a);
        let mut x = state.u.component(a).to_vec();
        // (I/dt - (nu/2) lap + A(u_old)) u* = u_old/dt + f
        bicgstab(
            "momentum",
            |v, out| {
                let lap = operators::component_laplacian(&g, v, a);
                let adv = operators::advect_component(&g, &state.u, v, a);
                for (((o, vi), l), c) in out.iter_mut().zip(v).zip(lap).zip(adv) {
                    *o = vi / dt - half_nu * l + c;
                }
            },
            &rhs,
            &mut x,
            SOLVER_TOLERANCE,
            max_iterations(&g),
        )?;
        comps.push(x);
    }
    let tentative = FaceVectorField::from_raw(g, comps, VectorBc::DirichletZero);

    // -lap p = -div(u*) / dt
    let rhs: Vec<f64> = divergence(&tentative).values().iter().map(|d| -d / dt).collect();
    let mut p = state.p.values().to_vec();
    let iterations = conjugate_gradient(
        "poisson",
        |x, out| operators::apply_neg_laplacian(&g, x, out),
        &rhs,
        &mut p,
        SOLVER_TOLERANCE,
        max_iterations(&g),
        true,
    )?;
    let p = ScalarField::from_raw(g, p, ScalarBc::None);
    let u = tentative.axpy(-dt, &gradient(&p));
    Ok((u, p, iterations))
}

/// Momentum update with the Korteweg capillary force of `c_new`, followed by
/// the pressure projection. The concentration of the result is `c_new`.
pub fn momentum_step(state: &State, c_new: &ScalarField, params: &FluidParams, dt: f64) -> Result<State> {
    check_dt(dt)?;
    check_cfl(&state.u, dt)?;
    let force = capillary_force(c_new, params.eps);
    let (u, p, _) = advance_velocity(state, &force, params, dt)?;
    Ok(State {
        t: state.t + dt,
        u,
        c: c_new.clone(),
        p,
    })
}

/// One full time step with the default scheme.
pub fn step(state: &State, well: &impl Potential, params: &FluidParams, dt: f64) -> Result<(State, StepReport)> {
    step_with(state, well, params, dt, StepOptions::default(), &Forcing::default())
}

/// One full time step with explicit scheme options and body forcing.
pub fn step_with(
    state: &State,
    well: &impl Potential,
    params: &FluidParams,
    dt: f64,
    options: StepOptions,
    forcing: &Forcing,
) -> Result<(State, StepReport)> {
    check_dt(dt)?;
    let cfl = check_cfl(&state.u, dt)?;
    let ac = allen_cahn_update(state, well, params, dt, forcing.concentration.as_ref())?;
    let mut force = match options.capillary {
        CapillaryForm::ChemicalPotential => weighted_gradient(&ac.chemical_potential, &state.c),
        CapillaryForm::Korteweg => capillary_force(&ac.c_new, params.eps),
    };
    if let Some(s) = &forcing.momentum {
        force = force.axpy(1.0, s);
    }
    let (u, p, poisson_iterations) = advance_velocity(state, &force, params, dt)?;
    let next = State {
        t: state.t + dt,
        u,
        c: ac.c_new,
        p,
    };
    let report = StepReport {
        dt,
        material_derivative: ac.material_derivative,
        poisson_iterations,
        cfl,
    };
    Ok((next, report))
}
