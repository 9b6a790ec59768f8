//! Energies, dissipation, maximum-principle checks and the relative-entropy
//! machinery evaluated on discrete trajectories.

mod entropy;
mod gronwall;

pub use entropy::{
    poincare_check, rei_and_trace, rei_terms, relative_entropy, relative_entropy_parts, relative_entropy_trace,
    PairAnalyser, PoincareReport, ReiReport, RelEntropyTrace, Trajectory,
};
pub use gronwall::{cumulative_trapezoid, gronwall_fit, GronwallFit, GRONWALL_LAMBDA};

use crate::error::{Error, Result};
use crate::grid::stencil::{self, Ghost};
use crate::grid::{face_dot, gradient, integrate, FaceVectorField, ScalarField};
use crate::potential::{DoubleWell, Potential};
use crate::solver::{FluidParams, State, StepReport};

/// Energies and dissipation rates at one time level.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    pub kinetic: f64,
    pub interfacial: f64,
    pub potential: f64,
    pub viscous_diss: f64,
    pub ac_diss: f64,
    pub cumulative_diss: f64,
}

impl EnergyReport {
    pub fn total(&self) -> f64 {
        self.kinetic + self.interfacial + self.potential
    }
}

/// Kinetic, interfacial and potential energy of a state. Dissipation fields
/// are left at zero.
pub fn total_energy(state: &State, well: &impl Potential, params: &FluidParams) -> EnergyReport {
    let eps = params.eps();
    let grad = gradient(&state.c);
    EnergyReport {
        t: state.t,
        kinetic: 0.5 * face_dot(&state.u, &state.u),
        interfacial: 0.5 * eps * face_dot(&grad, &grad),
        potential: integrate(&state.c.map(|v| well.value(v))) / eps,
        ..Default::default()
    }
}

/// `int S(grad u) : grad u` with `S = (nu/2)(grad u + grad u^T)`. Normal
/// strain rates live at cell centres, shear rates at cell edges (corners in
/// 2D) where the no-slip ghost supplies the wall values.
pub fn viscous_dissipation(u: &FaceVectorField, nu: f64) -> f64 {
    let g = *u.grid();
    let vol = g.cell_volume();
    let mut normal = 0.0;
    for i in 0..g.dim() {
        let d = stencil::diff_to_cells(u.component(i), g.faces(i), i, g.h()[i]);
        normal += d.iter().map(|v| v * v).sum::<f64>();
    }
    let mut shear = 0.0;
    for i in 0..g.dim() {
        for j in (i + 1)..g.dim() {
            let layout = g.edges(i, j);
            let dj_ui = stencil::diff_to_nodes(u.component(i), g.faces(i), j, g.h()[j], Ghost::Antisymmetric);
            let di_uj = stencil::diff_to_nodes(u.component(j), g.faces(j), i, g.h()[i], Ghost::Antisymmetric);
            let mut node = [false; 3];
            node[i] = true;
            node[j] = true;
            let w = stencil::weights(layout, node, 1.0);
            shear += dj_ui
                .iter()
                .zip(&di_uj)
                .zip(&w)
                .map(|((a, b), w)| w * (a + b) * (a + b))
                .sum::<f64>();
        }
    }
    vol * nu * (normal + 0.5 * shear)
}

/// Viscous dissipation of the state and the Allen–Cahn dissipation
/// `int m^2` of the step that produced it.
pub fn dissipation_rates(state: &State, report: &StepReport, params: &FluidParams) -> (f64, f64) {
    let m = &report.material_derivative;
    (viscous_dissipation(&state.u, params.nu()), integrate(&m.map(|v| v * v)))
}

/// Energy history of one run with time-integrated dissipation.
///
/// Dissipation over a step is charged at the step's end point
/// (`dt * (viscous(u_new) + int m^2)`), matching the implicit treatment of
/// viscosity and diffusion in the scheme.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyTrace {
    reports: Vec<EnergyReport>,
}

impl EnergyTrace {
    pub fn new(initial: &State, well: &impl Potential, params: &FluidParams) -> Self {
        let mut r = total_energy(initial, well, params);
        r.viscous_diss = viscous_dissipation(&initial.u, params.nu());
        EnergyTrace { reports: vec![r] }
    }

    pub fn from_reports(reports: Vec<EnergyReport>) -> Self {
        EnergyTrace { reports }
    }

    pub fn record(&mut self, state: &State, step: &StepReport, well: &impl Potential, params: &FluidParams) {
        let previous = self.reports.last().map_or(0.0, |r| r.cumulative_diss);
        let (viscous_diss, ac_diss) = dissipation_rates(state, step, params);
        let r = EnergyReport {
            viscous_diss,
            ac_diss,
            cumulative_diss: previous + step.dt * (viscous_diss + ac_diss),
            ..total_energy(state, well, params)
        };
        self.reports.push(r);
    }

    pub fn reports(&self) -> &[EnergyReport] {
        &self.reports
    }

    /// Audit violation after each recorded level.
    pub fn violations(&self) -> Vec<f64> {
        let Some(first) = self.reports.first() else {
            return Vec::new();
        };
        let e0 = first.total();
        let scale = if e0 > 0.0 { e0 } else { 1.0 };
        self.reports
            .iter()
            .map(|r| (r.total() + r.cumulative_diss - e0) / scale)
            .collect()
    }
}

/// Largest relative excess `(E(t) + int_0^t diss - E(0)) / E(0)` over the
/// trace; at most 0 for an energy-stable run. A vanishing initial energy is
/// measured in absolute terms.
pub fn energy_audit(trace: &[EnergyReport]) -> f64 {
    EnergyTrace::from_reports(trace.to_vec())
        .violations()
        .into_iter()
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxPrincipleBounds {
    pub m: f64,
    pub big_m: f64,
}

/// Convex hull of the initial range and the well minimisers.
pub fn max_principle_bounds(c0: &ScalarField, well: &DoubleWell) -> Result<MaxPrincipleBounds> {
    let (lo, hi) = (c0.min(), c0.max());
    let (f1, f2) = well.interval();
    if lo < f1 || hi > f2 {
        return Err(Error::InitialRange {
            min: lo,
            max: hi,
            f1,
            f2,
        });
    }
    let (y1, y2) = well.minimizers();
    Ok(MaxPrincipleBounds {
        m: lo.min(y1),
        big_m: hi.max(y2),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MaxPrincipleCheck {
    /// Cell values outside `[m - tol, M + tol]`, counted over all fields.
    pub violations: usize,
    /// Largest distance of any value from `[m, M]`.
    pub worst_excursion: f64,
}

pub fn check_max_principle<'a>(
    fields: impl IntoIterator<Item = &'a ScalarField>,
    bounds: &MaxPrincipleBounds,
    tol: f64,
) -> MaxPrincipleCheck {
    let mut out = MaxPrincipleCheck::default();
    for c in fields {
        for &v in c.values() {
            let excursion = (bounds.m - v).max(v - bounds.big_m).max(0.0);
            out.worst_excursion = out.worst_excursion.max(excursion);
            if v < bounds.m - tol || v > bounds.big_m + tol {
                out.violations += 1;
            }
        }
    }
    out
}
