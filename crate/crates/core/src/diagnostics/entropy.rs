//! Relative entropy between two trajectories, the itemised terms of the
//! relative entropy inequality and the Poincaré-type check on concentrations.

use super::gronwall::cumulative_trapezoid;
use super::viscous_dissipation;
use crate::error::{Error, Result};
use crate::grid::stencil::{self, Ghost};
use crate::grid::{face_dot, gradient, integrate, laplacian, FaceVectorField, Grid, ScalarField};
use crate::potential::Potential;
use crate::solver::{convective_derivative, FluidParams, State};

/// Time levels of one run together with the material derivative of every
/// step between consecutive levels.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    states: Vec<State>,
    material_derivatives: Vec<ScalarField>,
}

impl Trajectory {
    pub fn new(states: Vec<State>, material_derivatives: Vec<ScalarField>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyTrace);
        }
        if material_derivatives.len() + 1 != states.len() {
            return Err(Error::Sampling(format!(
                "{} levels need {} material derivatives, got {}",
                states.len(),
                states.len() - 1,
                material_derivatives.len()
            )));
        }
        let g = *states[0].grid();
        if states.iter().any(|s| *s.grid() != g) || material_derivatives.iter().any(|m| *m.grid() != g) {
            return Err(Error::GridMismatch("trajectory mixes grids".into()));
        }
        Ok(Trajectory {
            states,
            material_derivatives,
        })
    }

    /// Build the material derivatives `(c_{n+1} - c_n) / dt + u_n . grad c_n`
    /// from the levels alone.
    pub fn from_states(states: Vec<State>) -> Result<Self> {
        let material = states.windows(2).map(|w| material_derivative(&w[0], &w[1])).collect();
        Trajectory::new(states, material)
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn material_derivatives(&self) -> &[ScalarField] {
        &self.material_derivatives
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn grid(&self) -> &Grid {
        self.states[0].grid()
    }
}

fn check_pair(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("trajectories live on different grids".into()));
    }
    if a.states.len() != b.states.len() {
        return Err(Error::Sampling(format!(
            "{} vs {} time levels",
            a.states.len(),
            b.states.len()
        )));
    }
    for (x, y) in a.states.iter().zip(&b.states) {
        if (x.t - y.t).abs() > 1e-9 * (1.0 + x.t.abs()) {
            return Err(Error::Sampling(format!("time stamps {} and {} differ", x.t, y.t)));
        }
    }
    Ok(())
}

/// Kinetic and interfacial parts of the relative entropy of `weak` with
/// respect to `strong`.
pub fn relative_entropy_parts(weak: &State, strong: &State, params: &FluidParams) -> Result<(f64, f64)> {
    if weak.grid() != strong.grid() {
        return Err(Error::GridMismatch(
            "relative entropy of states on different grids".into(),
        ));
    }
    let e = weak.u.axpy(-1.0, &strong.u);
    let gd = gradient(&weak.c.zip_map(&strong.c, |a, b| a - b));
    Ok((0.5 * face_dot(&e, &e), 0.5 * params.eps() * face_dot(&gd, &gd)))
}

pub fn relative_entropy(weak: &State, strong: &State, params: &FluidParams) -> Result<f64> {
    let (k, i) = relative_entropy_parts(weak, strong, params)?;
    Ok(k + i)
}

/// Cumulative terms of the relative entropy inequality at one time level.
/// The left-hand side is `lhs_entropy_gap + lhs_visc + lhs_ac`; the
/// right-hand side is the sum of the `r_*` terms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReiReport {
    pub t: f64,
    pub lhs_entropy_gap: f64,
    pub lhs_visc: f64,
    pub lhs_ac: f64,
    pub r_conv: f64,
    pub r_eps1: f64,
    pub r_eps2: f64,
    pub r_eps3: f64,
    pub r_eps4: f64,
    pub r_f: f64,
    pub slack: f64,
}

impl ReiReport {
    pub fn lhs(&self) -> f64 {
        self.lhs_entropy_gap + self.lhs_visc + self.lhs_ac
    }

    pub fn rhs(&self) -> f64 {
        self.r_conv + self.r_eps1 + self.r_eps2 + self.r_eps3 + self.r_eps4 + self.r_f
    }
}

/// Relative entropy, dissipation difference and Gronwall weight per level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RelEntropyTrace {
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    /// Time-integrated viscous and Allen–Cahn dissipation of the difference.
    pub dissipation: Vec<f64>,
    /// `1 + max|U|^2 + max|grad C|^2`.
    pub omega: Vec<f64>,
}

/// Cell-centred values of a face field.
fn cell_vectors(v: &FaceVectorField) -> Vec<Vec<f64>> {
    v.cell_averaged()
}

/// `grad[j][i]` = derivative along `j` of component `i`, at cell centres.
/// Off-diagonal entries are edge differences averaged to the cell.
fn velocity_gradient(v: &FaceVectorField) -> Vec<Vec<Vec<f64>>> {
    let g = *v.grid();
    let dim = g.dim();
    let entry = |j: usize, i: usize| {
        let faces = g.faces(i);
        if i == j {
            stencil::diff_to_cells(v.component(i), faces, i, g.h()[i])
        } else {
            let edge = stencil::diff_to_nodes(v.component(i), faces, j, g.h()[j], Ghost::Antisymmetric);
            let layout = faces.to_nodes(j);
            let half = stencil::avg_to_cells(&edge, layout, i);
            stencil::avg_to_cells(&half, layout.to_cells(i), j)
        }
    };
    (0..dim).map(|j| (0..dim).map(|i| entry(j, i)).collect()).collect()
}

struct LevelTerms {
    entropy: f64,
    visc: f64,
    r_conv: f64,
    r_eps: [f64; 4],
    omega: f64,
    /// `F'(c) - F'(C)` per cell.
    force_gap: Vec<f64>,
}

fn level_terms(weak: &State, strong: &State, well: &impl Potential, params: &FluidParams) -> LevelTerms {
    let g = *weak.grid();
    let dim = g.dim();
    let eps = params.eps();
    let vol = g.cell_volume();
    let e = weak.u.axpy(-1.0, &strong.u);
    let d = weak.c.zip_map(&strong.c, |a, b| a - b);

    let ec = cell_vectors(&e);
    let uc = cell_vectors(&strong.u);
    let grad_e = velocity_gradient(&e);
    let gd = gradient(&d).cell_averaged();
    let gc = gradient(&strong.c).cell_averaged();
    let lap_d = laplacian(&d);

    let mut r_conv = 0.0;
    let mut r_eps = [0.0; 4];
    let mut max_u2: f64 = 0.0;
    let mut max_gc2: f64 = 0.0;
    for cell in 0..g.cell_count() {
        let mut u2 = 0.0;
        let mut gc2 = 0.0;
        let mut u_dot_gd = 0.0;
        let mut e_dot_gc = 0.0;
        for i in 0..dim {
            u2 += uc[i][cell] * uc[i][cell];
            gc2 += gc[i][cell] * gc[i][cell];
            u_dot_gd += uc[i][cell] * gd[i][cell];
            e_dot_gc += ec[i][cell] * gc[i][cell];
        }
        max_u2 = max_u2.max(u2);
        max_gc2 = max_gc2.max(gc2);
        let mut conv = 0.0;
        let mut eps2 = 0.0;
        let mut eps3 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let dij = grad_e[i][j][cell];
                conv += ec[i][cell] * uc[j][cell] * dij;
                eps2 += gc[i][cell] * gd[j][cell] * dij;
                eps3 += gd[i][cell] * gc[j][cell] * dij;
            }
        }
        let ld = lap_d.values()[cell];
        r_conv += conv;
        r_eps[0] += ld * u_dot_gd;
        r_eps[1] += eps2;
        r_eps[2] += eps3;
        r_eps[3] += ld * e_dot_gc;
    }
    let force_gap = weak
        .c
        .values()
        .iter()
        .zip(strong.c.values())
        .map(|(&a, &b)| well.derivative(a) - well.derivative(b))
        .collect();
    let (kin, inter) = (0.5 * face_dot(&e, &e), {
        let gdf = gradient(&d);
        0.5 * eps * face_dot(&gdf, &gdf)
    });
    LevelTerms {
        entropy: kin + inter,
        visc: viscous_dissipation(&e, params.nu()),
        r_conv: vol * r_conv,
        r_eps: r_eps.map(|r| eps * vol * r),
        omega: 1.0 + max_u2 + max_gc2,
        force_gap,
    }
}

/// Incremental evaluation of the relative entropy inequality along a pair
/// of runs advanced in lockstep, so that neither trajectory has to be kept.
pub struct PairAnalyser<'a, P: Potential> {
    well: &'a P,
    params: FluidParams,
    weak: State,
    strong: State,
    terms: LevelTerms,
    e0: f64,
    acc: ReiReport,
    reports: Vec<ReiReport>,
    trace: RelEntropyTrace,
}

fn material_derivative(prev: &State, next: &State) -> ScalarField {
    let dt = next.t - prev.t;
    let adv = convective_derivative(&prev.u, &prev.c);
    next.c.zip_map(&prev.c, |a, b| (a - b) / dt).zip_map(&adv, |a, b| a + b)
}

impl<'a, P: Potential> PairAnalyser<'a, P> {
    pub fn new(weak: &State, strong: &State, well: &'a P, params: &FluidParams) -> Result<Self> {
        if weak.grid() != strong.grid() {
            return Err(Error::GridMismatch("trajectories live on different grids".into()));
        }
        check_times(weak, strong)?;
        let terms = level_terms(weak, strong, well, params);
        let acc = ReiReport {
            t: weak.t,
            ..Default::default()
        };
        let trace = RelEntropyTrace {
            times: vec![weak.t],
            entropy: vec![terms.entropy],
            dissipation: vec![0.0],
            omega: vec![terms.omega],
        };
        Ok(PairAnalyser {
            well,
            params: *params,
            weak: weak.clone(),
            strong: strong.clone(),
            e0: terms.entropy,
            terms,
            acc,
            reports: vec![acc],
            trace,
        })
    }

    /// Add the next level of both runs. `weak_material` is the material
    /// derivative of the weak step; it is rebuilt from the levels if absent.
    pub fn push(&mut self, weak: &State, weak_material: Option<&ScalarField>, strong: &State) -> Result<()> {
        if weak.grid() != self.weak.grid() || strong.grid() != self.weak.grid() {
            return Err(Error::GridMismatch("trajectories live on different grids".into()));
        }
        check_times(weak, strong)?;
        let g = *weak.grid();
        let dt = weak.t - self.weak.t;
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::Sampling(format!(
                "time does not advance from {} to {}",
                self.weak.t, weak.t
            )));
        }
        let rebuilt;
        let m = match weak_material {
            Some(m) => m,
            None => {
                rebuilt = material_derivative(&self.weak, weak);
                &rebuilt
            }
        };
        let big_m = material_derivative(&self.strong, strong);
        let b = level_terms(weak, strong, self.well, &self.params);
        let a = &self.terms;
        let trap = |x: f64, y: f64| 0.5 * dt * (x + y);
        let acc = &mut self.acc;
        acc.lhs_visc += trap(a.visc, b.visc);
        acc.r_conv += trap(a.r_conv, b.r_conv);
        acc.r_eps1 += trap(a.r_eps[0], b.r_eps[0]);
        acc.r_eps2 += trap(a.r_eps[1], b.r_eps[1]);
        acc.r_eps3 += trap(a.r_eps[2], b.r_eps[2]);
        acc.r_eps4 += trap(a.r_eps[3], b.r_eps[3]);
        let mut ac = 0.0;
        let mut rf = 0.0;
        for cell in 0..g.cell_count() {
            let gap = m.values()[cell] - big_m.values()[cell];
            ac += gap * gap;
            rf += 0.5 * (a.force_gap[cell] + b.force_gap[cell]) * gap;
        }
        acc.lhs_ac += dt * g.cell_volume() * ac;
        acc.r_f -= dt * g.cell_volume() * rf / self.params.eps();
        acc.t = weak.t;
        acc.lhs_entropy_gap = b.entropy - self.e0;
        acc.slack = acc.rhs() - acc.lhs();
        self.reports.push(*acc);
        self.trace.times.push(weak.t);
        self.trace.entropy.push(b.entropy);
        self.trace.dissipation.push(acc.lhs_visc + acc.lhs_ac);
        self.trace.omega.push(b.omega);
        self.terms = b;
        self.weak = weak.clone();
        self.strong = strong.clone();
        Ok(())
    }

    pub fn trace(&self) -> &RelEntropyTrace {
        &self.trace
    }

    pub fn finish(self) -> (Vec<ReiReport>, RelEntropyTrace) {
        (self.reports, self.trace)
    }
}

fn check_times(x: &State, y: &State) -> Result<()> {
    if (x.t - y.t).abs() > 1e-9 * (1.0 + x.t.abs()) {
        return Err(Error::Sampling(format!("time stamps {} and {} differ", x.t, y.t)));
    }
    Ok(())
}

fn analyse(
    weak: &Trajectory,
    strong: &Trajectory,
    well: &impl Potential,
    params: &FluidParams,
) -> Result<(Vec<ReiReport>, RelEntropyTrace)> {
    check_pair(weak, strong)?;
    let mut an = PairAnalyser::new(&weak.states[0], &strong.states[0], well, params)?;
    for n in 1..weak.states.len() {
        an.push(
            &weak.states[n],
            Some(&weak.material_derivatives[n - 1]),
            &strong.states[n],
        )?;
    }
    Ok(an.finish())
}

/// Itemised relative entropy inequality along a pair of trajectories sharing
/// grid and time levels. Level-wise integrands use the trapezoid rule in
/// time; terms involving material derivatives are integrated step by step.
/// The strong material derivative is formed from the strong levels with the
/// same formula the scheme uses.
pub fn rei_terms(
    weak: &Trajectory,
    strong: &Trajectory,
    well: &impl Potential,
    params: &FluidParams,
) -> Result<Vec<ReiReport>> {
    Ok(analyse(weak, strong, well, params)?.0)
}

pub fn relative_entropy_trace(
    weak: &Trajectory,
    strong: &Trajectory,
    well: &impl Potential,
    params: &FluidParams,
) -> Result<RelEntropyTrace> {
    Ok(analyse(weak, strong, well, params)?.1)
}

/// Both the itemised inequality and the entropy trace in one pass.
pub fn rei_and_trace(
    weak: &Trajectory,
    strong: &Trajectory,
    well: &impl Potential,
    params: &FluidParams,
) -> Result<(Vec<ReiReport>, RelEntropyTrace)> {
    analyse(weak, strong, well, params)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoincareReport {
    pub k_est: f64,
    pub ratio_curve: Vec<f64>,
    /// Whether both runs start from the same concentration, as the estimate
    /// assumes.
    pub applicable: bool,
}

/// Guard added to the right-hand side of the ratio.
pub const POINCARE_GUARD: f64 = 1e-14;

/// Smallest `K` with `int (c1 - c2)^2 (t) <= K int_0^t int |grad(c1 - c2)|^2 + |u1 - u2|^2`
/// at every level.
pub fn poincare_check(first: &Trajectory, second: &Trajectory) -> Result<PoincareReport> {
    check_pair(first, second)?;
    let mut lhs = Vec::with_capacity(first.states.len());
    let mut rate = Vec::with_capacity(first.states.len());
    for (a, b) in first.states.iter().zip(&second.states) {
        let d = a.c.zip_map(&b.c, |x, y| x - y);
        lhs.push(integrate(&d.map(|v| v * v)));
        let gd = gradient(&d);
        let e = a.u.axpy(-1.0, &b.u);
        rate.push(face_dot(&gd, &gd) + face_dot(&e, &e));
    }
    let rhs = cumulative_trapezoid(&first.times(), &rate);
    let ratio_curve: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l / (r + POINCARE_GUARD)).collect();
    let k_est = ratio_curve.iter().cloned().fold(0.0, f64::max);
    let applicable = first.states[0].c == second.states[0].c;
    Ok(PoincareReport {
        k_est,
        ratio_curve,
        applicable,
    })
}
