//! Velocity-side stencils on the MAC grid.

use crate::grid::stencil::{self, Ghost};
use crate::grid::{gradient, laplacian, FaceVectorField, Grid, ScalarBc, ScalarField, VectorBc};

/// Component-wise Laplacian of a face field. Normal components vanish on the
/// boundary faces; tangential no-slip is imposed through antisymmetric ghosts.
/// Boundary-normal entries of the result are zero.
pub fn vector_laplacian(v: &FaceVectorField) -> FaceVectorField {
    let g = *v.grid();
    let comps = (0..g.dim())
        .map(|a| component_laplacian(&g, v.component(a), a))
        .collect();
    FaceVectorField::from_raw(g, comps, VectorBc::DirichletZero)
}

pub(crate) fn component_laplacian(g: &Grid, va: &[f64], a: usize) -> Vec<f64> {
    let layout = g.faces(a);
    let mut out = vec![0.0; layout.len()];
    for k in 0..g.dim() {
        let h = g.h()[k];
        let term = if k == a {
            let d = stencil::diff_to_cells(va, layout, k, h);
            stencil::diff_to_nodes(&d, layout.to_cells(k), k, h, Ghost::Reflect)
        } else {
            let d = stencil::diff_to_nodes(va, layout, k, h, Ghost::Antisymmetric);
            stencil::diff_to_cells(&d, layout.to_nodes(k), k, h)
        };
        for (o, t) in out.iter_mut().zip(term) {
            *o += t;
        }
    }
    stencil::zero_boundary_nodes(&mut out, layout, a);
    out
}

/// Skew-symmetric (average of divergence and advective forms) discretisation
/// of `(w . grad) v` for face fields. For every `w` the map `v -> A(w) v`
/// satisfies `<v, A(w) v> = 0` exactly when the boundary-normal entries of `v`
/// vanish.
pub fn skew_advection(w: &FaceVectorField, v: &FaceVectorField) -> FaceVectorField {
    let g = *w.grid();
    let comps = (0..g.dim())
        .map(|i| advect_component(&g, w, v.component(i), i))
        .collect();
    FaceVectorField::from_raw(g, comps, VectorBc::DirichletZero)
}

/// Component `i` of [`skew_advection`]; it only involves `v_i`.
pub(crate) fn advect_component(g: &Grid, w: &FaceVectorField, vi: &[f64], i: usize) -> Vec<f64> {
    let li = g.faces(i);
    let mut out = vec![0.0; li.len()];
    for j in 0..g.dim() {
        let h = g.h()[j];
        let (div_part, adv_part) = if j == i {
            let transport = stencil::avg_to_cells(w.component(i), li, i);
            let lc = li.to_cells(i);
            let avg_v = stencil::avg_to_cells(vi, li, i);
            let dv = stencil::diff_to_cells(vi, li, i, h);
            let flux: Vec<f64> = transport.iter().zip(&avg_v).map(|(a, b)| a * b).collect();
            let grad: Vec<f64> = transport.iter().zip(&dv).map(|(a, b)| a * b).collect();
            (
                stencil::diff_to_nodes(&flux, lc, i, h, Ghost::Reflect),
                stencil::avg_to_nodes(&grad, lc, i, Ghost::Reflect),
            )
        } else {
            // w_j lives on j-faces, which are cell-centred along i
            let transport = stencil::avg_to_nodes(w.component(j), g.faces(j), i, Ghost::Antisymmetric);
            let le = li.to_nodes(j);
            let avg_v = stencil::avg_to_nodes(vi, li, j, Ghost::Antisymmetric);
            let dv = stencil::diff_to_nodes(vi, li, j, h, Ghost::Antisymmetric);
            let flux: Vec<f64> = transport.iter().zip(&avg_v).map(|(a, b)| a * b).collect();
            let grad: Vec<f64> = transport.iter().zip(&dv).map(|(a, b)| a * b).collect();
            (
                stencil::diff_to_cells(&flux, le, j, h),
                stencil::avg_to_cells(&grad, le, j),
            )
        };
        for ((o, d), a) in out.iter_mut().zip(div_part).zip(adv_part) {
            *o += 0.5 * (d + a);
        }
    }
    stencil::zero_boundary_nodes(&mut out, li, i);
    out
}

/// Cell-centred `u . grad c`: face products `u_k dc/dx_k` averaged to cells.
pub fn convective_derivative(u: &FaceVectorField, c: &ScalarField) -> ScalarField {
    let g = *c.grid();
    let grad = gradient(c);
    let mut out = vec![0.0; g.cell_count()];
    for k in 0..g.dim() {
        let prod: Vec<f64> = u
            .component(k)
            .iter()
            .zip(grad.component(k))
            .map(|(a, b)| a * b)
            .collect();
        let avg = stencil::avg_to_cells(&prod, g.faces(k), k);
        for (o, x) in out.iter_mut().zip(avg) {
            *o += x;
        }
    }
    ScalarField::from_raw(g, out, ScalarBc::None)
}

/// `avg(phi) * grad c` on faces: the face field whose work against any `u`
/// equals `<phi, u . grad c>` over cells.
pub fn weighted_gradient(phi: &ScalarField, c: &ScalarField) -> FaceVectorField {
    let g = *c.grid();
    let grad = gradient(c);
    let comps = (0..g.dim())
        .map(|k| {
            let avg = stencil::avg_to_nodes(phi.values(), g.cells(), k, Ghost::Reflect);
            avg.iter().zip(grad.component(k)).map(|(a, b)| a * b).collect()
        })
        .collect();
    FaceVectorField::from_raw(g, comps, VectorBc::DirichletZero)
}

/// Capillary (Korteweg) force `-eps * avg(lap c) * grad c` on faces. The
/// gradient part `grad(|grad c|^2 / 2)` of `-eps div(grad c (x) grad c)` is
/// left to the pressure.
pub fn capillary_force(c: &ScalarField, eps: f64) -> FaceVectorField {
    let lap = laplacian(c).map(|v| -eps * v);
    weighted_gradient(&lap, c)
}

/// Advective CFL number `dt * sum_k max|u_k| / h_k`.
pub fn cfl_number(u: &FaceVectorField, dt: f64) -> f64 {
    let g = u.grid();
    u.max_abs_per_axis().iter().zip(g.h()).map(|(m, h)| m / h).sum::<f64>() * dt
}

/// `-lap x` for cell-centred `x` with homogeneous Neumann walls, written as a
/// direct loop for use inside Krylov iterations.
pub(crate) fn apply_neg_laplacian(g: &Grid, x: &[f64], out: &mut [f64]) {
    let [nx, ny, nz] = g.cells().size;
    let mut inv = [0.0; 3];
    for (a, h) in g.h().iter().enumerate() {
        inv[a] = 1.0 / (h * h);
    }
    let (sy, sz) = (nx, nx * ny);
    let mut f = 0;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let v = x[f];
                let mut acc = 0.0;
                if i > 0 {
                    acc += (v - x[f - 1]) * inv[0];
                }
                if i + 1 < nx {
                    acc += (v - x[f + 1]) * inv[0];
                }
                if j > 0 {
                    acc += (v - x[f - sy]) * inv[1];
                }
                if j + 1 < ny {
                    acc += (v - x[f + sy]) * inv[1];
                }
                if k > 0 {
                    acc += (v - x[f - sz]) * inv[2];
                }
                if k + 1 < nz {
                    acc += (v - x[f + sz]) * inv[2];
                }
                out[f] = acc;
                f += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{face_dot, integrate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_faces(g: Grid, rng: &mut ChaCha8Rng) -> FaceVectorField {
        let comps = (0..g.dim())
            .map(|a| (0..g.faces(a).len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        FaceVectorField::new(g, comps, VectorBc::DirichletZero).unwrap()
    }

    #[test]
    fn advection_is_skew_for_any_transport_velocity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [
            Grid::new(2, &[7, 5], &[1.0, 0.6]).unwrap(),
            Grid::new(3, &[4, 5, 6], &[1.0, 1.0, 1.5]).unwrap(),
        ] {
            let w = random_faces(g, &mut rng);
            let v = random_faces(g, &mut rng);
            let av = skew_advection(&w, &v);
            let scale = face_dot(&v, &v) * w.max_abs() / g.min_h();
            assert!(face_dot(&v, &av).abs() < 1e-13 * scale, "{}", face_dot(&v, &av));
        }
    }

    #[test]
    fn advection_of_uniform_field_by_uniform_flow_vanishes_in_interior() {
        // v = (1, 0) transported by w = (1, 0): no gradients away from walls
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        let w = FaceVectorField::from_fn(g, VectorBc::None, |a, _| if a == 0 { 1.0 } else { 0.0 });
        let av = skew_advection(&w, &w);
        let layout = g.faces(0);
        for (idx, val) in stencil::multi_index(layout).zip(av.component(0)) {
            if (2..7).contains(&idx[0]) {
                assert!(val.abs() < 1e-12, "{idx:?} {val}");
            }
        }
    }

    #[test]
    fn vector_laplacian_is_symmetric_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = Grid::new(2, &[6, 7], &[1.0, 1.2]).unwrap();
        let a = random_faces(g, &mut rng);
        let b = random_faces(g, &mut rng);
        let ab = face_dot(&a, &vector_laplacian(&b));
        let ba = face_dot(&b, &vector_laplacian(&a));
        assert!((ab - ba).abs() < 1e-10 * ab.abs().max(1.0));
        assert!(face_dot(&a, &vector_laplacian(&a)) < 0.0);
    }

    #[test]
    fn convective_derivative_is_adjoint_to_weighted_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = Grid::new(2, &[9, 6], &[1.0, 0.7]).unwrap();
        let u = random_faces(g, &mut rng);
        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
        let phi = ScalarField::from_fn(g, ScalarBc::None, |x| (x[0] * x[1]).cos());
        let lhs = integrate(&phi.zip_map(&convective_derivative(&u, &c), |a, b| a * b));
        let rhs = face_dot(&u, &weighted_gradient(&phi, &c));
        assert!((lhs - rhs).abs() < 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn direct_laplacian_loop_matches_operator() {
        for g in [
            Grid::new(2, &[7, 5], &[1.0, 0.6]).unwrap(),
            Grid::new(3, &[4, 5, 6], &[1.0, 1.0, 1.5]).unwrap(),
        ] {
            let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| (2.0 * x[0]).sin() * (x[1] + x[2]).cos());
            let mut out = vec![0.0; g.cell_count()];
            apply_neg_laplacian(&g, c.values(), &mut out);
            for (a, b) in out.iter().zip(laplacian(&c).values()) {
                assert!((a + b).abs() < 1e-10 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn capillary_force_cases() {
        let g = Grid::uniform(2, 16, 1.0).unwrap();
        let eps = 0.05;
        let c = ScalarField::constant(g, 0.3, ScalarBc::NeumannZero);
        assert_eq!(capillary_force(&c, eps).max_abs(), 0.0);

        // linear in x: lap c = 0 away from the Neumann walls
        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| x[0]);
        let f = capillary_force(&c, eps);
        for (idx, v) in stencil::multi_index(g.faces(0)).zip(f.component(0)) {
            if (2..15).contains(&idx[0]) {
                assert!(v.abs() < 1e-12);
            }
        }

        // quadratic: f_x = -eps * 2 * 2x on interior faces, f_y = 0
        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| x[0] * x[0]);
        let f = capillary_force(&c, eps);
        for (idx, v) in stencil::multi_index(g.faces(0)).zip(f.component(0)) {
            if (2..15).contains(&idx[0]) {
                let x = g.face_center(0, idx)[0];
                assert!((v + 4.0 * eps * x).abs() < 1e-10, "{v} vs {}", -4.0 * eps * x);
            }
        }
        assert_eq!(f.component(1).iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
    }
}
