//! Discrete gradient, divergence, Laplacian and midpoint quadrature.

use super::stencil::{self, Ghost};
use super::{FaceVectorField, ScalarBc, ScalarField, VectorBc};

/// Face-centred gradient of a cell-centred scalar. Boundary faces carry the
/// homogeneous Neumann value 0.
pub fn gradient(c: &ScalarField) -> FaceVectorField {
    let g = *c.grid();
    let comps = (0..g.dim())
        .map(|a| stencil::diff_to_nodes(c.values(), g.cells(), a, g.h()[a], Ghost::Reflect))
        .collect();
    FaceVectorField::from_raw(g, comps, VectorBc::DirichletZero)
}

/// Cell-centred divergence of a face field.
pub fn divergence(v: &FaceVectorField) -> ScalarField {
    let g = *v.grid();
    let mut out = vec![0.0; g.cell_count()];
    for a in 0..g.dim() {
        let d = stencil::diff_to_cells(v.component(a), g.faces(a), a, g.h()[a]);
        for (o, x) in out.iter_mut().zip(d) {
            *o += x;
        }
    }
    ScalarField::from_raw(g, out, ScalarBc::None)
}

/// Standard `2 dim + 1` point Laplacian with reflected (Neumann) ghosts;
/// identical to `divergence(gradient(c))`.
pub fn laplacian(c: &ScalarField) -> ScalarField {
    divergence(&gradient(c))
}

/// Midpoint quadrature over the domain.
pub fn integrate(f: &ScalarField) -> f64 {
    f.values().iter().sum::<f64>() * f.grid().cell_volume()
}

/// Quadrature of `a . b` over the face control volumes (boundary faces carry
/// half a cell volume).
pub fn face_dot(a: &FaceVectorField, b: &FaceVectorField) -> f64 {
    let g = *a.grid();
    let vol = g.cell_volume();
    let mut total = 0.0;
    for axis in 0..g.dim() {
        let layout = g.faces(axis);
        let (xa, xb) = (a.component(axis), b.component(axis));
        let last = layout.size[axis] - 1;
        for (idx, (p, q)) in stencil::multi_index(layout).zip(xa.iter().zip(xb)) {
            let w = if idx[axis] == 0 || idx[axis] == last { 0.5 } else { 1.0 };
            total += w * p * q;
        }
    }
    total * vol
}

#[cfg(test)]
mod tests {
    use super::super::Grid;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_scalar(g: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
        let v = (0..g.cell_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ScalarField::new(g, v, ScalarBc::NeumannZero).unwrap()
    }

    fn random_faces(g: Grid, rng: &mut ChaCha8Rng) -> FaceVectorField {
        let comps = (0..g.dim())
            .map(|a| (0..g.faces(a).len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        FaceVectorField::new(g, comps, VectorBc::DirichletZero).unwrap()
    }

    // Independent 2D stencils written directly on (i, j) indices.
    fn naive_gradient_2d(g: &Grid, c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (nx, ny) = (g.n()[0], g.n()[1]);
        let (hx, hy) = (g.h()[0], g.h()[1]);
        let at = |i: usize, j: usize| c[i + nx * j];
        let mut gx = vec![0.0; (nx + 1) * ny];
        let mut gy = vec![0.0; nx * (ny + 1)];
        for j in 0..ny {
            for i in 1..nx {
                gx[i + (nx + 1) * j] = (at(i, j) - at(i - 1, j)) / hx;
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                gy[i + nx * j] = (at(i, j) - at(i, j - 1)) / hy;
            }
        }
        (gx, gy)
    }

    fn naive_divergence_2d(g: &Grid, vx: &[f64], vy: &[f64]) -> Vec<f64> {
        let (nx, ny) = (g.n()[0], g.n()[1]);
        let (hx, hy) = (g.h()[0], g.h()[1]);
        let mut out = vec![0.0; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let dx = vx[i + 1 + (nx + 1) * j] - vx[i + (nx + 1) * j];
                let dy = vy[i + nx * (j + 1)] - vy[i + nx * j];
                out[i + nx * j] = dx / hx + dy / hy;
            }
        }
        out
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = Grid::new(2, &[6, 5], &[1.0, 2.0]).unwrap();
        let c = ScalarField::constant(g, 3.0, ScalarBc::NeumannZero);
        assert!(gradient(&c).max_abs() == 0.0);
    }

    #[test]
    fn gradient_of_linear_is_exact_on_interior_faces() {
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| x[0]);
        let grad = gradient(&c);
        let layout = g.faces(0);
        for (idx, v) in stencil::multi_index(layout).zip(grad.component(0)) {
            if idx[0] > 0 && idx[0] < 8 {
                assert!((v - 1.0).abs() < 1e-13, "{v}");
            } else {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn gradient_matches_naive_stencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Grid::new(2, &[7, 9], &[1.3, 0.7]).unwrap();
        let c = random_scalar(g, &mut rng);
        let (gx, gy) = naive_gradient_2d(&g, c.values());
        let grad = gradient(&c);
        assert_eq!(grad.component(0), &gx[..]);
        assert_eq!(grad.component(1), &gy[..]);
    }

    #[test]
    fn divergence_cases() {
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        assert_eq!(
            divergence(&FaceVectorField::zeros(g, VectorBc::DirichletZero)).max_abs(),
            0.0
        );
        let v = FaceVectorField::from_fn(g, VectorBc::None, |a, x| if a == 0 { x[0] } else { -x[1] });
        assert!(divergence(&v).max_abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = Grid::new(2, &[6, 5], &[1.0, 0.5]).unwrap();
        let v = random_faces(g, &mut rng);
        let naive = naive_divergence_2d(&g, v.component(0), v.component(1));
        let d = divergence(&v);
        for (a, b) in d.values().iter().zip(&naive) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn laplacian_cases() {
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        let c = ScalarField::constant(g, 5.0, ScalarBc::NeumannZero);
        assert_eq!(laplacian(&c).max_abs(), 0.0);

        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| x[0] * x[0]);
        let lap = laplacian(&c);
        for (idx, v) in stencil::multi_index(g.cells()).zip(lap.values()) {
            if idx[0] > 0 && idx[0] < 7 {
                assert!((v - 2.0).abs() < 1e-10, "{v}");
            }
        }
    }

    #[test]
    fn integrate_cases() {
        let g = Grid::uniform(2, 8, 1.0).unwrap();
        let two = ScalarField::constant(g, 2.0, ScalarBc::None);
        assert!((integrate(&two) - 2.0).abs() < 1e-14);
        for n in [4, 7, 16] {
            let g = Grid::uniform(2, n, 1.0).unwrap();
            let f = ScalarField::from_fn(g, ScalarBc::None, |x| x[0]);
            assert!((integrate(&f) - 0.5).abs() < 1e-14);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Grid::new(3, &[4, 5, 6], &[1.0, 2.0, 3.0]).unwrap();
        let f = random_scalar(g, &mut rng);
        let mut naive = 0.0;
        for v in f.values() {
            naive += v * (0.25 * 0.4 * 0.5);
        }
        assert!((integrate(&f) - naive).abs() < 1e-12);
    }

    #[test]
    fn three_dimensional_adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = Grid::new(3, &[4, 5, 6], &[1.0, 1.0, 2.0]).unwrap();
        let q = random_scalar(g, &mut rng);
        let v = random_faces(g, &mut rng);
        let lhs = integrate(&q.zip_map(&divergence(&v), |a, b| a * b));
        let rhs = face_dot(&v, &gradient(&q));
        assert!((lhs + rhs).abs() < 1e-12 * (lhs.abs() + rhs.abs()));
        assert_eq!(laplacian(&q), divergence(&gradient(&q)));
    }
}
