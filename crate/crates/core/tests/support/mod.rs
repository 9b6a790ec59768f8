#![allow(dead_code)]

use nsac::grid::{
    divergence, face_dot, gradient, integrate, laplacian, FaceVectorField, Grid, ScalarBc, ScalarField, VectorBc,
};
use rand::Rng;

pub fn random_scalar(g: Grid, rng: &mut impl Rng) -> ScalarField {
    let values = (0..g.cell_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ScalarField::new(g, values, ScalarBc::NeumannZero).unwrap()
}

pub fn random_faces(g: Grid, rng: &mut impl Rng) -> FaceVectorField {
    let comps = (0..g.dim())
        .map(|a| {
            let len: usize = (0..g.dim()).map(|b| g.n()[b] + usize::from(a == b)).product();
            (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
        })
        .collect();
    FaceVectorField::new(g, comps, VectorBc::DirichletZero).unwrap()
}

/// Relative defects of `<grad p, v> = -<p, div v>` and of
/// `div grad p = lap p` for one pair of fields.
pub fn operator_defects(p: &ScalarField, v: &FaceVectorField) -> (f64, f64) {
    let gp = gradient(p);
    let lhs = face_dot(&gp, v);
    let rhs = -integrate(&p.zip_map(&divergence(v), |a, b| a * b));
    let scale = face_dot(&gp, &gp).sqrt() * face_dot(v, v).sqrt() + f64::MIN_POSITIVE;
    let adjoint = (lhs - rhs).abs() / scale;
    let dg = divergence(&gp);
    let lap = laplacian(p);
    let diff = dg.zip_map(&lap, |a, b| a - b).max_abs();
    let composition = diff / (lap.max_abs() + f64::MIN_POSITIVE);
    (adjoint, composition)
}
