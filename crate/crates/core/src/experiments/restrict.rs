//! Transfer of fine states to coarser grids.
//!
//! Scalars are averaged over the fine cells of each coarse cell; face values
//! are averaged over the fine faces tiling each coarse face. The face rule
//! keeps the net flux through every coarse face, so a discretely solenoidal
//! fine velocity restricts to a discretely solenoidal coarse one.

use crate::error::{Error, Result};
use crate::grid::stencil::multi_index;
use crate::grid::{FaceVectorField, Grid, ScalarField};
use crate::solver::State;

fn ratio(fine: &Grid, coarse: &Grid) -> Result<usize> {
    let mismatch = || {
        Error::GridMismatch(format!(
            "cannot restrict {:?} cells to {:?} cells",
            fine.n(),
            coarse.n()
        ))
    };
    if fine.dim() != coarse.dim() || fine.length() != coarse.length() {
        return Err(mismatch());
    }
    let r = fine.n()[0] / coarse.n()[0];
    let exact = (0..fine.dim()).all(|a| coarse.n()[a] * r == fine.n()[a]);
    if r == 0 || !exact {
        return Err(mismatch());
    }
    Ok(r)
}

fn block(dim: usize, r: usize, skip: Option<usize>) -> Vec<[usize; 3]> {
    let mut size = [1usize; 3];
    for (a, s) in size.iter_mut().enumerate().take(dim) {
        if Some(a) != skip {
            *s = r;
        }
    }
    multi_index(crate::grid::stencil::Layout { size }).collect()
}

pub fn restrict_scalar(field: &ScalarField, coarse: Grid) -> Result<ScalarField> {
    let fine = *field.grid();
    let r = ratio(&fine, &coarse)?;
    let offsets = block(fine.dim(), r, None);
    let weight = 1.0 / offsets.len() as f64;
    let (fl, src) = (fine.cells(), field.values());
    let values = multi_index(coarse.cells())
        .map(|c| {
            offsets
                .iter()
                .map(|o| src[fl.index([r * c[0] + o[0], r * c[1] + o[1], r * c[2] + o[2]])])
                .sum::<f64>()
                * weight
        })
        .collect();
    Ok(ScalarField::from_raw(coarse, values, field.bc()))
}

pub fn restrict_faces(field: &FaceVectorField, coarse: Grid) -> Result<FaceVectorField> {
    let fine = *field.grid();
    let r = ratio(&fine, &coarse)?;
    let comps = (0..fine.dim())
        .map(|a| {
            let offsets = block(fine.dim(), r, Some(a));
            let weight = 1.0 / offsets.len() as f64;
            let (fl, src) = (fine.faces(a), field.component(a));
            multi_index(coarse.faces(a))
                .map(|c| {
                    offsets
                        .iter()
                        .map(|o| src[fl.index([r * c[0] + o[0], r * c[1] + o[1], r * c[2] + o[2]])])
                        .sum::<f64>()
                        * weight
                })
                .collect()
        })
        .collect();
    Ok(FaceVectorField::from_raw(coarse, comps, field.bc()))
}

pub fn restrict_state(state: &State, coarse: Grid) -> Result<State> {
    Ok(State {
        t: state.t,
        u: restrict_faces(&state.u, coarse)?,
        c: restrict_scalar(&state.c, coarse)?,
        p: restrict_scalar(&state.p, coarse)?,
    })
}
