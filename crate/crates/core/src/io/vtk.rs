//! Legacy ASCII VTK snapshots on the cell grid.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::State;

/// Concentration, pressure and cell-averaged velocity as STRUCTURED_POINTS
/// cell data.
pub fn vtk_string(state: &State) -> String {
    let g = state.grid();
    let mut dims = [1usize; 3];
    let mut spacing = [1.0f64; 3];
    for a in 0..g.dim() {
        dims[a] = g.n()[a] + 1;
        spacing[a] = g.h()[a];
    }
    let cells = g.cell_count();
    let mut out = String::new();
    let _ = writeln!(out, "# vtk DataFile Version 3.0");
    let _ = writeln!(out, "nsac t={:.16e}", state.t);
    let _ = writeln!(out, "ASCII\nDATASET STRUCTURED_POINTS");
    let _ = writeln!(out, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2]);
    let _ = writeln!(out, "ORIGIN 0 0 0");
    let _ = writeln!(out, "SPACING {:e} {:e} {:e}", spacing[0], spacing[1], spacing[2]);
    let _ = writeln!(out, "CELL_DATA {cells}");
    for (name, field) in [("c", &state.c), ("p", &state.p)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in field.values() {
            let _ = writeln!(out, "{v:.16e}");
        }
    }
    let u = state.u.cell_averaged();
    let _ = writeln!(out, "VECTORS u double");
    for cell in 0..cells {
        let comp = |a: usize| u.get(a).map_or(0.0, |c| c[cell]);
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", comp(0), comp(1), comp(2));
    }
    out
}

pub fn write_vtk(path: &Path, state: &State) -> Result<()> {
    std::fs::write(path, vtk_string(state)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FaceVectorField, Grid, ScalarBc, ScalarField, VectorBc};

    #[test]
    fn layout_of_a_small_snapshot() {
        let g = Grid::new(2, &[4, 5], &[1.0, 1.0]).unwrap();
        let u = FaceVectorField::from_fn(g, VectorBc::DirichletZero, |a, _| if a == 0 { 1.0 } else { 0.0 });
        let c = ScalarField::from_fn(g, ScalarBc::NeumannZero, |x| x[0]);
        let s = State::new(0.5, u, c).unwrap();
        let text = vtk_string(&s);
        assert!(text.contains("DIMENSIONS 5 6 1"));
        assert!(text.contains("CELL_DATA 20"));
        let lines: Vec<&str> = text.lines().collect();
        let start = lines.iter().position(|l| *l == "SCALARS c double 1").unwrap() + 2;
        assert_eq!(lines[start].parse::<f64>().unwrap(), 0.125);
        assert_eq!(lines[start + 1].parse::<f64>().unwrap(), 0.375);
        let vec_start = lines.iter().position(|l| *l == "VECTORS u double").unwrap() + 1;
        assert_eq!(lines.len(), vec_start + 20);
        // first cell touches the wall: average of 0 and 1
        assert!(lines[vec_start].starts_with("5.0000000000000000e-1"));
    }
}
