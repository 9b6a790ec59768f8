//! Rectangular MAC grid, field containers and discrete differential operators.
//!
//! Scalars (concentration, pressure) live at cell centres; velocity
//! components live on the cell faces normal to their own axis. The
//! operators in [`ops`] are arranged so that `divergence` is minus the
//! adjoint of `gradient` under midpoint quadrature, which is what makes the
//! discrete energy and relative-entropy identities hold.

pub mod ops;
pub mod stencil;

use crate::error::{Error, Result};
use stencil::Layout;

pub use ops::{divergence, face_dot, gradient, integrate, laplacian};

/// Axis-aligned box discretised into `n[0] x n[1] (x n[2])` cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 3],
    length: [f64; 3],
    h: [f64; 3],
}

impl Grid {
    pub fn new(dim: usize, n: &[usize], length: &[f64]) -> Result<Grid> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n.len() != dim || length.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} cell counts and extents, got {} and {}",
                n.len(),
                length.len()
            )));
        }
        let mut nn = [1usize; 3];
        let mut ll = [1.0f64; 3];
        let mut hh = [1.0f64; 3];
        for a in 0..dim {
            if n[a] < 4 {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: need at least 4 cells, got {}",
                    n[a]
                )));
            }
            if !(length[a] > 0.0 && length[a].is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "axis {a}: extent must be positive, got {}",
                    length[a]
                )));
            }
            nn[a] = n[a];
            ll[a] = length[a];
            hh[a] = length[a] / n[a] as f64;
        }
        Ok(Grid {
            dim,
            n: nn,
            length: ll,
            h: hh,
        })
    }

    /// Square (cube) domain with `n` cells per axis.
    pub fn uniform(dim: usize, n: usize, length: f64) -> Result<Grid> {
        Grid::new(dim, &vec![n; dim], &vec![length; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> &[usize] {
        &self.n[..self.dim]
    }

    pub fn length(&self) -> &[f64] {
        &self.length[..self.dim]
    }

    pub fn h(&self) -> &[f64] {
        &self.h[..self.dim]
    }

    pub fn min_h(&self) -> f64 {
        self.h().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn cell_count(&self) -> usize {
        self.n().iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().iter().product()
    }

    pub fn domain_volume(&self) -> f64 {
        self.length().iter().product()
    }

    pub(crate) fn cells(&self) -> Layout {
        Layout { size: self.n }
    }

    pub(crate) fn faces(&self, axis: usize) -> Layout {
        self.cells().to_nodes(axis)
    }

    pub(crate) fn edges(&self, a: usize, b: usize) -> Layout {
        self.cells().to_nodes(a).to_nodes(b)
    }

    /// Physical position of the point with (possibly staggered) index `idx`;
    /// `node[a]` selects node- rather than cell-centred placement along `a`.
    pub fn position(&self, idx: [usize; 3], node: [bool; 3]) -> [f64; 3] {
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            let offset = if node[a] { 0.0 } else { 0.5 };
            x[a] = (idx[a] as f64 + offset) * self.h[a];
        }
        x
    }

    pub fn cell_center(&self, idx: [usize; 3]) -> [f64; 3] {
        self.position(idx, [false; 3])
    }

    pub fn face_center(&self, axis: usize, idx: [usize; 3]) -> [f64; 3] {
        let mut node = [false; 3];
        node[axis] = true;
        self.position(idx, node)
    }
}

/// Boundary tag of a cell-centred field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarBc {
    NeumannZero,
    None,
}

/// Boundary tag of a face-centred vector field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorBc {
    DirichletZero,
    None,
}

/// One value per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    bc: ScalarBc,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, bc: ScalarBc) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::InvalidField(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at cell {pos}")));
        }
        Ok(ScalarField { grid, values, bc })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>, bc: ScalarBc) -> Self {
        debug_assert_eq!(values.len(), grid.cell_count());
        ScalarField { grid, values, bc }
    }

    pub fn zeros(grid: Grid, bc: ScalarBc) -> Self {
        ScalarField::constant(grid, 0.0, bc)
    }

    pub fn constant(grid: Grid, value: f64, bc: ScalarBc) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.cell_count()],
            bc,
        }
    }

    /// Sample `f` at every cell centre.
    pub fn from_fn(grid: Grid, bc: ScalarBc, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = stencil::multi_index(grid.cells())
            .map(|idx| f(grid.cell_center(idx)))
            .collect();
        ScalarField { grid, values, bc }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn bc(&self) -> ScalarBc {
        self.bc
    }

    pub fn with_bc(mut self, bc: ScalarBc) -> Self {
        self.bc = bc;
        self
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Pointwise combination with a field on the same grid.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        ScalarField::from_raw(self.grid, values, self.bc)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect(), self.bc)
    }
}

/// One array per axis of face-normal components.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceVectorField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
    bc: VectorBc,
}

impl FaceVectorField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>, bc: VectorBc) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::InvalidField(format!(
                "expected {} components, got {}",
                grid.dim(),
                comps.len()
            )));
        }
        for (a, c) in comps.iter().enumerate() {
            let expected = grid.faces(a).len();
            if c.len() != expected {
                return Err(Error::InvalidField(format!(
                    "component {a}: expected {expected} face values, got {}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!("component {a} has non-finite values")));
            }
        }
        let mut field = FaceVectorField { grid, comps, bc };
        if bc == VectorBc::DirichletZero {
            field.enforce_bc();
        }
        Ok(field)
    }

    pub(crate) fn from_raw(grid: Grid, comps: Vec<Vec<f64>>, bc: VectorBc) -> Self {
        FaceVectorField { grid, comps, bc }
    }

    pub fn zeros(grid: Grid, bc: VectorBc) -> Self {
        let comps = (0..grid.dim()).map(|a| vec![0.0; grid.faces(a).len()]).collect();
        FaceVectorField { grid, comps, bc }
    }

    /// Sample `f(axis, x)` at every face centre. Boundary-normal values are
    /// zeroed when `bc` is [`VectorBc::DirichletZero`].
    pub fn from_fn(grid: Grid, bc: VectorBc, f: impl Fn(usize, [f64; 3]) -> f64) -> Self {
        let comps = (0..grid.dim())
            .map(|a| {
                stencil::multi_index(grid.faces(a))
                    .map(|idx| f(a, grid.face_center(a, idx)))
                    .collect()
            })
            .collect();
        let mut field = FaceVectorField { grid, comps, bc };
        if bc == VectorBc::DirichletZero {
            field.enforce_bc();
        }
        field
    }

    /// Zero the boundary-normal face values.
    pub fn enforce_bc(&mut self) {
        for a in 0..self.grid.dim() {
            stencil::zero_boundary_nodes(&mut self.comps[a], self.grid.faces(a), a);
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bc(&self) -> VectorBc {
        self.bc
    }

    pub fn with_bc(mut self, bc: VectorBc) -> Self {
        self.bc = bc;
        if bc == VectorBc::DirichletZero {
            self.enforce_bc();
        }
        self
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.comps[axis]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut [f64] {
        &mut self.comps[axis]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest magnitude of each component.
    pub fn max_abs_per_axis(&self) -> Vec<f64> {
        self.comps
            .iter()
            .map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .collect()
    }

    /// `self + alpha * other`, keeping the boundary tag of `self`.
    pub fn axpy(&self, alpha: f64, other: &FaceVectorField) -> FaceVectorField {
        debug_assert_eq!(self.grid, other.grid);
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + alpha * y).collect())
            .collect();
        FaceVectorField::from_raw(self.grid, comps, self.bc)
    }

    pub fn scale(&self, alpha: f64) -> FaceVectorField {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| alpha * v).collect())
            .collect();
        FaceVectorField::from_raw(self.grid, comps, self.bc)
    }

    /// Component values averaged to cell centres.
    pub fn cell_averaged(&self) -> Vec<Vec<f64>> {
        (0..self.grid.dim())
            .map(|a| stencil::avg_to_cells(&self.comps[a], self.grid.faces(a), a))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_from_counts_and_extents() {
        let g = Grid::new(2, &[4, 4], &[1.0, 1.0]).unwrap();
        assert_eq!(g.h(), &[0.25, 0.25]);
        let g = Grid::new(2, &[8, 4], &[2.0, 1.0]).unwrap();
        assert_eq!(g.h(), &[0.25, 0.25]);
        let g = Grid::new(3, &[4, 4, 4], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.h(), &[0.25, 0.25, 0.25]);
        assert_eq!(g.dim(), g.n().len());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1, &[4], &[1.0]).is_err());
        assert!(Grid::new(4, &[4; 4], &[1.0; 4]).is_err());
        assert!(Grid::new(2, &[3, 4], &[1.0, 1.0]).is_err());
        assert!(Grid::new(2, &[4, 4], &[0.0, 1.0]).is_err());
        assert!(Grid::new(2, &[4, 4], &[1.0, -1.0]).is_err());
        assert!(Grid::new(2, &[4, 4, 4], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn face_field_shapes_and_bc() {
        let g = Grid::new(2, &[5, 4], &[1.0, 1.0]).unwrap();
        let v = FaceVectorField::from_fn(g, VectorBc::DirichletZero, |_, _| 1.0);
        assert_eq!(v.component(0).len(), 6 * 4);
        assert_eq!(v.component(1).len(), 5 * 5);
        // boundary normal values vanish, interior ones do not
        assert_eq!(v.component(0)[0], 0.0);
        assert_eq!(v.component(0)[5], 0.0);
        assert_eq!(v.component(0)[1], 1.0);
        assert_eq!(v.component(1)[2], 0.0);
        assert_eq!(v.component(1)[5 + 2], 1.0);
    }

    #[test]
    fn scalar_field_validation() {
        let g = Grid::uniform(2, 4, 1.0).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 15], ScalarBc::NeumannZero).is_err());
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(ScalarField::new(g, v, ScalarBc::NeumannZero).is_err());
    }
}
