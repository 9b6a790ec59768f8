//! Low-level staggered-array primitives.
//!
//! Every discrete quantity lives on a location that is either cell-centred or
//! node-centred along each axis. A [`Layout`] records the resulting array
//! extents; the primitives below move data between the two locations along a
//! single axis by differencing or averaging. Storage is x-fastest.

/// Extents of an array on a staggered location. Unused axes have extent 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub size: [usize; 3],
}

impl Layout {
    pub fn len(&self) -> usize {
        self.size.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => 1,
            1 => self.size[0],
            _ => self.size[0] * self.size[1],
        }
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.size[0] * (i[1] + self.size[1] * i[2])
    }

    /// Same layout with `axis` switched from cell- to node-centred.
    pub fn to_nodes(self, axis: usize) -> Layout {
        let mut size = self.size;
        size[axis] += 1;
        Layout { size }
    }

    /// Same layout with `axis` switched from node- to cell-centred.
    pub fn to_cells(self, axis: usize) -> Layout {
        let mut size = self.size;
        size[axis] -= 1;
        Layout { size }
    }
}

/// Ghost-cell rule applied when a cell-centred quantity is needed on a
/// boundary node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ghost {
    /// Ghost equals the adjacent interior value (homogeneous Neumann).
    Reflect,
    /// Ghost equals minus the adjacent interior value (homogeneous Dirichlet
    /// located on the boundary node).
    Antisymmetric,
}

/// Visit every multi-index of `layout` in storage order.
#[inline]
fn for_each(layout: Layout, mut f: impl FnMut([usize; 3], usize)) {
    let mut flat = 0;
    for k in 0..layout.size[2] {
        for j in 0..layout.size[1] {
            for i in 0..layout.size[0] {
                f([i, j, k], flat);
                flat += 1;
            }
        }
    }
}

/// Cell-centred along `axis` -> node-centred along `axis`, by differencing.
pub fn diff_to_nodes(src: &[f64], layout: Layout, axis: usize, h: f64, ghost: Ghost) -> Vec<f64> {
    let out_layout = layout.to_nodes(axis);
    let n = layout.size[axis];
    let stride = layout.stride(axis);
    let mut out = vec![0.0; out_layout.len()];
    for_each(out_layout, |idx, flat| {
        let ia = idx[axis];
        let mut s = idx;
        out[flat] = if ia == 0 {
            s[axis] = 0;
            match ghost {
                Ghost::Reflect => 0.0,
                Ghost::Antisymmetric => 2.0 * src[layout.index(s)] / h,
            }
        } else if ia == n {
            s[axis] = n - 1;
            match ghost {
                Ghost::Reflect => 0.0,
                Ghost::Antisymmetric => -2.0 * src[layout.index(s)] / h,
            }
        } else {
            s[axis] = ia;
            let hi = layout.index(s);
            (src[hi] - src[hi - stride]) / h
        };
    });
    out
}

/// Cell-centred along `axis` -> node-centred along `axis`, by averaging.
pub fn avg_to_nodes(src: &[f64], layout: Layout, axis: usize, ghost: Ghost) -> Vec<f64> {
    let out_layout = layout.to_nodes(axis);
    let n = layout.size[axis];
    let stride = layout.stride(axis);
    let mut out = vec![0.0; out_layout.len()];
    for_each(out_layout, |idx, flat| {
        let ia = idx[axis];
        let mut s = idx;
        out[flat] = if ia == 0 || ia == n {
            s[axis] = if ia == 0 { 0 } else { n - 1 };
            match ghost {
                Ghost::Reflect => src[layout.index(s)],
                Ghost::Antisymmetric => 0.0,
            }
        } else {
            s[axis] = ia;
            let hi = layout.index(s);
            0.5 * (src[hi] + src[hi - stride])
        };
    });
    out
}

/// Node-centred along `axis` -> cell-centred along `axis`, by differencing.
pub fn diff_to_cells(src: &[f64], layout: Layout, axis: usize, h: f64) -> Vec<f64> {
    let out_layout = layout.to_cells(axis);
    let stride = layout.stride(axis);
    let mut out = vec![0.0; out_layout.len()];
    for_each(out_layout, |idx, flat| {
        let lo = layout.index(idx);
        out[flat] = (src[lo + stride] - src[lo]) / h;
    });
    out
}

/// Node-centred along `axis` -> cell-centred along `axis`, by averaging.
pub fn avg_to_cells(src: &[f64], layout: Layout, axis: usize) -> Vec<f64> {
    let out_layout = layout.to_cells(axis);
    let stride = layout.stride(axis);
    let mut out = vec![0.0; out_layout.len()];
    for_each(out_layout, |idx, flat| {
        let lo = layout.index(idx);
        out[flat] = 0.5 * (src[lo + stride] + src[lo]);
    });
    out
}

/// Quadrature weight of each entry of a staggered array: the cell volume,
/// halved once for every axis along which the entry sits on a boundary node.
pub fn weights(layout: Layout, node_axes: [bool; 3], cell_volume: f64) -> Vec<f64> {
    let mut out = vec![0.0; layout.len()];
    for_each(layout, |idx, flat| {
        let mut w = cell_volume;
        for a in 0..3 {
            if node_axes[a] && (idx[a] == 0 || idx[a] + 1 == layout.size[a]) {
                w *= 0.5;
            }
        }
        out[flat] = w;
    });
    out
}

/// Zero every entry lying on a boundary node of `axis`.
pub fn zero_boundary_nodes(values: &mut [f64], layout: Layout, axis: usize) {
    let last = layout.size[axis] - 1;
    for_each(layout, |idx, flat| {
        if idx[axis] == 0 || idx[axis] == last {
            values[flat] = 0.0;
        }
    });
}

pub fn multi_index(layout: Layout) -> impl Iterator<Item = [usize; 3]> {
    let [nx, ny, nz] = layout.size;
    (0..nz).flat_map(move |k| (0..ny).flat_map(move |j| (0..nx).map(move |i| [i, j, k])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diff_and_avg_shapes() {
        let l = Layout { size: [4, 3, 1] };
        let src: Vec<f64> = (0..12).map(|v| v as f64).collect();
        let d = diff_to_nodes(&src, l, 0, 1.0, Ghost::Reflect);
        assert_eq!(d.len(), 15);
        // interior differences along x are 1
        assert_eq!(d[1], 1.0);
        assert_eq!(d[0], 0.0);
        assert_eq!(d[4], 0.0);
        let back = diff_to_cells(&d, l.to_nodes(0), 0, 1.0);
        assert_eq!(back.len(), 12);
        let a = avg_to_cells(&avg_to_nodes(&src, l, 1, Ghost::Reflect), l.to_nodes(1), 1);
        assert_eq!(a.len(), 12);
    }

    #[test]
    fn antisymmetric_boundary_difference() {
        let l = Layout { size: [1, 4, 1] };
        let src = [1.0, 2.0, 3.0, 4.0];
        let d = diff_to_nodes(&src, l, 1, 0.5, Ghost::Antisymmetric);
        assert_eq!(d, vec![4.0, 2.0, 2.0, 2.0, -16.0]);
        let a = avg_to_nodes(&src, l, 1, Ghost::Antisymmetric);
        assert_eq!(a, vec![0.0, 1.5, 2.5, 3.5, 0.0]);
    }

    #[test]
    fn boundary_weights_are_halved() {
        let l = Layout { size: [3, 2, 1] };
        let w = weights(l, [true, false, false], 1.0);
        assert_eq!(w, vec![0.5, 1.0, 0.5, 0.5, 1.0, 0.5]);
    }
}
