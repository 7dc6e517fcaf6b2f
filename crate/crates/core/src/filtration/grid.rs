//! Lower-star filtrations of 2D and 3D images.

use super::{simplex_faces, CellKey, ComplexBuilder, ComplexKind, FilteredComplex};
use crate::error::{Error, Result};

/// A row-major grid of samples with one to three axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 || shape.contains(&0) {
            return Err(Error::Input(format!(
                "grid shape {shape:?} must have 1 to 3 positive extents"
            )));
        }
        let n: usize = shape.iter().product();
        if values.len() != n {
            return Err(Error::Input(format!(
                "grid of shape {shape:?} needs {n} values, got {}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite pixel value at index {k}")));
        }
        Ok(Grid { shape, values })
    }

    /// Builds a grid by evaluating `f` at every multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let n: usize = shape.iter().product();
        let mut values = Vec::with_capacity(n);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..n {
            values.push(f(&idx));
            for a in (0..shape.len()).rev() {
                idx[a] += 1;
                if idx[a] < shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Grid::new(shape, values)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.shape.len()];
        for a in (0..self.shape.len().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }

    fn coords(&self, mut lin: usize) -> Vec<usize> {
        let strides = self.strides();
        strides
            .iter()
            .map(|&s| {
                let c = lin / s;
                lin %= s;
                c
            })
            .collect()
    }
}

/// Freudenthal triangulation: simplices are chains `v, v + e_{S1},
/// v + e_{S1 ∪ S2}, ...` over disjoint nonempty axis sets. In 2D each unit
/// square splits along its `(i,j) -> (i+1,j+1)` diagonal; in 3D each cube
/// splits into six tetrahedra around its main diagonal.
pub fn lower_star_freudenthal(grid: &Grid) -> Result<FilteredComplex> {
    let d = grid.shape.len();
    let strides = grid.strides();
    let mut builder = ComplexBuilder::new(ComplexKind::Simplicial, d, d);

    // Walk chains from each anchor; `chain` holds linear vertex ids.
    fn extend(
        grid: &Grid,
        strides: &[usize],
        coords: &mut Vec<usize>,
        used: u32,
        chain: &mut Vec<u32>,
        value: f64,
        builder: &mut ComplexBuilder,
    ) {
        let d = grid.shape.len();
        let free: Vec<usize> = (0..d).filter(|a| used & (1 << a) == 0).collect();
        for mask in 1u32..(1 << free.len()) {
            let axes: Vec<usize> = (0..free.len())
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| free[k])
                .collect();
            if axes.iter().any(|&a| coords[a] + 1 >= grid.shape[a]) {
                continue;
            }
            let mut step = 0;
            let mut new_used = used;
            for &a in &axes {
                coords[a] += 1;
                step += strides[a];
                new_used |= 1 << a;
            }
            let vertex = *chain.last().expect("anchored chain") as usize + step;
            let v = value.max(grid.values[vertex]);
            chain.push(vertex as u32);
            let key: CellKey = chain.clone().into_boxed_slice();
            builder.push_raw(chain.len() - 1, key, v, simplex_faces(chain));
            extend(grid, strides, coords, new_used, chain, v, builder);
            chain.pop();
            for &a in &axes {
                coords[a] -= 1;
            }
        }
    }

    for lin in 0..grid.values.len() {
        let value = grid.values[lin];
        builder.push_raw(0, vec![lin as u32].into_boxed_slice(), value, Vec::new());
        let mut coords = grid.coords(lin);
        let mut chain = vec![lin as u32];
        extend(grid, &strides, &mut coords, 0, &mut chain, value, &mut builder);
    }
    builder.build()
}

/// Cubical complex of the grid. Keys are doubled coordinates: an odd
/// coordinate marks an axis along which the cell has extent one.
pub fn lower_star_cubical(grid: &Grid) -> Result<FilteredComplex> {
    let d = grid.shape.len();
    let strides = grid.strides();
    let ext: Vec<usize> = grid.shape.iter().map(|&n| 2 * n - 1).collect();
    let total: usize = ext.iter().product();
    let mut builder = ComplexBuilder::new(ComplexKind::Cubical, d, d);
    let mut c = vec![0usize; d];
    for _ in 0..total {
        let odd: Vec<usize> = (0..d).filter(|&a| c[a] % 2 == 1).collect();
        // value: max over the corner vertices
        let mut value = f64::NEG_INFINITY;
        for corner in 0u32..(1 << odd.len()) {
            let mut lin = 0;
            for a in 0..d {
                let mut x = c[a] / 2;
                if let Some(k) = odd.iter().position(|&o| o == a) {
                    if corner & (1 << k) != 0 {
                        x += 1;
                    }
                }
                lin += x * strides[a];
            }
            value = value.max(grid.values[lin]);
        }
        let mut boundary = Vec::with_capacity(2 * odd.len());
        for (k, &a) in odd.iter().enumerate() {
            let sign: i8 = if k % 2 == 0 { 1 } else { -1 };
            let mut lo: Vec<u32> = c.iter().map(|&x| x as u32).collect();
            let mut hi = lo.clone();
            lo[a] -= 1;
            hi[a] += 1;
            boundary.push((lo.into_boxed_slice(), -sign));
            boundary.push((hi.into_boxed_slice(), sign));
        }
        let key: CellKey = c.iter().map(|&x| x as u32).collect();
        builder.push_raw(odd.len(), key, value, boundary);
        for a in (0..d).rev() {
            c[a] += 1;
            if c[a] < ext[a] {
                break;
            }
            c[a] = 0;
        }
    }
    builder.build()
}
