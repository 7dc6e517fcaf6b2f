//! Filtered cell complexes.
//!
//! Cells are identified by canonical keys (sorted vertex ids for simplices,
//! doubled grid coordinates for cubes) and ordered by `(value, dim, key)`.
//! That total order is deterministic and puts every face before its cofaces.

mod diff;
mod grid;
mod rips;

use std::cmp::Ordering;
use std::collections::HashMap;

pub use diff::{diff_filtrations, CellDiff, DiffStats, FiltrationDiff};
pub use grid::{lower_star_cubical, lower_star_freudenthal, Grid};
pub(crate) use rips::euclidean;
pub use rips::{enclosing_radius, rips_filtration, DistanceMatrix, RipsThreshold};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::sparse::{ColumnMatrix, SparseColumn};

/// Canonical cell identifier.
pub type CellKey = Box<[u32]>;

/// How keys are to be interpreted; diffs require matching kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    Simplicial,
    Cubical,
}

/// A cell as handed to [`ComplexBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub dim: usize,
    pub key: CellKey,
    pub value: f64,
    /// Faces of dimension `dim - 1` with their signed incidence.
    pub boundary: Vec<(CellKey, i8)>,
}

/// Cells of one dimension, stored in filtration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DimCells {
    keys: Vec<CellKey>,
    values: Vec<f64>,
    /// Face indices into the previous dimension's filtration order.
    boundaries: Vec<Vec<(usize, i8)>>,
    global: Vec<usize>,
    lookup: HashMap<CellKey, usize>,
}

impl DimCells {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, i: usize) -> &[u32] {
        &self.keys[i]
    }

    pub fn keys(&self) -> &[CellKey] {
        &self.keys
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn boundary(&self, i: usize) -> &[(usize, i8)] {
        &self.boundaries[i]
    }

    /// Position of cell `i` in the filtration order over all dimensions.
    pub fn global_index(&self, i: usize) -> usize {
        self.global[i]
    }

    pub fn index_of(&self, key: &[u32]) -> Option<usize> {
        self.lookup.get(key).copied()
    }
}

/// A complex together with its filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    kind: ComplexKind,
    max_dim: usize,
    dims: Vec<DimCells>,
    by_global: Vec<(usize, usize)>,
}

fn filtration_cmp(a: (f64, usize, &[u32]), b: (f64, usize, &[u32])) -> Ordering {
    a.0.total_cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then_with(|| a.2.cmp(b.2))
}

/// A cell with its value and signed facets.
type PendingCell = (CellKey, f64, Vec<(CellKey, i8)>);

/// Collects cells and sorts them into a [`FilteredComplex`].
#[derive(Debug, Clone)]
pub struct ComplexBuilder {
    kind: ComplexKind,
    max_dim: usize,
    top_dim: usize,
    cells: Vec<Vec<PendingCell>>,
}

impl ComplexBuilder {
    /// `top_dim` is the highest cell dimension stored; `max_dim` the highest
    /// homology dimension reported.
    pub fn new(kind: ComplexKind, top_dim: usize, max_dim: usize) -> Self {
        ComplexBuilder {
            kind,
            max_dim: max_dim.min(top_dim),
            top_dim,
            cells: vec![Vec::new(); top_dim + 1],
        }
    }

    pub fn push(&mut self, cell: Cell) -> Result<()> {
        if cell.dim > self.top_dim {
            return Err(Error::Structural(format!(
                "cell of dimension {} exceeds the complex dimension {}",
                cell.dim, self.top_dim
            )));
        }
        if !cell.value.is_finite() {
            return Err(Error::Input(format!(
                "cell {:?} has non-finite value {}",
                cell.key, cell.value
            )));
        }
        self.cells[cell.dim].push((cell.key, cell.value, cell.boundary));
        Ok(())
    }

    pub(crate) fn push_raw(&mut self, dim: usize, key: CellKey, value: f64, boundary: Vec<(CellKey, i8)>) {
        self.cells[dim].push((key, value, boundary));
    }

    pub fn build(self) -> Result<FilteredComplex> {
        let mut dims: Vec<DimCells> = Vec::with_capacity(self.cells.len());
        for (q, mut cells) in self.cells.into_iter().enumerate() {
            cells.sort_by(|a, b| filtration_cmp((a.1, q, &a.0), (b.1, q, &b.0)));
            let mut lookup = HashMap::with_capacity(cells.len());
            for (i, c) in cells.iter().enumerate() {
                if lookup.insert(c.0.clone(), i).is_some() {
                    return Err(Error::Structural(format!(
                        "duplicate cell {:?} in dimension {q}",
                        c.0
                    )));
                }
            }
            let mut boundaries = Vec::with_capacity(cells.len());
            for (key, value, faces) in &cells {
                let mut resolved = Vec::with_capacity(faces.len());
                for (fk, coeff) in faces {
                    let prev = q.checked_sub(1).map(|p| &dims[p]);
                    let Some(idx) = prev.and_then(|d: &DimCells| d.index_of(fk)) else {
                        return Err(Error::Structural(format!(
                            "face {fk:?} of cell {key:?} is missing"
                        )));
                    };
                    let fv = dims[q - 1].values[idx];
                    if fv > *value {
                        return Err(Error::Structural(format!(
                            "face {fk:?} (value {fv}) enters after its coface {key:?} (value {value})"
                        )));
                    }
                    resolved.push((idx, *coeff));
                }
                resolved.sort_unstable();
                boundaries.push(resolved);
            }
            let (keys, values): (Vec<CellKey>, Vec<f64>) =
                cells.into_iter().map(|(k, v, _)| (k, v)).unzip();
            dims.push(DimCells {
                global: vec![0; keys.len()],
                keys,
                values,
                boundaries,
                lookup,
            });
        }
        let mut order: Vec<(usize, usize)> = dims
            .iter()
            .enumerate()
            .flat_map(|(q, d)| (0..d.len()).map(move |i| (q, i)))
            .collect();
        order.sort_by(|&(qa, ia), &(qb, ib)| {
            filtration_cmp(
                (dims[qa].values[ia], qa, &dims[qa].keys[ia]),
                (dims[qb].values[ib], qb, &dims[qb].keys[ib]),
            )
        });
        for (g, &(q, i)) in order.iter().enumerate() {
            dims[q].global[i] = g;
        }
        Ok(FilteredComplex {
            kind: self.kind,
            max_dim: self.max_dim,
            dims,
            by_global: order,
        })
    }
}

impl FilteredComplex {
    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    /// Highest homology dimension reported in barcodes.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Highest cell dimension stored.
    pub fn top_dim(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[DimCells] {
        &self.dims
    }

    pub fn cells(&self, dim: usize) -> &DimCells {
        &self.dims[dim]
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.dims.iter().map(DimCells::len).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.by_global.len()
    }

    /// `(dim, index)` of the cell at a global filtration position.
    pub fn cell_at(&self, global: usize) -> (usize, usize) {
        self.by_global[global]
    }

    /// Checks that every face precedes its cofaces in the global order.
    pub fn validate_order(&self) -> Result<()> {
        for q in 1..self.dims.len() {
            for i in 0..self.dims[q].len() {
                let g = self.dims[q].global[i];
                for &(f, _) in &self.dims[q].boundaries[i] {
                    if self.dims[q - 1].global[f] >= g {
                        return Err(Error::Structural(format!(
                            "face of cell {:?} does not precede it",
                            self.dims[q].keys[i]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Boundary column of cell `i` of dimension `q` over the field.
    pub fn boundary_column(&self, q: usize, i: usize, field: Field) -> SparseColumn {
        SparseColumn::from_pairs(
            field,
            self.dims[q].boundaries[i].iter().map(|&(f, c)| (f, c as i64)),
        )
    }

    /// `D_0, ..., D_top` in filtration order; `D_0` has no rows.
    pub fn boundary_matrices(&self, field: Field) -> Result<Vec<ColumnMatrix>> {
        self.validate_order()?;
        (0..self.dims.len())
            .map(|q| {
                let nrows = if q == 0 { 0 } else { self.dims[q - 1].len() };
                let cols = (0..self.dims[q].len())
                    .map(|i| self.boundary_column(q, i, field))
                    .collect();
                ColumnMatrix::from_columns(nrows, cols, field)
            })
            .collect()
    }
}

/// Signed faces of a simplex given by sorted vertices.
pub(crate) fn simplex_faces(vertices: &[u32]) -> Vec<(CellKey, i8)> {
    if vertices.len() < 2 {
        return Vec::new();
    }
    (0..vertices.len())
        .map(|k| {
            let face: CellKey = vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &v)| v)
                .collect();
            (face, if k % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::oracle::DenseMatrix;

    pub(crate) fn key(v: &[u32]) -> CellKey {
        v.to_vec().into_boxed_slice()
    }

    pub(crate) fn simplex(vs: &[u32], value: f64) -> Cell {
        Cell {
            dim: vs.len() - 1,
            key: key(vs),
            value,
            boundary: simplex_faces(vs),
        }
    }

    /// Vertices 0, 1, 2 then edges 01, 02, 12 and optionally the triangle.
    pub(crate) fn filtered_triangle(with_face: bool) -> FilteredComplex {
        let mut b = ComplexBuilder::new(ComplexKind::Simplicial, 2, 2);
        for (i, v) in [0u32, 1, 2].iter().enumerate() {
            b.push(simplex(&[*v], i as f64)).unwrap();
        }
        b.push(simplex(&[0, 1], 3.0)).unwrap();
        b.push(simplex(&[0, 2], 4.0)).unwrap();
        b.push(simplex(&[1, 2], 5.0)).unwrap();
        if with_face {
            b.push(simplex(&[0, 1, 2], 6.0)).unwrap();
        }
        b.build().unwrap()
    }

    #[test]
    fn triangle_boundaries() {
        let c = filtered_triangle(true);
        let d = c.boundary_matrices(Field::Z2).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].nrows(), 0);
        assert_eq!(d[2].ncols(), 1);
        assert_eq!(d[2].column(0).len(), 3);
        let expected = [[1u16, 1, 0], [1, 0, 1], [0, 1, 1]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(d[1].get(i, j), v);
            }
        }
        let f3 = Field::new(3).unwrap();
        let d3 = c.boundary_matrices(f3).unwrap();
        let prod = DenseMatrix::from_sparse(&d3[1]).mul(&DenseMatrix::from_sparse(&d3[2]));
        assert!(prod.is_zero());
    }

    #[test]
    fn ties_break_by_dimension_then_key() {
        let mut b = ComplexBuilder::new(ComplexKind::Simplicial, 1, 1);
        b.push(simplex(&[1], 0.0)).unwrap();
        b.push(simplex(&[0], 0.0)).unwrap();
        b.push(simplex(&[0, 1], 0.0)).unwrap();
        let c = b.build().unwrap();
        assert_eq!(c.cells(0).key(0), &[0]);
        assert_eq!(c.cells(0).global_index(0), 0);
        assert_eq!(c.cells(0).global_index(1), 1);
        assert_eq!(c.cells(1).global_index(0), 2);
        c.validate_order().unwrap();
    }

    #[test]
    fn builder_rejects_bad_faces() {
        let mut b = ComplexBuilder::new(ComplexKind::Simplicial, 1, 1);
        b.push(simplex(&[0], 0.0)).unwrap();
        b.push(simplex(&[0, 1], 1.0)).unwrap();
        assert!(matches!(b.build(), Err(Error::Structural(_))));

        let mut b = ComplexBuilder::new(ComplexKind::Simplicial, 1, 1);
        b.push(simplex(&[0], 0.0)).unwrap();
        b.push(simplex(&[1], 2.0)).unwrap();
        b.push(simplex(&[0, 1], 1.0)).unwrap();
        assert!(matches!(b.build(), Err(Error::Structural(_))));

        let mut b = ComplexBuilder::new(ComplexKind::Simplicial, 0, 0);
        assert!(b.push(simplex(&[0], f64::NAN)).is_err());
    }
}
