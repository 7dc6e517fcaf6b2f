//! Warm-start updates of `D V = R` factorizations.
//!
//! All updates run the same pipeline on one matrix: permute, make `V`
//! upper-triangular, delete the block of removed cells, splice in inserted
//! cells, then reduce. Homology deletes trailing blocks and inserts
//! columns; cohomology works on anti-transposed coboundaries, deletes
//! leading blocks and inserts rows.

use crate::error::{Error, Result};
use crate::filtration::FiltrationDiff;
use crate::reduction::{apply_clearing, make_upper_triangular, Mode, OperationCounters, RUDecomposition};
use crate::sparse::{ColumnMatrix, Permutation, SparseColumn};

/// New content for inserted cells.
#[derive(Debug, Clone, Copy)]
pub enum Inserted<'a> {
    /// Boundary columns placed at `inserted_cols`.
    Columns(&'a [SparseColumn]),
    /// Coboundary rows placed at `inserted_rows`, indexed by final column.
    Rows(&'a [SparseColumn]),
}

/// The change to one matrix.
#[derive(Debug, Clone, Copy)]
pub struct MatrixDiff<'a> {
    pub row_perm: &'a Permutation,
    pub col_perm: &'a Permutation,
    pub deleted_rows: usize,
    pub deleted_cols: usize,
    pub inserted_rows: &'a [usize],
    pub inserted_cols: &'a [usize],
    pub inserted: Inserted<'a>,
}

impl MatrixDiff<'_> {
    pub fn is_trivial(&self) -> bool {
        self.row_perm.is_identity()
            && self.col_perm.is_identity()
            && self.deleted_rows == 0
            && self.deleted_cols == 0
            && self.inserted_rows.is_empty()
            && self.inserted_cols.is_empty()
    }

    fn mode(&self) -> Mode {
        match self.inserted {
            Inserted::Columns(_) => Mode::Homology,
            Inserted::Rows(_) => Mode::Cohomology,
        }
    }
}

impl FiltrationDiff {
    /// The diff of matrix `q`: `D_q` in homology, `J D_{q+1}^T J` in
    /// cohomology. Row and column views share one permutation per cell
    /// dimension, so adjacent matrices stay consistent.
    pub fn matrix(&self, q: usize) -> MatrixDiff<'_> {
        let (rows, cols) = match self.mode {
            Mode::Homology => (self.cells(q.checked_sub(1)), self.cells(Some(q))),
            Mode::Cohomology => (self.cells(Some(q + 1)), self.cells(Some(q))),
        };
        let inserted = match self.mode {
            Mode::Homology => Inserted::Columns(&cols.inserted_boundaries),
            Mode::Cohomology => Inserted::Rows(&rows.inserted_boundaries),
        };
        MatrixDiff {
            row_perm: &rows.perm,
            col_perm: &cols.perm,
            deleted_rows: rows.deleted,
            deleted_cols: cols.deleted,
            inserted_rows: &rows.inserted,
            inserted_cols: &cols.inserted,
            inserted,
        }
    }
}

/// Pipeline checkpoints reported to observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Permuted,
    Triangularized,
    Deleted,
    Inserted,
    Reduced,
}

fn parts(dec: &mut RUDecomposition) -> Result<(&mut ColumnMatrix, &mut ColumnMatrix)> {
    match dec.v.as_mut() {
        Some(v) => Ok((&mut dec.r, v)),
        None => Err(Error::Usage("updates need a decomposition computed with its basis".into())),
    }
}

fn permute_and_triangularize(
    dec: &mut RUDecomposition,
    row_perm: &Permutation,
    col_perm: &Permutation,
    counters: &mut OperationCounters,
    observe: &mut dyn FnMut(Stage, &RUDecomposition),
) -> Result<()> {
    let (r, v) = parts(dec)?;
    if row_perm.len() != r.nrows() || col_perm.len() != r.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "permutations of size {}x{} for a {}x{} matrix",
            row_perm.len(),
            col_perm.len(),
            r.nrows(),
            r.ncols()
        )));
    }
    v.permute_rows(col_perm)?;
    r.permute_rows(row_perm)?;
    dec.reduced = false;
    observe(Stage::Permuted, dec);
    let (r, v) = parts(dec)?;
    make_upper_triangular(v, Some(r), counters)?;
    observe(Stage::Triangularized, dec);
    Ok(())
}

/// Updates a decomposition of `D` to one of `P_r D P_c^T`.
pub fn update_permutation(
    dec: &mut RUDecomposition,
    row_perm: &Permutation,
    col_perm: &Permutation,
    counters: &mut OperationCounters,
) -> Result<()> {
    if row_perm.is_identity() && col_perm.is_identity() && dec.reduced {
        parts(dec)?;
        return Ok(());
    }
    permute_and_triangularize(dec, row_perm, col_perm, counters, &mut |_, _| {})?;
    dec.reduce(counters);
    Ok(())
}

/// Applies a homology diff (trailing deletions, inserted columns).
pub fn general_update(
    dec: &mut RUDecomposition,
    diff: &MatrixDiff<'_>,
    counters: &mut OperationCounters,
) -> Result<()> {
    if diff.mode() != Mode::Homology {
        return Err(Error::Usage("homology update given a coboundary diff".into()));
    }
    apply_matrix_diff(dec, diff, None, counters, &mut |_, _| {})
}

/// Applies a cohomology diff (leading deletions, inserted rows).
pub fn general_update_cohomology(
    dec: &mut RUDecomposition,
    diff: &MatrixDiff<'_>,
    counters: &mut OperationCounters,
) -> Result<()> {
    if diff.mode() != Mode::Cohomology {
        return Err(Error::Usage("cohomology update given a boundary diff".into()));
    }
    apply_matrix_diff(dec, diff, None, counters, &mut |_, _| {})
}

/// Runs the update pipeline matching the diff's mode. When `clear_with`
/// holds the already-updated neighbouring `R`, clearing runs before the
/// final reduction. `observe` sees the decomposition at every stage.
pub fn apply_matrix_diff(
    dec: &mut RUDecomposition,
    diff: &MatrixDiff<'_>,
    clear_with: Option<&ColumnMatrix>,
    counters: &mut OperationCounters,
    observe: &mut dyn FnMut(Stage, &RUDecomposition),
) -> Result<()> {
    parts(dec)?;
    if diff.is_trivial() && dec.reduced {
        return Ok(());
    }
    let mode = diff.mode();
    permute_and_triangularize(dec, diff.row_perm, diff.col_perm, counters, observe)?;

    let (k_r, k_c) = (diff.deleted_rows, diff.deleted_cols);
    let (r, v) = parts(dec)?;
    match mode {
        Mode::Homology => {
            r.delete_trailing(k_r, k_c)?;
            v.delete_trailing(k_c, k_c)?;
        }
        Mode::Cohomology => {
            r.truncate_leading(k_r, k_c)?;
            v.truncate_leading(k_c, k_c)?;
        }
    }
    observe(Stage::Deleted, dec);

    let (r, v) = parts(dec)?;
    let units: Vec<SparseColumn> = diff.inserted_cols.iter().map(|&p| SparseColumn::unit(p)).collect();
    v.insert_rows(diff.inserted_cols)?;
    v.insert_cols(diff.inserted_cols, units)?;
    r.insert_rows(diff.inserted_rows)?;
    match diff.inserted {
        Inserted::Columns(cols) => {
            r.insert_cols(diff.inserted_cols, cols.to_vec())?;
        }
        Inserted::Rows(rows) => {
            r.insert_cols(diff.inserted_cols, vec![SparseColumn::new(); diff.inserted_cols.len()])?;
            // rows of V, so each product touches only the rows it combines
            let v_rows = v.transpose();
            let field = v.field();
            let products: Vec<SparseColumn> = rows
                .iter()
                .map(|row| {
                    row.iter().fold(SparseColumn::new(), |acc, (k, c)| {
                        let source = v_rows.column(k);
                        counters.field_operations += source.len() as u64;
                        acc.axpy(field, c, source)
                    })
                })
                .collect();
            r.fill_rows(diff.inserted_rows, &products)?;
        }
    }
    observe(Stage::Inserted, dec);

    if let Some(source) = clear_with {
        let (r, v) = parts(dec)?;
        apply_clearing(r, Some(v), source)?;
    }
    dec.reduce(counters);
    observe(Stage::Reduced, dec);
    Ok(())
}

/// Updates one decomposition per matrix in the clearing-compatible order.
pub fn update_complex(
    decs: &mut [RUDecomposition],
    diff: &FiltrationDiff,
    use_clearing: bool,
    counters: &mut OperationCounters,
) -> Result<()> {
    if decs.len() != diff.dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} decompositions for a diff over {} dimensions",
            decs.len(),
            diff.dims.len()
        )));
    }
    for (q, source) in crate::reduction::clearing_schedule(diff.mode, decs.len()) {
        let md = diff.matrix(q);
        match source.filter(|_| use_clearing && !md.is_trivial()) {
            Some(s) => {
                let (target, src) = crate::reduction::pair_mut(decs, q, s);
                apply_matrix_diff(target, &md, Some(&src.r), counters, &mut |_, _| {})?;
            }
            None => apply_matrix_diff(&mut decs[q], &md, None, counters, &mut |_, _| {})?,
        }
    }
    Ok(())
}
