//! Factorization kernels for `D V = R`.
//!
//! Every kernel applies the same column operations to the matrix being
//! reduced and to its companion, so an identity `A = C B` holding on entry
//! still holds on exit.

use std::ops::{AddAssign, Sub};

use crate::error::{Error, Result};
use crate::sparse::ColumnMatrix;

/// Work performed by the kernels.
///
/// `column_additions` counts every elimination step of every reduction;
/// `pivot_eliminations` is the subset performed while triangularizing a
/// basis in [`make_upper_triangular`]; `swaps` counts the column exchanges
/// made there. `field_operations` counts nonzeros visited by column merges
/// and row products.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperationCounters {
    pub column_additions: u64,
    pub pivot_eliminations: u64,
    pub swaps: u64,
    pub field_operations: u64,
}

impl OperationCounters {
    pub fn is_zero(&self) -> bool {
        *self == OperationCounters::default()
    }

    /// Sum of the three structural counters.
    pub fn total(&self) -> u64 {
        self.column_additions + self.pivot_eliminations + self.swaps
    }
}

impl AddAssign for OperationCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.column_additions += rhs.column_additions;
        self.pivot_eliminations += rhs.pivot_eliminations;
        self.swaps += rhs.swaps;
        self.field_operations += rhs.field_operations;
    }
}

impl Sub for OperationCounters {
    type Output = OperationCounters;

    fn sub(self, rhs: Self) -> Self {
        OperationCounters {
            column_additions: self.column_additions - rhs.column_additions,
            pivot_eliminations: self.pivot_eliminations - rhs.pivot_eliminations,
            swaps: self.swaps - rhs.swaps,
            field_operations: self.field_operations - rhs.field_operations,
        }
    }
}

/// Which chain complex the decompositions factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Boundary matrices `D_q`, processed in decreasing `q` when clearing.
    Homology,
    /// Anti-transposed coboundaries `J D_{q+1}^T J`, increasing `q`.
    Cohomology,
}

/// A factorization `D V = R` with `V` invertible upper-triangular.
///
/// `v` is `None` when the basis is not maintained; such a decomposition
/// yields barcodes but cannot be updated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RUDecomposition {
    pub r: ColumnMatrix,
    pub v: Option<ColumnMatrix>,
    pub reduced: bool,
}

impl RUDecomposition {
    /// The trivial factorization `D I = D`.
    pub fn from_boundary(d: ColumnMatrix, keep_basis: bool) -> Self {
        let v = keep_basis.then(|| ColumnMatrix::identity(d.ncols(), d.field()));
        RUDecomposition {
            r: d,
            v,
            reduced: false,
        }
    }

    pub fn reduce(&mut self, counters: &mut OperationCounters) {
        reduce(&mut self.r, self.v.as_mut(), counters);
        self.reduced = true;
    }

    pub fn basis(&self) -> Result<&ColumnMatrix> {
        self.v
            .as_ref()
            .ok_or_else(|| Error::Usage("decomposition was computed without a basis".into()))
    }

    /// For each row index, the column whose pivot it is (reduced `R` only).
    pub fn pivot_owner(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.r.nrows()];
        for (j, c) in self.r.columns().iter().enumerate() {
            if let Some(p) = c.pivot() {
                owner[p] = Some(j);
            }
        }
        owner
    }
}

fn reduce_counting(
    a: &mut ColumnMatrix,
    mut b: Option<&mut ColumnMatrix>,
    counters: &mut OperationCounters,
    triangularizing: bool,
) {
    if let Some(b) = b.as_deref() {
        assert_eq!(a.ncols(), b.ncols(), "companion matrix column count");
    }
    let field = a.field();
    let mut owner: Vec<Option<usize>> = vec![None; a.nrows()];
    for j in 0..a.ncols() {
        while let Some((i, coeff)) = a.column(j).pivot_entry() {
            match owner[i] {
                Some(k) => {
                    let pivot_coeff = a.column(k).pivot_entry().map(|e| e.1).unwrap_or(1);
                    let alpha = field.neg(
                        field
                            .div(coeff, pivot_coeff)
                            .expect("pivot entries are nonzero"),
                    );
                    let mut work = a.add_column_multiple(j, alpha, k);
                    if let Some(b) = b.as_deref_mut() {
                        work += b.add_column_multiple(j, alpha, k);
                    }
                    counters.column_additions += 1;
                    counters.field_operations += work as u64;
                    if triangularizing {
                        counters.pivot_eliminations += 1;
                    }
                }
                None => {
                    owner[i] = Some(j);
                    break;
                }
            }
        }
    }
}

/// Column reduction (pHcol): for each column left to right, cancel its
/// pivot against the unique earlier column sharing it until the pivot is
/// new or the column vanishes. `b`, when present, receives the same
/// column operations.
pub fn reduce(a: &mut ColumnMatrix, b: Option<&mut ColumnMatrix>, counters: &mut OperationCounters) {
    reduce_counting(a, b, counters, false);
}

/// Row-ordered reduction (pHrow): for each row bottom to top, cancel the
/// pivot of every column sharing it against the leftmost such column.
/// Produces the same output as [`reduce`].
pub fn reduce_phrow(a: &mut ColumnMatrix, mut b: Option<&mut ColumnMatrix>, counters: &mut OperationCounters) {
    if let Some(b) = b.as_deref() {
        assert_eq!(a.ncols(), b.ncols(), "companion matrix column count");
    }
    let field = a.field();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); a.nrows()];
    for (j, c) in a.columns().iter().enumerate() {
        if let Some(p) = c.pivot() {
            buckets[p].push(j);
        }
    }
    for i in (0..a.nrows()).rev() {
        let mut indices = std::mem::take(&mut buckets[i]);
        if indices.len() < 2 {
            continue;
        }
        indices.sort_unstable();
        let p = indices[0];
        let pivot_coeff = a.column(p).pivot_entry().expect("bucketed column").1;
        for &j in &indices[1..] {
            let coeff = a.column(j).pivot_entry().expect("bucketed column").1;
            let alpha = field.neg(field.div(coeff, pivot_coeff).expect("nonzero pivot"));
            let mut work = a.add_column_multiple(j, alpha, p);
            if let Some(b) = b.as_deref_mut() {
                work += b.add_column_multiple(j, alpha, p);
            }
            counters.column_additions += 1;
            counters.field_operations += work as u64;
            if let Some(q) = a.column(j).pivot() {
                debug_assert!(q < i);
                buckets[q].push(j);
            }
        }
    }
}

/// Brings an invertible square `a` to upper-triangular form with
/// `pivot(a[j]) = j`, mirroring every column operation and swap on `b`.
pub fn make_upper_triangular(
    a: &mut ColumnMatrix,
    mut b: Option<&mut ColumnMatrix>,
    counters: &mut OperationCounters,
) -> Result<()> {
    let n = a.ncols();
    if a.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "triangularization needs a square matrix, got {}x{n}",
            a.nrows()
        )));
    }
    if let Some(b) = b.as_deref() {
        if b.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "companion has {} columns, expected {n}",
                b.ncols()
            )));
        }
    }
    reduce_counting(a, b.as_deref_mut(), counters, true);
    let mut holder = vec![usize::MAX; n];
    for j in 0..n {
        match a.column(j).pivot() {
            Some(p) => holder[p] = j,
            None => return Err(Error::Singular(j)),
        }
    }
    for j in 0..n {
        let pj = a.column(j).pivot().expect("nonzero after reduction");
        if pj != j {
            let other = holder[j];
            a.swap_columns(j, other);
            if let Some(b) = b.as_deref_mut() {
                b.swap_columns(j, other);
            }
            holder[pj] = other;
            holder[j] = j;
            counters.swaps += 1;
        }
    }
    Ok(())
}

/// Clearing: for every column of the reduced `r_next` with pivot `i`, zero
/// column `i` of `r` and set column `i` of `v` to that column of `r_next`.
///
/// Valid whenever `r = D_q v` and `r_next = D_{q+1} v_next` with
/// `D_q D_{q+1} = 0`. Returns the number of columns cleared.
pub fn apply_clearing(
    r: &mut ColumnMatrix,
    mut v: Option<&mut ColumnMatrix>,
    r_next: &ColumnMatrix,
) -> Result<usize> {
    if r_next.nrows() != r.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "clearing source has {} rows but the target has {} columns",
            r_next.nrows(),
            r.ncols()
        )));
    }
    let mut cleared = 0;
    for c in r_next.columns() {
        if let Some(i) = c.pivot() {
            r.set_column(i, Default::default());
            if let Some(v) = v.as_deref_mut() {
                v.set_column(i, c.clone());
            }
            cleared += 1;
        }
    }
    Ok(cleared)
}

/// Anti-transposed coboundaries `J D_{q+1}^T J` for `q = 0..=top`, given
/// boundaries `D_0..=D_top`.
pub fn coboundaries(boundaries: &[ColumnMatrix]) -> Vec<ColumnMatrix> {
    let top = boundaries.len();
    (0..top)
        .map(|q| match boundaries.get(q + 1) {
            Some(d) => d.anti_transpose(),
            None => {
                let d = &boundaries[q];
                ColumnMatrix::zeros(0, d.ncols(), d.field())
            }
        })
        .collect()
}

/// Order in which matrices are reduced and, for each, the index of the
/// already-reduced matrix whose pivots clear it.
pub fn clearing_schedule(mode: Mode, count: usize) -> Vec<(usize, Option<usize>)> {
    match mode {
        Mode::Homology => (0..count)
            .rev()
            .map(|q| (q, (q + 1 < count).then_some(q + 1)))
            .collect(),
        Mode::Cohomology => (0..count).map(|q| (q, q.checked_sub(1))).collect(),
    }
}

/// Checks `D_q D_{q+1} = 0` for consecutive boundaries.
pub fn check_chain_complex(boundaries: &[ColumnMatrix]) -> Result<()> {
    for q in 1..boundaries.len() {
        let prod = boundaries[q - 1].mul(&boundaries[q])?;
        if !prod.is_zero() {
            return Err(Error::Structural(format!(
                "boundary of boundary is nonzero between dimensions {} and {}",
                q - 1,
                q
            )));
        }
    }
    Ok(())
}

/// Reduces the matrices of a chain complex and returns one decomposition
/// per matrix.
///
/// `boundaries[q]` is `D_q` (rows: `(q-1)`-cells, columns: `q`-cells). In
/// cohomology mode the decompositions factor [`coboundaries`] instead.
pub fn reduce_complex(
    boundaries: &[ColumnMatrix],
    mode: Mode,
    use_clearing: bool,
    keep_basis: bool,
    counters: &mut OperationCounters,
) -> Result<Vec<RUDecomposition>> {
    for q in 1..boundaries.len() {
        if boundaries[q].nrows() != boundaries[q - 1].ncols() {
            return Err(Error::DimensionMismatch(format!(
                "D_{q} has {} rows but there are {} cells of dimension {}",
                boundaries[q].nrows(),
                boundaries[q - 1].ncols(),
                q - 1
            )));
        }
    }
    if cfg!(debug_assertions) {
        check_chain_complex(boundaries)?;
    }
    let matrices = match mode {
        Mode::Homology => boundaries.to_vec(),
        Mode::Cohomology => coboundaries(boundaries),
    };
    let mut decs: Vec<RUDecomposition> = matrices
        .into_iter()
        .map(|d| RUDecomposition::from_boundary(d, keep_basis))
        .collect();
    let count = decs.len();
    for (q, source) in clearing_schedule(mode, count) {
        if use_clearing {
            if let Some(s) = source {
                let (target, src) = pair_mut(&mut decs, q, s);
                apply_clearing(&mut target.r, target.v.as_mut(), &src.r)?;
            }
        }
        decs[q].reduce(counters);
    }
    Ok(decs)
}

/// Mutable access to `items[a]` alongside shared access to `items[b]`.
pub(crate) fn pair_mut<T>(items: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = items.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = items.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}
