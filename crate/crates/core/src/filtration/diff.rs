//! Key-based differences between two filtrations.

use super::FilteredComplex;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::reduction::Mode;
use crate::sparse::{inversions, Permutation, SparseColumn};

/// How the cells of one dimension change, in the mode's index space.
///
/// Homology indexes cells in filtration order; cohomology indexes them in
/// reverse filtration order. `perm` sends each old cell to its slot in the
/// intermediate order: survivors ordered as in the new filtration, deleted
/// cells in the trailing block (homology) or leading block (cohomology).
#[derive(Debug, Clone, PartialEq)]
pub struct CellDiff {
    pub perm: Permutation,
    pub deleted: usize,
    /// Sorted final positions of inserted cells.
    pub inserted: Vec<usize>,
    /// Boundary of each inserted cell over the previous dimension, in the
    /// same index space; aligned with `inserted`.
    pub inserted_boundaries: Vec<SparseColumn>,
    /// Inversions among surviving cells.
    pub kendall_tau: u64,
}

static NO_CELLS: CellDiff = CellDiff {
    perm: Permutation::EMPTY,
    deleted: 0,
    inserted: Vec::new(),
    inserted_boundaries: Vec::new(),
    kendall_tau: 0,
};

impl CellDiff {
    pub fn is_trivial(&self) -> bool {
        self.deleted == 0 && self.inserted.is_empty() && self.perm.is_identity()
    }

    pub fn old_len(&self) -> usize {
        self.perm.len()
    }

    pub fn new_len(&self) -> usize {
        self.perm.len() - self.deleted + self.inserted.len()
    }
}

/// Summary numbers for reports.
#[derive(Debug, Default, Clone, Copy, PartialEq)]
pub struct DiffStats {
    /// Inversions among surviving cells in the global filtration order.
    pub kendall_tau: u64,
    /// `kendall_tau` over the number of surviving pairs; 0 when fewer than
    /// two cells survive.
    pub normalized_kendall_tau: f64,
    pub inserted: usize,
    pub deleted: usize,
    pub old_cells: usize,
    pub new_cells: usize,
}

impl DiffStats {
    /// Inserted cells over the old total cell count across all dimensions.
    pub fn add_fraction(&self) -> f64 {
        self.inserted as f64 / self.old_cells.max(1) as f64
    }

    /// Deleted cells over the old total cell count across all dimensions.
    pub fn delete_fraction(&self) -> f64 {
        self.deleted as f64 / self.old_cells.max(1) as f64
    }
}

/// Per-dimension cell differences between two filtrations.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationDiff {
    pub mode: Mode,
    pub field: Field,
    pub dims: Vec<CellDiff>,
    pub stats: DiffStats,
}

impl FiltrationDiff {
    pub fn is_trivial(&self) -> bool {
        self.dims.iter().all(CellDiff::is_trivial)
    }

    pub(crate) fn cells(&self, dim: Option<usize>) -> &CellDiff {
        dim.and_then(|q| self.dims.get(q)).unwrap_or(&NO_CELLS)
    }
}

fn faces_by_key(c: &FilteredComplex, q: usize, i: usize) -> Vec<(&[u32], i8)> {
    let mut f: Vec<(&[u32], i8)> = c
        .cells(q)
        .boundary(i)
        .iter()
        .map(|&(f, s)| (c.cells(q - 1).key(f), s))
        .collect();
    f.sort_unstable();
    f
}

/// Diffs `old` against `new` by canonical keys.
pub fn diff_filtrations(
    old: &FilteredComplex,
    new: &FilteredComplex,
    mode: Mode,
    field: Field,
) -> Result<FiltrationDiff> {
    if old.kind() != new.kind() || old.top_dim() != new.top_dim() {
        return Err(Error::Usage(format!(
            "cannot diff a {:?} complex of dimension {} against a {:?} complex of dimension {}",
            old.kind(),
            old.top_dim(),
            new.kind(),
            new.top_dim()
        )));
    }
    let mut dims = Vec::with_capacity(old.dims().len());
    let mut survivors_global: Vec<(usize, usize)> = Vec::new();
    let (mut inserted_total, mut deleted_total) = (0, 0);
    for q in 0..old.dims().len() {
        let (o, n) = (old.cells(q), new.cells(q));
        let mut new_of_old: Vec<Option<usize>> = vec![None; o.len()];
        let mut is_survivor = vec![false; n.len()];
        for (i, key) in o.keys().iter().enumerate() {
            if let Some(j) = n.index_of(key) {
                if q > 0 && faces_by_key(old, q, i) != faces_by_key(new, q, j) {
                    return Err(Error::InvalidDiff(format!(
                        "cell {key:?} has different faces in the two filtrations"
                    )));
                }
                new_of_old[i] = Some(j);
                is_survivor[j] = true;
                survivors_global.push((o.global_index(i), n.global_index(j)));
            }
        }
        let survivors = is_survivor.iter().filter(|&&s| s).count();
        let deleted = o.len() - survivors;
        // rank of each surviving new cell among survivors, in new order
        let mut rank = vec![usize::MAX; n.len()];
        let mut r = 0;
        for (j, &s) in is_survivor.iter().enumerate() {
            if s {
                rank[j] = r;
                r += 1;
            }
        }
        let surviving_ranks: Vec<usize> = new_of_old.iter().flatten().map(|&j| rank[j]).collect();
        let kendall_tau = inversions(&surviving_ranks);

        let (o_len, n_len) = (o.len(), n.len());
        let mut image = vec![0; o_len];
        let mut next_deleted = 0;
        match mode {
            Mode::Homology => {
                for (i, target) in new_of_old.iter().enumerate() {
                    image[i] = match target {
                        Some(j) => rank[*j],
                        None => {
                            next_deleted += 1;
                            survivors + next_deleted - 1
                        }
                    };
                }
            }
            Mode::Cohomology => {
                for (i, target) in new_of_old.iter().enumerate().rev() {
                    image[o_len - 1 - i] = match target {
                        Some(j) => deleted + survivors - 1 - rank[*j],
                        None => {
                            next_deleted += 1;
                            next_deleted - 1
                        }
                    };
                }
            }
        }
        let perm = Permutation::new(image)?;

        let face_count = if q == 0 { 0 } else { new.cells(q - 1).len() };
        let boundary = |j: usize| {
            SparseColumn::from_pairs(
                field,
                n.boundary(j).iter().map(|&(f, c)| {
                    let f = match mode {
                        Mode::Homology => f,
                        Mode::Cohomology => face_count - 1 - f,
                    };
                    (f, c as i64)
                }),
            )
        };
        let fresh: Vec<usize> = (0..n_len).filter(|&j| !is_survivor[j]).collect();
        let (inserted, inserted_boundaries): (Vec<usize>, Vec<SparseColumn>) = match mode {
            Mode::Homology => fresh.iter().map(|&j| (j, boundary(j))).unzip(),
            Mode::Cohomology => fresh.iter().rev().map(|&j| (n_len - 1 - j, boundary(j))).unzip(),
        };
        inserted_total += inserted.len();
        deleted_total += deleted;
        dims.push(CellDiff {
            perm,
            deleted,
            inserted,
            inserted_boundaries,
            kendall_tau,
        });
    }
    survivors_global.sort_unstable();
    let seq: Vec<usize> = survivors_global.iter().map(|p| p.1).collect();
    let kendall_tau = inversions(&seq);
    let pairs = seq.len() as f64 * (seq.len() as f64 - 1.0) / 2.0;
    let stats = DiffStats {
        kendall_tau,
        normalized_kendall_tau: if pairs > 0.0 { kendall_tau as f64 / pairs } else { 0.0 },
        inserted: inserted_total,
        deleted: deleted_total,
        old_cells: old.total_cells(),
        new_cells: new.total_cells(),
    };
    Ok(FiltrationDiff {
        mode,
        field,
        dims,
        stats,
    })
}
