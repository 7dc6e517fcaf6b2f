//! Column-major sparse matrices over Z/p.
//!
//! A [`ColumnMatrix`] is a vector of [`SparseColumn`]s, each an ordered list of
//! `(row, coeff)` pairs with strictly increasing rows and no explicit zeros.
//! Column reordering moves column handles; row edits rewrite indices.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{Coeff, Field};

/// Sorted nonzero entries of one column.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SparseColumn {
    entries: Vec<(usize, Coeff)>,
}

impl SparseColumn {
    pub fn new() -> Self {
        SparseColumn::default()
    }

    /// Builds a column from arbitrary `(row, value)` pairs: sorts, sums
    /// duplicates in the field and drops zeros.
    pub fn from_pairs(field: Field, pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut raw: Vec<(usize, Coeff)> = pairs
            .into_iter()
            .map(|(r, v)| (r, field.from_i64(v)))
            .collect();
        raw.sort_by_key(|e| e.0);
        let mut entries: Vec<(usize, Coeff)> = Vec::with_capacity(raw.len());
        for (r, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == r => last.1 = field.add(last.1, v),
                _ => entries.push((r, v)),
            }
        }
        entries.retain(|e| e.1 != 0);
        SparseColumn { entries }
    }

    /// Wraps entries that already satisfy the column invariants.
    pub fn from_sorted(entries: Vec<(usize, Coeff)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| e.1 != 0));
        SparseColumn { entries }
    }

    /// The unit vector `e_row`.
    pub fn unit(row: usize) -> Self {
        SparseColumn {
            entries: vec![(row, 1)],
        }
    }

    pub fn entries(&self) -> &[(usize, Coeff)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Coeff)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Coeff)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest row index holding a nonzero.
    #[inline]
    pub fn pivot(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    #[inline]
    pub fn pivot_entry(&self) -> Option<(usize, Coeff)> {
        self.entries.last().copied()
    }

    pub fn first_row(&self) -> Option<usize> {
        self.entries.first().map(|e| e.0)
    }

    pub fn get(&self, row: usize) -> Coeff {
        match self.entries.binary_search_by_key(&row, |e| e.0) {
            Ok(k) => self.entries[k].1,
            Err(_) => 0,
        }
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Returns `self + alpha * source` as a freshly merged column.
    pub fn axpy(&self, field: Field, alpha: Coeff, source: &SparseColumn) -> SparseColumn {
        if alpha == 0 || source.is_empty() {
            return self.clone();
        }
        let (a, b) = (&self.entries, &source.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            let (ra, va) = a[x];
            let (rb, vb) = b[y];
            if ra < rb {
                out.push((ra, va));
                x += 1;
            } else if rb < ra {
                out.push((rb, field.mul(alpha, vb)));
                y += 1;
            } else {
                let v = field.add(va, field.mul(alpha, vb));
                if v != 0 {
                    out.push((ra, v));
                }
                x += 1;
                y += 1;
            }
        }
        out.extend_from_slice(&a[x..]);
        out.extend(b[y..].iter().map(|&(r, v)| (r, field.mul(alpha, v))));
        SparseColumn { entries: out }
    }

    /// Sparse dot product.
    pub fn dot(&self, field: Field, other: &SparseColumn) -> Coeff {
        let (a, b) = (&self.entries, &other.entries);
        let (mut x, mut y) = (0, 0);
        let mut acc = 0;
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    acc = field.add(acc, field.mul(a[x].1, b[y].1));
                    x += 1;
                    y += 1;
                }
            }
        }
        acc
    }

    fn remap_rows(&mut self, map: impl Fn(usize) -> usize, sort: bool) {
        for e in &mut self.entries {
            e.0 = map(e.0);
        }
        if sort {
            self.entries.sort_unstable_by_key(|e| e.0);
        }
    }

    fn merge_disjoint(&mut self, extra: &[(usize, Coeff)]) -> std::result::Result<(), usize> {
        let mut out = Vec::with_capacity(self.entries.len() + extra.len());
        let (a, b) = (&self.entries, extra);
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[x]);
                    x += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[y]);
                    y += 1;
                }
                std::cmp::Ordering::Equal => return Err(a[x].0),
            }
        }
        out.extend_from_slice(&a[x..]);
        out.extend_from_slice(&b[y..]);
        self.entries = out;
        Ok(())
    }
}

/// A bijection on `[0, n)`: the element at position `i` moves to `image[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// The permutation of the empty set.
    pub const EMPTY: Permutation = Permutation { image: Vec::new() };

    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || seen[x] {
                return Err(Error::Usage(format!(
                    "not a permutation of 0..{n}: offending value {x}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &x) in self.image.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { image: inv }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: self.image.iter().map(|&x| other.image[x]).collect(),
        }
    }

    /// Number of inversions, i.e. pairs `i < j` with `P(i) > P(j)`.
    pub fn kendall_tau(&self) -> u64 {
        inversions(&self.image)
    }

    /// Inversions divided by `n(n-1)/2`; zero for `n < 2`.
    pub fn normalized_kendall_tau(&self) -> f64 {
        let n = self.image.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        self.kendall_tau() as f64 / (n * (n - 1.0) / 2.0)
    }
}

/// Counts inversions of a sequence by merge sort in `O(n log n)`.
pub fn inversions<T: Ord + Copy>(values: &[T]) -> u64 {
    fn sort_count<T: Ord + Copy>(v: &mut [T], buf: &mut Vec<T>) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort_count(&mut v[..mid], buf) + sort_count(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[j] < v[i] {
                count += (mid - i) as u64;
                buf.push(v[j]);
                j += 1;
            } else {
                buf.push(v[i]);
                i += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..n]);
        v.copy_from_slice(buf);
        count
    }
    let mut v = values.to_vec();
    let mut buf = Vec::with_capacity(v.len());
    sort_count(&mut v, &mut buf)
}

fn check_positions(positions: &[usize], bound: usize, what: &str) -> Result<()> {
    for w in positions.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Usage(format!(
                "{what} positions must be strictly increasing"
            )));
        }
    }
    if let Some(&last) = positions.last() {
        if last >= bound {
            return Err(Error::Usage(format!(
                "{what} position {last} out of range for size {bound}"
            )));
        }
    }
    Ok(())
}

/// Maps old indices onto the grown index space with `positions` left free.
fn shifted_indices(old_len: usize, positions: &[usize]) -> Vec<usize> {
    let mut map = Vec::with_capacity(old_len);
    let mut k = 0;
    for new in 0..old_len + positions.len() {
        if k < positions.len() && positions[k] == new {
            k += 1;
        } else {
            map.push(new);
        }
    }
    map
}

/// A sparse matrix stored as a sequence of columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMatrix {
    nrows: usize,
    columns: Vec<SparseColumn>,
    field: Field,
}

impl ColumnMatrix {
    pub fn zeros(nrows: usize, ncols: usize, field: Field) -> Self {
        ColumnMatrix {
            nrows,
            columns: vec![SparseColumn::new(); ncols],
            field,
        }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        ColumnMatrix {
            nrows: n,
            columns: (0..n).map(SparseColumn::unit).collect(),
            field,
        }
    }

    pub fn from_columns(nrows: usize, columns: Vec<SparseColumn>, field: Field) -> Result<Self> {
        for (j, c) in columns.iter().enumerate() {
            if let Some(p) = c.pivot() {
                if p >= nrows {
                    return Err(Error::DimensionMismatch(format!(
                        "column {j} has row {p} but the matrix has {nrows} rows"
                    )));
                }
            }
            if c.iter().any(|(_, v)| v as u32 >= field.modulus()) {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has an unreduced coefficient"
                )));
            }
        }
        Ok(ColumnMatrix {
            nrows,
            columns,
            field,
        })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseColumn::len).sum()
    }

    #[inline]
    pub fn column(&self, j: usize) -> &SparseColumn {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseColumn] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<SparseColumn> {
        self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> Coeff {
        self.columns[j].get(i)
    }

    /// Replaces column `j`. The column must respect the row bound.
    pub fn set_column(&mut self, j: usize, col: SparseColumn) {
        debug_assert!(col.pivot().is_none_or(|p| p < self.nrows));
        self.columns[j] = col;
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        self.columns.swap(a, b);
    }

    /// `A[target] += alpha * A[source]`, returning the entries processed.
    #[inline]
    pub(crate) fn add_column_multiple(&mut self, target: usize, alpha: Coeff, source: usize) -> usize {
        let work = self.columns[target].len() + self.columns[source].len();
        let merged = self.columns[target].axpy(self.field, alpha, &self.columns[source]);
        self.columns[target] = merged;
        work
    }

    /// Row `i` moves to row `P(i)`; columns are re-sorted.
    pub fn permute_rows(&mut self, perm: &Permutation) -> Result<()> {
        if perm.len() != self.nrows {
            return Err(Error::DimensionMismatch(format!(
                "row permutation of size {} for {} rows",
                perm.len(),
                self.nrows
            )));
        }
        if perm.is_identity() {
            return Ok(());
        }
        for c in &mut self.columns {
            c.remap_rows(|i| perm.apply(i), true);
        }
        Ok(())
    }

    /// Column `j` moves to position `P(j)`.
    pub fn permute_cols(&mut self, perm: &Permutation) -> Result<()> {
        if perm.len() != self.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "column permutation of size {} for {} columns",
                perm.len(),
                self.ncols()
            )));
        }
        if perm.is_identity() {
            return Ok(());
        }
        let mut slots: Vec<Option<SparseColumn>> = vec![None; self.ncols()];
        for (j, c) in std::mem::take(&mut self.columns).into_iter().enumerate() {
            slots[perm.apply(j)] = Some(c);
        }
        self.columns = slots.into_iter().map(|c| c.unwrap_or_default()).collect();
        Ok(())
    }

    /// Drops the final `k_r` rows and `k_c` columns after checking that the
    /// surviving columns have no entries in the dropped rows.
    pub fn delete_trailing(&mut self, k_r: usize, k_c: usize) -> Result<()> {
        if k_r > self.nrows || k_c > self.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot delete {k_r} rows and {k_c} columns from a {}x{} matrix",
                self.nrows,
                self.ncols()
            )));
        }
        let keep_rows = self.nrows - k_r;
        let keep_cols = self.ncols() - k_c;
        for (j, c) in self.columns[..keep_cols].iter().enumerate() {
            if let Some(p) = c.pivot() {
                if p >= keep_rows {
                    return Err(Error::ZeroBlockViolation { row: p, column: j });
                }
            }
        }
        self.columns.truncate(keep_cols);
        self.nrows = keep_rows;
        Ok(())
    }

    /// Drops the initial `k_r` rows and `k_c` columns; surviving entries are
    /// shifted up by `k_r`.
    pub fn delete_leading(&mut self, k_r: usize, k_c: usize) -> Result<()> {
        if k_r > self.nrows || k_c > self.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot delete {k_r} rows and {k_c} columns from a {}x{} matrix",
                self.nrows,
                self.ncols()
            )));
        }
        for (j, c) in self.columns.iter().enumerate().skip(k_c) {
            if let Some(r) = c.first_row() {
                if r < k_r {
                    return Err(Error::ZeroBlockViolation { row: r, column: j });
                }
            }
        }
        self.columns.drain(..k_c);
        if k_r > 0 {
            for c in &mut self.columns {
                c.remap_rows(|i| i - k_r, false);
            }
        }
        self.nrows -= k_r;
        Ok(())
    }

    /// Keeps only the trailing block after the initial `k_r` rows and `k_c`
    /// columns. Entries of surviving columns in dropped rows are discarded;
    /// the dropped columns must vanish on the surviving rows.
    pub fn truncate_leading(&mut self, k_r: usize, k_c: usize) -> Result<()> {
        if k_r > self.nrows || k_c > self.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot delete {k_r} rows and {k_c} columns from a {}x{} matrix",
                self.nrows,
                self.ncols()
            )));
        }
        for (j, c) in self.columns[..k_c].iter().enumerate() {
            if let Some(p) = c.pivot() {
                if p >= k_r {
                    return Err(Error::ZeroBlockViolation { row: p, column: j });
                }
            }
        }
        self.columns.drain(..k_c);
        if k_r > 0 {
            for c in &mut self.columns {
                c.entries.retain(|&(i, _)| i >= k_r);
                c.remap_rows(|i| i - k_r, false);
            }
        }
        self.nrows -= k_r;
        Ok(())
    }

    /// Inserts zero rows so that they land at the given final positions.
    pub fn insert_rows(&mut self, positions: &[usize]) -> Result<()> {
        let new_rows = self.nrows + positions.len();
        check_positions(positions, new_rows, "row")?;
        if positions.is_empty() {
            return Ok(());
        }
        let map = shifted_indices(self.nrows, positions);
        for c in &mut self.columns {
            c.remap_rows(|i| map[i], false);
        }
        self.nrows = new_rows;
        Ok(())
    }

    /// Splices `cols` in so that `cols[t]` ends up at column `positions[t]`.
    pub fn insert_cols(&mut self, positions: &[usize], cols: Vec<SparseColumn>) -> Result<()> {
        if positions.len() != cols.len() {
            return Err(Error::Usage(format!(
                "{} insert positions for {} columns",
                positions.len(),
                cols.len()
            )));
        }
        let new_cols = self.ncols() + cols.len();
        check_positions(positions, new_cols, "column")?;
        if let Some(bad) = cols.iter().find_map(|c| c.pivot().filter(|&p| p >= self.nrows)) {
            return Err(Error::Usage(format!(
                "inserted column has row {bad} beyond {} rows",
                self.nrows
            )));
        }
        if cols.is_empty() {
            return Ok(());
        }
        let old = std::mem::take(&mut self.columns);
        let mut out = Vec::with_capacity(new_cols);
        let mut old_iter = old.into_iter();
        let mut ins_iter = positions.iter().zip(cols).peekable();
        for j in 0..new_cols {
            match ins_iter.peek() {
                Some(&(&p, _)) if p == j => out.push(ins_iter.next().unwrap().1),
                _ => out.push(old_iter.next().unwrap()),
            }
        }
        self.columns = out;
        Ok(())
    }

    /// Writes sparse row vectors into rows that are currently zero.
    /// `rows[t]` is indexed by column and lands in row `positions[t]`.
    pub fn fill_rows(&mut self, positions: &[usize], rows: &[SparseColumn]) -> Result<()> {
        if positions.len() != rows.len() {
            return Err(Error::Usage(format!(
                "{} row positions for {} rows",
                positions.len(),
                rows.len()
            )));
        }
        check_positions(positions, self.nrows, "row")?;
        let mut pending: Vec<Vec<(usize, Coeff)>> = vec![Vec::new(); self.ncols()];
        for (&pos, row) in positions.iter().zip(rows) {
            for (j, v) in row.iter() {
                if j >= self.ncols() {
                    return Err(Error::Usage(format!(
                        "row entry in column {j} beyond {} columns",
                        self.ncols()
                    )));
                }
                pending[j].push((pos, v));
            }
        }
        for (j, extra) in pending.into_iter().enumerate() {
            if !extra.is_empty() {
                self.columns[j]
                    .merge_disjoint(&extra)
                    .map_err(|row| Error::ZeroBlockViolation { row, column: j })?;
            }
        }
        Ok(())
    }

    /// The row vector `r * self`, where `r` is indexed by row of `self`.
    pub fn row_times_matrix(&self, row: &SparseColumn) -> SparseColumn {
        if row.is_empty() {
            return SparseColumn::new();
        }
        let entries = self
            .columns
            .iter()
            .enumerate()
            .filter_map(|(j, c)| {
                let v = row.dot(self.field, c);
                (v != 0).then_some((j, v))
            })
            .collect();
        SparseColumn::from_sorted(entries)
    }

    /// `J * self^T * J`: entry `(i, j)` moves to `(ncols-1-j, nrows-1-i)`.
    pub fn anti_transpose(&self) -> ColumnMatrix {
        let (m, n) = (self.nrows, self.ncols());
        let mut cols: Vec<Vec<(usize, Coeff)>> = vec![Vec::new(); m];
        for j in (0..n).rev() {
            for (i, v) in self.columns[j].iter() {
                cols[m - 1 - i].push((n - 1 - j, v));
            }
        }
        ColumnMatrix {
            nrows: n,
            columns: cols.into_iter().map(SparseColumn::from_sorted).collect(),
            field: self.field,
        }
    }

    pub fn transpose(&self) -> ColumnMatrix {
        let mut cols: Vec<Vec<(usize, Coeff)>> = vec![Vec::new(); self.nrows];
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c.iter() {
                cols[i].push((j, v));
            }
        }
        ColumnMatrix {
            nrows: self.ncols(),
            columns: cols.into_iter().map(SparseColumn::from_sorted).collect(),
            field: self.field,
        }
    }

    /// Sparse product `self * rhs`.
    pub fn mul(&self, rhs: &ColumnMatrix) -> Result<ColumnMatrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows,
                self.ncols(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        if self.field != rhs.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                rhs.field.modulus(),
            ));
        }
        let f = self.field;
        let columns = rhs
            .columns
            .iter()
            .map(|c| {
                c.iter().fold(SparseColumn::new(), |acc, (k, v)| {
                    acc.axpy(f, v, &self.columns[k])
                })
            })
            .collect();
        Ok(ColumnMatrix {
            nrows: self.nrows,
            columns,
            field: f,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseColumn::is_empty)
    }

    /// True when every column `j` has pivot `j` (square upper-triangular
    /// with nonzero diagonal).
    pub fn is_unit_pivot_upper_triangular(&self) -> bool {
        self.nrows == self.ncols()
            && self
                .columns
                .iter()
                .enumerate()
                .all(|(j, c)| c.pivot() == Some(j))
    }

    /// True when nonzero columns have pairwise distinct pivots.
    pub fn is_reduced(&self) -> bool {
        let mut seen = vec![false; self.nrows];
        for c in &self.columns {
            if let Some(p) = c.pivot() {
                if seen[p] {
                    return false;
                }
                seen[p] = true;
            }
        }
        true
    }

    /// Debug dump: one `row col value` triple per line, sorted by (row, col).
    pub fn dump(&self) -> String {
        let mut triples: Vec<(usize, usize, Coeff)> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (i, j, v)))
            .collect();
        triples.sort_unstable();
        let mut out = String::new();
        for (i, j, v) in triples {
            let _ = writeln!(out, "{i} {j} {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::DenseMatrix;
    use proptest::prelude::*;

    fn col(entries: &[(usize, Coeff)]) -> SparseColumn {
        SparseColumn::from_sorted(entries.to_vec())
    }

    fn z(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    #[test]
    fn pivot_examples() {
        assert_eq!(col(&[]).pivot(), None);
        assert_eq!(col(&[(0, 1)]).pivot(), Some(0));
        assert_eq!(col(&[(1, 1), (4, 1), (7, 1)]).pivot(), Some(7));
    }

    #[test]
    fn axpy_examples() {
        let f2 = Field::Z2;
        assert_eq!(col(&[(2, 1)]).axpy(f2, 1, &col(&[(2, 1)])), col(&[]));
        assert_eq!(
            col(&[(0, 1), (3, 1)]).axpy(f2, 1, &col(&[(1, 1), (3, 1)])),
            col(&[(0, 1), (1, 1)])
        );
        // dense oracle over Z/3: [1,0] + 2*[2,1] = [5,2] = [2,2]
        let f3 = z(3);
        let got = col(&[(0, 1)]).axpy(f3, 2, &col(&[(0, 2), (1, 1)]));
        let dense: Vec<i64> = [1i64, 0]
            .iter()
            .zip([2i64, 1])
            .map(|(a, b)| (a + 2 * b).rem_euclid(3))
            .collect();
        assert_eq!(dense, vec![2, 2]);
        assert_eq!(got, col(&[(0, 2), (1, 2)]));
    }

    #[test]
    fn permute_rows_examples() {
        let f = Field::Z2;
        let mut a = ColumnMatrix::from_columns(3, vec![col(&[(0, 1), (2, 1)])], f).unwrap();
        let orig = a.clone();
        a.permute_rows(&Permutation::identity(3)).unwrap();
        assert_eq!(a, orig);

        let mut b = ColumnMatrix::from_columns(2, vec![col(&[(0, 1)])], f).unwrap();
        b.permute_rows(&Permutation::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(b.column(0), &col(&[(1, 1)]));

        let mut c = ColumnMatrix::from_columns(3, vec![col(&[(0, 1), (1, 1)])], f).unwrap();
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let expected = DenseMatrix::permutation(&p, f).mul(&DenseMatrix::from_sparse(&c));
        c.permute_rows(&p).unwrap();
        assert_eq!(DenseMatrix::from_sparse(&c), expected);
        assert_eq!(c.column(0), &col(&[(0, 1), (2, 1)]));

        assert!(c.permute_rows(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn permute_cols_examples() {
        let f = z(3);
        let a = ColumnMatrix::from_columns(
            3,
            vec![col(&[(0, 1)]), col(&[(1, 2)]), col(&[(0, 1), (2, 1)]), col(&[])],
            f,
        )
        .unwrap();
        let mut b = a.clone();
        b.permute_cols(&Permutation::identity(4)).unwrap();
        assert_eq!(a, b);

        let swap = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        b.permute_cols(&swap).unwrap();
        assert_ne!(a, b);
        b.permute_cols(&swap).unwrap();
        assert_eq!(a, b);

        // column j moves to P(j): A' = A * Pi^T where Pi e_j = e_{P(j)}
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let expected = DenseMatrix::from_sparse(&a).mul(&DenseMatrix::permutation(&p, f).transpose());
        b.permute_cols(&p).unwrap();
        assert_eq!(DenseMatrix::from_sparse(&b), expected);
    }

    #[test]
    fn delete_trailing_examples() {
        let f = Field::Z2;
        let mut a = ColumnMatrix::identity(3, f);
        a.delete_trailing(0, 0).unwrap();
        assert_eq!(a, ColumnMatrix::identity(3, f));
        a.delete_trailing(1, 1).unwrap();
        assert_eq!(a, ColumnMatrix::identity(2, f));

        let mut b = ColumnMatrix::from_columns(2, vec![col(&[(1, 1)]), col(&[(1, 1)])], f).unwrap();
        assert_eq!(
            b.delete_trailing(1, 1),
            Err(Error::ZeroBlockViolation { row: 1, column: 0 })
        );
    }

    #[test]
    fn delete_trailing_random_matches_dense_slice() {
        let f = z(3);
        let mut rng = 12345u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 33) as i64
        };
        for _ in 0..20 {
            // random upper-triangular 6x6: zero lower-left block guaranteed
            let cols: Vec<SparseColumn> = (0..6)
                .map(|j| SparseColumn::from_pairs(f, (0..=j).map(|i| (i, next() % 3))))
                .collect();
            let mut a = ColumnMatrix::from_columns(6, cols, f).unwrap();
            let dense = DenseMatrix::from_sparse(&a);
            a.delete_trailing(2, 2).unwrap();
            assert_eq!(DenseMatrix::from_sparse(&a), dense.slice(0..4, 0..4));
        }
    }

    #[test]
    fn truncate_leading_keeps_trailing_block() {
        let f = Field::Z2;
        let mut v = ColumnMatrix::from_columns(
            3,
            vec![col(&[(0, 1)]), col(&[(0, 1), (1, 1)]), col(&[(0, 1), (2, 1)])],
            f,
        )
        .unwrap();
        v.truncate_leading(1, 1).unwrap();
        assert_eq!(v.columns(), &[col(&[(0, 1)]), col(&[(1, 1)])]);

        let mut w = ColumnMatrix::from_columns(2, vec![col(&[(1, 1)]), col(&[(1, 1)])], f).unwrap();
        assert_eq!(
            w.truncate_leading(1, 1),
            Err(Error::ZeroBlockViolation { row: 1, column: 0 })
        );
    }

    #[test]
    fn delete_leading_examples() {
        let f = Field::Z2;
        let mut a = ColumnMatrix::identity(3, f);
        a.delete_leading(0, 0).unwrap();
        assert_eq!(a, ColumnMatrix::identity(3, f));

        let mut b = ColumnMatrix::from_columns(
            3,
            vec![col(&[(0, 1)]), col(&[(1, 1), (2, 1)]), col(&[(2, 1)])],
            f,
        )
        .unwrap();
        b.delete_leading(1, 1).unwrap();
        assert_eq!(b.nrows(), 2);
        assert_eq!(b.columns(), &[col(&[(0, 1), (1, 1)]), col(&[(1, 1)])]);

        let mut c = ColumnMatrix::from_columns(2, vec![col(&[(0, 1)]), col(&[(0, 1)])], f).unwrap();
        assert_eq!(
            c.delete_leading(1, 1),
            Err(Error::ZeroBlockViolation { row: 0, column: 1 })
        );

        // random lower-triangular-by-block case against the dense slice
        let cols: Vec<SparseColumn> = (0..5)
            .map(|j| SparseColumn::from_pairs(f, (j.max(2)..5).map(|i| (i, ((i * 7 + j * 3) % 2) as i64))))
            .collect();
        let mut d = ColumnMatrix::from_columns(5, cols, f).unwrap();
        let dense = DenseMatrix::from_sparse(&d);
        d.delete_leading(2, 2).unwrap();
        assert_eq!(DenseMatrix::from_sparse(&d), dense.slice(2..5, 2..5));
    }

    #[test]
    fn insert_rows_examples() {
        let f = Field::Z2;
        let mut a = ColumnMatrix::from_columns(1, vec![col(&[(0, 1)])], f).unwrap();
        let orig = a.clone();
        a.insert_rows(&[]).unwrap();
        assert_eq!(a, orig);
        a.insert_rows(&[0]).unwrap();
        assert_eq!(a.column(0), &col(&[(1, 1)]));
        assert_eq!(a.nrows(), 2);

        let mut b = ColumnMatrix::from_columns(3, vec![col(&[(0, 1), (1, 1), (2, 1)])], f).unwrap();
        b.insert_rows(&[0, 2, 5]).unwrap();
        let mut dense = DenseMatrix::zeros(6, 1, f);
        for r in [1, 3, 4] {
            dense.set(r, 0, 1);
        }
        assert_eq!(DenseMatrix::from_sparse(&b), dense);

        assert!(b.insert_rows(&[2, 1]).is_err());
        assert!(b.insert_rows(&[1, 1]).is_err());
    }

    #[test]
    fn insert_cols_examples() {
        let f = Field::Z2;
        let mut a = ColumnMatrix::from_columns(2, vec![col(&[(0, 1)]), col(&[(1, 1)]), col(&[])], f).unwrap();
        let orig = a.clone();
        a.insert_cols(&[], vec![]).unwrap();
        assert_eq!(a, orig);

        let mut end = a.clone();
        end.insert_cols(&[3], vec![col(&[(0, 1), (1, 1)])]).unwrap();
        assert_eq!(&end.columns()[..3], orig.columns());
        assert_eq!(end.column(3), &col(&[(0, 1), (1, 1)]));

        a.insert_cols(&[0, 2], vec![col(&[(1, 1)]), col(&[(0, 1), (1, 1)])]).unwrap();
        let mut dense = DenseMatrix::zeros(2, 5, f);
        dense.set(1, 0, 1);
        dense.set(0, 1, 1);
        dense.set(0, 2, 1);
        dense.set(1, 2, 1);
        dense.set(1, 3, 1);
        assert_eq!(DenseMatrix::from_sparse(&a), dense);

        assert!(a.insert_cols(&[9], vec![col(&[])]).is_err());
        assert!(a.insert_cols(&[0], vec![col(&[(5, 1)])]).is_err());
    }

    #[test]
    fn row_times_matrix_examples() {
        let f = Field::Z2;
        let v = ColumnMatrix::identity(4, f);
        assert!(v.row_times_matrix(&col(&[])).is_empty());
        let r = col(&[(1, 1), (3, 1)]);
        assert_eq!(v.row_times_matrix(&r), r);

        let cols: Vec<SparseColumn> = (0..5)
            .map(|j| SparseColumn::from_pairs(f, (0..5).map(|i| (i, ((i * 3 + j * 5 + i * j) % 2) as i64))))
            .collect();
        let m = ColumnMatrix::from_columns(5, cols, f).unwrap();
        let r = col(&[(0, 1), (2, 1), (4, 1)]);
        let mut rd = DenseMatrix::zeros(1, 5, f);
        for (i, v) in r.iter() {
            rd.set(0, i, v);
        }
        let expected = rd.mul(&DenseMatrix::from_sparse(&m));
        let got = m.row_times_matrix(&r);
        for j in 0..5 {
            assert_eq!(got.get(j), expected.get(0, j));
        }
    }

    #[test]
    fn anti_transpose_examples() {
        let f = z(3);
        let one = ColumnMatrix::from_columns(1, vec![col(&[(0, 2)])], f).unwrap();
        assert_eq!(one.anti_transpose(), one);

        let a = ColumnMatrix::from_columns(
            2,
            vec![col(&[(0, 1)]), col(&[(0, 2), (1, 1)]), col(&[(1, 2)])],
            f,
        )
        .unwrap();
        let at = a.anti_transpose();
        let j2 = DenseMatrix::anti_identity(2, f);
        let j3 = DenseMatrix::anti_identity(3, f);
        let expected = j3.mul(&DenseMatrix::from_sparse(&a).transpose()).mul(&j2);
        assert_eq!(DenseMatrix::from_sparse(&at), expected);
        assert_eq!(at.anti_transpose(), a);
    }

    #[test]
    fn kendall_tau_examples() {
        assert_eq!(Permutation::identity(10).kendall_tau(), 0);
        assert_eq!(Permutation::new(vec![3, 2, 1, 0]).unwrap().kendall_tau(), 6);
        let p = Permutation::new(vec![4, 0, 7, 2, 6, 1, 5, 3]).unwrap();
        let img = p.image();
        let brute = (0..8)
            .flat_map(|i| (i + 1..8).map(move |j| (i, j)))
            .filter(|&(i, j)| img[i] > img[j])
            .count() as u64;
        assert_eq!(p.kendall_tau(), brute);
        assert!((Permutation::new(vec![1, 0]).unwrap().normalized_kendall_tau() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dump_format() {
        let a = ColumnMatrix::from_columns(3, vec![col(&[(2, 1)]), col(&[(0, 1), (2, 1)])], Field::Z2).unwrap();
        assert_eq!(a.dump(), "0 1 1\n2 0 1\n2 1 1\n");
    }

    fn arb_matrix() -> impl Strategy<Value = (ColumnMatrix, u32)> {
        (prop_oneof![Just(2u32), Just(3u32)], 1usize..=8, 1usize..=8).prop_flat_map(|(p, m, n)| {
            proptest::collection::vec(proptest::collection::vec(0..p as i64, m), n).prop_map(move |dense| {
                let f = Field::new(p).unwrap();
                let cols = dense
                    .into_iter()
                    .map(|c| SparseColumn::from_pairs(f, c.into_iter().enumerate()))
                    .collect();
                (ColumnMatrix::from_columns(m, cols, f).unwrap(), p)
            })
        })
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    fn well_formed(a: &ColumnMatrix) -> bool {
        a.columns().iter().all(|c| {
            c.entries().windows(2).all(|w| w[0].0 < w[1].0)
                && c.iter().all(|(r, v)| v != 0 && r < a.nrows() && (v as u32) < a.field().modulus())
        })
    }

    proptest! {
        #[test]
        fn row_permutation_round_trip_and_dense((a, _p) in arb_matrix(), seed in any::<u64>()) {
            let n = a.nrows();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let p = Permutation::new(perm).unwrap();
            let mut b = a.clone();
            b.permute_rows(&p).unwrap();
            prop_assert!(well_formed(&b));
            prop_assert_eq!(
                DenseMatrix::from_sparse(&b),
                DenseMatrix::permutation(&p, a.field()).mul(&DenseMatrix::from_sparse(&a))
            );
            b.permute_rows(&p.inverse()).unwrap();
            prop_assert_eq!(&b, &a);
            prop_assert_eq!(b.nnz(), DenseMatrix::from_sparse(&a).nnz());
        }

        #[test]
        fn column_permutation_round_trip(((a, _p), perm) in arb_matrix().prop_flat_map(|(a, p)| {
            let n = a.ncols();
            (Just((a, p)), arb_perm(n))
        })) {
            let mut b = a.clone();
            b.permute_cols(&perm).unwrap();
            prop_assert!(well_formed(&b));
            b.permute_cols(&perm.inverse()).unwrap();
            prop_assert_eq!(b, a);
        }

        #[test]
        fn axpy_matches_dense((a, p) in arb_matrix(), alpha in 0u16..3) {
            let f = a.field();
            let alpha = alpha % p as u16;
            if a.ncols() >= 2 {
                let out = a.column(0).axpy(f, alpha, a.column(1));
                prop_assert!(out.entries().windows(2).all(|w| w[0].0 < w[1].0));
                prop_assert!(out.iter().all(|(_, v)| v != 0));
                for i in 0..a.nrows() {
                    prop_assert_eq!(out.get(i), f.add(a.get(i, 0), f.mul(alpha, a.get(i, 1))));
                }
            }
        }

        #[test]
        fn anti_transpose_matches_dense((a, _p) in arb_matrix()) {
            let f = a.field();
            let at = a.anti_transpose();
            prop_assert!(well_formed(&at));
            let expected = DenseMatrix::anti_identity(a.ncols(), f)
                .mul(&DenseMatrix::from_sparse(&a).transpose())
                .mul(&DenseMatrix::anti_identity(a.nrows(), f));
            prop_assert_eq!(DenseMatrix::from_sparse(&at), expected);
            prop_assert_eq!(at.nnz(), a.nnz());
        }

        #[test]
        fn sparse_product_matches_dense((a, _p) in arb_matrix(), (b, _q) in arb_matrix()) {
            if a.field() == b.field() {
                let bt = b.transpose();
                if a.ncols() == bt.nrows() {
                    let prod = a.mul(&bt).unwrap();
                    prop_assert!(well_formed(&prod));
                    prop_assert_eq!(
                        DenseMatrix::from_sparse(&prod),
                        DenseMatrix::from_sparse(&a).mul(&DenseMatrix::from_sparse(&bt))
                    );
                }
            }
        }

        #[test]
        fn kendall_tau_matches_pair_count(perm in (0usize..40).prop_flat_map(arb_perm)) {
            let img = perm.image();
            let n = img.len();
            let brute = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| img[i] > img[j])
                .count() as u64;
            prop_assert_eq!(perm.kendall_tau(), brute);
            prop_assert_eq!(perm.inverse().kendall_tau(), brute);
        }
    }
}
