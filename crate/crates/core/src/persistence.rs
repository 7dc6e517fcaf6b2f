//! Barcodes, warm-start updates at the complex level, and the
//! persistence loss used for topological optimization.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::filtration::{diff_filtrations, euclidean, DiffStats, FilteredComplex};
use crate::reduction::{reduce_complex, Mode, OperationCounters, RUDecomposition};
use crate::update::update_complex;

/// One bar. Indices are positions in the global filtration order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    pub birth_index: usize,
    pub death_index: Option<usize>,
}

impl PersistencePair {
    pub fn is_finite(&self) -> bool {
        self.death_index.is_some()
    }

    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    fn sort_key(&self) -> (usize, f64, f64, usize) {
        (self.dim, self.birth, self.death, self.birth_index)
    }
}

/// A persistence barcode sorted by `(dim, birth, death, birth_index)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Barcode {
    pairs: Vec<PersistencePair>,
}

impl Barcode {
    pub fn new(mut pairs: Vec<PersistencePair>) -> Self {
        pairs.sort_by(|a, b| {
            let (x, y) = (a.sort_key(), b.sort_key());
            x.0.cmp(&y.0)
                .then(x.1.total_cmp(&y.1))
                .then(x.2.total_cmp(&y.2))
                .then(x.3.cmp(&y.3))
        });
        Barcode { pairs }
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Bars with `birth < death`.
    pub fn without_zero_length(&self) -> Barcode {
        Barcode {
            pairs: self.pairs.iter().filter(|p| p.birth < p.death).copied().collect(),
        }
    }

    /// One line per bar: `dim birth death birth_index death_index`, with
    /// `inf` and `-` for essential classes.
    pub fn to_text(&self, include_zero_length: bool) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            if !include_zero_length && p.birth == p.death {
                continue;
            }
            match p.death_index {
                Some(d) => writeln!(out, "{} {} {} {} {}", p.dim, p.birth, p.death, p.birth_index, d),
                None => writeln!(out, "{} {} inf {} -", p.dim, p.birth, p.birth_index),
            }
            .expect("writing to a string");
        }
        out
    }
}

/// How decompositions are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PersistenceOptions {
    pub mode: Mode,
    pub use_clearing: bool,
    /// Keep `V`; required for updates.
    pub keep_basis: bool,
    pub field: Field,
}

impl Default for PersistenceOptions {
    fn default() -> Self {
        PersistenceOptions {
            mode: Mode::Homology,
            use_clearing: false,
            keep_basis: true,
            field: Field::Z2,
        }
    }
}

/// Decompositions of every matrix of a complex, plus the complex itself.
///
/// `decompositions[q]` factors `D_q` in homology mode and `J D_{q+1}^T J`
/// in cohomology mode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSet {
    pub options: PersistenceOptions,
    pub complex: FilteredComplex,
    pub decompositions: Vec<RUDecomposition>,
    /// Work accumulated over the initial computation and all updates.
    pub counters: OperationCounters,
}

impl DecompositionSet {
    pub fn barcode(&self) -> Barcode {
        read_barcode(&self.complex, &self.decompositions, self.options.mode)
    }
}

/// Outcome of [`update_persistence`].
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateReport {
    pub counters: OperationCounters,
    pub stats: DiffStats,
    pub barcode: Barcode,
}

fn pivots(r: &crate::sparse::ColumnMatrix) -> Vec<bool> {
    let mut is_pivot = vec![false; r.nrows()];
    for c in r.columns() {
        if let Some(p) = c.pivot() {
            is_pivot[p] = true;
        }
    }
    is_pivot
}

fn read_barcode(complex: &FilteredComplex, decs: &[RUDecomposition], mode: Mode) -> Barcode {
    let max_dim = complex.max_dim();
    let mut pairs = Vec::new();
    let mut bar = |dim: usize, b: usize, d: Option<usize>| {
        let bc = complex.cells(dim);
        let (death, death_index) = match d {
            Some(j) => {
                let dc = complex.cells(dim + 1);
                (dc.value(j), Some(dc.global_index(j)))
            }
            None => (f64::INFINITY, None),
        };
        pairs.push(PersistencePair {
            dim,
            birth: bc.value(b),
            death,
            birth_index: bc.global_index(b),
            death_index,
        });
    };
    match mode {
        Mode::Homology => {
            for (q, dec) in decs.iter().enumerate() {
                let killed = decs.get(q + 1).map(|d| pivots(&d.r));
                for (j, c) in dec.r.columns().iter().enumerate() {
                    match c.pivot() {
                        Some(i) if q - 1 <= max_dim => bar(q - 1, i, Some(j)),
                        Some(_) => {}
                        None if q <= max_dim && !killed.as_ref().is_some_and(|k| k[j]) => {
                            bar(q, j, None)
                        }
                        None => {}
                    }
                }
            }
        }
        Mode::Cohomology => {
            for (q, dec) in decs.iter().enumerate() {
                let (nq, nr) = (dec.r.ncols(), dec.r.nrows());
                let killed = q.checked_sub(1).map(|p| pivots(&decs[p].r));
                for (c, col) in dec.r.columns().iter().enumerate() {
                    match col.pivot() {
                        Some(r) if q <= max_dim => bar(q, nq - 1 - c, Some(nr - 1 - r)),
                        Some(_) => {}
                        None if q <= max_dim && !killed.as_ref().is_some_and(|k| k[c]) => {
                            bar(q, nq - 1 - c, None)
                        }
                        None => {}
                    }
                }
            }
        }
    }
    Barcode::new(pairs)
}

/// Reduces every matrix of `complex` and reads off its barcode.
pub fn compute_persistence(
    complex: FilteredComplex,
    options: PersistenceOptions,
) -> Result<(DecompositionSet, Barcode)> {
    let boundaries = complex.boundary_matrices(options.field)?;
    let mut counters = OperationCounters::default();
    let decompositions = reduce_complex(
        &boundaries,
        options.mode,
        options.use_clearing,
        options.keep_basis,
        &mut counters,
    )?;
    let set = DecompositionSet {
        options,
        complex,
        decompositions,
        counters,
    };
    let barcode = set.barcode();
    Ok((set, barcode))
}

/// Moves `state` to `new` by diffing the complexes and updating every
/// decomposition in place.
pub fn update_persistence(state: &mut DecompositionSet, new: FilteredComplex) -> Result<UpdateReport> {
    if !state.options.keep_basis {
        return Err(Error::Usage("state was computed without a basis and cannot be updated".into()));
    }
    let diff = diff_filtrations(&state.complex, &new, state.options.mode, state.options.field)?;
    let mut counters = OperationCounters::default();
    if !diff.is_trivial() {
        update_complex(
            &mut state.decompositions,
            &diff,
            state.options.use_clearing,
            &mut counters,
        )?;
    }
    state.complex = new;
    state.counters += counters;
    Ok(UpdateReport {
        counters,
        stats: diff.stats,
        barcode: state.barcode(),
    })
}

/// Finite bars of dimension `dim`, longest first; ties by filtration index.
pub fn bars_by_length(barcode: &Barcode, dim: usize) -> Vec<PersistencePair> {
    let mut bars: Vec<PersistencePair> = barcode.in_dim(dim).filter(|p| p.is_finite()).copied().collect();
    bars.sort_by(|a, b| {
        b.length()
            .total_cmp(&a.length())
            .then(a.birth_index.cmp(&b.birth_index))
    });
    bars
}

/// `E = sum |d - b|^p ((d + b) / 2)^q` over finite bars of dimension `dim`,
/// starting from the `i0`-th longest (1-based; 0 is read as 1).
pub fn persistence_loss(barcode: &Barcode, p: f64, q: f64, i0: usize, dim: usize) -> f64 {
    bars_by_length(barcode, dim)
        .iter()
        .skip(i0.saturating_sub(1))
        .map(|bar| bar_loss(bar.birth, bar.death, p, q))
        .sum()
}

fn bar_loss(b: f64, d: f64, p: f64, q: f64) -> f64 {
    (d - b).abs().powf(p) * ((d + b) / 2.0).powf(q)
}

// (dE/db, dE/dd) for one bar with d >= b.
fn bar_loss_gradient(b: f64, d: f64, p: f64, q: f64) -> (f64, f64) {
    let len = d - b;
    let mid = (d + b) / 2.0;
    let dlen = if p == 0.0 { 0.0 } else { p * len.powf(p - 1.0) * mid.powf(q) };
    let dmid = if q == 0.0 { 0.0 } else { q * len.powf(p) * mid.powf(q - 1.0) / 2.0 };
    (-dlen + dmid, dlen + dmid)
}

// Lexicographically first vertex pair realizing the diameter.
fn diameter_pair(points: &[Vec<f64>], vertices: &[u32]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (x, &a) in vertices.iter().enumerate() {
        for &b in &vertices[x + 1..] {
            let d = euclidean(&points[a as usize], &points[b as usize]);
            if best.is_none_or(|(_, _, m)| d > m) {
                best = Some((a as usize, b as usize, d));
            }
        }
    }
    best.map(|(a, b, _)| (a, b))
}

/// Gradient of [`persistence_loss`] with respect to point coordinates for
/// a Rips complex built from `points`.
///
/// Each bar value is the diameter of its birth or death simplex, i.e. the
/// distance between one vertex pair, so the chain rule touches exactly the
/// two endpoints of that pair.
pub fn loss_gradient_rips(
    points: &[Vec<f64>],
    complex: &FilteredComplex,
    barcode: &Barcode,
    p: f64,
    q: f64,
    i0: usize,
    dim: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut grad: Vec<Vec<f64>> = points.iter().map(|x| vec![0.0; x.len()]).collect();
    for bar in bars_by_length(barcode, dim).iter().skip(i0.saturating_sub(1)) {
        let (gb, gd) = bar_loss_gradient(bar.birth, bar.death, p, q);
        let death_index = bar.death_index.expect("finite bars have a death");
        for (index, weight) in [(bar.birth_index, gb), (death_index, gd)] {
            let (cd, ci) = complex.cell_at(index);
            let Some((a, b)) = diameter_pair(points, complex.cells(cd).key(ci)) else {
                continue;
            };
            let dist = euclidean(&points[a], &points[b]);
            if dist == 0.0 {
                return Err(Error::DegenerateGradient(format!(
                    "points {a} and {b} coincide on a contributing simplex"
                )));
            }
            if weight == 0.0 {
                continue;
            }
            for k in 0..points[a].len() {
                let u = (points[a][k] - points[b][k]) / dist;
                grad[a][k] += weight * u;
                grad[b][k] -= weight * u;
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::tests::filtered_triangle;
    use crate::filtration::{rips_filtration, ComplexBuilder, ComplexKind, DistanceMatrix, RipsThreshold};

    fn pair(dim: usize, birth: f64, death: f64) -> PersistencePair {
        PersistencePair {
            dim,
            birth,
            death,
            birth_index: 0,
            death_index: death.is_finite().then_some(1),
        }
    }

    fn all_options() -> Vec<PersistenceOptions> {
        let mut out = Vec::new();
        for mode in [Mode::Homology, Mode::Cohomology] {
            for use_clearing in [false, true] {
                out.push(PersistenceOptions {
                    mode,
                    use_clearing,
                    ..Default::default()
                });
            }
        }
        out
    }

    #[test]
    fn single_vertex() {
        let mut b = ComplexBuilder::new(ComplexKind::Simplicial, 0, 0);
        b.push(crate::filtration::tests::simplex(&[0], 0.5)).unwrap();
        let c = b.build().unwrap();
        for opts in all_options() {
            let (_, bars) = compute_persistence(c.clone(), opts).unwrap();
            assert_eq!(bars.to_text(false), "0 0.5 inf 0 -\n");
        }
    }

    #[test]
    fn hollow_triangle() {
        let c = filtered_triangle(false);
        for opts in all_options() {
            let (_, bars) = compute_persistence(c.clone(), opts).unwrap();
            assert_eq!(
                bars.to_text(true),
                "0 0 inf 0 -\n0 1 3 1 3\n0 2 4 2 4\n1 5 inf 5 -\n"
            );
        }
    }

    #[test]
    fn unit_square_rips() {
        let d = DistanceMatrix::from_points(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let c = rips_filtration(&d, RipsThreshold::Infinite, 1).unwrap();
        for opts in all_options() {
            let (_, bars) = compute_persistence(c.clone(), opts).unwrap();
            let h1: Vec<_> = bars.without_zero_length().in_dim(1).copied().collect();
            assert_eq!(h1.len(), 1);
            assert_eq!((h1[0].birth, h1[0].death), (1.0, 2f64.sqrt()));
        }
    }

    #[test]
    fn trivial_update_is_free() {
        let c = filtered_triangle(true);
        for opts in all_options() {
            let (mut set, bars) = compute_persistence(c.clone(), opts).unwrap();
            let before = set.clone();
            let report = update_persistence(&mut set, c.clone()).unwrap();
            assert!(report.counters.is_zero());
            assert_eq!(report.barcode, bars);
            assert_eq!(set, before);
        }
    }

    #[test]
    fn update_requires_basis() {
        let c = filtered_triangle(true);
        let opts = PersistenceOptions {
            keep_basis: false,
            ..Default::default()
        };
        let (mut set, _) = compute_persistence(c.clone(), opts).unwrap();
        assert!(matches!(update_persistence(&mut set, c), Err(Error::Usage(_))));
    }

    #[test]
    fn loss_examples() {
        assert_eq!(persistence_loss(&Barcode::default(), 2.0, 0.0, 1, 1), 0.0);
        let one = Barcode::new(vec![pair(1, 1.0, 2.0)]);
        assert_eq!(persistence_loss(&one, 2.0, 0.0, 1, 1), 1.0);
        let two = Barcode::new(vec![pair(1, 0.0, 2.0), pair(1, 0.0, 1.0), pair(1, 0.0, f64::INFINITY)]);
        assert_eq!(persistence_loss(&two, 2.0, 0.0, 2, 1), 1.0);
        assert_eq!(persistence_loss(&two, 2.0, 0.0, 1, 1), 5.0);
        assert_eq!(persistence_loss(&two, 1.0, 1.0, 1, 1), 2.0 * 1.0 + 1.0 * 0.5);
    }

    #[test]
    fn gradient_without_bars_is_zero() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let d = DistanceMatrix::from_points(&pts).unwrap();
        let c = rips_filtration(&d, RipsThreshold::Infinite, 1).unwrap();
        let (_, bars) = compute_persistence(c.clone(), PersistenceOptions::default()).unwrap();
        let g = loss_gradient_rips(&pts, &c, &bars, 2.0, 0.0, 1, 1).unwrap();
        assert!(g.iter().flatten().all(|&x| x == 0.0));
    }
}
