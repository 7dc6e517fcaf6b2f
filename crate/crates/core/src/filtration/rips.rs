//! Vietoris–Rips filtrations.

use super::{simplex_faces, CellKey, ComplexBuilder, ComplexKind, FilteredComplex};
use crate::error::{Error, Result};

/// A dense symmetric matrix of pairwise distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Euclidean distances between points of a common dimension.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let n = points.len();
        if let Some(first) = points.first() {
            if let Some(k) = points.iter().position(|p| p.len() != first.len()) {
                return Err(Error::Input(format!(
                    "point {k} has {} coordinates, expected {}",
                    points[k].len(),
                    first.len()
                )));
            }
        }
        if let Some(k) = points.iter().position(|p| p.iter().any(|x| !x.is_finite())) {
            return Err(Error::Input(format!("point {k} has a non-finite coordinate")));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(&points[i], &points[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Validates a square, symmetric, non-negative matrix with zero diagonal.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "distance matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::Input(format!(
                        "distance ({i}, {j}) = {d} is not a non-negative number"
                    )));
                }
            }
            if row[i] != 0.0 {
                return Err(Error::Input(format!("diagonal entry {i} is nonzero")));
            }
            data.extend_from_slice(row);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Input(format!(
                        "distance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `min_x max_y d(x, y)`; beyond it the Rips complex is a cone.
pub fn enclosing_radius(dist: &DistanceMatrix) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::Usage("enclosing radius of an empty metric space".into()));
    }
    Ok((0..dist.n)
        .map(|i| (0..dist.n).map(|j| dist.get(i, j)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min))
}

/// Where a Rips filtration stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RipsThreshold {
    Value(f64),
    Enclosing,
    Infinite,
}

impl RipsThreshold {
    pub fn resolve(self, dist: &DistanceMatrix) -> Result<f64> {
        match self {
            RipsThreshold::Value(r) if r.is_nan() => {
                Err(Error::Usage("Rips threshold is not a number".into()))
            }
            RipsThreshold::Value(r) => Ok(r),
            RipsThreshold::Enclosing => enclosing_radius(dist),
            RipsThreshold::Infinite => Ok(f64::INFINITY),
        }
    }
}

/// All simplices of dimension at most `max_dim + 1` with diameter within
/// the threshold, valued by diameter.
pub fn rips_filtration(
    dist: &DistanceMatrix,
    threshold: RipsThreshold,
    max_dim: usize,
) -> Result<FilteredComplex> {
    let r = threshold.resolve(dist)?;
    let top = max_dim + 1;
    let n = dist.n;
    let mut builder = ComplexBuilder::new(ComplexKind::Simplicial, top, max_dim);
    // neighbors[v]: higher-numbered vertices within the threshold
    let neighbors: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            ((v + 1)..n)
                .filter(|&w| dist.get(v, w) <= r)
                .map(|w| w as u32)
                .collect()
        })
        .collect();
    let mut clique: Vec<u32> = Vec::with_capacity(top + 1);
    for v in 0..n {
        if dist.get(v, v) > r {
            continue;
        }
        builder.push_raw(0, vec![v as u32].into_boxed_slice(), dist.get(v, v), Vec::new());
        clique.push(v as u32);
        grow(dist, r, top, &neighbors, &neighbors[v], &mut clique, dist.get(v, v), &mut builder);
        clique.pop();
    }
    builder.build()
}

// Extends `clique` by each candidate adjacent to all of its vertices.
#[allow(clippy::too_many_arguments)]
fn grow(
    dist: &DistanceMatrix,
    r: f64,
    top: usize,
    neighbors: &[Vec<u32>],
    candidates: &[u32],
    clique: &mut Vec<u32>,
    diameter: f64,
    builder: &mut ComplexBuilder,
) {
    if clique.len() > top {
        return;
    }
    for (k, &w) in candidates.iter().enumerate() {
        let d = clique
            .iter()
            .map(|&u| dist.get(u as usize, w as usize))
            .fold(diameter, f64::max);
        if d > r {
            continue;
        }
        clique.push(w);
        let key: CellKey = clique.clone().into_boxed_slice();
        builder.push_raw(clique.len() - 1, key, d, simplex_faces(clique));
        if clique.len() <= top {
            let next: Vec<u32> = candidates[k + 1..]
                .iter()
                .copied()
                .filter(|x| neighbors[w as usize].binary_search(x).is_ok())
                .collect();
            grow(dist, r, top, neighbors, &next, clique, d, builder);
        }
        clique.pop();
    }
}
