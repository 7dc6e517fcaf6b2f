//! Seeded synthetic inputs: smooth images with additive noise and noisy
//! samples of a circle, a figure eight and a sphere.
//!
//! Randomness comes from ChaCha8, a counter-based stream cipher generator
//! whose output is fixed by its seed on every platform. Trials draw from
//! separate streams of one seed so results do not depend on scheduling.

use std::f64::consts::PI;

use clap::ValueEnum;
use phwarm::filtration::Grid;
use phwarm::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

/// Generator for stream `stream` of `seed`.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    S2d,
    S3d,
    Circle,
    Eight,
    Sphere2,
}

impl SynthKind {
    /// Grid side for images, point count for clouds.
    pub fn default_n(self) -> usize {
        match self {
            SynthKind::S2d => 128,
            SynthKind::S3d => 32,
            SynthKind::Circle | SynthKind::Eight | SynthKind::Sphere2 => 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Synthetic {
    Image(Grid),
    Points(Vec<Vec<f64>>),
}

pub fn synthesize(kind: SynthKind, n: usize, sigma: f64, rng: &mut impl Rng) -> Result<Synthetic> {
    Ok(match kind {
        SynthKind::S2d => Synthetic::Image(s2d(n, sigma, rng)?),
        SynthKind::S3d => Synthetic::Image(s3d(n, sigma, rng)?),
        SynthKind::Circle => Synthetic::Points(circle(n, sigma, rng)?),
        SynthKind::Eight => Synthetic::Points(eight(n, sigma, rng)?),
        SynthKind::Sphere2 => Synthetic::Points(sphere2(n, sigma, rng)?),
    })
}

/// Normal noise with standard deviation `sigma`.
fn noise(sigma: f64) -> Result<Normal<f64>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Usage(format!("noise level {sigma} must be a non-negative number")));
    }
    Normal::new(0.0, sigma).map_err(|e| Error::Usage(e.to_string()))
}

fn positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(Error::Usage(format!("{what} must be positive")));
    }
    Ok(())
}

/// `sin(10πi/n) + cos(10πj/n)` plus noise on an `n × n` grid.
pub fn s2d(n: usize, sigma: f64, rng: &mut impl Rng) -> Result<Grid> {
    positive(n, "image side")?;
    let normal = noise(sigma)?;
    let w = 10.0 * PI / n as f64;
    Grid::from_fn(vec![n, n], |ix| {
        let clean = (w * ix[0] as f64).sin() + (w * ix[1] as f64).cos();
        clean + normal.sample(rng)
    })
}

/// `sin(4πi/n) + cos(4πj/n) + sin(4πk/n)` plus noise on an `n³` cube.
pub fn s3d(n: usize, sigma: f64, rng: &mut impl Rng) -> Result<Grid> {
    positive(n, "cube side")?;
    let normal = noise(sigma)?;
    let w = 4.0 * PI / n as f64;
    Grid::from_fn(vec![n, n, n], |ix| {
        let clean = (w * ix[0] as f64).sin() + (w * ix[1] as f64).cos() + (w * ix[2] as f64).sin();
        clean + normal.sample(rng)
    })
}

fn jitter(points: &mut [Vec<f64>], sigma: f64, rng: &mut impl Rng) -> Result<()> {
    let normal = noise(sigma)?;
    for x in points.iter_mut().flatten() {
        *x += normal.sample(rng);
    }
    Ok(())
}

/// Unit circle at uniform angles.
pub fn circle(n: usize, sigma: f64, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let t = rng.random_range(0.0..2.0 * PI);
            vec![t.cos(), t.sin()]
        })
        .collect();
    jitter(&mut pts, sigma, rng)?;
    Ok(pts)
}

/// Two unit circles touching at the origin, centred at `(±1, 0)`; each
/// point picks a lobe with probability one half.
pub fn eight(n: usize, sigma: f64, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let centre = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let t = rng.random_range(0.0..2.0 * PI);
            vec![centre + t.cos(), t.sin()]
        })
        .collect();
    jitter(&mut pts, sigma, rng)?;
    Ok(pts)
}

/// Unit sphere in R³, uniform via normalized Gaussian vectors.
pub fn sphere2(n: usize, sigma: f64, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let v: Vec<f64> = (0..3).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            pts.push(v.iter().map(|x| x / norm).collect());
        }
    }
    jitter(&mut pts, sigma, rng)?;
    Ok(pts)
}

/// Uniform points in the unit square.
pub fn unit_square(n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
        .collect()
}
