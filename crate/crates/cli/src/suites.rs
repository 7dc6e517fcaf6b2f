//! Perturbation suites. Every trial updates one shared base decomposition
//! to a perturbed target and, optionally, recomputes the target from
//! scratch for comparison.
//!
//! | suite    | base                              | trial `t` target                          |
//! |----------|-----------------------------------|-------------------------------------------|
//! | perm     | figure eight, full Rips           | points moved by noise growing with `t`    |
//! | insert   | empty filtration                  | Rips truncated at a radius growing with `t` |
//! | delete   | figure eight, full Rips           | Rips truncated at a radius growing with `t` |
//! | levelset | noiseless S2D image               | S2D with fresh noise                      |
//! | rips     | circle, enclosing-radius Rips     | points moved by fresh noise               |

use std::time::Instant;

use clap::ValueEnum;
use phwarm::filtration::{lower_star_freudenthal, rips_filtration, DistanceMatrix, FilteredComplex, RipsThreshold};
use phwarm::{compute_persistence, update_persistence, DecompositionSet, Error, PersistenceOptions, Result};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::report::RunReport;
use crate::synth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Perm,
    Insert,
    Delete,
    Levelset,
    Rips,
}

impl Suite {
    pub fn label(self) -> &'static str {
        match self {
            Suite::Perm => "perm",
            Suite::Insert => "insert",
            Suite::Delete => "delete",
            Suite::Levelset => "levelset",
            Suite::Rips => "rips",
        }
    }

    /// Point count, or image side for `levelset`.
    pub fn default_n(self) -> usize {
        match self {
            Suite::Perm | Suite::Insert | Suite::Delete => 50,
            Suite::Levelset => 64,
            Suite::Rips => 100,
        }
    }

    /// Perturbation scale: the largest noise for `perm`, the noise of each
    /// trial for `levelset` and `rips`; unused by the radius sweeps.
    pub fn default_sigma(self) -> f64 {
        match self {
            Suite::Perm => 0.05,
            Suite::Levelset | Suite::Rips => 0.01,
            Suite::Insert | Suite::Delete => 0.0,
        }
    }
}

/// Noise of the clouds the Rips suites start from.
pub const BASE_NOISE: f64 = 0.001;

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub n: usize,
    pub sigma: f64,
    pub options: PersistenceOptions,
    pub scratch: bool,
    pub jobs: usize,
}

impl SuiteConfig {
    pub fn new(suite: Suite, trials: usize, seed: u64, options: PersistenceOptions) -> Self {
        SuiteConfig {
            suite,
            trials,
            seed,
            n: suite.default_n(),
            sigma: suite.default_sigma(),
            options,
            scratch: true,
            jobs: 1,
        }
    }
}

type Target = Box<dyn Fn(usize) -> Result<FilteredComplex> + Sync>;

fn moved(points: &[Vec<f64>], sigma: f64, rng: &mut impl Rng) -> Result<Vec<Vec<f64>>> {
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Usage(e.to_string()))?;
    Ok(points
        .iter()
        .map(|p| p.iter().map(|x| x + normal.sample(rng)).collect())
        .collect())
}

fn diameter(dist: &DistanceMatrix) -> f64 {
    let n = dist.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| dist.get(i, j))
        .fold(0.0, f64::max)
}

/// Base filtration and a generator of trial targets.
fn plan(cfg: &SuiteConfig) -> Result<(FilteredComplex, Target)> {
    let SuiteConfig { seed, n, sigma, trials, .. } = *cfg;
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Usage(format!("noise level {sigma} must be a non-negative number")));
    }
    let max_dim = 1;
    // stream 0 draws the base; trial t draws from stream t + 1
    let mut base_rng = synth::rng(seed, 0);
    Ok(match cfg.suite {
        Suite::Perm => {
            let pts = synth::eight(n, BASE_NOISE, &mut base_rng)?;
            let base = rips_filtration(&DistanceMatrix::from_points(&pts)?, RipsThreshold::Infinite, max_dim)?;
            let target: Target = Box::new(move |t| {
                let level = sigma * (t + 1) as f64 / trials as f64;
                let q = moved(&pts, level, &mut synth::rng(seed, t as u64 + 1))?;
                rips_filtration(&DistanceMatrix::from_points(&q)?, RipsThreshold::Infinite, max_dim)
            });
            (base, target)
        }
        Suite::Insert | Suite::Delete => {
            let pts = synth::eight(n, BASE_NOISE, &mut base_rng)?;
            let dist = DistanceMatrix::from_points(&pts)?;
            let top = diameter(&dist);
            let base = match cfg.suite {
                Suite::Insert => rips_filtration(&dist, RipsThreshold::Value(-1.0), max_dim)?,
                _ => rips_filtration(&dist, RipsThreshold::Infinite, max_dim)?,
            };
            let offset = usize::from(cfg.suite == Suite::Insert);
            let target: Target = Box::new(move |t| {
                let r = top * (t + offset) as f64 / trials as f64;
                rips_filtration(&dist, RipsThreshold::Value(r), max_dim)
            });
            (base, target)
        }
        Suite::Levelset => {
            let base = lower_star_freudenthal(&synth::s2d(n, 0.0, &mut base_rng)?)?;
            let target: Target = Box::new(move |t| {
                lower_star_freudenthal(&synth::s2d(n, sigma, &mut synth::rng(seed, t as u64 + 1))?)
            });
            (base, target)
        }
        Suite::Rips => {
            let pts = synth::circle(n, BASE_NOISE, &mut base_rng)?;
            let base = rips_filtration(&DistanceMatrix::from_points(&pts)?, RipsThreshold::Enclosing, max_dim)?;
            let target: Target = Box::new(move |t| {
                let q = moved(&pts, sigma, &mut synth::rng(seed, t as u64 + 1))?;
                rips_filtration(&DistanceMatrix::from_points(&q)?, RipsThreshold::Enclosing, max_dim)
            });
            (base, target)
        }
    })
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Updates a clone of `base` to `target` and reports the cost.
pub fn measure(
    scenario: &str,
    trial: usize,
    base: &DecompositionSet,
    target: FilteredComplex,
    scratch: bool,
) -> Result<RunReport> {
    let mut state = base.clone();
    let (scratch, scratch_wall_ms) = if scratch {
        let start = Instant::now();
        let (set, _) = compute_persistence(target.clone(), base.options)?;
        (Some(set.counters), Some(millis(start)))
    } else {
        (None, None)
    };
    let start = Instant::now();
    let update = update_persistence(&mut state, target)?;
    Ok(RunReport {
        scenario: scenario.to_owned(),
        trial,
        stats: update.stats,
        counters: update.counters,
        scratch,
        wall_ms: millis(start),
        scratch_wall_ms,
    })
}

/// One report per trial, ordered by trial index whatever `jobs` is.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<RunReport>> {
    if cfg.trials == 0 {
        return Ok(Vec::new());
    }
    let options = PersistenceOptions {
        keep_basis: true,
        ..cfg.options
    };
    let (base, target) = plan(cfg)?;
    let (state, _) = compute_persistence(base, options)?;
    let label = cfg.suite.label();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| measure(label, t, &state, target(t)?, cfg.scratch))
            .collect()
    })
}
