//! Gradient ascent on a point cloud to lengthen its one-dimensional bars.
//!
//! The objective is `E(2, 0, 1; PD₁)`, the sum of squared H₁ bar lengths,
//! on the Rips filtration truncated at the enclosing radius. Truncation
//! keeps every finite H₁ bar because the complex is a cone beyond it.

use phwarm::filtration::{rips_filtration, DistanceMatrix, FilteredComplex, RipsThreshold};
use phwarm::persistence::{loss_gradient_rips, persistence_loss};
use phwarm::{
    compute_persistence, update_persistence, Barcode, DecompositionSet, Error, OperationCounters,
    PersistenceOptions, Result,
};

#[derive(Debug, Clone, Copy)]
pub struct OptimizeConfig {
    pub steps: usize,
    pub lr: f64,
    /// Update the previous decomposition instead of recomputing.
    pub warm: bool,
    pub options: PersistenceOptions,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            steps: 100,
            lr: 0.05,
            warm: true,
            options: PersistenceOptions {
                mode: phwarm::Mode::Cohomology,
                use_clearing: true,
                ..Default::default()
            },
        }
    }
}

const P: f64 = 2.0;
const Q: f64 = 0.0;
const I0: usize = 1;
const DIM: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    /// Loss before each step, then the final loss: `steps + 1` entries.
    pub losses: Vec<f64>,
    /// Steps left out because the gradient was undefined.
    pub skipped: Vec<usize>,
    /// Per step, the cost of producing the barcode.
    pub counters: Vec<OperationCounters>,
}

fn complex(points: &[Vec<f64>]) -> Result<FilteredComplex> {
    rips_filtration(&DistanceMatrix::from_points(points)?, RipsThreshold::Enclosing, DIM)
}

/// Barcodes of successive clouds, by update or by recomputation.
struct Engine {
    options: PersistenceOptions,
    warm: bool,
    state: Option<DecompositionSet>,
}

impl Engine {
    fn barcode(&mut self, c: FilteredComplex) -> Result<(Barcode, OperationCounters)> {
        match self.state.as_mut() {
            Some(state) if self.warm => {
                let report = update_persistence(state, c)?;
                Ok((report.barcode, report.counters))
            }
            _ => {
                let (set, bars) = compute_persistence(c, self.options)?;
                let counters = set.counters;
                self.state = Some(set);
                Ok((bars, counters))
            }
        }
    }

    fn complex(&self) -> &FilteredComplex {
        &self.state.as_ref().expect("a barcode was computed").complex
    }
}

/// Runs `cfg.steps` ascent steps from `initial`. `warn` receives a message
/// for each skipped step.
pub fn optimize(
    initial: Vec<Vec<f64>>,
    cfg: &OptimizeConfig,
    warn: &mut dyn FnMut(String),
) -> Result<Trajectory> {
    if !(cfg.lr.is_finite() && cfg.lr > 0.0) {
        return Err(Error::Usage(format!("learning rate {} must be positive", cfg.lr)));
    }
    let mut engine = Engine {
        options: PersistenceOptions {
            keep_basis: cfg.warm,
            ..cfg.options
        },
        warm: cfg.warm,
        state: None,
    };
    let mut points = initial.clone();
    let mut losses = Vec::with_capacity(cfg.steps + 1);
    let mut skipped = Vec::new();
    let mut counters = Vec::with_capacity(cfg.steps + 1);
    for step in 0..=cfg.steps {
        if points.is_empty() {
            losses.push(0.0);
            continue;
        }
        let (bars, cost) = engine.barcode(complex(&points)?)?;
        losses.push(persistence_loss(&bars, P, Q, I0, DIM));
        counters.push(cost);
        if step == cfg.steps {
            break;
        }
        match loss_gradient_rips(&points, engine.complex(), &bars, P, Q, I0, DIM) {
            Ok(grad) => {
                for (x, g) in points.iter_mut().zip(&grad) {
                    for (xi, gi) in x.iter_mut().zip(g) {
                        *xi += cfg.lr * gi;
                    }
                }
            }
            Err(Error::DegenerateGradient(msg)) => {
                warn(format!("step {step}: {msg}; step skipped"));
                skipped.push(step);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Trajectory {
        initial,
        points,
        losses,
        skipped,
        counters,
    })
}
