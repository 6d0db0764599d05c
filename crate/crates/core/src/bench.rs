//! Runtime scaling measurements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate_instance, GeneratorSpec};
use crate::model::LossModel;
use crate::solvers::{solve, Method, SolverConfig, Stopwatch};

/// Smallest time recorded, so that logarithms stay finite.
const MIN_SECONDS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub method: Method,
    pub sizes: Vec<usize>,
    /// Seconds per size, the minimum over repeats.
    pub times: Vec<f64>,
    /// Slope of `ln(time)` against `ln(N)`.
    pub fitted_exponent: Option<f64>,
    /// Slope of `ln(time)` against `N`; roughly constant for exponential growth.
    pub fitted_log_rate: Option<f64>,
    /// Set when a size was skipped because a solver cap was hit. The sizes
    /// and times then cover only the sizes that ran.
    pub partial: bool,
    pub skipped: Vec<usize>,
}

impl BenchResult {
    pub fn exponent_at_most(&self, bound: f64) -> Option<bool> {
        self.fitted_exponent.map(|e| e <= bound)
    }
}

/// Times `method` on one generated instance per size (the template's
/// `num_points` is replaced by each size; the seed is kept).
pub fn bench_scaling(
    method: Method,
    loss: LossModel,
    template: &GeneratorSpec,
    sizes: &[usize],
    cfg: &SolverConfig,
    repeats: usize,
) -> Result<BenchResult> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid(
            "benchmark sizes must be non-empty and strictly increasing".into(),
        ));
    }
    let repeats = repeats.max(1);
    let mut out = BenchResult {
        method,
        sizes: Vec::new(),
        times: Vec::new(),
        fitted_exponent: None,
        fitted_log_rate: None,
        partial: false,
        skipped: Vec::new(),
    };
    for &size in sizes {
        let spec = GeneratorSpec {
            num_points: size,
            ..template.clone()
        };
        let inst = generate_instance(&spec)?;
        let mut best = f64::INFINITY;
        let mut capped = false;
        for _ in 0..repeats {
            let clock = Stopwatch::start();
            match solve(&inst.data, spec.n, loss, method, cfg) {
                Ok(_) => best = best.min(clock.elapsed().as_secs_f64()),
                Err(Error::CapExceeded { .. }) => {
                    capped = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if capped {
            out.partial = true;
            out.skipped.push(size);
        } else {
            out.sizes.push(size);
            out.times.push(best.max(MIN_SECONDS));
        }
    }
    let ln_t: Vec<f64> = out.times.iter().map(|t| t.ln()).collect();
    let ln_n: Vec<f64> = out.sizes.iter().map(|&s| (s as f64).ln()).collect();
    let lin_n: Vec<f64> = out.sizes.iter().map(|&s| s as f64).collect();
    out.fitted_exponent = slope(&ln_n, &ln_t);
    out.fitted_log_rate = slope(&lin_n, &ln_t);
    Ok(out)
}

/// Ordinary least-squares slope; `None` with fewer than two points.
pub fn slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}
