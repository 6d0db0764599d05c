use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::refine::{refine_unchecked, RefineOutcome};
use super::{better, check_modes, finish, Method, SolveReport, Status, Stopwatch};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, min_norm_interpolant};
use crate::model::{Dataset, LossModel, ModelSet, Tolerances};

/// Runs alternating minimization from `restarts` seeded initializations.
/// Each start interpolates disjoint random `d`-subsets, one per mode.
pub fn altmin_restarts(
    data: &Dataset,
    n: usize,
    loss: LossModel,
    restarts: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<RefineOutcome>> {
    check_modes(data, n)?;
    if restarts == 0 {
        return Err(Error::Invalid("at least one restart is required".into()));
    }
    let d = data.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut outcomes = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        order.shuffle(&mut rng);
        let mut models = ModelSet::zeros(n, d);
        for (j, chunk) in order.chunks(d).take(n).enumerate() {
            let rows: Vec<&[f64]> = chunk.iter().map(|&i| data.x().row(i)).collect();
            let ys: Vec<f64> = chunk.iter().map(|&i| data.y()[i]).collect();
            let w = min_norm_interpolant(&rows, &ys, d)
                .unwrap_or_else(|| least_squares(chunk.iter().map(|&i| data.point(i)), d));
            models.set(j, &w);
        }
        outcomes.push(refine_unchecked(data, &models, loss, tol));
    }
    Ok(outcomes)
}

/// Best of several alternating-minimization runs. Not guaranteed optimal.
pub fn altmin_solve(
    data: &Dataset,
    n: usize,
    loss: LossModel,
    restarts: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SolveReport> {
    tol.validate()?;
    let clock = Stopwatch::start();
    let outcomes = altmin_restarts(data, n, loss, restarts, seed, tol)?;
    let best = outcomes
        .iter()
        .reduce(|a, b| {
            if better((b.cost, &b.labeling.labels), (a.cost, &a.labeling.labels)) {
                b
            } else {
                a
            }
        })
        .expect("restarts >= 1");
    let done = finish(data, &best.models, &best.labeling.labels, loss, tol);
    Ok(SolveReport {
        method: Method::Altmin,
        loss,
        cost: done.cost,
        models: done.models,
        labeling: done.labeling,
        candidates_examined: restarts as u64,
        elapsed: clock.elapsed(),
        status: Status::Heuristic,
        warnings: Vec::new(),
    })
}
