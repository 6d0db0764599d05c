use super::regression::fit_unchecked;
use super::{better, check_modes, finish, Method, SolveReport, SolverConfig, Status, Stopwatch};
use crate::combinatorics::for_each_canonical_labeling;
use crate::error::{Error, Result};
use crate::model::{cost_unchecked, Dataset, LossModel};

/// Exact optimum by fitting every labeling. Labelings that differ only by a
/// permutation of modes are visited once.
pub fn brute_force_solve(
    data: &Dataset,
    n: usize,
    loss: LossModel,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    check_modes(data, n)?;
    let space = (n as f64).powi(data.len() as i32);
    if space > cfg.brute_budget {
        return Err(Error::CapExceeded {
            what: "brute-force labelings",
            count: space,
            cap: cfg.brute_budget,
        });
    }
    let clock = Stopwatch::start();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut examined = 0u64;
    for_each_canonical_labeling(data.len(), n, |labels| {
        examined += 1;
        let models = fit_unchecked(data, labels, n, loss);
        let cost = cost_unchecked(data, &models, labels, loss);
        if best
            .as_ref()
            .is_none_or(|(c, l)| better((cost, labels), (*c, l)))
        {
            best = Some((cost, labels.to_vec()));
        }
        true
    });
    let (_, labels) = best.expect("at least one labeling");
    let models = fit_unchecked(data, &labels, n, loss);
    let done = finish(data, &models, &labels, loss, &cfg.tolerances);
    Ok(SolveReport {
        method: Method::Brute,
        loss,
        cost: done.cost,
        models: done.models,
        labeling: done.labeling,
        candidates_examined: examined,
        elapsed: clock.elapsed(),
        status: Status::Optimal,
        warnings: Vec::new(),
    })
}
