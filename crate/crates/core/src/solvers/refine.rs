use super::regression::fit_unchecked;
use crate::error::{Error, Result};
use crate::model::{
    assign_unchecked, cost_unchecked, Dataset, Labeling, LossModel, ModelSet, Tolerances,
};

/// Safety net; the descent terminates long before this on any real input.
const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub models: ModelSet,
    /// Minimum-error assignment for `models`, so always a fixpoint of the rule.
    pub labeling: Labeling,
    pub cost: f64,
    /// Cost after the initial assignment and after every half-step.
    pub trace: Vec<f64>,
    /// Rounds in which the labeling changed.
    pub label_changes: usize,
}

/// Alternates minimum-error assignment and per-mode refitting until the
/// labeling is stable or a round improves the cost by less than `zero_tol`.
pub fn refine_alternate(
    data: &Dataset,
    models: &ModelSet,
    loss: LossModel,
    tol: &Tolerances,
) -> Result<RefineOutcome> {
    if models.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            context: "model dimension",
            expected: data.dim(),
            got: models.dim(),
        });
    }
    Ok(refine_unchecked(data, models, loss, tol))
}

pub(crate) fn refine_unchecked(
    data: &Dataset,
    models: &ModelSet,
    loss: LossModel,
    tol: &Tolerances,
) -> RefineOutcome {
    let n = models.n();
    let mut labeling = assign_unchecked(data, models, tol);
    let mut cost = cost_unchecked(data, models, &labeling.labels, loss);
    let mut current = models.clone();
    let mut trace = vec![cost];
    let mut label_changes = 0;
    for _ in 0..MAX_ROUNDS {
        let fitted = fit_unchecked(data, &labeling.labels, n, loss);
        let fitted_cost = cost_unchecked(data, &fitted, &labeling.labels, loss);
        trace.push(fitted_cost);
        let next = assign_unchecked(data, &fitted, tol);
        let next_cost = cost_unchecked(data, &fitted, &next.labels, loss);
        trace.push(next_cost);
        let changed = next.labels != labeling.labels;
        let improvement = cost - next_cost;
        current = fitted;
        labeling = next;
        cost = next_cost;
        if !changed {
            break;
        }
        label_changes += 1;
        if improvement < tol.zero_tol {
            break;
        }
    }
    RefineOutcome {
        models: current,
        labeling,
        cost,
        trace,
        label_changes,
    }
}
