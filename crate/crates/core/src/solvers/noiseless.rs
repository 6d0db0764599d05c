//! Exact-fit search for noiseless data: each mode is pinned down by `d`
//! of its own points, so it suffices to search collections of disjoint
//! `d`-subsets.
//!
//! The search is ordered to avoid revisiting permutations: the lowest-index
//! point not yet fit exactly always anchors the next mode's subset, points a
//! mode fits exactly are removed before choosing the next subset, and the
//! last mode is interpolated from whatever remains.

use super::{check_modes, finish, Method, SolveReport, SolverConfig, Status, Stopwatch};
use crate::combinatorics::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::linalg::{min_norm_interpolant, orthonormal_basis};
use crate::model::{assign_unchecked, cost_unchecked, residual, Dataset, LossModel, ModelSet};

const RANK_REL: f64 = 1e-9;

struct Search<'a> {
    data: &'a Dataset,
    n: usize,
    cfg: &'a SolverConfig,
    examined: u64,
    best: Option<(f64, ModelSet)>,
    found: bool,
}

impl Search<'_> {
    fn exactly_fit(&self, i: usize, w: &[f64]) -> bool {
        let (x, y) = self.data.point(i);
        residual(x, y, w).abs() <= self.cfg.tolerances.tie_tol
    }

    fn visit(&mut self, level: usize, remaining: &[usize], chosen: &mut Vec<Vec<f64>>) {
        if self.found {
            return;
        }
        let d = self.data.dim();
        if remaining.is_empty() {
            // Everything is explained; spare modes repeat the last model.
            let last = chosen.last().cloned().unwrap_or_else(|| vec![0.0; d]);
            let mut full = chosen.clone();
            full.resize(self.n, last);
            self.evaluate(&full);
            return;
        }
        if level + 1 == self.n || remaining.len() <= d {
            let w = interpolate_independent(self.data, remaining);
            chosen.push(w);
            self.visit(level + 1, &[], chosen);
            chosen.pop();
            return;
        }
        let anchor = remaining[0];
        let rest = &remaining[1..];
        let mut rows: Vec<&[f64]> = Vec::with_capacity(d);
        let mut ys = Vec::with_capacity(d);
        let mut subsets = Combinations::new(rest.len(), d - 1);
        while let Some(s) = subsets.next_combination() {
            rows.clear();
            ys.clear();
            for i in std::iter::once(anchor).chain(s.iter().map(|&k| rest[k])) {
                let (x, y) = self.data.point(i);
                rows.push(x);
                ys.push(y);
            }
            let Some(w) = min_norm_interpolant(&rows, &ys, d) else {
                continue;
            };
            let left: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&i| !self.exactly_fit(i, &w))
                .collect();
            chosen.push(w);
            self.visit(level + 1, &left, chosen);
            chosen.pop();
            if self.found {
                return;
            }
        }
    }

    fn evaluate(&mut self, rows: &[Vec<f64>]) {
        self.examined += 1;
        let models = ModelSet::from_rows(rows).expect("finite interpolants");
        let labels = assign_unchecked(self.data, &models, &self.cfg.tolerances).labels;
        let cost = cost_unchecked(self.data, &models, &labels, LossModel::Squared);
        if self.best.as_ref().is_none_or(|(c, _)| cost < *c) {
            self.best = Some((cost, models));
        }
        if cost <= self.cfg.tolerances.zero_tol {
            self.found = true;
        }
    }
}

/// Interpolates a maximal independent subset of the points (taken in order)
/// with the minimum-norm solution.
fn interpolate_independent(data: &Dataset, idx: &[usize]) -> Vec<f64> {
    let d = data.dim();
    let mut picked: Vec<usize> = Vec::with_capacity(d);
    let mut rows: Vec<&[f64]> = Vec::with_capacity(d);
    for &i in idx {
        if picked.len() == d {
            break;
        }
        rows.push(data.x().row(i));
        if orthonormal_basis(rows.iter().copied(), RANK_REL).len() == rows.len() {
            picked.push(i);
        } else {
            rows.pop();
        }
    }
    let ys: Vec<f64> = picked.iter().map(|&i| data.y()[i]).collect();
    min_norm_interpolant(&rows, &ys, d).unwrap_or_else(|| vec![0.0; d])
}

/// Searches for a model set fitting every point exactly. Returns
/// `Status::Optimal` on the first collection with cost at most `zero_tol`,
/// otherwise the best collection seen with `Status::Infeasible`.
pub fn noiseless_solve(data: &Dataset, n: usize, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    check_modes(data, n)?;
    let d = data.dim();
    if d * n > data.len() {
        return Err(Error::Invalid(format!(
            "noiseless search needs d·n <= N, got d = {d}, n = {n}, N = {}",
            data.len()
        )));
    }
    let bound = binomial(data.len().saturating_sub(1), d - 1).powi(n as i32 - 1);
    if bound > cfg.noiseless_budget {
        return Err(Error::CapExceeded {
            what: "noiseless subset collections",
            count: bound,
            cap: cfg.noiseless_budget,
        });
    }
    let clock = Stopwatch::start();
    let mut search = Search {
        data,
        n,
        cfg,
        examined: 0,
        best: None,
        found: false,
    };
    let all: Vec<usize> = (0..data.len()).collect();
    search.visit(0, &all, &mut Vec::with_capacity(n));
    let (_, models) = search.best.expect("at least one collection is evaluated");
    let labels = assign_unchecked(data, &models, &cfg.tolerances).labels;
    let done = finish(data, &models, &labels, LossModel::Squared, &cfg.tolerances);
    let status = if search.found {
        Status::Optimal
    } else {
        Status::Infeasible
    };
    let mut warnings = Vec::new();
    if !search.found {
        warnings.push("no exact switching linear fit was found".into());
    }
    Ok(SolveReport {
        method: Method::Noiseless,
        loss: LossModel::Squared,
        cost: done.cost,
        models: done.models,
        labeling: done.labeling,
        candidates_examined: search.examined,
        elapsed: clock.elapsed(),
        status,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(points: &[(f64, f64)]) -> Dataset {
        let x: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
        Dataset::from_rows(&x, points.iter().map(|p| p.1).collect()).unwrap()
    }

    #[test]
    fn four_point_instance() {
        let data = one_d(&[(1.0, 2.0), (2.0, 4.0), (1.0, -1.0), (3.0, -3.0)]);
        let r = noiseless_solve(&data, 2, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!(r.cost <= 1e-12);
        assert!((r.models.get(0)[0] - 2.0).abs() < 1e-12);
        assert!((r.models.get(1)[0] + 1.0).abs() < 1e-12);
        assert_eq!(r.labeling.labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn single_underlying_mode() {
        let data = one_d(&[(1.0, 1.0), (2.0, 2.0), (-3.0, -3.0), (0.5, 0.5)]);
        let r = noiseless_solve(&data, 2, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!(r.cost <= 1e-12);
        for w in r.models.rows() {
            assert!((w[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noisy_data_is_infeasible() {
        let data = one_d(&[
            (1.0, 2.05),
            (2.0, 3.93),
            (1.5, -1.4),
            (3.0, -3.08),
            (0.7, 1.52),
            (2.5, -2.61),
        ]);
        let r = noiseless_solve(&data, 2, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        assert!(r.cost > 0.0);
    }

    #[test]
    fn two_dimensional_modes() {
        // w1 = (1, -1), w2 = (0.5, 2); three points per mode.
        let xs = [
            [1.0, 0.3],
            [0.2, 1.1],
            [-0.7, 0.4],
            [0.9, -1.2],
            [1.4, 0.6],
            [-0.3, -0.8],
        ];
        let labels = [0, 1, 0, 1, 1, 0];
        let ws = [[1.0, -1.0], [0.5, 2.0]];
        let y: Vec<f64> = xs
            .iter()
            .zip(labels)
            .map(|(x, l)| ws[l][0] * x[0] + ws[l][1] * x[1])
            .collect();
        let data = Dataset::from_rows(&xs, y).unwrap();
        let r = noiseless_solve(&data, 2, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert_eq!(r.labeling.labels, vec![0, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn too_few_points_rejected() {
        let data =
            Dataset::from_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(noiseless_solve(&data, 2, &SolverConfig::default()).is_err());
    }
}
