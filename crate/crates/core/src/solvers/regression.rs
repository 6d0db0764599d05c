use crate::combinatorics::Combinations;
use crate::error::{Error, Result};
use crate::linalg::{least_squares, min_norm_interpolant, orthonormal_basis};
use crate::model::{residual, Dataset, Labeling, LossModel, ModelSet};

const RANK_REL: f64 = 1e-9;

/// Best linear fit of the selected points under `loss`.
///
/// Squared loss goes through the normal equations. Absolute loss is solved
/// exactly: an L1-optimal fit interpolates `r = rank(X)` of the points, so
/// every independent `r`-subset is tried. An empty selection gives the zero
/// vector.
pub fn solve_mode_regression(
    data: &Dataset,
    members: &[usize],
    loss: LossModel,
) -> Result<Vec<f64>> {
    if let Some(&bad) = members.iter().find(|&&i| i >= data.len()) {
        return Err(Error::Invalid(format!(
            "point index {bad} out of range for {} points",
            data.len()
        )));
    }
    Ok(fit_members(data, members, loss))
}

pub(crate) fn fit_members(data: &Dataset, members: &[usize], loss: LossModel) -> Vec<f64> {
    let d = data.dim();
    if members.is_empty() {
        return vec![0.0; d];
    }
    match loss {
        LossModel::Squared => least_squares(members.iter().map(|&i| data.point(i)), d),
        LossModel::Absolute => l1_fit(data, members),
    }
}

fn l1_fit(data: &Dataset, members: &[usize]) -> Vec<f64> {
    let d = data.dim();
    let r = orthonormal_basis(members.iter().map(|&i| data.x().row(i)), RANK_REL).len();
    if r == 0 {
        return vec![0.0; d];
    }
    let total = |w: &[f64]| -> f64 {
        members
            .iter()
            .map(|&i| {
                let (x, y) = data.point(i);
                residual(x, y, w).abs()
            })
            .sum()
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut rows: Vec<&[f64]> = Vec::with_capacity(r);
    let mut ys = Vec::with_capacity(r);
    let mut subsets = Combinations::new(members.len(), r);
    while let Some(s) = subsets.next_combination() {
        rows.clear();
        ys.clear();
        for &k in s {
            let (x, y) = data.point(members[k]);
            rows.push(x);
            ys.push(y);
        }
        let Some(w) = min_norm_interpolant(&rows, &ys, d) else {
            continue;
        };
        let cost = total(&w);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, w));
        }
    }
    best.map(|(_, w)| w).unwrap_or_else(|| vec![0.0; d])
}

/// Fits every mode on the points assigned to it. Empty modes get the zero vector.
pub fn fit_modes(data: &Dataset, q: &Labeling, n: usize, loss: LossModel) -> Result<ModelSet> {
    q.validate(n, data.len())?;
    Ok(fit_unchecked(data, &q.labels, n, loss))
}

pub(crate) fn fit_unchecked(
    data: &Dataset,
    labels: &[usize],
    n: usize,
    loss: LossModel,
) -> ModelSet {
    let mut groups = vec![Vec::new(); n];
    for (i, &l) in labels.iter().enumerate() {
        groups[l].push(i);
    }
    let mut models = ModelSet::zeros(n, data.dim());
    for (j, members) in groups.iter().enumerate() {
        models.set(j, &fit_members(data, members, loss));
    }
    models
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::empirical_cost;

    fn one_d(points: &[(f64, f64)]) -> Dataset {
        let x: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
        Dataset::from_rows(&x, points.iter().map(|p| p.1).collect()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn regression_examples() {
        let data = one_d(&[(1.0, 1.0), (2.0, 2.0)]);
        assert!(close(
            &solve_mode_regression(&data, &[0, 1], LossModel::Squared).unwrap(),
            &[1.0]
        ));

        let data = one_d(&[(1.0, 0.0), (1.0, 2.0)]);
        assert!(close(
            &solve_mode_regression(&data, &[0, 1], LossModel::Squared).unwrap(),
            &[1.0]
        ));

        let data = one_d(&[(1.0, 0.0), (1.0, 0.0), (1.0, 10.0)]);
        let w = solve_mode_regression(&data, &[0, 1, 2], LossModel::Absolute).unwrap();
        assert!(close(&w, &[0.0]));
        let total: f64 = data.points().map(|(x, y)| (y - w[0] * x[0]).abs()).sum();
        assert!((total - 10.0).abs() < 1e-12);

        assert_eq!(
            solve_mode_regression(&data, &[], LossModel::Squared).unwrap(),
            vec![0.0]
        );
        assert!(solve_mode_regression(&data, &[3], LossModel::Squared).is_err());
    }

    #[test]
    fn l1_fit_beats_grid_search() {
        let data = Dataset::from_rows(
            &[[1.0, 0.5], [0.2, -1.0], [-0.7, 0.3], [1.5, 1.1], [0.4, 0.9]],
            vec![1.0, -0.3, 0.8, 2.0, -0.1],
        )
        .unwrap();
        let all = [0, 1, 2, 3, 4];
        let w = solve_mode_regression(&data, &all, LossModel::Absolute).unwrap();
        let total =
            |w: &[f64]| -> f64 { data.points().map(|(x, y)| residual(x, y, w).abs()).sum() };
        let best = total(&w);
        for a in -40..=40 {
            for b in -40..=40 {
                let probe = [w[0] + a as f64 * 0.01, w[1] + b as f64 * 0.01];
                assert!(total(&probe) >= best - 1e-12);
            }
        }
    }

    #[test]
    fn fit_examples() {
        let data = one_d(&[(1.0, 2.0), (2.0, 4.0), (1.0, -1.0), (3.0, -3.0)]);
        let m = fit_modes(
            &data,
            &Labeling::new(vec![0, 0, 1, 1]),
            2,
            LossModel::Squared,
        )
        .unwrap();
        assert!(close(m.get(0), &[2.0]) && close(m.get(1), &[-1.0]));

        let m = fit_modes(
            &data,
            &Labeling::new(vec![0, 0, 0, 0]),
            2,
            LossModel::Squared,
        )
        .unwrap();
        assert_eq!(m.get(1), &[0.0]);

        let data = one_d(&[(2.0, 3.0), (4.0, -2.0)]);
        let m = fit_modes(&data, &Labeling::new(vec![0, 1]), 2, LossModel::Absolute).unwrap();
        assert!(close(m.get(0), &[1.5]) && close(m.get(1), &[-0.5]));
    }

    #[test]
    fn fitted_models_are_locally_optimal() {
        let data = Dataset::from_rows(
            &[
                [1.0, 0.2],
                [0.3, 1.0],
                [-0.5, 0.7],
                [1.2, -0.4],
                [0.8, 0.8],
                [-1.0, 0.1],
            ],
            vec![0.9, 0.4, -0.2, 1.7, 0.5, -1.3],
        )
        .unwrap();
        let q = Labeling::new(vec![0, 1, 1, 0, 1, 0]);
        let m = fit_modes(&data, &q, 2, LossModel::Squared).unwrap();
        let base = empirical_cost(&data, &m, &q, LossModel::Squared).unwrap();
        for j in 0..2 {
            for c in 0..2 {
                for step in [1e-4, -1e-4] {
                    let mut rows = m.to_rows();
                    rows[j][c] += step;
                    let moved = ModelSet::from_rows(&rows).unwrap();
                    assert!(empirical_cost(&data, &moved, &q, LossModel::Squared).unwrap() >= base);
                }
            }
        }
    }
}
