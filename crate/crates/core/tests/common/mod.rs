//! Reference computations that share no code with the library: subset
//! projections by Gram-Schmidt, exhaustive labelings, residual argmins and
//! subset-sum search.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Least squared residual of `ys` onto the column span of the rows `xs`,
/// computed by orthogonalizing the columns of the design matrix.
pub fn subset_sse(xs: &[&[f64]], ys: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let d = xs[0].len();
    let scale = xs
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in 0..d {
        let mut col: Vec<f64> = xs.iter().map(|r| r[c]).collect();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&col, b);
                col.iter_mut().zip(b).for_each(|(v, bv)| *v -= p * bv);
            }
        }
        let nrm = dot(&col, &col).sqrt();
        if nrm > 1e-9 * scale {
            basis.push(col.into_iter().map(|v| v / nrm).collect());
        }
    }
    let mut r = ys.to_vec();
    for _ in 0..2 {
        for b in &basis {
            let p = dot(&r, b);
            r.iter_mut().zip(b).for_each(|(v, bv)| *v -= p * bv);
        }
    }
    dot(&r, &r)
}

/// Optimal squared-loss cost of a fixed labeling.
pub fn labeling_cost(x: &[Vec<f64>], y: &[f64], labels: &[usize], n: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..n {
        let idx: Vec<usize> = (0..y.len()).filter(|&i| labels[i] == j).collect();
        let xs: Vec<&[f64]> = idx.iter().map(|&i| x[i].as_slice()).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        total += subset_sse(&xs, &ys);
    }
    total / y.len() as f64
}

/// Global optimum of the squared-loss problem by trying all `n^N` labelings.
pub fn brute_optimum(x: &[Vec<f64>], y: &[f64], n: usize) -> (f64, Vec<usize>) {
    let len = y.len();
    let total = n.pow(len as u32);
    let mut labels = vec![0usize; len];
    let mut best = (f64::INFINITY, Vec::new());
    for code in 0..total {
        let mut c = code;
        for l in labels.iter_mut() {
            *l = c % n;
            c /= n;
        }
        let cost = labeling_cost(x, y, &labels, n);
        if cost < best.0 {
            best = (cost, labels.clone());
        }
    }
    best
}

/// Index of the smallest absolute residual, lowest index first.
pub fn argmin_residual(models: &[Vec<f64>], x: &[f64], y: f64) -> usize {
    let mut best = 0;
    let mut best_err = f64::INFINITY;
    for (j, w) in models.iter().enumerate() {
        let e = (y - dot(w, x)).abs();
        if e < best_err {
            best = j;
            best_err = e;
        }
    }
    best
}

/// Whether some subset of `values` sums to exactly half the total.
pub fn has_equal_split(values: &[u64]) -> bool {
    let total: u64 = values.iter().sum();
    if total % 2 == 1 {
        return false;
    }
    let mut reachable = vec![false; total as usize / 2 + 1];
    reachable[0] = true;
    for &v in values {
        for s in (v as usize..reachable.len()).rev() {
            reachable[s] |= reachable[s - v as usize];
        }
    }
    reachable[total as usize / 2]
}

/// Sign patterns of `points` seen along many random directions (only
/// directions that leave every point strictly off the hyperplane).
pub fn sampled_patterns(points: &[Vec<f64>], samples: usize, seed: u64) -> Vec<Vec<i8>> {
    let m = points[0].len();
    let mut r = rng(seed);
    let mut out = std::collections::BTreeSet::new();
    for _ in 0..samples {
        let h = gaussian_vec(&mut r, m);
        let vals: Vec<f64> = points.iter().map(|p| dot(&h, p)).collect();
        if vals.iter().any(|v| v.abs() < 1e-9) {
            continue;
        }
        out.insert(
            vals.iter()
                .map(|&v| if v > 0.0 { 1 } else { -1 })
                .collect::<Vec<i8>>(),
        );
    }
    out.into_iter().collect()
}

/// Whether `a` and `b` agree after relabeling the modes of `b`.
pub fn equal_up_to_relabel(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut forward = std::collections::HashMap::new();
    let mut backward = std::collections::HashMap::new();
    a.iter()
        .zip(b)
        .all(|(&p, &q)| *forward.entry(p).or_insert(q) == q && *backward.entry(q).or_insert(p) == p)
}
