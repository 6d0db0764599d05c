//! Small dense linear algebra for the per-mode subproblems and the
//! dichotomy geometry. Dimensions here are tiny (d ≤ 4 in practice), so
//! everything is plain row-major `Vec<f64>`.

/// Relative pivot threshold below which a square system is treated as singular.
const PIVOT_REL_TOL: f64 = 1e-12;

/// Ridge added to a rank-deficient Gram matrix, relative to its largest diagonal entry.
pub const RIDGE: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves the `n`-by-`n` row-major system `a · x = b` by Gaussian elimination
/// with partial pivoting. Returns `None` when a pivot falls below the relative
/// singularity threshold.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    let threshold = PIVOT_REL_TOL * scale * n as f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .expect("non-empty range");
        if a[pivot_row * n + col].abs() <= threshold {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| a[r * n + c] * x[c]).sum();
        x[r] = (b[r] - tail) / a[r * n + r];
    }
    Some(x)
}

/// Least-squares solution of `rows · w ≈ ys` through the normal equations.
/// A rank-deficient Gram matrix gets a tiny ridge, which selects (up to the
/// ridge) the minimum-norm minimizer.
pub fn least_squares<'a>(rows: impl Iterator<Item = (&'a [f64], f64)>, d: usize) -> Vec<f64> {
    let mut gram = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    for (x, y) in rows {
        for r in 0..d {
            rhs[r] += x[r] * y;
            for c in r..d {
                gram[r * d + c] += x[r] * x[c];
            }
        }
    }
    for r in 0..d {
        for c in 0..r {
            gram[r * d + c] = gram[c * d + r];
        }
    }
    if let Some(w) = solve(gram.clone(), rhs.clone(), d) {
        return w;
    }
    let max_diag = (0..d).fold(0.0_f64, |m, i| m.max(gram[i * d + i]));
    let ridge = RIDGE * max_diag.max(1.0);
    for i in 0..d {
        gram[i * d + i] += ridge;
    }
    solve(gram, rhs, d).unwrap_or_else(|| vec![0.0; d])
}

/// Minimum-norm `w` with `x_s · w = y_s` for every selected row, i.e.
/// `w = Xᵀ (X Xᵀ)⁻¹ y`. Returns `None` when the rows are linearly dependent.
pub fn min_norm_interpolant(rows: &[&[f64]], ys: &[f64], d: usize) -> Option<Vec<f64>> {
    let k = rows.len();
    debug_assert_eq!(k, ys.len());
    if k == 0 {
        return Some(vec![0.0; d]);
    }
    if k > d {
        return None;
    }
    let mut gram = vec![0.0; k * k];
    for r in 0..k {
        for c in 0..k {
            gram[r * k + c] = dot(rows[r], rows[c]);
        }
    }
    let coeffs = solve(gram, ys.to_vec(), k)?;
    let mut w = vec![0.0; d];
    for (row, a) in rows.iter().zip(&coeffs) {
        for (wi, xi) in w.iter_mut().zip(row.iter()) {
            *wi += a * xi;
        }
    }
    Some(w)
}

/// Modified Gram-Schmidt. Vectors whose residual norm falls below
/// `rel_tol · ‖v‖` are dropped, so the result is an orthonormal basis of the
/// numerical span.
pub fn orthonormal_basis<'a>(
    vectors: impl IntoIterator<Item = &'a [f64]>,
    rel_tol: f64,
) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let original = norm(v);
        if original == 0.0 {
            continue;
        }
        let mut r = v.to_vec();
        // Two passes keep the basis orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * bi;
                }
            }
        }
        let residual = norm(&r);
        if residual > rel_tol * original {
            r.iter_mut().for_each(|x| *x /= residual);
            basis.push(r);
        }
    }
    basis
}

/// Completes an orthonormal family in `R^dim` with orthonormal vectors
/// spanning its orthogonal complement.
pub fn orthogonal_complement(basis: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let mut full = basis.to_vec();
    let mut extra = Vec::new();
    let unit = |i: usize| {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        e
    };
    // Greedily add the standard basis vector with the largest residual.
    while full.len() < dim {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for i in 0..dim {
            let mut r = unit(i);
            for _ in 0..2 {
                for b in &full {
                    let p = dot(&r, b);
                    for (ri, bi) in r.iter_mut().zip(b) {
                        *ri -= p * bi;
                    }
                }
            }
            let n = norm(&r);
            if best.as_ref().is_none_or(|(m, _)| n > *m) {
                best = Some((n, r));
            }
        }
        let (n, mut r) = best.expect("dim > 0");
        r.iter_mut().for_each(|x| *x /= n);
        full.push(r.clone());
        extra.push(r);
    }
    extra
}

/// Numerical rank of a set of vectors.
pub fn rank<'a>(vectors: impl IntoIterator<Item = &'a [f64]>, rel_tol: f64) -> usize {
    orthonormal_basis(vectors, rel_tol).len()
}
