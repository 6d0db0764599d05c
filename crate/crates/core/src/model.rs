//! Domain types and the basic operations on them: loss evaluation, the
//! empirical cost, minimum-error mode assignment and label canonicalization.
//!
//! Mode indices are zero-based throughout the library. Serialized reports
//! use one-based labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

/// A row-major set of points in `R^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("points need at least one coordinate".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                context: "point coordinates",
                expected: dim * (coords.len() / dim + 1),
                got: coords.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut coords = Vec::with_capacity(dim * rows.len());
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "point rows",
                    expected: dim,
                    got: r.len(),
                });
            }
            coords.extend_from_slice(r);
        }
        Self::new(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Regression vectors `x_i ∈ R^d` paired with scalar outputs `y_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Points,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Points, y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::Invalid("a dataset needs at least one point".into()));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                context: "outputs",
                expected: x.len(),
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("outputs"));
        }
        Ok(Self { x, y })
    }

    pub fn from_rows<R: AsRef<[f64]>>(x: &[R], y: Vec<f64>) -> Result<Self> {
        Self::new(Points::from_rows(x)?, y)
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x(&self) -> &Points {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn point(&self, i: usize) -> (&[f64], f64) {
        (self.x.row(i), self.y[i])
    }

    pub fn points(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.x.rows().zip(self.y.iter().copied())
    }

    /// The lifted points `z_i = [x_i, y_i]` in `R^(d+1)`.
    pub fn lifted(&self) -> Points {
        let d = self.dim();
        let mut coords = Vec::with_capacity((d + 1) * self.len());
        for (x, y) in self.points() {
            coords.extend_from_slice(x);
            coords.push(y);
        }
        Points { dim: d + 1, coords }
    }

    /// Keeps the points whose index satisfies `keep`.
    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> Option<Dataset> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        if idx.is_empty() {
            return None;
        }
        let mut coords = Vec::with_capacity(idx.len() * self.dim());
        for &i in &idx {
            coords.extend_from_slice(self.x.row(i));
        }
        Some(Dataset {
            x: Points {
                dim: self.dim(),
                coords,
            },
            y: idx.iter().map(|&i| self.y[i]).collect(),
        })
    }
}

/// Loss applied to a residual. Both variants satisfy `ℓ(0) = 0`, symmetry,
/// and strict monotonicity in `|e|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossModel {
    #[default]
    Squared,
    Absolute,
}

impl LossModel {
    #[inline]
    pub fn eval(self, e: f64) -> f64 {
        match self {
            LossModel::Squared => e * e,
            LossModel::Absolute => e.abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LossModel::Squared => "squared",
            LossModel::Absolute => "absolute",
        }
    }
}

impl std::str::FromStr for LossModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(LossModel::Squared),
            "absolute" => Ok(LossModel::Absolute),
            other => Err(Error::Invalid(format!("unknown loss `{other}`"))),
        }
    }
}

pub fn loss_eval(loss: LossModel, e: f64) -> Result<f64> {
    if !e.is_finite() {
        return Err(Error::NonFinite("residual"));
    }
    Ok(loss.eval(e))
}

/// `n` parameter vectors in `R^d`, one per mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSet {
    dim: usize,
    w: Vec<f64>,
}

impl ModelSet {
    pub fn new(dim: usize, w: Vec<f64>) -> Result<Self> {
        if dim == 0 || w.is_empty() || !w.len().is_multiple_of(dim) {
            return Err(Error::Invalid(format!(
                "model parameters of length {} do not form modes of dimension {dim}",
                w.len()
            )));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(Self { dim, w })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let p = Points::from_rows(rows)?;
        Self::new(p.dim(), p.coords)
    }

    pub fn zeros(n: usize, dim: usize) -> Self {
        Self {
            dim,
            w: vec![0.0; n * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.w.len() / self.dim
    }

    pub fn get(&self, j: usize) -> &[f64] {
        &self.w[j * self.dim..(j + 1) * self.dim]
    }

    pub(crate) fn set(&mut self, j: usize, w: &[f64]) {
        self.w[j * self.dim..(j + 1) * self.dim].copy_from_slice(w);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.w.chunks_exact(self.dim)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Model set whose mode `perm[j]` is this set's mode `j`.
    pub fn permuted(&self, perm: &[usize]) -> ModelSet {
        let mut out = ModelSet::zeros(self.n(), self.dim);
        for (j, &to) in perm.iter().enumerate() {
            out.set(to, self.get(j));
        }
        out
    }

    fn check_dim(&self, data: &Dataset) -> Result<()> {
        if self.dim != data.dim() {
            return Err(Error::DimensionMismatch {
                context: "model dimension",
                expected: data.dim(),
                got: self.dim,
            });
        }
        Ok(())
    }
}

/// A mode index per point, plus the indices where the minimum-error rule was
/// ambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Labeling {
    pub labels: Vec<usize>,
    pub ties: Vec<usize>,
}

impl Labeling {
    pub fn new(labels: Vec<usize>) -> Self {
        Self {
            labels,
            ties: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self, n: usize, len: usize) -> Result<()> {
        if self.labels.len() != len {
            return Err(Error::DimensionMismatch {
                context: "labeling length",
                expected: len,
                got: self.labels.len(),
            });
        }
        if let Some((index, &label)) = self.labels.iter().enumerate().find(|(_, &l)| l >= n) {
            return Err(Error::LabelOutOfRange {
                index,
                label,
                modes: n,
            });
        }
        if self.ties.windows(2).any(|w| w[0] >= w[1]) || self.ties.last().is_some_and(|&t| t >= len)
        {
            return Err(Error::Invalid(
                "tie set must be sorted, unique and in range".into(),
            ));
        }
        Ok(())
    }
}

/// Numerical thresholds standing in for exact equality tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Two absolute residuals closer than this are considered tied.
    pub tie_tol: f64,
    /// A cost at or below this counts as zero.
    pub zero_tol: f64,
    /// A signed value within this of zero lies on the boundary.
    pub sign_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tie_tol: 1e-9,
            zero_tol: 1e-9,
            sign_tol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.tie_tol) && ok(self.zero_tol) && ok(self.sign_tol) {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "tolerances must be positive: {self:?}"
            )))
        }
    }
}

#[inline]
pub(crate) fn residual(x: &[f64], y: f64, w: &[f64]) -> f64 {
    y - dot(w, x)
}

/// Mean loss of the residuals under the given assignment.
pub fn empirical_cost(
    data: &Dataset,
    models: &ModelSet,
    q: &Labeling,
    loss: LossModel,
) -> Result<f64> {
    models.check_dim(data)?;
    q.validate(models.n(), data.len())?;
    Ok(cost_unchecked(data, models, &q.labels, loss))
}

pub(crate) fn cost_unchecked(
    data: &Dataset,
    models: &ModelSet,
    labels: &[usize],
    loss: LossModel,
) -> f64 {
    let total: f64 = data
        .points()
        .zip(labels)
        .map(|((x, y), &j)| loss.eval(residual(x, y, models.get(j))))
        .sum();
    total / data.len() as f64
}

/// Assigns every point to its minimum-error mode.
///
/// The label is the exact minimizer of `|y_i − w_j·x_i|` (smallest index on
/// exact equality). Any point where another mode comes within `tie_tol` of
/// the minimum is listed in `ties`.
pub fn assign_modes(
    data: &Dataset,
    models: &ModelSet,
    _loss: LossModel,
    tol: &Tolerances,
) -> Result<Labeling> {
    models.check_dim(data)?;
    Ok(assign_unchecked(data, models, tol))
}

pub(crate) fn assign_unchecked(data: &Dataset, models: &ModelSet, tol: &Tolerances) -> Labeling {
    let n = models.n();
    let mut labels = Vec::with_capacity(data.len());
    let mut ties = Vec::new();
    let mut errs = vec![0.0; n];
    for (i, (x, y)) in data.points().enumerate() {
        for (j, e) in errs.iter_mut().enumerate() {
            *e = residual(x, y, models.get(j)).abs();
        }
        let mut best = 0;
        for j in 1..n {
            if errs[j] < errs[best] {
                best = j;
            }
        }
        let tied = (0..n).any(|j| j != best && errs[j] - errs[best] <= tol.tie_tol);
        if tied {
            ties.push(i);
        }
        labels.push(best);
    }
    Labeling { labels, ties }
}

/// Permutation mapping each used mode to its rank of first occurrence.
/// Unused modes follow in increasing order.
pub fn canonical_permutation(labels: &[usize], n: usize) -> Vec<usize> {
    let mut perm = vec![usize::MAX; n];
    let mut next = 0;
    for &l in labels {
        if perm[l] == usize::MAX {
            perm[l] = next;
            next += 1;
        }
    }
    for p in perm.iter_mut().filter(|p| **p == usize::MAX) {
        *p = next;
        next += 1;
    }
    perm
}

/// Relabels modes in order of first occurrence. Idempotent.
pub fn canonicalize_labels(q: &Labeling, n: usize) -> Labeling {
    let perm = canonical_permutation(&q.labels, n);
    Labeling {
        labels: q.labels.iter().map(|&l| perm[l]).collect(),
        ties: q.ties.clone(),
    }
}

/// Whether modes appear in order of first occurrence.
pub fn is_canonical(labels: &[usize]) -> bool {
    let mut next = 0;
    for &l in labels {
        if l > next {
            return false;
        }
        if l == next {
            next += 1;
        }
    }
    true
}
