//! Pairwise product classifiers and the majority vote that reproduces the
//! minimum-error rule away from ties.
//!
//! For modes `j < k`, `c_jk(x, y) = sign(y − w̄·x) · sign(w̃·x)` with
//! `w̄ = (w_j + w_k)/2` and `w̃ = w_j − w_k`. A value of `+1` means mode `j`
//! has the strictly smaller error, `-1` means mode `k` does.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::model::{ModelSet, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    /// `+1` above `tol`, `-1` below `-tol`, boundary otherwise.
    pub fn of(v: f64, tol: f64) -> Sign {
        if v > tol {
            Sign::Pos
        } else if v < -tol {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseClassifier {
    pub j: usize,
    pub k: usize,
    /// Midpoint `(w_j + w_k) / 2`.
    pub w_bar: Vec<f64>,
    /// Difference `w_j − w_k`.
    pub w_tilde: Vec<f64>,
}

impl PairwiseClassifier {
    pub fn new(j: usize, k: usize, wj: &[f64], wk: &[f64]) -> Self {
        Self {
            j,
            k,
            w_bar: wj.iter().zip(wk).map(|(a, b)| 0.5 * (a + b)).collect(),
            w_tilde: wj.iter().zip(wk).map(|(a, b)| a - b).collect(),
        }
    }

    /// Lifted-space factor `sign([−w̄, 1]·z)`.
    pub fn g(&self, x: &[f64], y: f64, tol: f64) -> Sign {
        Sign::of(y - dot(&self.w_bar, x), tol)
    }

    /// Regressor-space factor `sign(w̃·x)`.
    pub fn h(&self, x: &[f64], tol: f64) -> Sign {
        Sign::of(dot(&self.w_tilde, x), tol)
    }

    pub fn eval(&self, x: &[f64], y: f64, tol: f64) -> Sign {
        self.g(x, y, tol) * self.h(x, tol)
    }

    /// The classifier with the roles of the two modes exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            j: self.k,
            k: self.j,
            w_bar: self.w_bar.clone(),
            w_tilde: self.w_tilde.iter().map(|v| -v).collect(),
        }
    }
}

/// One classifier per pair `j < k`, in lexicographic pair order.
pub fn pairwise_classifiers_from_models(models: &ModelSet) -> Result<Vec<PairwiseClassifier>> {
    let n = models.n();
    if n < 2 {
        return Err(Error::Invalid(format!(
            "pairwise classifiers need n >= 2, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for k in j + 1..n {
            out.push(PairwiseClassifier::new(j, k, models.get(j), models.get(k)));
        }
    }
    Ok(out)
}

/// Number of modes `n` such that `count == n(n−1)/2`.
pub(crate) fn modes_for_pairs(count: usize) -> Option<usize> {
    (2..=count + 1).find(|n| n * (n - 1) / 2 == count)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteOutcome {
    /// Smallest mode in `tied`.
    pub label: usize,
    /// All modes that may attain the maximal vote.
    pub tied: Vec<usize>,
    /// Whether some classifier evaluated on its boundary.
    pub boundary: bool,
}

/// Majority vote over the pairwise classifiers.
///
/// Mode `j` collects one vote from each pair it wins. A boundary value is
/// counted as a possible win for both modes, so when any classifier sits on
/// its boundary `tied` holds every mode that could reach the maximum.
pub fn majority_vote_label(
    x: &[f64],
    y: f64,
    classifiers: &[PairwiseClassifier],
    tol: &Tolerances,
) -> Result<VoteOutcome> {
    let n = modes_for_pairs(classifiers.len()).ok_or_else(|| {
        Error::Invalid(format!(
            "{} classifiers do not form a complete pair set",
            classifiers.len()
        ))
    })?;
    let mut seen = vec![false; n * n];
    let mut upper = vec![0usize; n];
    let mut boundary = false;
    for c in classifiers {
        if c.j >= c.k || c.k >= n || std::mem::replace(&mut seen[c.j * n + c.k], true) {
            return Err(Error::Invalid(format!(
                "unexpected classifier pair ({}, {})",
                c.j, c.k
            )));
        }
        match c.eval(x, y, tol.sign_tol) {
            Sign::Pos => upper[c.j] += 1,
            Sign::Neg => upper[c.k] += 1,
            Sign::Zero => {
                boundary = true;
                upper[c.j] += 1;
                upper[c.k] += 1;
            }
        }
    }
    let best = *upper.iter().max().expect("n >= 2");
    let tied: Vec<usize> = (0..n).filter(|&j| upper[j] == best).collect();
    Ok(VoteOutcome {
        label: tied[0],
        tied,
        boundary,
    })
}
