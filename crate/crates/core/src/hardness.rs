//! The Partition reduction: a multiset of positive integers becomes a
//! two-mode regression instance that admits a zero-error fit exactly when
//! the multiset splits into two halves of equal sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Labeling, LossModel, ModelSet, Tolerances};
use crate::solvers::{brute_force_solve, enumeration_solve, noiseless_solve, Method, SolverConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionInstance {
    values: Vec<u64>,
}

impl PartitionInstance {
    /// Zeros are dropped; they never affect a split.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        let values: Vec<u64> = values.into_iter().filter(|&v| v != 0).collect();
        if values.is_empty() {
            return Err(Error::Invalid(
                "a partition instance needs at least one positive value".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    /// Brute-force decision over all `2^d` subsets.
    pub fn has_equal_split(&self) -> bool {
        let total = self.total();
        if total % 2 == 1 {
            return false;
        }
        let d = self.values.len();
        (0u64..1 << d).any(|mask| {
            let sum: u64 = (0..d)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.values[i])
                .sum();
            2 * sum == total
        })
    }
}

impl std::str::FromStr for PartitionInstance {
    type Err = Error;

    /// Parses a comma- or whitespace-separated list of integers.
    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        for tok in s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::Invalid(format!("`{tok}` is not an integer")))?;
            if v < 0 {
                return Err(Error::Invalid(format!(
                    "partition values must be positive, got {v}"
                )));
            }
            values.push(v as u64);
        }
        Self::new(values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionInstance {
    pub data: Dataset,
    pub n: usize,
    pub epsilon: f64,
}

impl DecisionInstance {
    pub fn new(data: Dataset, n: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Invalid(format!(
                "threshold must be nonnegative, got {epsilon}"
            )));
        }
        if n < 2 || n * data.dim() > data.len() {
            return Err(Error::Invalid(format!(
                "mode count {n} outside [2, N/d] for N = {}, d = {}",
                data.len(),
                data.dim()
            )));
        }
        Ok(Self { data, n, epsilon })
    }
}

/// Builds the `2d + 1` point instance in dimension `d` with `n = 2`, `ε = 0`:
/// `(s_i e_i, s_i)` and `(s_i e_i, 0)` for each `i`, then `(s, Σs/2)`.
pub fn partition_to_instance(p: &PartitionInstance) -> DecisionInstance {
    let s = p.values();
    let d = s.len();
    let mut rows = Vec::with_capacity(2 * d + 1);
    let mut y = Vec::with_capacity(2 * d + 1);
    // First block targets s_i, second block targets 0.
    for scale in [1.0, 0.0] {
        for (i, &v) in s.iter().enumerate() {
            let mut x = vec![0.0; d];
            x[i] = v as f64;
            rows.push(x);
            y.push(scale * v as f64);
        }
    }
    rows.push(s.iter().map(|&v| v as f64).collect());
    y.push(0.5 * p.total() as f64);
    let data = Dataset::from_rows(&rows, y).expect("finite by construction");
    DecisionInstance {
        data,
        n: 2,
        epsilon: 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    Yes {
        cost: f64,
        models: ModelSet,
        labeling: Labeling,
    },
    No {
        best_cost: f64,
    },
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes { .. })
    }
}

/// Decides whether some model set and labeling reach a mean loss of at most
/// `ε`. Only exact methods are accepted, since a "no" needs the optimum.
pub fn decide_threshold(
    inst: &DecisionInstance,
    loss: LossModel,
    method: Method,
    cfg: &SolverConfig,
) -> Result<Decision> {
    let tol = &cfg.tolerances;
    let report = match method {
        Method::Brute => brute_force_solve(&inst.data, inst.n, loss, cfg)?,
        Method::Enumeration => enumeration_solve(&inst.data, inst.n, loss, cfg)?,
        Method::Noiseless => {
            if inst.epsilon > tol.zero_tol {
                return Err(Error::Unsupported(
                    "the noiseless method only decides zero thresholds".into(),
                ));
            }
            noiseless_solve(&inst.data, inst.n, cfg)?
        }
        Method::Altmin => {
            return Err(Error::Unsupported(
                "threshold decisions need an exact method; altmin is a heuristic".into(),
            ))
        }
    };
    if report.cost <= inst.epsilon + tol.zero_tol {
        Ok(Decision::Yes {
            cost: report.cost,
            models: report.models,
            labeling: report.labeling,
        })
    } else {
        Ok(Decision::No {
            best_cost: report.cost,
        })
    }
}

/// Reads a split off a zero-error certificate: `S_1 = {s_i : w_1i = 1}`.
///
/// Mode 1 is tried first, then mode 2. Coordinates must be within `tie_tol`
/// of 0 or 1 and the two halves must have equal sums.
pub fn extract_partition(
    models: &ModelSet,
    p: &PartitionInstance,
    tol: &Tolerances,
) -> Result<Vec<u64>> {
    let d = p.values().len();
    if models.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "certificate dimension",
            expected: d,
            got: models.dim(),
        });
    }
    let mut reasons = Vec::new();
    for j in 0..models.n().min(2) {
        match indicator_split(models.get(j), p, tol) {
            Ok(subset) => return Ok(subset),
            Err(why) => reasons.push(format!("mode {}: {why}", j + 1)),
        }
    }
    Err(Error::Invalid(format!(
        "certificate does not encode a partition ({})",
        reasons.join("; ")
    )))
}

fn indicator_split(
    w: &[f64],
    p: &PartitionInstance,
    tol: &Tolerances,
) -> std::result::Result<Vec<u64>, String> {
    let mut subset = Vec::new();
    for (i, (&wi, &s)) in w.iter().zip(p.values()).enumerate() {
        if (wi - 1.0).abs() <= tol.tie_tol {
            subset.push(s);
        } else if wi.abs() > tol.tie_tol {
            return Err(format!("coordinate {} is {wi}, not 0 or 1", i + 1));
        }
    }
    let sum: u64 = subset.iter().sum();
    if 2 * sum != p.total() {
        return Err(format!("subset sums to {sum}, not half of {}", p.total()));
    }
    Ok(subset)
}
