//! Solution methods for switching linear regression.
//!
//! * [`brute_force_solve`] tries every labeling (the reference oracle).
//! * [`enumeration_solve`] visits only the labelings induced by products of
//!   linear dichotomies and is polynomial in `N` for fixed `d` and `n`.
//! * [`noiseless_solve`] looks for an exact fit from disjoint `d`-subsets.
//! * [`altmin_solve`] is the usual alternating heuristic with restarts.

mod altmin;
mod brute;
mod enumeration;
mod noiseless;
mod refine;
mod regression;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use altmin::{altmin_restarts, altmin_solve};
pub use brute::brute_force_solve;
pub use enumeration::{
    candidate_bound, enumerate_candidate_labelings, enumeration_solve, CandidateStats,
    CandidateStream,
};
pub use noiseless::noiseless_solve;
pub use refine::{refine_alternate, RefineOutcome};
pub use regression::{fit_modes, solve_mode_regression};

use crate::error::{Error, Result};
use crate::model::{
    canonical_permutation, cost_unchecked, Dataset, Labeling, LossModel, ModelSet, Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "brute")]
    Brute,
    #[serde(rename = "enum")]
    Enumeration,
    #[serde(rename = "noiseless")]
    Noiseless,
    #[serde(rename = "altmin")]
    Altmin,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Enumeration => "enum",
            Method::Noiseless => "noiseless",
            Method::Altmin => "altmin",
        }
    }

    /// Whether the method certifies global optimality.
    pub fn is_exact(self) -> bool {
        !matches!(self, Method::Altmin)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "enum" | "enumeration" => Ok(Method::Enumeration),
            "noiseless" => Ok(Method::Noiseless),
            "altmin" => Ok(Method::Altmin),
            other => Err(Error::Invalid(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Heuristic,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Extra labelings emitted per base labeling when majority votes tie.
    pub max_tie_alterations: usize,
    pub d_max: usize,
    pub n_max: usize,
    /// Cap on classifier combinations visited by the enumeration solver.
    pub max_combinations: f64,
    /// Cap on `n^N` for brute force.
    pub brute_budget: f64,
    /// Cap on subset collections visited by the noiseless solver.
    pub noiseless_budget: f64,
    pub restarts: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_tie_alterations: 12,
            d_max: 3,
            n_max: 3,
            max_combinations: 5e7,
            brute_budget: 2e6,
            noiseless_budget: 1e8,
            restarts: 20,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if self.d_max == 0 || self.n_max == 0 || self.restarts == 0 {
            return Err(Error::Invalid("solver caps must be positive".into()));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.max_combinations)
            && positive(self.brute_budget)
            && positive(self.noiseless_budget))
        {
            return Err(Error::Invalid("solver budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Result of a solver run. The labeling is canonical: modes are numbered in
/// order of first occurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    pub loss: LossModel,
    pub cost: f64,
    pub models: ModelSet,
    pub labeling: Labeling,
    pub candidates_examined: u64,
    pub elapsed: Duration,
    pub status: Status,
    pub warnings: Vec<String>,
}

impl SolveReport {
    /// Recomputes the cost from the models and labeling.
    pub fn validate(&self, data: &Dataset, tol: &Tolerances) -> Result<()> {
        let cost = crate::model::empirical_cost(data, &self.models, &self.labeling, self.loss)?;
        if (cost - self.cost).abs() > tol.zero_tol {
            return Err(Error::Invalid(format!(
                "report cost {} does not match recomputed cost {cost}",
                self.cost
            )));
        }
        Ok(())
    }
}

/// Wire form of a report: one-based labels and model rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ReportJson {
    method: Method,
    loss: LossModel,
    cost: f64,
    labels: Vec<usize>,
    #[serde(default)]
    ties: Vec<usize>,
    models: Vec<Vec<f64>>,
    candidates_examined: u64,
    elapsed_ms: f64,
    status: Status,
    #[serde(default)]
    warnings: Vec<String>,
}

impl Serialize for SolveReport {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ReportJson {
            method: self.method,
            loss: self.loss,
            cost: self.cost,
            labels: self.labeling.labels.iter().map(|l| l + 1).collect(),
            ties: self.labeling.ties.iter().map(|i| i + 1).collect(),
            models: self.models.to_rows(),
            candidates_examined: self.candidates_examined,
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
            status: self.status,
            warnings: self.warnings.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SolveReport {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ReportJson::deserialize(deserializer)?;
        let models = ModelSet::from_rows(&raw.models).map_err(D::Error::custom)?;
        let one_based = |v: Vec<usize>, what: &str| -> std::result::Result<Vec<usize>, D::Error> {
            v.into_iter()
                .map(|l| {
                    l.checked_sub(1)
                        .ok_or_else(|| D::Error::custom(format!("{what} are one-based")))
                })
                .collect()
        };
        Ok(SolveReport {
            method: raw.method,
            loss: raw.loss,
            cost: raw.cost,
            labeling: Labeling {
                labels: one_based(raw.labels, "labels")?,
                ties: one_based(raw.ties, "tie indices")?,
            },
            models,
            candidates_examined: raw.candidates_examined,
            elapsed: Duration::from_secs_f64(raw.elapsed_ms.max(0.0) / 1e3),
            status: raw.status,
            warnings: raw.warnings,
        })
    }
}

/// Wall-clock timer that reads zero where no clock is available.
pub struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    pub fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    pub fn elapsed(&self) -> Duration {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed()
        }
        #[cfg(target_arch = "wasm32")]
        {
            Duration::ZERO
        }
    }
}

/// Indices where another mode's absolute residual is within `tie_tol` of the
/// assigned mode's.
pub(crate) fn tie_indices(
    data: &Dataset,
    models: &ModelSet,
    labels: &[usize],
    tol: &Tolerances,
) -> Vec<usize> {
    data.points()
        .zip(labels)
        .enumerate()
        .filter(|(_, ((x, y), &l))| {
            let own = crate::model::residual(x, *y, models.get(l)).abs();
            (0..models.n()).any(|j| {
                j != l
                    && (crate::model::residual(x, *y, models.get(j)).abs() - own).abs()
                        <= tol.tie_tol
            })
        })
        .map(|(i, _)| i)
        .collect()
}

/// Canonicalizes labels (permuting the models to match) and recomputes the cost.
pub(crate) struct Finished {
    pub models: ModelSet,
    pub labeling: Labeling,
    pub cost: f64,
}

pub(crate) fn finish(
    data: &Dataset,
    models: &ModelSet,
    labels: &[usize],
    loss: LossModel,
    tol: &Tolerances,
) -> Finished {
    let perm = canonical_permutation(labels, models.n());
    let models = models.permuted(&perm);
    let labels: Vec<usize> = labels.iter().map(|&l| perm[l]).collect();
    let cost = cost_unchecked(data, &models, &labels, loss);
    let ties = tie_indices(data, &models, &labels, tol);
    Finished {
        models,
        labeling: Labeling { labels, ties },
        cost,
    }
}

pub(crate) fn check_modes(data: &Dataset, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Invalid("at least one mode is required".into()));
    }
    if n > data.len() {
        return Err(Error::Invalid(format!(
            "{n} modes for {} points",
            data.len()
        )));
    }
    Ok(())
}

/// Strict total order used to pick a best candidate independently of the
/// evaluation order: lower cost first, then lexicographically smaller labels.
pub(crate) fn better(a: (f64, &[usize]), b: (f64, &[usize])) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.1 < b.1,
    }
}

/// Runs `method` with the settings in `cfg`. The noiseless method ignores
/// `loss` (it certifies a zero-cost fit, which is optimal for every loss).
pub fn solve(
    data: &Dataset,
    n: usize,
    loss: LossModel,
    method: Method,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    match method {
        Method::Brute => brute_force_solve(data, n, loss, cfg),
        Method::Enumeration => enumeration_solve(data, n, loss, cfg),
        Method::Noiseless => noiseless_solve(data, n, cfg),
        Method::Altmin => altmin_solve(data, n, loss, cfg.restarts, cfg.seed, &cfg.tolerances),
    }
}
