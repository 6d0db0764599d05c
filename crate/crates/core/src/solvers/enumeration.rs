//! The exact solver that is polynomial in `N` for fixed `d` and `n`.
//!
//! Away from ties, the minimum-error label of a point is the majority vote of
//! the pairwise classifiers `c_jk = g_jk · h_jk`, where `g_jk` is a linear
//! dichotomy of the lifted points `z_i = [x_i, y_i]` and `h_jk` a linear
//! dichotomy of the regressors `x_i`. Enumerating both dichotomy sets and
//! voting over every combination of products therefore reaches the labeling
//! of any model set, including an optimal one.
//!
//! Coverage of optimal labelings does not depend on how ties are resolved:
//! for the combination matching an optimal model set, each classifier that
//! is not on its boundary votes for the strictly better mode, so every
//! maximizer of the vote is a minimum-error mode. Tied votes are still
//! expanded (up to a cap) to give the refit more starting points.

use std::collections::{BTreeSet, HashSet, VecDeque};

use super::refine::refine_unchecked;
use super::regression::fit_unchecked;
use super::{better, check_modes, finish, Method, SolveReport, SolverConfig, Status, Stopwatch};
use crate::error::{Error, Result};
use crate::geometry::{
    check_dataset_general_position, dichotomy_bound, enumerate_linear_dichotomies,
};
use crate::model::{canonical_permutation, cost_unchecked, Dataset, Labeling, LossModel, ModelSet};

/// Candidates are evaluated in batches of this size.
const BATCH: usize = 4096;
/// General position is only checked on inputs up to this size.
const GENERAL_POSITION_CHECK_LIMIT: usize = 60;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateStats {
    pub lifted_dichotomies: usize,
    pub regressor_dichotomies: usize,
    /// Distinct sign patterns of the product classifiers.
    pub product_patterns: usize,
    pub combinations: u64,
    pub combinations_visited: u64,
    pub base_labelings: u64,
    pub tie_variants: u64,
    /// Combinations whose tie expansion exceeded the cap.
    pub tie_cap_hits: u64,
    pub duplicates: u64,
    pub emitted: u64,
    /// Witness failures reported by the dichotomy enumeration.
    pub margin_failures: usize,
}

/// Deterministic stream of distinct canonical candidate labelings.
#[derive(Debug)]
pub struct CandidateStream {
    n: usize,
    len: usize,
    pairs: Vec<(usize, usize)>,
    patterns: Vec<Vec<i8>>,
    odometer: Vec<usize>,
    exhausted: bool,
    pending: VecDeque<Vec<usize>>,
    seen: HashSet<Vec<usize>>,
    max_tie_alterations: usize,
    stats: CandidateStats,
    votes: Vec<usize>,
}

impl CandidateStream {
    pub fn stats(&self) -> &CandidateStats {
        &self.stats
    }

    fn single(len: usize) -> Self {
        let mut pending = VecDeque::new();
        pending.push_back(vec![0; len]);
        Self {
            n: 1,
            len,
            pairs: Vec::new(),
            patterns: Vec::new(),
            odometer: Vec::new(),
            exhausted: true,
            pending,
            seen: HashSet::new(),
            max_tie_alterations: 0,
            stats: CandidateStats {
                combinations: 1,
                base_labelings: 1,
                ..Default::default()
            },
            votes: Vec::new(),
        }
    }

    /// Votes the current combination and queues its distinct labelings.
    #[allow(clippy::needless_range_loop)]
    fn expand_current(&mut self) {
        let n = self.n;
        let mut base = vec![0usize; self.len];
        let mut tied: Vec<(usize, Vec<usize>)> = Vec::new();
        for i in 0..self.len {
            self.votes.iter_mut().for_each(|v| *v = 0);
            for (p, &(j, k)) in self.pairs.iter().enumerate() {
                if self.patterns[self.odometer[p]][i] > 0 {
                    self.votes[j] += 1;
                } else {
                    self.votes[k] += 1;
                }
            }
            let top = *self.votes.iter().max().expect("n >= 2");
            let winners: Vec<usize> = (0..n).filter(|&j| self.votes[j] == top).collect();
            base[i] = winners[0];
            if winners.len() > 1 {
                tied.push((i, winners));
            }
        }
        self.stats.base_labelings += 1;
        let variants: f64 = tied.iter().map(|(_, w)| w.len() as f64).product();
        if tied.is_empty() || variants > (1 + self.max_tie_alterations) as f64 {
            if !tied.is_empty() {
                self.stats.tie_cap_hits += 1;
            }
            self.queue(base);
            return;
        }
        // Odometer over the tied choices, lexicographic from the base labeling.
        let mut choice = vec![0usize; tied.len()];
        loop {
            let mut labels = base.clone();
            for ((i, winners), &c) in tied.iter().zip(&choice) {
                labels[*i] = winners[c];
            }
            self.stats.tie_variants += 1;
            self.queue(labels);
            let mut t = tied.len();
            loop {
                if t == 0 {
                    return;
                }
                t -= 1;
                choice[t] += 1;
                if choice[t] < tied[t].1.len() {
                    break;
                }
                choice[t] = 0;
            }
        }
    }

    fn queue(&mut self, labels: Vec<usize>) {
        let perm = canonical_permutation(&labels, self.n);
        let canonical: Vec<usize> = labels.iter().map(|&l| perm[l]).collect();
        if self.seen.insert(canonical.clone()) {
            self.pending.push_back(canonical);
        } else {
            self.stats.duplicates += 1;
        }
    }

    fn advance(&mut self) {
        let mut p = self.odometer.len();
        while p > 0 {
            p -= 1;
            self.odometer[p] += 1;
            if self.odometer[p] < self.patterns.len() {
                return;
            }
            self.odometer[p] = 0;
        }
        self.exhausted = true;
    }
}

impl Iterator for CandidateStream {
    type Item = Labeling;

    fn next(&mut self) -> Option<Labeling> {
        loop {
            if let Some(labels) = self.pending.pop_front() {
                self.stats.emitted += 1;
                return Some(Labeling::new(labels));
            }
            if self.exhausted {
                return None;
            }
            self.stats.combinations_visited += 1;
            self.expand_current();
            self.advance();
        }
    }
}

/// Closed-form bound on the candidates the stream can emit: the product of
/// the dichotomy bounds in `R^(d+1)` and `R^d`, raised to the number of
/// pairs, times the tie-expansion factor.
pub fn candidate_bound(len: usize, d: usize, n: usize, max_tie_alterations: usize) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let pairs = (n * (n - 1) / 2) as i32;
    let per_pair = dichotomy_bound(len, d + 1) * dichotomy_bound(len, d);
    per_pair.powi(pairs) * (1 + max_tie_alterations) as f64
}

/// Candidate labelings built from products of linear dichotomies, combined
/// over all mode pairs in lexicographic pair order.
pub fn enumerate_candidate_labelings(
    data: &Dataset,
    n: usize,
    cfg: &SolverConfig,
) -> Result<CandidateStream> {
    cfg.validate()?;
    check_modes(data, n)?;
    let d = data.dim();
    if d > cfg.d_max {
        return Err(Error::CapExceeded {
            what: "dimension for enumeration",
            count: d as f64,
            cap: cfg.d_max as f64,
        });
    }
    if n > cfg.n_max {
        return Err(Error::CapExceeded {
            what: "modes for enumeration",
            count: n as f64,
            cap: cfg.n_max as f64,
        });
    }
    if n == 1 {
        return Ok(CandidateStream::single(data.len()));
    }
    let tol = &cfg.tolerances;
    let lifted = enumerate_linear_dichotomies(&data.lifted(), tol)?;
    let regressors = enumerate_linear_dichotomies(data.x(), tol)?;
    // (−g)(−h) = g·h, so the product set is deduplicated before combining.
    let products: BTreeSet<Vec<i8>> = lifted
        .patterns()
        .flat_map(|g| {
            regressors
                .patterns()
                .map(move |h| g.iter().zip(h).map(|(a, b)| a * b).collect())
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect();
    let combinations = (products.len() as f64).powi(pairs.len() as i32);
    if combinations > cfg.max_combinations {
        return Err(Error::CapExceeded {
            what: "classifier combinations",
            count: combinations,
            cap: cfg.max_combinations,
        });
    }
    let stats = CandidateStats {
        lifted_dichotomies: lifted.len(),
        regressor_dichotomies: regressors.len(),
        product_patterns: products.len(),
        combinations: combinations as u64,
        margin_failures: lifted.margin_failures + regressors.margin_failures,
        ..Default::default()
    };
    let exhausted = products.is_empty();
    Ok(CandidateStream {
        n,
        len: data.len(),
        odometer: vec![0; pairs.len()],
        pairs,
        patterns: products.into_iter().collect(),
        exhausted,
        pending: VecDeque::new(),
        seen: HashSet::new(),
        max_tie_alterations: cfg.max_tie_alterations,
        stats,
        votes: vec![0; n],
    })
}

struct Evaluated {
    cost: f64,
    labels: Vec<usize>,
    models: ModelSet,
}

fn evaluate(
    data: &Dataset,
    labels: &[usize],
    n: usize,
    loss: LossModel,
    cfg: &SolverConfig,
) -> Evaluated {
    let fitted = fit_unchecked(data, labels, n, loss);
    let refined = refine_unchecked(data, &fitted, loss, &cfg.tolerances);
    let fitted_cost = cost_unchecked(data, &fitted, labels, loss);
    // Refinement never increases the cost; keep the candidate itself on round-off.
    if refined.cost <= fitted_cost {
        let perm = canonical_permutation(&refined.labeling.labels, n);
        Evaluated {
            cost: refined.cost,
            labels: refined.labeling.labels.iter().map(|&l| perm[l]).collect(),
            models: refined.models.permuted(&perm),
        }
    } else {
        Evaluated {
            cost: fitted_cost,
            labels: labels.to_vec(),
            models: fitted,
        }
    }
}

fn pick(a: Evaluated, b: Evaluated) -> Evaluated {
    if better((b.cost, &b.labels), (a.cost, &a.labels)) {
        b
    } else {
        a
    }
}

#[cfg(feature = "parallel")]
fn evaluate_batch(
    data: &Dataset,
    batch: &[Labeling],
    n: usize,
    loss: LossModel,
    cfg: &SolverConfig,
) -> Option<Evaluated> {
    use rayon::prelude::*;
    batch
        .par_iter()
        .map(|q| evaluate(data, &q.labels, n, loss, cfg))
        .reduce_with(pick)
}

#[cfg(not(feature = "parallel"))]
fn evaluate_batch(
    data: &Dataset,
    batch: &[Labeling],
    n: usize,
    loss: LossModel,
    cfg: &SolverConfig,
) -> Option<Evaluated> {
    batch
        .iter()
        .map(|q| evaluate(data, &q.labels, n, loss, cfg))
        .reduce(pick)
}

/// Exact global optimum through candidate enumeration. Every candidate is
/// refit and then refined by alternating minimization.
pub fn enumeration_solve(
    data: &Dataset,
    n: usize,
    loss: LossModel,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let clock = Stopwatch::start();
    let mut stream = enumerate_candidate_labelings(data, n, cfg)?;
    let mut best: Option<Evaluated> = None;
    let mut batch = Vec::with_capacity(BATCH);
    let mut examined = 0u64;
    loop {
        batch.clear();
        batch.extend(stream.by_ref().take(BATCH));
        if batch.is_empty() {
            break;
        }
        examined += batch.len() as u64;
        if let Some(e) = evaluate_batch(data, &batch, n, loss, cfg) {
            best = Some(match best {
                Some(b) => pick(b, e),
                None => e,
            });
        }
    }
    let best = best.ok_or_else(|| Error::Invalid("no candidate labeling was produced".into()))?;
    let stats = stream.stats();
    let mut warnings = Vec::new();
    let mut status = Status::Optimal;
    if stats.margin_failures > 0 {
        status = Status::Heuristic;
        warnings.push(format!(
            "coverage: {} dichotomy witnesses failed the margin check; some candidates may be missing",
            stats.margin_failures
        ));
    }
    if stats.tie_cap_hits > 0 {
        warnings.push(format!(
            "{} combinations had more tie variants than the cap of {}; the lexicographically first resolution was used",
            stats.tie_cap_hits, cfg.max_tie_alterations
        ));
    }
    if data.len() <= GENERAL_POSITION_CHECK_LIMIT {
        let (x_report, z_report) = check_dataset_general_position(data)?;
        if !x_report.ok || !z_report.ok {
            warnings
                .push("data are not in general position; the tie-set bound may not hold".into());
        }
    }
    let done = finish(data, &best.models, &best.labels, loss, &cfg.tolerances);
    Ok(SolveReport {
        method: Method::Enumeration,
        loss,
        cost: done.cost,
        models: done.models,
        labeling: done.labeling,
        candidates_examined: examined,
        elapsed: clock.elapsed(),
        status,
        warnings,
    })
}
