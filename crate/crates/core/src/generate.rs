//! Seeded synthetic instances `y_i = w_{q_i}·x_i + v_i`.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, drawn in a
//! fixed order: model parameters, regressors, modes, then noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{canonicalize_labels, Dataset, Labeling, ModelSet, Points};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModeProcess {
    IidUniform,
    /// Keeps the previous mode with probability `p_stay`, otherwise jumps to
    /// one of the other modes uniformly.
    Markov {
        p_stay: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XDistribution {
    Gaussian,
    /// Uniform on `[-1, 1]^d`.
    UniformBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub d: usize,
    pub num_points: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub mode_process: ModeProcess,
    pub x_distribution: XDistribution,
}

impl GeneratorSpec {
    pub fn new(n: usize, d: usize, num_points: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            n,
            d,
            num_points,
            noise_sigma,
            seed,
            mode_process: ModeProcess::IidUniform,
            x_distribution: XDistribution::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::Invalid("n and d must be positive".into()));
        }
        if self.num_points < self.n * self.d {
            return Err(Error::Invalid(format!(
                "N = {} is smaller than n·d = {}",
                self.num_points,
                self.n * self.d
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Invalid(format!(
                "noise sigma must be nonnegative, got {}",
                self.noise_sigma
            )));
        }
        if let ModeProcess::Markov { p_stay } = self.mode_process {
            if !(0.0..=1.0).contains(&p_stay) {
                return Err(Error::Invalid(format!(
                    "p_stay must lie in [0, 1], got {p_stay}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub models: ModelSet,
    pub labeling: Labeling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub data: Dataset,
    pub truth: GroundTruth,
}

pub fn generate_instance(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };

    let w: Vec<f64> = (0..spec.n * spec.d).map(|_| normal(&mut rng)).collect();
    let models = ModelSet::new(spec.d, w)?;

    let x: Vec<f64> = (0..spec.num_points * spec.d)
        .map(|_| match spec.x_distribution {
            XDistribution::Gaussian => normal(&mut rng),
            XDistribution::UniformBox => rng.random_range(-1.0..1.0),
        })
        .collect();
    let x = Points::new(spec.d, x)?;

    let mut labels = Vec::with_capacity(spec.num_points);
    for i in 0..spec.num_points {
        let q = match spec.mode_process {
            ModeProcess::IidUniform => rng.random_range(0..spec.n),
            ModeProcess::Markov { p_stay } => {
                if i == 0 {
                    rng.random_range(0..spec.n)
                } else if spec.n == 1 || rng.random_bool(p_stay) {
                    labels[i - 1]
                } else {
                    let jump = rng.random_range(0..spec.n - 1);
                    if jump >= labels[i - 1] {
                        jump + 1
                    } else {
                        jump
                    }
                }
            }
        };
        labels.push(q);
    }

    let y: Vec<f64> = (0..spec.num_points)
        .map(|i| {
            let clean = crate::linalg::dot(models.get(labels[i]), x.row(i));
            if spec.noise_sigma > 0.0 {
                clean + spec.noise_sigma * normal(&mut rng)
            } else {
                clean
            }
        })
        .collect();

    Ok(Instance {
        data: Dataset::new(x, y)?,
        truth: GroundTruth {
            models,
            labeling: Labeling::new(labels),
        },
    })
}

/// Fraction of points whose labels agree, maximized over mode permutations.
pub fn label_accuracy(truth: &Labeling, estimate: &Labeling, n: usize) -> Result<f64> {
    if truth.len() != estimate.len() || truth.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "labelings to compare",
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    if n > 6 {
        return Err(Error::Unsupported(format!(
            "permutation search over {n} modes"
        )));
    }
    let n = n
        .max(truth.labels.iter().max().map_or(0, |m| m + 1))
        .max(estimate.labels.iter().max().map_or(0, |m| m + 1));
    let mut confusion = vec![0usize; n * n];
    for (&a, &b) in truth.labels.iter().zip(&estimate.labels) {
        confusion[a * n + b] += 1;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits: usize = (0..n).map(|a| confusion[a * n + p[a]]).sum();
        best = best.max(hits);
    });
    Ok(best as f64 / truth.len() as f64)
}

fn permute(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Whether two labelings agree up to a renaming of modes.
pub fn same_up_to_permutation(a: &Labeling, b: &Labeling, n: usize) -> bool {
    canonicalize_labels(a, n).labels == canonicalize_labels(b, n).labels
}
