//! Globally optimal switching linear regression.
//!
//! Given points `(x_i, y_i)` with `x_i ∈ R^d`, find `n` linear models and a
//! labeling that minimize the mean loss `(1/N) Σ ℓ(y_i − w_{q_i}·x_i)`.
//!
//! ```
//! use switchreg::{enumeration_solve, Dataset, LossModel, SolverConfig};
//!
//! let data = Dataset::from_rows(&[[1.0], [2.0], [1.0], [3.0]], vec![2.0, 4.0, -1.0, -3.0]).unwrap();
//! let report = enumeration_solve(&data, 2, LossModel::Squared, &SolverConfig::default()).unwrap();
//! assert!(report.cost < 1e-12);
//! assert_eq!(report.labeling.labels, vec![0, 0, 1, 1]);
//! ```

pub mod bench;
pub mod combinatorics;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod hardness;
pub mod io;
pub mod linalg;
pub mod model;
pub mod pairwise;
pub mod solvers;

pub use error::{Error, Result};
pub use generate::{
    generate_instance, label_accuracy, same_up_to_permutation, GeneratorSpec, GroundTruth, Instance,
};
pub use geometry::{
    check_general_position, enumerate_linear_dichotomies, sweep_dichotomies_oracle, Dichotomy,
    DichotomySet, GeneralPositionReport,
};
pub use hardness::{
    decide_threshold, extract_partition, partition_to_instance, Decision, DecisionInstance,
    PartitionInstance,
};
pub use model::{
    assign_modes, canonicalize_labels, empirical_cost, loss_eval, Dataset, Labeling, LossModel,
    ModelSet, Points, Tolerances,
};
pub use pairwise::{
    majority_vote_label, pairwise_classifiers_from_models, PairwiseClassifier, VoteOutcome,
};
pub use solvers::{
    altmin_solve, brute_force_solve, enumerate_candidate_labelings, enumeration_solve, fit_modes,
    noiseless_solve, refine_alternate, solve, solve_mode_regression, Method, SolveReport,
    SolverConfig, Status,
};
