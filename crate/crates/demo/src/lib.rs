//! Browser bindings. Every function takes and returns JSON strings; failures
//! come back as `{"error": "..."}`.

use serde::Deserialize;
use serde_json::{json, Value};
use switchreg::geometry::dichotomy_bound;
use switchreg::hardness::Decision;
use switchreg::{
    altmin_solve, decide_threshold, enumerate_linear_dichotomies, enumeration_solve,
    extract_partition, generate_instance, partition_to_instance, Dataset, GeneratorSpec, LossModel,
    Method, PartitionInstance, Points, SolverConfig,
};
use wasm_bindgen::prelude::*;

fn respond(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Random one-dimensional two-or-more-mode data as `[[x, y], ...]`.
#[wasm_bindgen]
pub fn random_points(n: usize, count: usize, sigma: f64, seed: u64) -> String {
    respond((|| {
        let inst = generate_instance(&GeneratorSpec::new(n, 1, count, sigma, seed))
            .map_err(|e| e.to_string())?;
        let pts: Vec<[f64; 2]> = inst.data.points().map(|(x, y)| [x[0], y]).collect();
        Ok(json!({ "points": pts }))
    })())
}

#[derive(Deserialize)]
struct LineInput {
    points: Vec<[f64; 2]>,
    n: usize,
    #[serde(default = "default_restarts")]
    restarts: usize,
    #[serde(default)]
    seed: u64,
}

fn default_restarts() -> usize {
    5
}

/// Fits `n` lines through the origin to `{points, n, restarts, seed}` with
/// the exact enumeration solver and with alternating minimization.
#[wasm_bindgen]
pub fn fit_lines(input: &str) -> String {
    respond((|| {
        let req: LineInput = serde_json::from_str(input).map_err(|e| e.to_string())?;
        let x: Vec<[f64; 1]> = req.points.iter().map(|p| [p[0]]).collect();
        let y: Vec<f64> = req.points.iter().map(|p| p[1]).collect();
        let data = Dataset::from_rows(&x, y).map_err(|e| e.to_string())?;
        let cfg = SolverConfig::default();
        let exact =
            enumeration_solve(&data, req.n, LossModel::Squared, &cfg).map_err(|e| e.to_string())?;
        let heuristic = altmin_solve(
            &data,
            req.n,
            LossModel::Squared,
            req.restarts.max(1),
            req.seed,
            &cfg.tolerances,
        )
        .map_err(|e| e.to_string())?;
        let summary = |r: &switchreg::SolveReport| {
            json!({
                "cost": r.cost,
                "slopes": r.models.rows().map(|w| w[0]).collect::<Vec<_>>(),
                "labels": r.labeling.labels,
                "candidates": r.candidates_examined,
                "status": r.status,
            })
        };
        Ok(json!({ "exact": summary(&exact), "heuristic": summary(&heuristic) }))
    })())
}

/// Counts the sign patterns that lines through the origin induce on planar
/// points `[[x, y], ...]`, against the closed-form upper bound.
#[wasm_bindgen]
pub fn count_dichotomies(points: &str) -> String {
    respond((|| {
        let pts: Vec<[f64; 2]> = serde_json::from_str(points).map_err(|e| e.to_string())?;
        let points = Points::from_rows(&pts).map_err(|e| e.to_string())?;
        let set = enumerate_linear_dichotomies(&points, &Default::default())
            .map_err(|e| e.to_string())?;
        let patterns: Vec<String> = set
            .patterns()
            .map(|p| p.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect())
            .collect();
        Ok(json!({
            "count": set.len(),
            "bound": dichotomy_bound(pts.len(), 2),
            "patterns": patterns,
        }))
    })())
}

/// Decides whether a list like `"1,2,3"` splits into two equal-sum halves by
/// solving its regression encoding exactly.
#[wasm_bindgen]
pub fn decide_partition(values: &str) -> String {
    respond((|| {
        let p: PartitionInstance = values
            .parse()
            .map_err(|e: switchreg::Error| e.to_string())?;
        if p.values().len() > 5 {
            return Err("at most five values in the browser".into());
        }
        let inst = partition_to_instance(&p);
        let cfg = SolverConfig::default();
        let decision = decide_threshold(&inst, LossModel::Squared, Method::Brute, &cfg)
            .map_err(|e| e.to_string())?;
        Ok(match decision {
            Decision::Yes { cost, models, .. } => {
                let half =
                    extract_partition(&models, &p, &cfg.tolerances).map_err(|e| e.to_string())?;
                json!({ "yes": true, "cost": cost, "half": half, "models": models.to_rows(), "points": inst.data.len() })
            }
            Decision::No { best_cost } => {
                json!({ "yes": false, "cost": best_cost, "points": inst.data.len() })
            }
        })
    })())
}
