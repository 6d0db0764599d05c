mod common;

use switchreg::geometry::check_dataset_general_position;
use switchreg::hardness::Decision;
use switchreg::io::{self, Metadata};
use switchreg::solvers::{altmin_restarts, candidate_bound};
use switchreg::{
    brute_force_solve, decide_threshold, enumerate_candidate_labelings, enumeration_solve,
    generate_instance, DecisionInstance, GeneratorSpec, LossModel, Method, SolverConfig, Status,
};

use common::*;

fn instance(n: usize, d: usize, len: usize, sigma: f64, seed: u64) -> switchreg::Dataset {
    generate_instance(&GeneratorSpec::new(n, d, len, sigma, seed))
        .unwrap()
        .data
}

fn rows(data: &switchreg::Dataset) -> Vec<Vec<f64>> {
    data.x().rows().map(<[f64]>::to_vec).collect()
}

#[test]
fn stream_contains_the_brute_force_optimum() {
    let cfg = SolverConfig::default();
    for (d, len) in [(1, 6), (2, 7)] {
        for seed in 0..15 {
            let data = instance(2, d, len, 0.3, 100 + seed);
            let (_, best) = brute_optimum(&rows(&data), data.y(), 2);
            let stream = enumerate_candidate_labelings(&data, 2, &cfg).unwrap();
            let found = stream
                .into_iter()
                .any(|q| equal_up_to_relabel(&q.labels, &best));
            assert!(found, "d={d} seed={seed}: optimum missing from the stream");
        }
    }
}

#[test]
fn candidates_stay_within_the_closed_form_bound() {
    let cfg = SolverConfig::default();
    for (n, d, len) in [(2, 1, 12), (2, 2, 10), (3, 1, 8)] {
        let data = instance(n, d, len, 0.1, 7);
        let r = enumeration_solve(&data, n, LossModel::Squared, &cfg).unwrap();
        let bound = candidate_bound(len, d, n, cfg.max_tie_alterations);
        assert!(
            (r.candidates_examined as f64) <= bound,
            "{} > {bound}",
            r.candidates_examined
        );
    }
}

/// Least total absolute residual of a one-dimensional fit through the origin;
/// some optimal slope passes through a data point.
fn l1_cost_1d(x: &[Vec<f64>], y: &[f64], labels: &[usize], n: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..n {
        let idx: Vec<usize> = (0..y.len()).filter(|&i| labels[i] == j).collect();
        let sae = |w: f64| idx.iter().map(|&i| (y[i] - w * x[i][0]).abs()).sum::<f64>();
        total += idx
            .iter()
            .map(|&i| sae(y[i] / x[i][0]))
            .fold(sae(0.0), f64::min);
    }
    total / y.len() as f64
}

#[test]
fn absolute_loss_enumeration_matches_exhaustive_search() {
    let cfg = SolverConfig::default();
    for seed in 0..10 {
        let data = instance(2, 1, 7, 0.2, 300 + seed);
        let x = rows(&data);
        let oracle = (0..1usize << 7)
            .map(|code| {
                let labels: Vec<usize> = (0..7).map(|i| (code >> i) & 1).collect();
                l1_cost_1d(&x, data.y(), &labels, 2)
            })
            .fold(f64::INFINITY, f64::min);
        let e = enumeration_solve(&data, 2, LossModel::Absolute, &cfg).unwrap();
        let b = brute_force_solve(&data, 2, LossModel::Absolute, &cfg).unwrap();
        assert!(
            (e.cost - oracle).abs() < 1e-9,
            "seed {seed}: {} vs {oracle}",
            e.cost
        );
        assert!((b.cost - oracle).abs() < 1e-9);
    }
}

#[test]
fn tie_set_at_the_optimum_respects_the_bound() {
    let cfg = SolverConfig::default();
    for (n, d) in [(2, 1), (2, 2), (3, 1)] {
        for seed in 0..5 {
            let data = instance(n, d, 9, 0.1, 400 + seed);
            let r = enumeration_solve(&data, n, LossModel::Squared, &cfg).unwrap();
            assert!(r.labeling.ties.len() <= (2 * d + 1) * n * (n - 1) / 2);
        }
    }
}

#[test]
fn some_restarts_get_stuck_but_the_best_is_never_below_the_optimum() {
    let cfg = SolverConfig::default();
    let tol = cfg.tolerances;
    let mut stuck = 0;
    for seed in 0..10 {
        let data = instance(3, 1, 9, 0.3, 500 + seed);
        let optimum = enumeration_solve(&data, 3, LossModel::Squared, &cfg)
            .unwrap()
            .cost;
        let runs = altmin_restarts(&data, 3, LossModel::Squared, 20, seed, &tol).unwrap();
        assert!(runs.iter().all(|r| r.cost >= optimum - 1e-9));
        stuck += runs.iter().filter(|r| r.cost > optimum + 1e-6).count();
    }
    assert!(
        stuck > 0,
        "expected at least one local minimum above the optimum"
    );
}

#[test]
fn thread_count_does_not_change_the_report() {
    let cfg = SolverConfig::default();
    let data = instance(2, 2, 10, 0.2, 600);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| enumeration_solve(&data, 2, LossModel::Squared, &cfg).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(
        (a.cost, &a.labeling, &a.models, a.candidates_examined),
        (b.cost, &b.labeling, &b.models, b.candidates_examined)
    );
}

#[test]
fn threshold_decisions() {
    let cfg = SolverConfig::default();
    let data = instance(2, 1, 8, 0.5, 700);
    let loose = DecisionInstance::new(data.clone(), 2, 1e9).unwrap();
    assert!(
        decide_threshold(&loose, LossModel::Squared, Method::Enumeration, &cfg)
            .unwrap()
            .is_yes()
    );
    assert!(decide_threshold(&loose, LossModel::Squared, Method::Altmin, &cfg).is_err());
    let tight = DecisionInstance::new(data, 2, 0.0).unwrap();
    match decide_threshold(&tight, LossModel::Squared, Method::Brute, &cfg).unwrap() {
        Decision::No { best_cost } => assert!(best_cost > 0.0),
        Decision::Yes { .. } => panic!("noisy data cannot be fit exactly"),
    }
}

#[test]
fn noisy_generated_data_is_in_general_position() {
    for seed in 0..5 {
        let data = instance(2, 2, 25, 0.1, 800 + seed);
        let (x, z) = check_dataset_general_position(&data).unwrap();
        assert!(x.ok && z.ok);
    }
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GeneratorSpec::new(2, 2, 12, 0.1, 900);
    let inst = generate_instance(&spec).unwrap();
    let meta = Metadata {
        n: Some(2),
        seed: Some(900),
        generator: Some(spec),
        ground_truth: Some(inst.truth.clone()),
    };
    for name in ["data.csv", "data.json"] {
        let path = dir.path().join(name);
        io::save(&path, &inst.data, &meta).unwrap();
        let (data, back) = io::load(&path).unwrap();
        assert_eq!(data, inst.data);
        if name.ends_with("json") {
            assert_eq!(back, meta);
        }
    }
}

#[test]
fn report_json_round_trips_with_one_based_labels() {
    let data = instance(2, 1, 8, 0.1, 1000);
    let r = enumeration_solve(&data, 2, LossModel::Squared, &SolverConfig::default()).unwrap();
    assert_eq!(r.status, Status::Optimal);
    let text = serde_json::to_string(&r).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["labels"][0], 1);
    for key in [
        "method",
        "cost",
        "labels",
        "models",
        "candidates_examined",
        "elapsed_ms",
        "status",
        "warnings",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let back: switchreg::SolveReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.labeling, r.labeling);
    assert_eq!(back.models, r.models);
}
