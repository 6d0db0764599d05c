//! General-position checks and enumeration of the sign patterns that
//! hyperplanes through the origin induce on a point set.
//!
//! Every region of a central hyperplane arrangement touches a ray where
//! `m − 1` of the point-normal hyperplanes meet. Enumeration therefore walks
//! the `(m − 1)`-subsets of points, takes the normal `h0` orthogonal to each,
//! and perturbs `±h0` inside `h0⊥` by every dichotomy of the points lying on
//! the hyperplane (recursively, one dimension down). Points that do not span
//! the ambient space are first projected onto their span.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, Combinations};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, orthogonal_complement, orthonormal_basis, rank};
use crate::model::{Dataset, Points, Tolerances};

/// Relative distance below which a point counts as lying on a candidate hyperplane.
const BOUNDARY_REL: f64 = 1e-10;
/// Relative residual below which a vector is linearly dependent on a basis.
const RANK_REL: f64 = 1e-9;

/// A strict sign pattern over a point set and a normal vector realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub signs: Vec<i8>,
    pub witness: Vec<f64>,
}

impl Dichotomy {
    pub fn negated(&self) -> Dichotomy {
        Dichotomy {
            signs: self.signs.iter().map(|s| -s).collect(),
            witness: self.witness.iter().map(|v| -v).collect(),
        }
    }

    /// Smallest `sign_i · (h · p_i)` over the points, skipping `skip`.
    pub fn margin(&self, points: &Points, skip: &[usize]) -> f64 {
        points
            .rows()
            .zip(&self.signs)
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, (p, &s))| f64::from(s) * dot(&self.witness, p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Deduplicated dichotomies, sorted by sign pattern.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DichotomySet {
    pub dichotomies: Vec<Dichotomy>,
    /// Points too close to the origin to be signed; they take both signs.
    pub null_points: Vec<usize>,
    /// Spanning subsets skipped for being rank-deficient.
    pub degenerate_subsets: usize,
    /// Candidate witnesses rejected for an insufficient margin.
    pub margin_failures: usize,
}

impl DichotomySet {
    pub fn len(&self) -> usize {
        self.dichotomies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dichotomies.is_empty()
    }

    pub fn contains(&self, signs: &[i8]) -> bool {
        self.dichotomies
            .binary_search_by(|d| d.signs.as_slice().cmp(signs))
            .is_ok()
    }

    pub fn patterns(&self) -> impl Iterator<Item = &[i8]> + '_ {
        self.dichotomies.iter().map(|d| d.signs.as_slice())
    }

    fn from_map(map: BTreeMap<Vec<i8>, Vec<f64>>, null_points: Vec<usize>) -> Self {
        let mut out = Vec::with_capacity(map.len() << null_points.len());
        for (signs, witness) in map {
            // Null points are on every hyperplane: branch on both signs.
            let mut variants = vec![signs];
            for &i in &null_points {
                let mut doubled = Vec::with_capacity(variants.len() * 2);
                for v in variants {
                    let mut neg = v.clone();
                    neg.insert(i, -1);
                    let mut pos = v;
                    pos.insert(i, 1);
                    doubled.push(neg);
                    doubled.push(pos);
                }
                variants = doubled;
            }
            out.extend(variants.into_iter().map(|signs| Dichotomy {
                signs,
                witness: witness.clone(),
            }));
        }
        out.sort_by(|a, b| a.signs.cmp(&b.signs));
        Self {
            dichotomies: out,
            null_points,
            degenerate_subsets: 0,
            margin_failures: 0,
        }
    }
}

/// Upper bound `2^m · C(N, m − 1)` on the number of linear dichotomies of
/// `N` points in `R^m`.
pub fn dichotomy_bound(len: usize, dim: usize) -> f64 {
    2f64.powi(dim as i32) * binomial(len, dim.saturating_sub(1))
}

fn split_null(points: &Points, tol: &Tolerances) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut live = Vec::new();
    let mut null = Vec::new();
    for (i, p) in points.rows().enumerate() {
        if norm(p) <= tol.sign_tol {
            null.push(i);
        } else {
            live.push(p.to_vec());
        }
    }
    (live, null)
}

#[derive(Default)]
struct Stats {
    degenerate: usize,
    margin_failures: usize,
}

/// Every strict sign pattern `(sign(h·p_1), …, sign(h·p_N))` realizable by
/// some `h ∈ R^m`, each with a witness normal. The result is closed under
/// negation.
pub fn enumerate_linear_dichotomies(points: &Points, tol: &Tolerances) -> Result<DichotomySet> {
    tol.validate()?;
    let (live, null) = split_null(points, tol);
    let mut stats = Stats::default();
    let map = enumerate_rec(&live, points.dim(), tol, &mut stats);
    let mut set = DichotomySet::from_map(map, null);
    set.degenerate_subsets = stats.degenerate;
    set.margin_failures = stats.margin_failures;
    Ok(set)
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else {
        -1
    }
}

fn unit(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    if dim > 0 {
        e[0] = 1.0;
    }
    e
}

fn combine(basis: &[Vec<f64>], coeffs: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (b, &c) in basis.iter().zip(coeffs) {
        for (o, bi) in out.iter_mut().zip(b) {
            *o += c * bi;
        }
    }
    out
}

fn enumerate_rec(
    pts: &[Vec<f64>],
    m: usize,
    tol: &Tolerances,
    stats: &mut Stats,
) -> BTreeMap<Vec<i8>, Vec<f64>> {
    let mut out = BTreeMap::new();
    if pts.is_empty() {
        out.insert(Vec::new(), unit(m));
        return out;
    }
    let span = orthonormal_basis(pts.iter().map(Vec::as_slice), RANK_REL);
    if span.len() < m {
        // Work inside the span; components orthogonal to it do not affect any sign.
        let r = span.len();
        let projected: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| span.iter().map(|b| dot(b, p)).collect())
            .collect();
        for (signs, u) in enumerate_rec(&projected, r, tol, stats) {
            out.insert(signs, combine(&span, &u, m));
        }
        return out;
    }
    if m == 1 {
        let signs: Vec<i8> = pts.iter().map(|p| sign_of(p[0])).collect();
        out.insert(signs.iter().map(|s| -s).collect(), vec![-1.0]);
        out.insert(signs, vec![1.0]);
        return out;
    }

    let mut subsets = Combinations::new(pts.len(), m - 1);
    while let Some(subset) = subsets.next_combination() {
        let plane = orthonormal_basis(subset.iter().map(|&i| pts[i].as_slice()), RANK_REL);
        if plane.len() < m - 1 {
            stats.degenerate += 1;
            continue;
        }
        let h0 = orthogonal_complement(&plane, m).remove(0);
        let values: Vec<f64> = pts.iter().map(|p| dot(&h0, p)).collect();
        let on_plane: Vec<usize> = (0..pts.len())
            .filter(|&i| values[i].abs() <= BOUNDARY_REL * norm(&pts[i]))
            .collect();
        let projected: Vec<Vec<f64>> = on_plane
            .iter()
            .map(|&i| plane.iter().map(|b| dot(b, &pts[i])).collect())
            .collect();
        let local = enumerate_rec(&projected, m - 1, tol, stats);
        for u_local in local.values() {
            let u = combine(&plane, u_local, m);
            let u_values: Vec<f64> = pts.iter().map(|p| dot(&u, p)).collect();
            // Step small enough that no off-plane point changes sign.
            let step = (0..pts.len())
                .filter(|i| on_plane.binary_search(i).is_err())
                .filter(|&i| u_values[i] != 0.0)
                .map(|i| 0.5 * values[i].abs() / u_values[i].abs())
                .fold(1.0_f64, f64::min);
            for side in [1.0, -1.0] {
                let mut h: Vec<f64> = h0
                    .iter()
                    .zip(&u)
                    .map(|(a, b)| side * a + step * b)
                    .collect();
                let len = norm(&h);
                h.iter_mut().for_each(|v| *v /= len);
                let dots: Vec<f64> = pts.iter().map(|p| dot(&h, p)).collect();
                if dots.iter().any(|v| v.abs() <= tol.sign_tol) {
                    stats.margin_failures += 1;
                    continue;
                }
                out.entry(dots.iter().map(|&v| sign_of(v)).collect())
                    .or_insert(h);
            }
        }
    }
    out
}

/// Independent enumeration for `m ≤ 2`: both orientations of the line for
/// `m = 1`, and a sweep of the normal direction through all critical angles
/// for `m = 2`.
pub fn sweep_dichotomies_oracle(points: &Points, tol: &Tolerances) -> Result<DichotomySet> {
    let m = points.dim();
    if m > 2 {
        return Err(Error::Unsupported(format!(
            "sweep oracle handles m <= 2, got m = {m}"
        )));
    }
    let (live, null) = split_null(points, tol);
    let mut map = BTreeMap::new();
    let signs_at = |h: &[f64]| -> Option<Vec<i8>> {
        let dots: Vec<f64> = live.iter().map(|p| dot(h, p)).collect();
        if dots.iter().any(|v| v.abs() <= tol.sign_tol) {
            None
        } else {
            Some(dots.iter().map(|&v| sign_of(v)).collect())
        }
    };
    if m == 1 {
        for h in [[1.0], [-1.0]] {
            if let Some(s) = signs_at(&h) {
                map.insert(s, h.to_vec());
            }
        }
    } else {
        use std::f64::consts::{FRAC_PI_2, TAU};
        let mut critical: Vec<f64> = live
            .iter()
            .flat_map(|p| {
                let phi = p[1].atan2(p[0]);
                [
                    (phi + FRAC_PI_2).rem_euclid(TAU),
                    (phi - FRAC_PI_2).rem_euclid(TAU),
                ]
            })
            .collect();
        critical.sort_by(f64::total_cmp);
        critical.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let probes: Vec<f64> = if critical.is_empty() {
            vec![0.0]
        } else {
            (0..critical.len())
                .map(|i| {
                    let a = critical[i];
                    let b = if i + 1 < critical.len() {
                        critical[i + 1]
                    } else {
                        critical[0] + TAU
                    };
                    0.5 * (a + b)
                })
                .collect()
        };
        for theta in probes {
            let h = [theta.cos(), theta.sin()];
            if let Some(s) = signs_at(&h) {
                map.entry(s).or_insert_with(|| h.to_vec());
            }
        }
    }
    Ok(DichotomySet::from_map(map, null))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralPositionReport {
    pub ok: bool,
    /// Index subsets of `m + 1` points found on a common hyperplane (capped).
    pub violations: Vec<Vec<usize>>,
    pub violation_count: u64,
    pub subsets_checked: u64,
    /// False when the check sampled subsets instead of visiting them all.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct GeneralPositionOptions {
    /// Above this many subsets the check switches to random sampling.
    pub exhaustive_limit: u64,
    pub samples: u64,
    pub seed: u64,
    pub max_reported: usize,
}

impl Default for GeneralPositionOptions {
    fn default() -> Self {
        Self {
            exhaustive_limit: 2_000_000,
            samples: 200_000,
            seed: 0,
            max_reported: 64,
        }
    }
}

pub fn check_general_position(points: &Points) -> Result<GeneralPositionReport> {
    check_general_position_with(points, &GeneralPositionOptions::default())
}

/// Checks that every `m + 1` points are affinely independent.
pub fn check_general_position_with(
    points: &Points,
    opts: &GeneralPositionOptions,
) -> Result<GeneralPositionReport> {
    if points.coords().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("point coordinates"));
    }
    let m = points.dim();
    let n = points.len();
    let mut report = GeneralPositionReport {
        ok: true,
        violations: Vec::new(),
        violation_count: 0,
        subsets_checked: 0,
        exhaustive: true,
    };
    if n < m + 1 {
        return Ok(report);
    }
    let mut diffs = vec![vec![0.0; m]; m];
    let mut visit = |subset: &[usize], report: &mut GeneralPositionReport| {
        let base = points.row(subset[0]);
        for (d, &i) in diffs.iter_mut().zip(&subset[1..]) {
            for ((dv, a), b) in d.iter_mut().zip(points.row(i)).zip(base) {
                *dv = a - b;
            }
        }
        report.subsets_checked += 1;
        if rank(diffs.iter().map(Vec::as_slice), RANK_REL) < m {
            report.violation_count += 1;
            if report.violations.len() < opts.max_reported {
                report.violations.push(subset.to_vec());
            }
        }
    };
    let total = binomial(n, m + 1);
    if total <= opts.exhaustive_limit as f64 {
        let mut subsets = Combinations::new(n, m + 1);
        while let Some(s) = subsets.next_combination() {
            visit(s, &mut report);
        }
    } else {
        report.exhaustive = false;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.samples {
            let mut s = sample(&mut rng, n, m + 1).into_vec();
            s.sort_unstable();
            visit(&s, &mut report);
        }
    }
    report.ok = report.violation_count == 0;
    Ok(report)
}

/// General position of both the regressors and the lifted points.
pub fn check_dataset_general_position(
    data: &Dataset,
) -> Result<(GeneralPositionReport, GeneralPositionReport)> {
    Ok((
        check_general_position(data.x())?,
        check_general_position(&data.lifted())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn pts(rows: &[&[f64]]) -> Points {
        Points::from_rows(rows).unwrap()
    }

    fn keys(set: &DichotomySet) -> BTreeSet<Vec<i8>> {
        set.patterns().map(<[i8]>::to_vec).collect()
    }

    #[test]
    fn general_position_examples() {
        let r = check_general_position(&pts(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]])).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations, vec![vec![0, 1, 2]]);

        let r = check_general_position(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert!(r.ok && r.exhaustive);

        // Noiseless single-mode data: lifted points on the line y = 2x.
        let r = check_general_position(&pts(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]])).unwrap();
        assert!(!r.ok);

        let r = check_general_position(&pts(&[&[1.0, 2.0]])).unwrap();
        assert!(r.ok);
    }

    #[test]
    fn sampling_kicks_in_above_limit() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let opts = GeneralPositionOptions {
            exhaustive_limit: 10,
            samples: 50,
            ..Default::default()
        };
        let r = check_general_position_with(&Points::from_rows(&rows).unwrap(), &opts).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.subsets_checked, 50);
        assert!(r.ok);
    }

    #[test]
    fn one_dimensional_examples() {
        let tol = Tolerances::default();
        let p = pts(&[&[1.0], &[2.0], &[-1.0]]);
        let set = enumerate_linear_dichotomies(&p, &tol).unwrap();
        let expected: BTreeSet<Vec<i8>> = [vec![1, 1, -1], vec![-1, -1, 1]].into_iter().collect();
        assert_eq!(keys(&set), expected);
        assert_eq!(set.len() as f64, dichotomy_bound(3, 1));
        assert_eq!(keys(&sweep_dichotomies_oracle(&p, &tol).unwrap()), expected);
    }

    #[test]
    fn two_dimensional_example() {
        let tol = Tolerances::default();
        let p = pts(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 1.0]]);
        let set = enumerate_linear_dichotomies(&p, &tol).unwrap();
        assert_eq!(set.len(), 6);
        assert!(set.contains(&[1, 1, 1]));
        assert!(set.contains(&[1, 1, -1]));
        assert!(set.len() as f64 <= dichotomy_bound(3, 2));
        assert_eq!(
            keys(&set),
            keys(&sweep_dichotomies_oracle(&p, &tol).unwrap())
        );
        for d in &set.dichotomies {
            assert!(d.margin(&p, &[]) > tol.sign_tol);
        }
    }

    #[test]
    fn two_generic_points_are_shattered() {
        let tol = Tolerances::default();
        let p = pts(&[&[1.0, 0.2], &[-0.3, 1.0]]);
        let expected: BTreeSet<Vec<i8>> = [vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]
            .into_iter()
            .collect();
        assert_eq!(keys(&sweep_dichotomies_oracle(&p, &tol).unwrap()), expected);
        assert_eq!(
            keys(&enumerate_linear_dichotomies(&p, &tol).unwrap()),
            expected
        );
    }

    #[test]
    fn collinear_points_through_origin() {
        // All points on one line through the origin: only two dichotomies.
        let tol = Tolerances::default();
        let p = pts(&[&[1.0, 1.0], &[2.0, 2.0], &[-0.5, -0.5]]);
        let set = enumerate_linear_dichotomies(&p, &tol).unwrap();
        assert_eq!(
            keys(&set),
            keys(&sweep_dichotomies_oracle(&p, &tol).unwrap())
        );
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn null_points_take_both_signs() {
        let tol = Tolerances::default();
        let p = pts(&[&[1.0], &[0.0]]);
        let set = enumerate_linear_dichotomies(&p, &tol).unwrap();
        assert_eq!(set.null_points, vec![1]);
        assert_eq!(set.len(), 4);
    }

    #[test]
    fn three_dimensional_degenerate_plane() {
        // Four points on a plane through the origin in R^3 plus one off it.
        let tol = Tolerances::default();
        let p = pts(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[1.0, 1.0, 0.0],
            &[1.0, -2.0, 0.0],
            &[0.3, 0.2, 1.0],
        ]);
        let set = enumerate_linear_dichotomies(&p, &tol).unwrap();
        for d in &set.dichotomies {
            assert!(d.margin(&p, &[]) > tol.sign_tol);
        }
        // Brute-force probe over many directions finds nothing new.
        let mut probe = BTreeSet::new();
        let steps = 80;
        for a in 0..steps {
            for b in 0..steps {
                let theta = std::f64::consts::PI * (a as f64 + 0.37) / steps as f64;
                let phi = std::f64::consts::TAU * (b as f64 + 0.61) / steps as f64;
                let h = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                let dots: Vec<f64> = p.rows().map(|r| dot(&h, r)).collect();
                if dots.iter().all(|v| v.abs() > 1e-9) {
                    probe.insert(dots.iter().map(|&v| sign_of(v)).collect::<Vec<i8>>());
                }
            }
        }
        assert!(probe.is_subset(&keys(&set)));
    }

    #[test]
    fn oracle_rejects_high_dimension() {
        let p = pts(&[&[1.0, 0.0, 0.0]]);
        assert!(sweep_dichotomies_oracle(&p, &Tolerances::default()).is_err());
    }
}
