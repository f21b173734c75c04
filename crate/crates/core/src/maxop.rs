//! Centered and noncentered fractional maximal functions.
//!
//! `M_a u(x) = sup_{0 < r <= cap} r^a * avg_{B(x,r)} |u|`. Averages are
//! constant for `r` in `(d_k, d_{k+1}]`, and `r^a` is nondecreasing, so the
//! supremum over each interval is attained at its right end, the canonical
//! radius of the ball. Only canonical radii are evaluated. For `a = 0` every
//! radius in the interval gives the same value; the smallest canonical radius
//! attaining the maximum is reported.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::field::ScalarField;
use crate::profile::{FieldProfile, Shells};
use crate::space::MetricMeasureSpace;

/// Default size limit of the brute-force oracle.
pub const ORACLE_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxField {
    pub values: ScalarField,
    pub argmax_radius: Vec<f64>,
    /// Center of the maximizing ball; the point itself for the centered operator.
    pub argmax_center: Vec<usize>,
    /// Maximizing radius equals the cap.
    pub truncated: Vec<bool>,
    pub alpha: f64,
    pub noncentered: bool,
}

impl MaxField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn truncated_count(&self) -> usize {
        self.truncated.iter().filter(|&&t| t).count()
    }
}

/// Best ball seen so far for one query point.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    center: usize,
    radius: f64,
}

impl Candidate {
    const NONE: Candidate = Candidate { value: f64::NEG_INFINITY, center: usize::MAX, radius: f64::INFINITY };

    /// Total order: larger value, then smaller center id, then smaller radius.
    fn beats(&self, other: &Candidate) -> bool {
        self.value > other.value
            || (self.value == other.value
                && (self.center < other.center || (self.center == other.center && self.radius < other.radius)))
    }
}

/// `r^a`, with `r^0 = 1` exactly.
pub(crate) fn radius_power(r: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        r.powf(alpha)
    }
}

fn scaled(r: f64, alpha: f64, weighted_sum: f64, mass: f64) -> f64 {
    radius_power(r, alpha) * (weighted_sum / mass)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "alpha", value: alpha, requirement: "must be >= 0" })
    }
}

/// Mean of `u` over `B(x, r)`.
pub fn ball_average(space: &MetricMeasureSpace, u: &ScalarField, x: usize, r: f64) -> Result<f64> {
    u.check_for(space)?;
    space.check_radius(r)?;
    let shells = space.shells(x)?;
    let profile = FieldProfile::build(&shells, space.weights(), &[u.values()]);
    match shells.shells_below(r) {
        0 => Err(Error::EmptyBall { center: x.to_string(), radius: r }),
        k => Ok(profile.average(0, k - 1)),
    }
}

/// `r^a` times the mean of `|u|` over `B(x, r)`.
pub fn scaled_average(space: &MetricMeasureSpace, u: &ScalarField, x: usize, r: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let avg = ball_average(space, &u.abs(), x, r)?;
    Ok(radius_power(r, alpha) * avg)
}

fn check_inputs(space: &MetricMeasureSpace, u: &ScalarField, alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    u.check_for(space)
}

/// Per-ball values `r_k^a * avg_k |u|` at canonical radii.
fn ball_values(shells: &Shells, weights: &[f64], abs_u: &[f64], alpha: f64) -> Vec<f64> {
    let profile = FieldProfile::build(shells, weights, &[abs_u]);
    (0..shells.len())
        .map(|k| scaled(shells.canonical_radius(k), alpha, profile.channels[0][k], profile.cum_mass[k]))
        .collect()
}

fn best_over(shells: &Shells, values: &[f64], center: usize) -> Candidate {
    let mut best = Candidate::NONE;
    for (k, &v) in values.iter().enumerate() {
        if v > best.value {
            best = Candidate { value: v, center, radius: shells.canonical_radius(k) };
        }
    }
    best
}

fn into_max_field(best: Vec<Candidate>, cap: f64, alpha: f64, noncentered: bool) -> Result<MaxField> {
    let truncated = best.iter().map(|c| c.radius == cap).collect();
    let argmax_radius = best.iter().map(|c| c.radius).collect();
    let argmax_center = best.iter().map(|c| c.center).collect();
    let values = ScalarField::new(best.iter().map(|c| c.value).collect())?;
    Ok(MaxField { values, argmax_radius, argmax_center, truncated, alpha, noncentered })
}

/// Centered fractional maximal function at every sample point.
pub fn frac_maximal(space: &MetricMeasureSpace, u: &ScalarField, alpha: f64) -> Result<MaxField> {
    check_inputs(space, u, alpha)?;
    let abs_u = u.abs();
    let best: Vec<Candidate> = (0..space.len())
        .into_par_iter()
        .map_init(Vec::new, |dist, x| {
            space.distances_from(x, dist);
            let shells = Shells::from_distances(Some(x), dist, space.cap());
            let values = ball_values(&shells, space.weights(), abs_u.values(), alpha);
            best_over(&shells, &values, x)
        })
        .collect();
    into_max_field(best, space.cap(), alpha, false)
}

/// Noncentered fractional maximal function: supremum over every ball
/// `B(z, r)` with `d(z, x) < r <= cap`.
///
/// Centers are swept one at a time. For each center the suffix maxima of
/// the ball values are tabulated, then every query point reads the entry of
/// the smallest ball that contains it. Time `O(n^2 log n)`, memory `O(n)` per
/// worker.
pub fn frac_maximal_noncentered(space: &MetricMeasureSpace, u: &ScalarField, alpha: f64) -> Result<MaxField> {
    check_inputs(space, u, alpha)?;
    let n = space.len();
    let abs_u = u.abs();
    let merge = |mut a: Vec<Candidate>, b: Vec<Candidate>| {
        for (x, y) in a.iter_mut().zip(b) {
            if y.beats(x) {
                *x = y;
            }
        }
        a
    };
    let best = (0..n)
        .into_par_iter()
        .fold(
            || (vec![Candidate::NONE; n], Vec::new()),
            |(mut best, mut dist), z| {
                space.distances_from(z, &mut dist);
                let shells = Shells::from_distances(Some(z), &dist, space.cap());
                let values = ball_values(&shells, space.weights(), abs_u.values(), alpha);
                // suffix argmax, ties resolved toward the smaller ball
                let mut suffix = vec![0usize; values.len()];
                let mut arg = values.len() - 1;
                for k in (0..values.len()).rev() {
                    if values[k] >= values[arg] {
                        arg = k;
                    }
                    suffix[k] = arg;
                }
                for (x, slot) in best.iter_mut().enumerate() {
                    if let Some(k0) = shells.first_ball_containing(dist[x]) {
                        let k = suffix[k0];
                        let cand = Candidate { value: values[k], center: z, radius: shells.canonical_radius(k) };
                        if cand.beats(slot) {
                            *slot = cand;
                        }
                    }
                }
                (best, dist)
            },
        )
        .map(|(best, _)| best)
        .reduce(|| vec![Candidate::NONE; n], merge);
    into_max_field(best, space.cap(), alpha, true)
}

/// Direct evaluation without profiles: every candidate radius of every
/// center is summed point by point in id order. Intended as a test oracle.
pub fn frac_maximal_bruteforce(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    alpha: f64,
    noncentered: bool,
) -> Result<MaxField> {
    frac_maximal_bruteforce_with_limit(space, u, alpha, noncentered, ORACLE_LIMIT)
}

pub fn frac_maximal_bruteforce_with_limit(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    alpha: f64,
    noncentered: bool,
    limit: usize,
) -> Result<MaxField> {
    check_inputs(space, u, alpha)?;
    let n = space.len();
    if n > limit {
        return Err(Error::OracleLimit { n, limit });
    }
    let cap = space.cap();
    let w = space.weights();
    // All balls around z with their candidate radii and values.
    let balls_of = |z: usize| -> (Vec<f64>, Vec<(f64, f64)>) {
        let row: Vec<f64> = (0..n).map(|y| space.distance(z, y)).collect();
        let mut radii: Vec<f64> = row.iter().copied().filter(|&r| r > 0.0 && r <= cap).collect();
        radii.push(cap);
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let balls = radii
            .into_iter()
            .map(|r| {
                let (mut mass, mut sum) = (ExactSum::new(), ExactSum::new());
                for y in 0..n {
                    if row[y] < r {
                        mass.add(w[y]);
                        sum.add(w[y] * u[y].abs());
                    }
                }
                (r, scaled(r, alpha, sum.value(), mass.value()))
            })
            .collect();
        (row, balls)
    };
    let best: Vec<Candidate> = if noncentered {
        let per_center: Vec<Vec<Candidate>> = (0..n)
            .into_par_iter()
            .map(|z| {
                let mut best = vec![Candidate::NONE; n];
                let (row, balls) = balls_of(z);
                for (r, value) in balls {
                    let cand = Candidate { value, center: z, radius: r };
                    for (x, slot) in best.iter_mut().enumerate() {
                        if row[x] < r && cand.beats(slot) {
                            *slot = cand;
                        }
                    }
                }
                best
            })
            .collect();
        let mut best = vec![Candidate::NONE; n];
        for row in per_center {
            for (slot, cand) in best.iter_mut().zip(row) {
                if cand.beats(slot) {
                    *slot = cand;
                }
            }
        }
        best
    } else {
        (0..n)
            .into_par_iter()
            .map(|x| {
                let mut best = Candidate::NONE;
                for (r, value) in balls_of(x).1 {
                    let cand = Candidate { value, center: x, radius: r };
                    if cand.beats(&best) {
                        best = cand;
                    }
                }
                best
            })
            .collect()
    };
    into_max_field(best, cap, alpha, noncentered)
}

/// Maximal function value at an arbitrary location of a coordinate space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxProbe {
    pub value: f64,
    pub radius: f64,
    pub truncated: bool,
}

/// Centered `M_a u` at a location that need not be a sample point. Balls
/// with no sample points are skipped.
pub fn frac_maximal_probe(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    alpha: f64,
    location: &[f64],
) -> Result<MaxProbe> {
    check_inputs(space, u, alpha)?;
    let dist = space.distances_from_coords(location)?;
    let shells = Shells::from_distances(None, &dist, space.cap());
    if shells.is_empty() {
        return Err(Error::EmptyBall { center: format!("{location:?}"), radius: space.cap() });
    }
    let values = ball_values(&shells, space.weights(), u.abs().values(), alpha);
    let best = best_over(&shells, &values, usize::MAX);
    Ok(MaxProbe { value: best.value, radius: best.radius, truncated: best.radius == space.cap() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MetricSpec;

    fn grid(n: usize, h: f64, cap: f64) -> MetricMeasureSpace {
        let coords = (0..n).map(|i| vec![i as f64 * h]).collect();
        MetricMeasureSpace::from_coords(coords, MetricSpec::euclidean(1), vec![h; n], cap).unwrap()
    }

    #[test]
    fn constant_field() {
        let s = grid(11, 0.1, 2.0);
        let one = ScalarField::constant(11, 1.0);
        let m = frac_maximal(&s, &one, 0.0).unwrap();
        assert!(m.values.values().iter().all(|&v| v == 1.0));
        assert_eq!(m.truncated_count(), 0);
        let m = frac_maximal(&s, &one, 0.5).unwrap();
        assert!(m.values.values().iter().all(|&v| v == 2f64.sqrt()));
        assert_eq!(m.truncated_count(), 11);
        let m = frac_maximal_noncentered(&s, &one, 0.0).unwrap();
        assert!(m.values.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn zero_field_oracle() {
        let s = grid(7, 0.5, 5.0);
        let zero = ScalarField::constant(7, 0.0);
        for nc in [false, true] {
            let m = frac_maximal_bruteforce(&s, &zero, 0.7, nc).unwrap();
            assert!(m.values.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn averages() {
        let s = grid(21, 0.1, 3.0);
        let c = ScalarField::constant(21, 3.0);
        assert!((ball_average(&s, &c, 4, 0.35).unwrap() - 3.0).abs() < 1e-15);
        let lin = ScalarField::from_fn(21, |i| i as f64 * 0.1 - 1.0).unwrap();
        assert!(ball_average(&s, &lin, 10, 0.55).unwrap().abs() < 1e-15);
        let one = ScalarField::constant(21, 1.0);
        assert_eq!(scaled_average(&s, &one, 3, 2.0, 1.0).unwrap(), 2.0);
        assert_eq!(scaled_average(&s, &lin, 3, 0.25, 0.0).unwrap(), ball_average(&s, &lin.abs(), 3, 0.25).unwrap());
    }

    #[test]
    fn errors() {
        let s = grid(5, 1.0, 10.0);
        let u = ScalarField::constant(4, 1.0);
        assert!(matches!(frac_maximal(&s, &u, 0.0), Err(Error::FieldLength { .. })));
        let u = ScalarField::constant(5, 1.0);
        assert!(matches!(frac_maximal(&s, &u, -1.0), Err(Error::InvalidParameter { .. })));
        assert!(matches!(
            frac_maximal_bruteforce_with_limit(&s, &u, 0.0, false, 4),
            Err(Error::OracleLimit { n: 5, limit: 4 })
        ));
        let empty = MetricMeasureSpace::from_coords(vec![], MetricSpec::euclidean(1), vec![], 1.0);
        assert!(matches!(empty, Err(Error::EmptySpace)));
    }

    #[test]
    fn probe_matches_sample_point() {
        let s = grid(30, 0.1, 2.0);
        let u = ScalarField::from_fn(30, |i| (i as f64 * 0.37).sin()).unwrap();
        let m = frac_maximal(&s, &u, 0.3).unwrap();
        for x in [0, 7, 29] {
            let p = frac_maximal_probe(&s, &u, 0.3, s.coords(x).unwrap()).unwrap();
            assert_eq!(p.value, m.values[x]);
            assert_eq!(p.radius, m.argmax_radius[x]);
        }
    }

    /// Sweeping many radii between critical radii never beats the reduced
    /// supremum, and the reduced supremum is hit by the sweep.
    #[test]
    fn critical_radius_reduction_matches_dense_sweep() {
        let s = grid(25, 0.1, 1.7);
        let u = ScalarField::from_fn(25, |i| ((i * 7 % 11) as f64) - 3.0).unwrap();
        for alpha in [0.0, 0.4, 1.0] {
            let m = frac_maximal(&s, &u, alpha).unwrap();
            for x in 0..25 {
                let mut sweep_max = f64::NEG_INFINITY;
                for j in 1..=1700 {
                    let r = j as f64 * 0.001;
                    sweep_max = sweep_max.max(scaled_average(&s, &u, x, r.min(1.7), alpha).unwrap());
                }
                assert!(sweep_max <= m.values[x] * (1.0 + 1e-12));
                assert!(sweep_max >= m.values[x] * (1.0 - 1e-9), "x={x} alpha={alpha}");
            }
        }
    }
}
