//! Empirical doubling, lower-bound and annular-decay constants.
//!
//! Balls are taken at canonical radii, with distances that agree to a relative
//! `1e-9` merged into one shell so that floating-point noise in coordinates
//! does not split a sphere into two balls. Balls that reach past a truncation
//! site of the space (see [`MetricMeasureSpace::with_truncation_sites`]) or
//! are too small to be resolved are left out of every fit. A ball is resolved
//! when it holds at least `min_ball_points` samples and its radius spans at
//! least `min_radius_steps` sampling steps (see [`resolution`]).
//!
//! Annular fits sample thicknesses `h = R 2^{-j}` for `j = 1..=J`. A fitted
//! exponent must satisfy two conditions. Its constant `C(δ) = max ρ (h/R)^{-δ}`
//! must stay under the ceiling. It must also not exceed the log-log slope of
//! the worst-case ratio across the ladder. The slope condition matters because
//! `ρ <= 1`, so any `δ <= log2(ceiling)/J` meets the ceiling on every space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::space::MetricMeasureSpace;

/// Relative tolerance for merging equal distances.
pub const DISTANCE_TOL: f64 = 1e-9;

const VERIFY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayVariant {
    Doubling,
    LowerBound,
    Annular,
    RelativeAnnular,
}

impl DecayVariant {
    pub fn name(self) -> &'static str {
        match self {
            DecayVariant::Doubling => "doubling",
            DecayVariant::LowerBound => "lower",
            DecayVariant::Annular => "annular",
            DecayVariant::RelativeAnnular => "relative",
        }
    }
}

impl std::str::FromStr for DecayVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "doubling" => DecayVariant::Doubling,
            "lower" | "lower_bound" => DecayVariant::LowerBound,
            "annular" => DecayVariant::Annular,
            "relative" | "relative_annular" => DecayVariant::RelativeAnnular,
            other => return Err(Error::Degenerate(format!("unknown decay variant '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Largest acceptable annular constant.
    pub ceiling: f64,
    /// Thickness ladder depth `J`.
    pub ladder_depth: u32,
    /// Smallest number of samples a ball must hold to enter a fit.
    pub min_ball_points: usize,
    /// Smallest ball radius, in units of the sampling resolution.
    pub min_radius_steps: f64,
    /// Keep balls that reach past a truncation site.
    pub include_boundary: bool,
    /// Extra clearance from truncation sites.
    pub margin: f64,
    /// Centers above this count are subsampled at an even stride.
    pub max_centers: usize,
    /// Centers used for the extra balls of the relative fit.
    pub relative_centers: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            ceiling: 10.0,
            ladder_depth: 8,
            min_ball_points: 16,
            min_radius_steps: 8.0,
            include_boundary: false,
            margin: 0.0,
            max_centers: 2000,
            relative_centers: 64,
        }
    }
}

impl FitOptions {
    fn validate(&self) -> Result<()> {
        if !(self.ceiling > 0.0) {
            return Err(Error::InvalidParameter {
                name: "ceiling",
                value: self.ceiling,
                requirement: "must be positive",
            });
        }
        if self.ladder_depth == 0 || self.ladder_depth > 52 {
            return Err(Error::InvalidParameter {
                name: "ladder_depth",
                value: self.ladder_depth as f64,
                requirement: "must lie in 1..=52",
            });
        }
        if !(self.margin >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "margin",
                value: self.margin,
                requirement: "must be nonnegative",
            });
        }
        Ok(())
    }
}

/// Configuration attaining the tightest ratio of a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWitness {
    pub center: usize,
    pub radius: f64,
    /// Annulus thickness, annular variants only.
    pub thickness: Option<f64>,
    /// Test ball `(center, radius)`, relative variant only.
    pub ball: Option<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub variant: DecayVariant,
    pub constant: f64,
    /// `δ` for annular fits, `Q` for the lower bound, `log2 c_d` for doubling.
    pub exponent: f64,
    pub worst_witness: Option<FitWitness>,
    /// Configuration that keeps the exponent from the next grid value: the
    /// finest-scale envelope sample when the slope condition binds, otherwise
    /// the sample breaking the ceiling at the next exponent.
    pub limiting_witness: Option<FitWitness>,
    pub samples: usize,
    /// Largest log-slack `ln(bound / ratio)` over samples with a positive ratio.
    pub residual: f64,
    /// Annular fits: worst ratio at each ladder step `j = 1..=J`.
    pub envelope: Vec<f64>,
    /// Annular fits: least-squares slope of `ln envelope` against `ln 2^{-j}`.
    pub envelope_slope: Option<f64>,
}

/// Distances from one center, merged into shells, with cumulative masses.
struct Profile {
    order: Vec<u32>,
    dist: Vec<f64>,
    /// `cum[i]` = mass of the first `i` points.
    cum: Vec<f64>,
    /// End index of each merged shell.
    group_end: Vec<usize>,
    cap: f64,
}

impl Profile {
    fn new(space: &MetricMeasureSpace, center: usize, buf: &mut Vec<f64>) -> Self {
        space.distances_from(center, buf);
        let cap = space.cap();
        let mut order: Vec<u32> = (0..buf.len() as u32).filter(|&i| buf[i as usize] < cap).collect();
        order.sort_unstable_by(|&a, &b| buf[a as usize].total_cmp(&buf[b as usize]).then(a.cmp(&b)));
        let dist: Vec<f64> = order.iter().map(|&i| buf[i as usize]).collect();
        let w = space.weights();
        let mut acc = ExactSum::new();
        let mut cum = Vec::with_capacity(order.len() + 1);
        cum.push(0.0);
        for &i in &order {
            acc.add(w[i as usize]);
            cum.push(acc.value());
        }
        let mut group_end = Vec::new();
        for i in 1..=dist.len() {
            if i == dist.len() || dist[i] > dist[i - 1] * (1.0 + DISTANCE_TOL) + f64::MIN_POSITIVE {
                group_end.push(i);
            }
        }
        Self { order, dist, cum, group_end, cap }
    }

    /// `(point count, canonical radius)` of every merged ball.
    fn balls(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.group_end.iter().map(|&end| (end, if end < self.dist.len() { self.dist[end] } else { self.cap }))
    }

    /// Points strictly inside radius `r`, with distances within tolerance of
    /// `r` counted as outside.
    fn count_below(&self, r: f64) -> usize {
        let r = r * (1.0 - DISTANCE_TOL);
        self.dist.partition_point(|&d| d < r)
    }

    fn mass_below(&self, r: f64) -> f64 {
        self.cum[self.count_below(r)]
    }

    /// Largest admissible ball with radius at most `target`.
    fn ball_at_most(&self, target: f64, admissible: impl Fn(usize, f64) -> bool) -> Option<(usize, f64)> {
        self.balls().take_while(|&(_, r)| r <= target * (1.0 + DISTANCE_TOL)).filter(|&(c, r)| admissible(c, r)).last()
    }
}

fn resolved(count: usize, r: f64, min_thickness: f64, opts: &FitOptions) -> bool {
    count >= opts.min_ball_points && r >= min_thickness * opts.min_radius_steps
}

fn min_thickness(space: &MetricMeasureSpace) -> f64 {
    resolution(space) * (1.0 - DISTANCE_TOL)
}

fn interior(space: &MetricMeasureSpace, x: usize, r: f64, opts: &FitOptions) -> bool {
    opts.include_boundary || r + opts.margin <= space.edge_distance(x) * (1.0 + DISTANCE_TOL)
}

fn centers(n: usize, max: usize) -> Vec<usize> {
    if n <= max || max == 0 {
        (0..n).collect()
    } else {
        (0..max).map(|i| i * n / max).collect()
    }
}

/// Sampling resolution: the largest nearest-neighbour distance. Annuli
/// thinner than this cannot be told apart from a single shell.
pub fn resolution(space: &MetricMeasureSpace) -> f64 {
    (0..space.len())
        .into_par_iter()
        .map_init(Vec::new, |buf, x| {
            space.distances_from(x, buf);
            buf.iter().copied().filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min)
        })
        .filter(|d| d.is_finite())
        .reduce(|| 0.0, f64::max)
}

fn better(a: f64, b: f64) -> bool {
    a > b
}

/// `μ(B(x,2r)) / μ(B(x,r))` over admissible balls with `2r <= cap`.
pub fn doubling_constant(space: &MetricMeasureSpace, opts: &FitOptions) -> Result<DecayFit> {
    opts.validate()?;
    let res = min_thickness(space);
    let rows: Vec<(f64, Option<FitWitness>, usize)> = centers(space.len(), opts.max_centers)
        .into_par_iter()
        .map_init(Vec::new, |buf, x| {
            let prof = Profile::new(space, x, buf);
            let mut best = (f64::NEG_INFINITY, None, 0);
            for (count, r) in prof.balls() {
                if !resolved(count, r, res, opts) || 2.0 * r > space.cap() || !interior(space, x, 2.0 * r, opts) {
                    continue;
                }
                best.2 += 1;
                let ratio = prof.mass_below(2.0 * r) / prof.cum[count];
                if better(ratio, best.0) {
                    best.0 = ratio;
                    best.1 = Some(FitWitness { center: x, radius: r, thickness: None, ball: None });
                }
            }
            best
        })
        .collect();
    let samples = rows.iter().map(|r| r.2).sum();
    let (constant, witness) =
        rows.into_iter().fold((f64::NEG_INFINITY, None), |acc, r| if better(r.0, acc.0) { (r.0, r.1) } else { acc });
    if samples == 0 {
        return Err(Error::Degenerate("no admissible balls for the doubling fit".into()));
    }
    Ok(DecayFit {
        variant: DecayVariant::Doubling,
        constant,
        exponent: constant.log2(),
        worst_witness: witness,
        limiting_witness: witness,
        samples,
        residual: 0.0,
        envelope: Vec::new(),
        envelope_slope: None,
    })
}

fn lower_samples(space: &MetricMeasureSpace, opts: &FitOptions) -> Vec<Vec<(f64, f64, FitWitness)>> {
    let res = min_thickness(space);
    centers(space.len(), opts.max_centers)
        .into_par_iter()
        .map_init(Vec::new, |buf, x| {
            let prof = Profile::new(space, x, buf);
            prof.balls()
                .filter(|&(count, r)| resolved(count, r, res, opts) && interior(space, x, r, opts))
                .map(|(count, r)| {
                    (r, prof.cum[count], FitWitness { center: x, radius: r, thickness: None, ball: None })
                })
                .collect()
        })
        .collect()
}

/// Fits `μ(B(x,r)) >= c_l r^Q`: `Q` by least squares on `ln μ` against `ln r`,
/// `c_l` as the smallest `μ / r^Q` over samples.
pub fn lower_bound_fit(space: &MetricMeasureSpace, opts: &FitOptions) -> Result<DecayFit> {
    opts.validate()?;
    let rows = lower_samples(space, opts);
    let pts: Vec<(f64, f64)> = rows.iter().flatten().map(|&(r, m, _)| (r.ln(), m.ln())).collect();
    let slope = least_squares_slope(&pts)
        .ok_or_else(|| Error::Degenerate("lower bound fit needs balls at two or more distinct radii".into()))?;
    let mut best: (f64, Option<FitWitness>) = (f64::INFINITY, None);
    let mut worst_slack = 0.0f64;
    let scaled: Vec<f64> = rows.iter().flatten().map(|&(r, m, _)| m / r.powf(slope)).collect();
    for (&(_, _, w), &v) in rows.iter().flatten().zip(&scaled) {
        if v < best.0 {
            best = (v, Some(w));
        }
    }
    for &v in &scaled {
        worst_slack = worst_slack.max((v / best.0).ln());
    }
    Ok(DecayFit {
        variant: DecayVariant::LowerBound,
        constant: best.0,
        exponent: slope,
        worst_witness: best.1,
        limiting_witness: best.1,
        samples: pts.len(),
        residual: worst_slack,
        envelope: Vec::new(),
        envelope_slope: None,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 1e-12 * n).then(|| sxy / sxx)
}

/// Candidate exponents `0, 0.05, ..., 1`.
fn delta_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).collect()
}

trait Sink {
    /// One annulus sample at ladder step `j` (`t = 2^{-j}`) of a ball whose
    /// ladder is resolved down to step `depth`.
    fn push(&mut self, ratio: f64, j: u32, depth: u32, witness: FitWitness);
}

type Slot = (f64, Option<FitWitness>);

#[derive(Clone)]
struct Accumulator {
    envelope: Vec<Slot>,
    /// `windows[w-1][j-1]`: worst ratio at step `j` over balls resolved down
    /// to step `w` or deeper.
    windows: Vec<Vec<Slot>>,
    /// `(max ratio t^{-δ}, witness, min positive ratio t^{-δ})` per grid δ.
    scaled: Vec<(f64, Option<FitWitness>, f64)>,
    /// `powers[j-1][i] = 2^{j δ_i}`.
    powers: Vec<Vec<f64>>,
    samples: usize,
}

impl Accumulator {
    fn new(depth: u32) -> Self {
        let grid = delta_grid();
        Self {
            envelope: vec![(0.0, None); depth as usize],
            windows: vec![vec![(0.0, None); depth as usize]; depth as usize],
            scaled: vec![(0.0, None, f64::INFINITY); grid.len()],
            powers: (1..=depth).map(|j| grid.iter().map(|d| (j as f64 * d).exp2()).collect()).collect(),
            samples: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let slots = self.windows.iter_mut().flatten().chain(self.envelope.iter_mut());
        for (a, b) in slots.zip(other.windows.into_iter().flatten().chain(other.envelope)) {
            if better(b.0, a.0) {
                *a = b;
            }
        }
        for (a, b) in self.scaled.iter_mut().zip(other.scaled) {
            if better(b.0, a.0) {
                a.0 = b.0;
                a.1 = b.1;
            }
            a.2 = a.2.min(b.2);
        }
        self.samples += other.samples;
        self
    }
}

impl Sink for Accumulator {
    fn push(&mut self, ratio: f64, j: u32, depth: u32, witness: FitWitness) {
        self.samples += 1;
        let (ju, du) = (j as usize - 1, depth as usize);
        let slots = std::iter::once(&mut self.envelope[ju]).chain(self.windows[ju..du].iter_mut().map(|w| &mut w[ju]));
        for slot in slots {
            if better(ratio, slot.0) {
                *slot = (ratio, Some(witness));
            }
        }
        if ratio > 0.0 {
            for (slot, &p) in self.scaled.iter_mut().zip(&self.powers[j as usize - 1]) {
                let v = ratio * p;
                if better(v, slot.0) {
                    slot.0 = v;
                    slot.1 = Some(witness);
                }
                slot.2 = slot.2.min(v);
            }
        }
    }
}

struct Checker {
    bound: Vec<f64>,
    violations: usize,
}

impl Sink for Checker {
    fn push(&mut self, ratio: f64, j: u32, _: u32, _: FitWitness) {
        if ratio > self.bound[j as usize - 1] * (1.0 + VERIFY_SLACK) {
            self.violations += 1;
        }
    }
}

fn annular_center<S: Sink>(
    space: &MetricMeasureSpace,
    x: usize,
    opts: &FitOptions,
    min_thickness: f64,
    prof: &Profile,
    sink: &mut S,
) {
    for (count, r) in prof.balls() {
        if !resolved(count, r, min_thickness, opts) || !interior(space, x, r, opts) {
            continue;
        }
        let mass = prof.cum[count];
        let depth = resolved_depth(r, min_thickness, opts);
        for j in 1..=depth {
            let h = r * (-(j as f64)).exp2();
            let inner = prof.mass_below(r - h);
            let ratio = ((mass - inner) / mass).max(0.0);
            sink.push(ratio, j, depth, FitWitness { center: x, radius: r, thickness: Some(h), ball: None });
        }
    }
}

/// Extra test balls for the relative fit: around sampled centers, at radii on
/// a half-octave ladder below the cap, with test balls centered on the last
/// point inside and the first point outside, of radii `R/4 ..= 3R`.
fn relative_center<S: Sink>(
    space: &MetricMeasureSpace,
    x: usize,
    opts: &FitOptions,
    min_thickness: f64,
    prof: &Profile,
    buf: &mut Vec<f64>,
    sink: &mut S,
) {
    let mut rank = vec![usize::MAX; space.len()];
    for (i, &y) in prof.order.iter().enumerate() {
        rank[y as usize] = i;
    }
    let admissible_x = |count: usize, r: f64| resolved(count, r, min_thickness, opts) && interior(space, x, r, opts);
    let mut radii: Vec<(usize, f64)> = Vec::new();
    for i in 0..64 {
        let target = space.cap() * (-(i as f64) / 2.0).exp2();
        match prof.ball_at_most(target, admissible_x) {
            Some(b) if radii.last() != Some(&b) => radii.push(b),
            Some(_) => {}
            None => break,
        }
    }
    for (count, r) in radii {
        let mut zs = vec![prof.order[count - 1] as usize];
        if count < prof.order.len() {
            zs.push(prof.order[count] as usize);
        }
        for z in zs {
            let zprof = Profile::new(space, z, buf);
            let admissible_z = |c: usize, rb: f64| resolved(c, rb, min_thickness, opts) && interior(space, z, rb, opts);
            let mut seen: Vec<(usize, f64)> = Vec::new();
            for factor in [0.25, 0.5, 1.0, 2.0, 3.0] {
                let Some((bc, rb)) = zprof.ball_at_most(factor * r, admissible_z) else { continue };
                if seen.contains(&(bc, rb)) {
                    continue;
                }
                seen.push((bc, rb));
                let bmass = zprof.cum[bc];
                let depth = resolved_depth(rb, min_thickness, opts);
                for j in 1..=depth {
                    let h = rb * (-(j as f64)).exp2();
                    if h >= r {
                        continue;
                    }
                    let inner = prof.count_below(r - h);
                    let hit = crate::exact::exact_sum(
                        zprof.order[..bc]
                            .iter()
                            .map(|&y| y as usize)
                            .filter(|&y| rank[y] >= inner && rank[y] < count)
                            .map(|y| space.weight(y)),
                    );
                    sink.push(
                        hit / bmass,
                        j,
                        depth,
                        FitWitness { center: x, radius: r, thickness: Some(h), ball: Some((z, rb)) },
                    );
                }
            }
        }
    }
}

fn scan_annular<S: Sink + Send>(
    space: &MetricMeasureSpace,
    opts: &FitOptions,
    relative: bool,
    make: impl Fn() -> S + Sync,
) -> Vec<S> {
    let rel: Vec<usize> = if relative { centers(space.len(), opts.relative_centers) } else { Vec::new() };
    let min_thickness = min_thickness(space);
    centers(space.len(), opts.max_centers)
        .into_par_iter()
        .map_init(Vec::new, |buf, x| {
            let mut sink = make();
            let prof = Profile::new(space, x, buf);
            annular_center(space, x, opts, min_thickness, &prof, &mut sink);
            if rel.binary_search(&x).is_ok() {
                let mut zbuf = Vec::new();
                relative_center(space, x, opts, min_thickness, &prof, &mut zbuf, &mut sink);
            }
            sink
        })
        .collect()
}

/// Deepest ladder step whose thickness `r 2^{-j}` is resolved.
fn resolved_depth(r: f64, min_thickness: f64, opts: &FitOptions) -> u32 {
    (1..=opts.ladder_depth).take_while(|&j| r * (-(j as f64)).exp2() >= min_thickness).last().unwrap_or(0)
}

/// Smallest envelope slope over the windows `w = 3..=J`, each fitted on steps
/// `2..=w` over the balls resolved down to `w`. Step 1 is left out: an annulus
/// of half the radius measures volume growth rather than thin-shell decay.
/// Returns the slope and the finest-step sample of the binding window.
fn envelope_slope(acc: &Accumulator) -> Option<(f64, Option<FitWitness>)> {
    let mut best: Option<(f64, Option<FitWitness>)> = None;
    for (w, window) in acc.windows.iter().enumerate().skip(2) {
        let pts: Vec<(f64, f64)> = window[1..=w]
            .iter()
            .enumerate()
            .filter(|(_, e)| e.0 > 0.0)
            .map(|(i, e)| (-((i + 2) as f64) * std::f64::consts::LN_2, e.0.ln()))
            .collect();
        let Some(slope) = least_squares_slope(&pts) else { continue };
        if best.is_none_or(|b| slope < b.0) {
            let finest = window[1..=w].iter().rev().find(|e| e.0 > 0.0).and_then(|e| e.1);
            best = Some((slope, finest));
        }
    }
    best
}

fn finish(
    variant: DecayVariant,
    acc: Accumulator,
    slope_cap: Option<(f64, Option<FitWitness>)>,
    opts: &FitOptions,
) -> DecayFit {
    let grid = delta_grid();
    let envelope: Vec<f64> = acc.envelope.iter().map(|e| e.0).collect();
    let slope = slope_cap.map(|s| s.0);
    if acc.scaled[0].1.is_none() {
        return DecayFit {
            variant,
            constant: 0.0,
            exponent: 1.0,
            worst_witness: None,
            limiting_witness: None,
            samples: acc.samples,
            residual: 0.0,
            envelope,
            envelope_slope: slope,
        };
    }
    let cap = slope.unwrap_or(f64::INFINITY);
    let i = (0..grid.len()).rev().find(|&i| grid[i] <= cap + 1e-9 && acc.scaled[i].0 <= opts.ceiling).unwrap_or(0);
    let (constant, witness, min_scaled) = acc.scaled[i];
    let limiting = match grid.get(i + 1) {
        None => witness,
        Some(&next) if next > cap + 1e-9 => slope_cap.and_then(|s| s.1),
        Some(_) => acc.scaled[i + 1].1,
    };
    DecayFit {
        variant,
        constant,
        exponent: grid[i],
        worst_witness: witness,
        limiting_witness: limiting,
        samples: acc.samples,
        residual: (constant / min_scaled).ln(),
        envelope,
        envelope_slope: slope,
    }
}

fn accumulate(space: &MetricMeasureSpace, opts: &FitOptions, relative: bool) -> Accumulator {
    scan_annular(space, opts, relative, || Accumulator::new(opts.ladder_depth))
        .into_iter()
        .fold(Accumulator::new(opts.ladder_depth), Accumulator::merge)
}

/// Fits `μ(B(x,R) \ B(x,R-h)) <= C (h/R)^δ μ(B(x,R))`.
pub fn annular_decay_fit(space: &MetricMeasureSpace, opts: &FitOptions) -> Result<DecayFit> {
    opts.validate()?;
    let acc = accumulate(space, opts, false);
    let slope = envelope_slope(&acc);
    Ok(finish(DecayVariant::Annular, acc, slope, opts))
}

/// Fits `μ(B ∩ (B(x,R) \ B(x,R-h))) <= C (h/r_B)^δ μ(B)` over test balls `B`
/// with `r_B <= 3R`. The balls `B = B(x,R)` are among the samples, so the
/// slope condition is the stricter of the absolute and relative envelopes.
pub fn relative_annular_decay_fit(space: &MetricMeasureSpace, opts: &FitOptions) -> Result<DecayFit> {
    opts.validate()?;
    let absolute = accumulate(space, opts, false);
    let acc = accumulate(space, opts, true);
    let cap = match (envelope_slope(&absolute), envelope_slope(&acc)) {
        (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
        (a, b) => a.or(b),
    };
    Ok(finish(DecayVariant::RelativeAnnular, acc, cap, opts))
}

pub fn fit(space: &MetricMeasureSpace, variant: DecayVariant, opts: &FitOptions) -> Result<DecayFit> {
    match variant {
        DecayVariant::Doubling => doubling_constant(space, opts),
        DecayVariant::LowerBound => lower_bound_fit(space, opts),
        DecayVariant::Annular => annular_decay_fit(space, opts),
        DecayVariant::RelativeAnnular => relative_annular_decay_fit(space, opts),
    }
}

/// Rescans every sample of `fit` and counts those violating the fitted
/// inequality.
pub fn reverify(space: &MetricMeasureSpace, fit: &DecayFit, opts: &FitOptions) -> Result<usize> {
    opts.validate()?;
    let slack = 1.0 + VERIFY_SLACK;
    match fit.variant {
        DecayVariant::Doubling => {
            let res = min_thickness(space);
            let violations = centers(space.len(), opts.max_centers)
                .into_par_iter()
                .map_init(Vec::new, |buf, x| {
                    let prof = Profile::new(space, x, buf);
                    prof.balls()
                        .filter(|&(c, r)| {
                            resolved(c, r, res, opts) && 2.0 * r <= space.cap() && interior(space, x, 2.0 * r, opts)
                        })
                        .filter(|&(c, r)| prof.mass_below(2.0 * r) / prof.cum[c] > fit.constant * slack)
                        .count()
                })
                .sum();
            Ok(violations)
        }
        DecayVariant::LowerBound => Ok(lower_samples(space, opts)
            .iter()
            .flatten()
            .filter(|&&(r, m, _)| m * slack < fit.constant * r.powf(fit.exponent))
            .count()),
        DecayVariant::Annular | DecayVariant::RelativeAnnular => {
            let bound: Vec<f64> =
                (1..=opts.ladder_depth).map(|j| fit.constant * (-(j as f64) * fit.exponent).exp2()).collect();
            let relative = fit.variant == DecayVariant::RelativeAnnular;
            let checkers = scan_annular(space, opts, relative, || Checker { bound: bound.clone(), violations: 0 });
            Ok(checkers.iter().map(|c| c.violations).sum())
        }
    }
}
