//! Experiment runner: theorem checks over a resolution ladder and the two
//! discontinuity examples, with CSV and SVG output.

mod checks;
mod examples;
mod output;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gallery::{test_function, GalleryKind, GallerySpec, TestFunction};
use crate::maxop::{frac_maximal, frac_maximal_noncentered, MaxField};
use crate::regularity::{annular_decay_fit, lower_bound_fit, relative_annular_decay_fit, FitOptions};
use crate::space::MetricMeasureSpace;

pub use examples::{interpolant_origin_value, left_limit_bound, origin_upper_bound};
pub use output::{emit_report, render_svg, write_csv, write_svg, CSV_HEADER};

/// Two ladder values count as bounded when `max / min` stays at or below this.
pub const LADDER_SPREAD: f64 = 2.0;
/// Fewest resolutions that can establish boundedness.
pub const LADDER_MIN_LEVELS: usize = 3;
/// Absolute tolerance on the example values.
pub const EXAMPLE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Thm31,
    Thm41,
    Thm42,
    Thm43,
    Thm44a,
    Thm44b,
    Thm44c,
    Cor45,
    Lemma32,
    Ex51,
    Ex51w,
    Ex52,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 12] = [
        ExperimentId::Thm31,
        ExperimentId::Thm41,
        ExperimentId::Thm42,
        ExperimentId::Thm43,
        ExperimentId::Thm44a,
        ExperimentId::Thm44b,
        ExperimentId::Thm44c,
        ExperimentId::Cor45,
        ExperimentId::Lemma32,
        ExperimentId::Ex51,
        ExperimentId::Ex51w,
        ExperimentId::Ex52,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Thm31 => "thm31",
            ExperimentId::Thm41 => "thm41",
            ExperimentId::Thm42 => "thm42",
            ExperimentId::Thm43 => "thm43",
            ExperimentId::Thm44a => "thm44a",
            ExperimentId::Thm44b => "thm44b",
            ExperimentId::Thm44c => "thm44c",
            ExperimentId::Cor45 => "cor45",
            ExperimentId::Lemma32 => "lemma32",
            ExperimentId::Ex51 => "ex51",
            ExperimentId::Ex51w => "ex51w",
            ExperimentId::Ex52 => "ex52",
        }
    }

    pub fn is_example(self) -> bool {
        matches!(self, ExperimentId::Ex51 | ExperimentId::Ex51w | ExperimentId::Ex52)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Degenerate(format!("unknown experiment '{s}'")))
    }
}

/// Parameters of one experiment. Unset parameters take the experiment's
/// default; `delta` and `dimension` are fitted on the finest space when unset.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub space: GalleryKind,
    pub extent: f64,
    /// Downward arm length of the cross space.
    pub depth: f64,
    /// Grid cap radius; `extent` (half the diameter) when unset. A cap at the
    /// diameter lets the whole window maximize `M_a u` at every point.
    pub cap: Option<f64>,
    /// `None` uses the experiment's default, or the space's own function.
    pub function: Option<TestFunction>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub delta: Option<f64>,
    /// Overrides the fitted lower-bound exponent `Q`.
    pub dimension: Option<f64>,
    /// Gradient constant to certify exactly; `None` only fits it.
    pub constant: Option<f64>,
    pub c0: f64,
    pub ladder: Vec<f64>,
    pub noncentered: bool,
    pub fit: FitOptions,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        let (space, extent) = match experiment {
            ExperimentId::Ex51 => (GalleryKind::Buckley, 3.0),
            ExperimentId::Ex51w => (GalleryKind::BuckleyWeighted, 3.0),
            ExperimentId::Ex52 => (GalleryKind::Cross, 3.0),
            _ => (GalleryKind::Grid1d, 1.0),
        };
        let ladder = if experiment.is_example() { vec![0.005] } else { vec![0.02, 0.01, 0.005] };
        Self {
            experiment,
            space,
            extent,
            depth: extent,
            cap: None,
            function: None,
            alpha: None,
            beta: None,
            p: None,
            q: None,
            s: None,
            delta: None,
            dimension: None,
            constant: None,
            c0: 1.0,
            ladder,
            noncentered: false,
            fit: FitOptions::default(),
        }
    }

    pub fn with_space(mut self, space: GalleryKind, extent: f64) -> Self {
        self.space = space;
        self.extent = extent;
        self.depth = extent;
        self
    }

    pub fn with_function(mut self, f: TestFunction) -> Self {
        self.function = Some(f);
        self
    }

    pub fn with_ladder(mut self, ladder: Vec<f64>) -> Self {
        self.ladder = ladder;
        self
    }

    fn spec(&self, h: f64) -> GallerySpec {
        GallerySpec {
            kind: self.space,
            step: h,
            extent: self.extent,
            depth: self.depth,
            cap: Some(self.cap.unwrap_or(self.extent)),
        }
    }

    fn default_function(&self) -> TestFunction {
        match self.experiment {
            ExperimentId::Thm31 | ExperimentId::Thm44a | ExperimentId::Cor45 => TestFunction::AbsPower(0.5),
            ExperimentId::Lemma32 => TestFunction::Sign,
            _ => TestFunction::Bump,
        }
    }

    /// Builds the space at step `h` and the input field on it.
    fn level(&self, h: f64) -> Result<Level> {
        let spec = self.spec(h);
        let space = spec.build()?;
        let u = match (self.function, spec.default_field(&space)?) {
            (Some(f), _) => test_function(&space, f)?,
            (None, Some(u)) => u,
            (None, None) => test_function(&space, self.default_function())?,
        };
        Ok(Level { h, space, u })
    }

    fn levels(&self) -> Result<Vec<Level>> {
        for &h in &self.ladder {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter { name: "h", value: h, requirement: "must be positive" });
            }
        }
        self.ladder.iter().map(|&h| self.level(h)).collect()
    }

    fn function_name(&self) -> String {
        match (self.function, self.space) {
            (Some(f), _) => f.name(),
            (None, GalleryKind::Buckley | GalleryKind::BuckleyWeighted | GalleryKind::Cross) => "space default".into(),
            (None, _) => self.default_function().name(),
        }
    }
}

pub(crate) struct Level {
    pub h: f64,
    pub space: MetricMeasureSpace,
    pub u: ScalarField,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    TruncationLimited,
    Violated,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::TruncationLimited => "truncation-limited",
            Verdict::Violated => "violated",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Consistent => 0,
            Verdict::Violated => 2,
            Verdict::TruncationLimited => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Role of a report row in the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    /// Must stay bounded across the ladder.
    Ladder,
    /// Exact inequality that held.
    Pass,
    /// Exact inequality that failed.
    Fail,
    Info,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Ladder => "ladder",
            Check::Pass => "pass",
            Check::Fail => "fail",
            Check::Info => "info",
        }
    }

    fn exact(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: String,
    pub h: f64,
    pub points: usize,
    pub input_norm: Option<f64>,
    pub output_norm: Option<f64>,
    pub ratio: f64,
    /// Fitted constant, or the bound an exact check compares against.
    pub fitted_constant: Option<f64>,
    pub witness: String,
    /// Points whose maximizing radius sits at the cap.
    pub truncated: usize,
    pub check: Check,
}

impl Row {
    fn new(quantity: &str, level: &Level, ratio: f64, check: Check) -> Self {
        Self {
            quantity: quantity.into(),
            h: level.h,
            points: level.space.len(),
            input_norm: None,
            output_norm: None,
            ratio,
            fitted_constant: None,
            witness: String::new(),
            truncated: 0,
            check,
        }
    }

    fn norms(mut self, input: f64, output: f64) -> Self {
        self.input_norm = Some(input);
        self.output_norm = Some(output);
        self
    }

    fn constant(mut self, c: f64) -> Self {
        self.fitted_constant = Some(c);
        self
    }

    fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = w.into();
        self
    }

    fn truncated(mut self, count: usize) -> Self {
        self.truncated = count;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: ExperimentId,
    pub verdict: Verdict,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
    /// `(position, value)` samples of the maximal function on the finest space.
    pub slice: Vec<(f64, f64)>,
    pub slice_label: String,
    /// Set when a hypothesis on the geometry is measured as unmet.
    pub limited: bool,
}

impl Report {
    fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            verdict: Verdict::Consistent,
            rows: Vec::new(),
            notes: Vec::new(),
            slice: Vec::new(),
            slice_label: String::new(),
            limited: false,
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Quantities that must be bounded across the ladder, in first-seen order.
    pub fn ladder_quantities(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for r in self.rows.iter().filter(|r| r.check == Check::Ladder) {
            if !seen.contains(&r.quantity.as_str()) {
                seen.push(&r.quantity);
            }
        }
        seen
    }

    /// `max / min` of a ladder quantity's ratios.
    pub fn spread(&self, quantity: &str) -> f64 {
        let v: Vec<f64> =
            self.rows.iter().filter(|r| r.check == Check::Ladder && r.quantity == quantity).map(|r| r.ratio).collect();
        spread(&v)
    }

    fn finish(mut self) -> Self {
        let mut verdict = if self.limited { Verdict::TruncationLimited } else { Verdict::Consistent };
        let quantities: Vec<String> = self.ladder_quantities().into_iter().map(String::from).collect();
        for q in quantities {
            let levels = self.rows.iter().filter(|r| r.check == Check::Ladder && r.quantity == q).count();
            let s = self.spread(&q);
            if levels < LADDER_MIN_LEVELS {
                self.note(format!("{q}: {levels} resolution(s), boundedness needs {LADDER_MIN_LEVELS}"));
                verdict = Verdict::TruncationLimited;
            } else if s > LADDER_SPREAD {
                self.note(format!("{q}: max/min = {s} exceeds {LADDER_SPREAD}"));
                verdict = Verdict::TruncationLimited;
            } else {
                self.note(format!("{q}: max/min = {s}"));
            }
        }
        if self.rows.iter().any(|r| r.check == Check::Fail) {
            verdict = Verdict::Violated;
        }
        self.verdict = verdict;
        self
    }
}

/// `max / min` with all-zero inputs counting as bounded.
pub fn spread(values: &[f64]) -> f64 {
    if values.is_empty() || values.iter().all(|&v| v == 0.0) {
        return 1.0;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !max.is_finite() || min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Runs one experiment.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    if config.ladder.is_empty() {
        let mut report = Report::new(config.experiment);
        report.note("empty resolution ladder; nothing computed");
        report.limited = true;
        return Ok(report.finish());
    }
    if config.experiment.is_example() {
        return examples::run_example(config);
    }
    let report = match config.experiment {
        ExperimentId::Thm31 => checks::check_thm31(config)?,
        ExperimentId::Thm41 => checks::check_thm41(config)?,
        ExperimentId::Thm42 => checks::check_thm42(config)?,
        ExperimentId::Thm43 => checks::check_thm43(config)?,
        ExperimentId::Thm44a => checks::check_thm44(config, Case::A)?,
        ExperimentId::Thm44b => checks::check_thm44(config, Case::B)?,
        ExperimentId::Thm44c => checks::check_thm44(config, Case::C)?,
        ExperimentId::Cor45 => checks::check_cor45(config)?,
        ExperimentId::Lemma32 => checks::check_lemma32(config)?,
        _ => unreachable!("examples handled above"),
    };
    Ok(report.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Case {
    A,
    B,
    C,
}

fn gate(ok: bool, experiment: ExperimentId, condition: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis { experiment: experiment.name(), condition: condition.into() })
    }
}

fn maximal(level: &Level, u: &ScalarField, alpha: f64, noncentered: bool) -> Result<MaxField> {
    if noncentered {
        frac_maximal_noncentered(&level.space, u, alpha)
    } else {
        frac_maximal(&level.space, u, alpha)
    }
}

/// The finest space of the ladder, where fits are run.
fn finest(levels: &[Level]) -> Result<&Level> {
    levels
        .iter()
        .min_by(|a, b| a.h.total_cmp(&b.h))
        .ok_or_else(|| Error::Degenerate("resolution ladder is empty".into()))
}

/// Lower-bound exponent `Q`, supplied or fitted.
fn dimension(config: &ExperimentConfig, levels: &[Level], report: &mut Report) -> Result<f64> {
    if let Some(q) = config.dimension {
        report.note(format!("Q = {q} (supplied)"));
        return Ok(q);
    }
    let fit = lower_bound_fit(&finest(levels)?.space, &config.fit)?;
    report.note(format!("Q = {} (fitted, c_l = {})", fit.exponent, fit.constant));
    Ok(fit.exponent)
}

/// Annular-decay exponent, supplied or fitted.
fn decay_exponent(config: &ExperimentConfig, levels: &[Level], relative: bool, report: &mut Report) -> Result<f64> {
    if let Some(d) = config.delta {
        report.note(format!("delta = {d} (supplied)"));
        return Ok(d);
    }
    let space = &finest(levels)?.space;
    let fit =
        if relative { relative_annular_decay_fit(space, &config.fit)? } else { annular_decay_fit(space, &config.fit)? };
    let kind = if relative { "relative annular" } else { "annular" };
    report.note(format!("delta = {} (fitted {kind} decay, C = {})", fit.exponent, fit.constant));
    Ok(fit.exponent)
}

/// `p* = Qp / (Q - a p)`.
pub fn sobolev_exponent(dimension: f64, p: f64, alpha: f64) -> f64 {
    dimension * p / (dimension - alpha * p)
}

fn pair_label(pair: Option<(usize, usize)>) -> String {
    pair.map_or_else(String::new, |(a, b)| format!("pair:{a};{b}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("thm99".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn spread_rules() {
        assert_eq!(spread(&[]), 1.0);
        assert_eq!(spread(&[0.0, 0.0]), 1.0);
        assert_eq!(spread(&[1.0, 2.0, 1.5]), 2.0);
        assert!(spread(&[0.0, 1.0]).is_infinite());
        assert!(spread(&[1.0, f64::INFINITY]).is_infinite());
    }

    #[test]
    fn exponents() {
        assert_eq!(sobolev_exponent(1.0, 2.0, 0.25), 4.0);
        assert_eq!(Verdict::Violated.exit_code(), 2);
        assert_eq!(Verdict::TruncationLimited.exit_code(), 3);
    }
}
