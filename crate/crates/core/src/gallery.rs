//! Ready-made spaces and fields: Euclidean grids, the line-plus-arc space and
//! the cross space, plus standard test functions.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::space::{MetricMeasureSpace, MetricSpec, SpaceKind};

/// Argument below which the arc function vanishes.
pub const ARC_LOW: f64 = PI / 5.0;
/// Argument above which the arc function equals one.
pub const ARC_HIGH: f64 = FRAC_PI_4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GalleryKind {
    Grid1d,
    Grid2d,
    Buckley,
    BuckleyWeighted,
    Cross,
}

impl GalleryKind {
    pub fn name(self) -> &'static str {
        match self {
            GalleryKind::Grid1d => "grid1d",
            GalleryKind::Grid2d => "grid2d",
            GalleryKind::Buckley => "buckley",
            GalleryKind::BuckleyWeighted => "buckley-weighted",
            GalleryKind::Cross => "cross",
        }
    }
}

impl std::str::FromStr for GalleryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "grid1d" => GalleryKind::Grid1d,
            "grid2d" => GalleryKind::Grid2d,
            "buckley" => GalleryKind::Buckley,
            "buckley-weighted" | "buckley_weighted" => GalleryKind::BuckleyWeighted,
            "cross" => GalleryKind::Cross,
            other => return Err(Error::Degenerate(format!("unknown gallery kind '{other}'"))),
        })
    }
}

/// A gallery request. Grids span `[-extent, extent]^dim`; the line-plus-arc
/// space truncates the line at `±extent`; the cross space uses `extent` for
/// the horizontal arm and `depth` for the downward arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GallerySpec {
    pub kind: GalleryKind,
    pub step: f64,
    pub extent: f64,
    pub depth: f64,
    /// Grid cap radius; the diameter `2 * extent` when unset.
    pub cap: Option<f64>,
}

impl GallerySpec {
    pub fn new(kind: GalleryKind, step: f64, extent: f64) -> Self {
        Self { kind, step, extent, depth: extent, cap: None }
    }

    pub fn build(&self) -> Result<MetricMeasureSpace> {
        let cap = self.cap.unwrap_or(2.0 * self.extent);
        match self.kind {
            GalleryKind::Grid1d => euclidean_grid(1, self.step, -self.extent, self.extent, cap),
            GalleryKind::Grid2d => euclidean_grid(2, self.step, -self.extent, self.extent, cap),
            GalleryKind::Buckley => buckley_space(self.extent, self.step, false),
            GalleryKind::BuckleyWeighted => buckley_space(self.extent, self.step, true),
            GalleryKind::Cross => cross_space(self.extent, self.depth, self.step),
        }
    }

    /// The space's own function for the two example spaces, `None` for grids.
    pub fn default_field(&self, space: &MetricMeasureSpace) -> Result<Option<ScalarField>> {
        match self.kind {
            GalleryKind::Buckley | GalleryKind::BuckleyWeighted => buckley_function(space).map(Some),
            GalleryKind::Cross => cross_function(space).map(Some),
            _ => Ok(None),
        }
    }
}

fn steps(lo: f64, hi: f64, step: f64) -> usize {
    ((hi - lo) / step).round() as usize + 1
}

/// Uniform grid on `[lo, hi]^dim` with weight `step^dim` per sample. The
/// boundary samples serve as truncation sites.
pub fn euclidean_grid(dim: usize, step: f64, lo: f64, hi: f64, cap: f64) -> Result<MetricMeasureSpace> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter { name: "step", value: step, requirement: "must be positive" });
    }
    if !(hi - lo > step) {
        return Err(Error::InvalidParameter { name: "extent", value: hi - lo, requirement: "must exceed the step" });
    }
    if dim == 0 || dim > 3 {
        return Err(Error::InvalidParameter { name: "dim", value: dim as f64, requirement: "must be 1, 2 or 3" });
    }
    let m = steps(lo, hi, step);
    let n = m.pow(dim as u32);
    let mut coords = Vec::with_capacity(n);
    let mut sites = Vec::new();
    for flat in 0..n {
        let mut rest = flat;
        let mut point = Vec::with_capacity(dim);
        let mut on_edge = false;
        for _ in 0..dim {
            let i = rest % m;
            rest /= m;
            on_edge |= i == 0 || i == m - 1;
            point.push(lo + i as f64 * step);
        }
        point.reverse();
        if on_edge {
            sites.push(point.clone());
        }
        coords.push(point);
    }
    MetricMeasureSpace::from_coords(coords, MetricSpec::euclidean(dim), vec![step.powi(dim as i32); n], cap)?
        .with_kind(SpaceKind::Grid { dim })
        .with_note(format!("grid on [{lo}, {hi}]^{dim}; boundary samples are truncation sites"))
        .with_truncation_sites(sites)
}

/// The real line truncated to `[-extent, extent]` plus the quarter of the
/// unit circle with argument in `(0, π/2]`, in the Euclidean metric of the
/// plane. Arc samples sit at arguments `j h` with arclength weight `h`. The
/// weighted variant multiplies the line weight by `1 + π/2` for `x > 1`.
pub fn buckley_space(extent: f64, step: f64, weighted: bool) -> Result<MetricMeasureSpace> {
    if !(extent > 2.0) {
        return Err(Error::InvalidParameter { name: "extent", value: extent, requirement: "must exceed 2" });
    }
    if !(step > 0.0 && step < 0.1) {
        return Err(Error::InvalidParameter { name: "step", value: step, requirement: "must lie in (0, 0.1)" });
    }
    let k = (extent / step).round() as i64;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for i in -k..=k {
        let x = i as f64 * step;
        coords.push(vec![x, 0.0]);
        weights.push(if weighted && x > 1.0 { step * (1.0 + FRAC_PI_2) } else { step });
    }
    let arc = (FRAC_PI_2 / step).floor() as i64;
    for j in 1..=arc {
        let t = j as f64 * step;
        coords.push(vec![t.cos(), t.sin()]);
        weights.push(step);
    }
    let edge = k as f64 * step;
    MetricMeasureSpace::from_coords(coords, MetricSpec::euclidean(2), weights, edge)?
        .with_kind(SpaceKind::Buckley { weighted })
        .with_note(format!("line truncated to [-{edge}, {edge}]"))
        .with_truncation_sites(vec![vec![-edge, 0.0], vec![edge, 0.0]])
}

fn require_kind(space: &MetricMeasureSpace, ok: bool, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::WrongSpaceKind { expected: expected.into(), found: space.kind().to_string() })
    }
}

/// Zero on the line and for arguments up to `π/5`, one from `π/4` on,
/// linear in the argument in between.
pub fn buckley_function(space: &MetricMeasureSpace) -> Result<ScalarField> {
    require_kind(space, matches!(space.kind(), SpaceKind::Buckley { .. }), "buckley")?;
    ScalarField::from_fn(space.len(), |i| {
        let c = space.coords(i).expect("gallery spaces carry coordinates");
        if c[1] == 0.0 {
            0.0
        } else {
            arc_profile(c[1].atan2(c[0]))
        }
    })
}

/// The arc function as a function of the argument.
pub fn arc_profile(theta: f64) -> f64 {
    if theta <= ARC_LOW {
        0.0
    } else if theta >= ARC_HIGH {
        1.0
    } else {
        (theta - ARC_LOW) / (ARC_HIGH - ARC_LOW)
    }
}

/// `∫_arc u` in the continuum: the plateau on `[π/4, π/2]` plus half the ramp.
pub fn arc_integral() -> f64 {
    (FRAC_PI_2 - ARC_HIGH) + 0.5 * (ARC_HIGH - ARC_LOW)
}

/// `[-extent, extent] × {0}` together with `{0} × [-depth, 1]` in the
/// maximum metric, weight `h` per sample, the origin shared.
pub fn cross_space(extent: f64, depth: f64, step: f64) -> Result<MetricMeasureSpace> {
    if !(extent >= 3.0) {
        return Err(Error::InvalidParameter { name: "extent", value: extent, requirement: "must be at least 3" });
    }
    if !(depth >= 2.0) {
        return Err(Error::InvalidParameter { name: "depth", value: depth, requirement: "must be at least 2" });
    }
    if !(step > 0.0 && step < 0.1) {
        return Err(Error::InvalidParameter { name: "step", value: step, requirement: "must lie in (0, 0.1)" });
    }
    let k = (extent / step).round() as i64;
    let down = (depth / step).round() as i64;
    let up = (1.0 / step).round() as i64;
    let mut coords: Vec<Vec<f64>> = (-k..=k).map(|i| vec![i as f64 * step, 0.0]).collect();
    coords.extend((-down..=up).filter(|&j| j != 0).map(|j| vec![0.0, j as f64 * step]));
    let n = coords.len();
    let edge = k as f64 * step;
    let bottom = down as f64 * step;
    MetricMeasureSpace::from_coords(coords, MetricSpec::chebyshev(2), vec![step; n], edge)?
        .with_kind(SpaceKind::Cross)
        .with_note(format!("horizontal arm truncated to [-{edge}, {edge}], vertical arm to [-{bottom}, 1]"))
        .with_truncation_sites(vec![vec![-edge, 0.0], vec![edge, 0.0], vec![0.0, -bottom]])
}

/// `u(x) = x_2` for `0 < x_2 <= 1`, zero elsewhere.
pub fn cross_function(space: &MetricMeasureSpace) -> Result<ScalarField> {
    require_kind(space, space.kind() == SpaceKind::Cross, "cross")?;
    ScalarField::from_fn(space.len(), |i| {
        let y = space.coords(i).expect("gallery spaces carry coordinates")[1];
        if y > 0.0 && y <= 1.0 {
            y
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Constant(f64),
    /// First coordinate.
    Linear,
    /// `|x|^γ`.
    AbsPower(f64),
    /// `ln|x|` clamped to `[-clip, clip]`.
    ClippedLog(f64),
    /// `exp(1 - 1/(1 - |x|^2))` inside the unit ball, zero outside.
    Bump,
    /// Sign of the first coordinate.
    Sign,
}

impl TestFunction {
    pub fn name(&self) -> String {
        match self {
            TestFunction::Constant(c) => format!("constant({c})"),
            TestFunction::Linear => "linear".into(),
            TestFunction::AbsPower(g) => format!("abs_power({g})"),
            TestFunction::ClippedLog(c) => format!("clipped_log({c})"),
            TestFunction::Bump => "bump".into(),
            TestFunction::Sign => "sign".into(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match *self {
            TestFunction::Constant(c) => c,
            TestFunction::Linear => x[0],
            TestFunction::AbsPower(g) => norm.powf(g),
            TestFunction::ClippedLog(clip) => norm.ln().clamp(-clip, clip),
            TestFunction::Bump => {
                let s = norm * norm;
                if s < 1.0 {
                    (1.0 - 1.0 / (1.0 - s)).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Sign => {
                if x[0] > 0.0 {
                    1.0
                } else if x[0] < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            TestFunction::AbsPower(g) if !(g > 0.0 && g.is_finite()) => {
                Err(Error::InvalidParameter { name: "gamma", value: g, requirement: "must be positive" })
            }
            TestFunction::ClippedLog(c) if !(c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidParameter { name: "clip", value: c, requirement: "must be positive and finite" })
            }
            TestFunction::Constant(c) if !c.is_finite() => {
                Err(Error::InvalidParameter { name: "c", value: c, requirement: "must be finite" })
            }
            _ => Ok(()),
        }
    }
}

impl std::str::FromStr for TestFunction {
    type Err = Error;

    /// Accepts `constant[:c]`, `linear`, `abs_power[:γ]`, `clipped_log[:clip]`,
    /// `bump`, `sign`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |default: f64| -> Result<f64> {
            arg.map_or(Ok(default), |a| {
                a.trim().parse().map_err(|_| Error::Degenerate(format!("bad parameter '{a}' in '{s}'")))
            })
        };
        let f = match name {
            "constant" => TestFunction::Constant(num(1.0)?),
            "linear" => TestFunction::Linear,
            "abs_power" => TestFunction::AbsPower(num(1.0)?),
            "clipped_log" => TestFunction::ClippedLog(num(10.0)?),
            "bump" => TestFunction::Bump,
            "sign" => TestFunction::Sign,
            other => return Err(Error::Degenerate(format!("unknown test function '{other}'"))),
        };
        f.validate()?;
        Ok(f)
    }
}

pub fn test_function(space: &MetricMeasureSpace, kind: TestFunction) -> Result<ScalarField> {
    kind.validate()?;
    if let TestFunction::Constant(c) = kind {
        return Ok(ScalarField::constant(space.len(), c));
    }
    if !space.has_coords() {
        return Err(Error::NeedsCoordinates);
    }
    ScalarField::from_fn(space.len(), |i| kind.eval(space.coords(i).expect("checked above")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::holder_seminorm;

    #[test]
    fn grids() {
        let g = euclidean_grid(1, 0.5, -1.0, 1.0, 2.0).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.total_mass(), 2.5);
        assert_eq!(g.edge_distance(2), 1.0);
        let g = euclidean_grid(2, 1.0, 0.0, 2.0, 3.0).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.total_mass(), 9.0);
        assert_eq!(g.edge_distance(4), 1.0);
        assert!(euclidean_grid(1, 1.0, 0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn buckley_geometry() {
        let h = 0.005;
        let s = buckley_space(3.0, h, false).unwrap();
        let o = s.locate(&[0.0, 0.0], 1e-12).unwrap();
        assert!((s.ball_mass(o, 0.9).unwrap() - 1.8).abs() <= 2.0 * h);
        let expect = 2.02 + FRAC_PI_2;
        assert!((s.ball_mass(o, 1.01).unwrap() - expect).abs() <= 2.0 * h);
        assert!((s.ball_mass(o, 1.2).unwrap() - (2.4 + FRAC_PI_2)).abs() <= 2.0 * h);
        let w = buckley_space(3.0, h, true).unwrap();
        let o = w.locate(&[0.0, 0.0], 1e-12).unwrap();
        assert!((w.ball_mass(o, 2.0).unwrap() - (2.0 + FRAC_PI_2) * 2.0).abs() <= 4.0 * h);
        assert!(buckley_space(2.0, h, false).is_err());
    }

    #[test]
    fn buckley_values() {
        assert_eq!(arc_profile(FRAC_PI_2), 1.0);
        assert_eq!(arc_profile(PI / 6.0), 0.0);
        assert!((arc_profile(9.0 * PI / 40.0) - 0.5).abs() < 1e-12);
        let s = buckley_space(3.0, 0.05, false).unwrap();
        let u = buckley_function(&s).unwrap();
        let l = holder_seminorm(&s, &u, 1.0).unwrap();
        assert!(l.value < 1.0 / (ARC_HIGH - ARC_LOW) * 1.1);
    }

    #[test]
    fn cross_geometry() {
        let h = 0.005;
        let s = cross_space(3.0, 3.0, h).unwrap();
        let o = s.locate(&[0.0, 0.0], 1e-12).unwrap();
        // four half-arms meet at the origin
        assert!((s.ball_mass(o, 0.5).unwrap() - 2.0).abs() <= 4.0 * h);
        let top = s.locate(&[0.0, 1.0], 1e-12).unwrap();
        assert!((s.ball_mass(top, 0.5).unwrap() - 0.5).abs() <= 2.0 * h);
        let u = cross_function(&s).unwrap();
        assert!((u[s.locate(&[0.0, 0.7], 1e-9).unwrap()] - 0.7).abs() < 1e-12);
        assert_eq!(u[s.locate(&[3.0, 0.0], 1e-9).unwrap()], 0.0);
        assert_eq!(u[s.locate(&[0.0, -0.5], 1e-9).unwrap()], 0.0);
        let small = cross_space(3.0, 2.0, 0.05).unwrap();
        assert_eq!(small.verify_metric_axioms(1).unwrap().violations, 0);
        assert!(buckley_function(&s).is_err());
    }

    #[test]
    fn test_functions() {
        let g = euclidean_grid(1, 0.01, -1.0, 1.0, 2.0).unwrap();
        let c = test_function(&g, "constant:3".parse().unwrap()).unwrap();
        assert!(c.values().iter().all(|&v| v == 3.0));
        let a = test_function(&g, TestFunction::AbsPower(1.0)).unwrap();
        assert!((holder_seminorm(&g, &a, 1.0).unwrap().value - 1.0).abs() < 1e-9);
        let l = test_function(&g, TestFunction::ClippedLog(10.0)).unwrap();
        assert!(l.values().iter().all(|v| v.abs() <= 10.0));
        assert!("abs_power:-1".parse::<TestFunction>().is_err());
        let m = MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 1.0], 2.0).unwrap();
        assert!(matches!(test_function(&m, TestFunction::Linear), Err(Error::NeedsCoordinates)));
        assert!(test_function(&m, TestFunction::Constant(1.0)).is_ok());
    }
}
