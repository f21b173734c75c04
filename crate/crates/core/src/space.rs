//! Finite metric measure spaces.
//!
//! A continuum space is represented by sample points carrying positive atomic
//! weights (local length or area elements). Balls are open,
//! `B(x, r) = { y : d(x, y) < r }`, and every supremum over radii is taken over
//! `(0, cap]`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::ExactSum;
use crate::profile::{MassProfile, Shells};

/// How distances are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Euclidean distance between coordinate vectors.
    Euclidean,
    /// `max_i |x_i - y_i|` between coordinate vectors.
    Chebyshev,
    /// Distances read from an explicit symmetric matrix.
    Matrix,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Chebyshev => "chebyshev",
            MetricKind::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Coordinate dimension; `None` for matrix metrics.
    pub dimension: Option<usize>,
}

impl MetricSpec {
    pub fn euclidean(dimension: usize) -> Self {
        Self { kind: MetricKind::Euclidean, dimension: Some(dimension) }
    }

    pub fn chebyshev(dimension: usize) -> Self {
        Self { kind: MetricKind::Chebyshev, dimension: Some(dimension) }
    }

    pub fn matrix() -> Self {
        Self { kind: MetricKind::Matrix, dimension: None }
    }
}

/// Which generator produced a space. Generators that evaluate functions on a
/// specific geometry check this tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    Generic,
    Grid { dim: usize },
    Buckley { weighted: bool },
    Cross,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Generic => write!(f, "generic"),
            SpaceKind::Grid { dim } => write!(f, "grid{dim}d"),
            SpaceKind::Buckley { weighted: false } => write!(f, "buckley"),
            SpaceKind::Buckley { weighted: true } => write!(f, "buckley-weighted"),
            SpaceKind::Cross => write!(f, "cross"),
        }
    }
}

/// Input geometry for [`build_space`].
#[derive(Debug, Clone)]
pub enum Geometry {
    /// One coordinate vector per point.
    Coords(Vec<Vec<f64>>),
    /// Full `n x n` distance matrix.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
enum Store {
    Coords { dim: usize, flat: Vec<f64> },
    Matrix { n: usize, flat: Vec<f64> },
}

/// Immutable discretized metric measure space.
#[derive(Debug, Clone)]
pub struct MetricMeasureSpace {
    store: Store,
    metric: MetricSpec,
    weights: Vec<f64>,
    cap: f64,
    kind: SpaceKind,
    truncation_note: String,
    truncation_sites: Vec<Vec<f64>>,
    edge_distance: Vec<f64>,
}

/// Constructs a space, validating weights, cap and (for matrices) the metric
/// table.
pub fn build_space(geometry: Geometry, metric: MetricSpec, weights: Vec<f64>, cap: f64) -> Result<MetricMeasureSpace> {
    match geometry {
        Geometry::Coords(c) => MetricMeasureSpace::from_coords(c, metric, weights, cap),
        Geometry::Matrix(m) => MetricMeasureSpace::from_matrix(m, weights, cap),
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::EmptySpace);
    }
    for (index, &weight) in weights.iter().enumerate() {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::NonPositiveWeight { index, weight });
        }
    }
    Ok(())
}

fn check_cap(cap: f64) -> Result<()> {
    if cap > 0.0 && cap.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidCap(cap))
    }
}

impl MetricMeasureSpace {
    pub fn from_coords(coords: Vec<Vec<f64>>, metric: MetricSpec, weights: Vec<f64>, cap: f64) -> Result<Self> {
        check_weights(&weights)?;
        check_cap(cap)?;
        let dim = match (metric.kind, metric.dimension) {
            (MetricKind::Matrix, _) => {
                return Err(Error::DimensionMismatch("coordinate input needs a euclidean or chebyshev metric".into()))
            }
            (_, Some(d)) if d >= 1 => d,
            _ => return Err(Error::DimensionMismatch("coordinate metrics need a dimension >= 1".into())),
        };
        if coords.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinate rows but {} weights",
                coords.len(),
                weights.len()
            )));
        }
        let mut flat = Vec::with_capacity(coords.len() * dim);
        for (i, row) in coords.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::DimensionMismatch(format!("point {i} has non-finite coordinates")));
            }
            flat.extend_from_slice(row);
        }
        let n = weights.len();
        Ok(Self {
            store: Store::Coords { dim, flat },
            metric,
            weights,
            cap,
            kind: SpaceKind::Generic,
            truncation_note: String::new(),
            truncation_sites: Vec::new(),
            edge_distance: vec![f64::INFINITY; n],
        })
    }

    pub fn from_matrix(matrix: Vec<Vec<f64>>, weights: Vec<f64>, cap: f64) -> Result<Self> {
        check_weights(&weights)?;
        check_cap(cap)?;
        let n = matrix.len();
        if n != weights.len() {
            return Err(Error::DimensionMismatch(format!("{n} matrix rows but {} weights", weights.len())));
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NonSquareMatrix { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            if matrix[i][i] != 0.0 {
                return Err(Error::NonZeroDiagonal { index: i, value: matrix[i][i] });
            }
            for j in 0..n {
                let v = matrix[i][j];
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidDistance { i, j, value: v });
                }
                if j > i && v != matrix[j][i] {
                    return Err(Error::AsymmetricMatrix { i, j, a: v, b: matrix[j][i] });
                }
            }
        }
        let flat = matrix.into_iter().flatten().collect();
        Ok(Self {
            store: Store::Matrix { n, flat },
            metric: MetricSpec::matrix(),
            weights,
            cap,
            kind: SpaceKind::Generic,
            truncation_note: String::new(),
            truncation_sites: Vec::new(),
            edge_distance: vec![f64::INFINITY; n],
        })
    }

    pub fn with_kind(mut self, kind: SpaceKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.truncation_note = note.into();
        self
    }

    /// Records where the sample truncates a larger space. Regularity fits
    /// exclude balls that reach a truncation site.
    pub fn with_truncation_sites(mut self, sites: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match self.store {
            Store::Coords { dim, .. } => dim,
            Store::Matrix { .. } => return Err(Error::NeedsCoordinates),
        };
        if let Some(bad) = sites.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "truncation site has {} coordinates, expected {dim}",
                bad.len()
            )));
        }
        self.edge_distance = (0..self.len())
            .map(|i| sites.iter().map(|s| self.distance_to_coords(s, i)).fold(f64::INFINITY, f64::min))
            .collect();
        self.truncation_sites = sites;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn metric(&self) -> MetricSpec {
        self.metric
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn truncation_note(&self) -> &str {
        &self.truncation_note
    }

    pub fn truncation_sites(&self) -> &[Vec<f64>] {
        &self.truncation_sites
    }

    /// Metric distance from the point to the nearest truncation site, or
    /// infinity when the sample is the whole space.
    pub fn edge_distance(&self, id: usize) -> f64 {
        self.edge_distance[id]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, id: usize) -> f64 {
        self.weights[id]
    }

    pub fn total_mass(&self) -> f64 {
        let mut acc = ExactSum::new();
        acc.extend(self.weights.iter().copied());
        acc.value()
    }

    pub fn dimension(&self) -> Option<usize> {
        match self.store {
            Store::Coords { dim, .. } => Some(dim),
            Store::Matrix { .. } => None,
        }
    }

    pub fn has_coords(&self) -> bool {
        matches!(self.store, Store::Coords { .. })
    }

    pub fn coords(&self, id: usize) -> Option<&[f64]> {
        match &self.store {
            Store::Coords { dim, flat } => Some(&flat[id * dim..(id + 1) * dim]),
            Store::Matrix { .. } => None,
        }
    }

    pub fn check_id(&self, id: usize) -> Result<()> {
        if id < self.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { id, n: self.len() })
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match &self.store {
            Store::Coords { dim, flat } => {
                let (pa, pb) = (&flat[a * dim..(a + 1) * dim], &flat[b * dim..(b + 1) * dim]);
                coord_distance(self.metric.kind, pa, pb)
            }
            Store::Matrix { n, flat } => flat[a * n + b],
        }
    }

    /// Distance from an arbitrary location of the ambient coordinate space to
    /// a sample point.
    pub fn distance_to_coords(&self, location: &[f64], id: usize) -> f64 {
        match &self.store {
            Store::Coords { dim, flat } => coord_distance(self.metric.kind, location, &flat[id * dim..(id + 1) * dim]),
            Store::Matrix { .. } => f64::NAN,
        }
    }

    /// Fills `out` with `d(center, y)` for every point `y`.
    pub fn distances_from(&self, center: usize, out: &mut Vec<f64>) {
        out.clear();
        match &self.store {
            Store::Coords { dim, flat } => {
                let c = &flat[center * dim..(center + 1) * dim];
                out.extend(flat.chunks_exact(*dim).map(|p| coord_distance(self.metric.kind, c, p)));
            }
            Store::Matrix { n, flat } => out.extend_from_slice(&flat[center * n..(center + 1) * n]),
        }
    }

    /// Distances from an off-sample location (coordinate spaces only).
    pub fn distances_from_coords(&self, location: &[f64]) -> Result<Vec<f64>> {
        match &self.store {
            Store::Coords { dim, flat } => {
                if location.len() != *dim {
                    return Err(Error::DimensionMismatch(format!(
                        "location has {} coordinates, expected {dim}",
                        location.len()
                    )));
                }
                Ok(flat.chunks_exact(*dim).map(|p| coord_distance(self.metric.kind, location, p)).collect())
            }
            Store::Matrix { .. } => Err(Error::NeedsCoordinates),
        }
    }

    /// Finds the sample point sitting at `location` (within `tol`).
    pub fn locate(&self, location: &[f64], tol: f64) -> Result<usize> {
        let d = self.distances_from_coords(location)?;
        let (best, dist) =
            d.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        if dist <= tol {
            Ok(best)
        } else {
            Err(Error::Degenerate(format!("no sample point within {tol} of {location:?} (nearest at distance {dist})")))
        }
    }

    /// Sorted shell structure around a sample point.
    pub fn shells(&self, center: usize) -> Result<Shells> {
        self.check_id(center)?;
        let mut d = Vec::with_capacity(self.len());
        self.distances_from(center, &mut d);
        Ok(Shells::from_distances(Some(center), &d, self.cap))
    }

    pub fn mass_profile(&self, center: usize) -> Result<MassProfile> {
        let shells = self.shells(center)?;
        Ok(MassProfile::new(center, &shells, &self.weights))
    }

    /// `mu(B(x, r))` for `0 < r <= cap`.
    pub fn ball_mass(&self, center: usize, radius: f64) -> Result<f64> {
        self.check_radius(radius)?;
        Ok(self.mass_profile(center)?.ball_mass(radius))
    }

    pub fn check_radius(&self, radius: f64) -> Result<()> {
        if radius > 0.0 && radius <= self.cap {
            Ok(())
        } else {
            Err(Error::InvalidRadius { radius, cap: self.cap })
        }
    }

    /// Checks symmetry and the triangle inequality. All triples are examined
    /// when `n <= 300`, otherwise `sample_triples` random ones (fixed seed).
    pub fn verify_metric_axioms(&self, sample_triples: usize) -> Result<MetricReport> {
        if sample_triples == 0 {
            return Err(Error::InvalidParameter {
                name: "sample_triples",
                value: 0.0,
                requirement: "must be at least 1",
            });
        }
        let n = self.len();
        let mut report = MetricReport { exhaustive: n <= EXHAUSTIVE_AXIOM_LIMIT, ..MetricReport::default() };
        let check = |x: usize, y: usize, z: usize, report: &mut MetricReport| {
            let (dxy, dyz, dxz) = (self.distance(x, y), self.distance(y, z), self.distance(x, z));
            let defect = dxz - dxy - dyz;
            report.triples_checked += 1;
            if report.triples_checked == 1 || defect > report.worst_triangle_defect {
                report.worst_triangle_defect = defect;
                report.worst_triple = Some((x, y, z));
            }
            if defect > AXIOM_TOL * dxz.max(1.0) {
                report.violations += 1;
            }
        };
        for x in 0..n {
            for y in 0..n {
                if self.distance(x, y) != self.distance(y, x) {
                    report.asymmetric_pairs += 1;
                }
            }
        }
        report.violations += report.asymmetric_pairs;
        if report.exhaustive {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        check(x, y, z, &mut report);
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6d65_7472_6963);
            for _ in 0..sample_triples {
                let (x, y, z) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                check(x, y, z, &mut report);
            }
        }
        Ok(report)
    }
}

const EXHAUSTIVE_AXIOM_LIMIT: usize = 300;
const AXIOM_TOL: f64 = 1e-12;

fn coord_distance(kind: MetricKind, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        MetricKind::Chebyshev => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        _ => {
            if a.len() == 1 {
                (a[0] - b[0]).abs()
            } else {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
        }
    }
}

/// Outcome of [`MetricMeasureSpace::verify_metric_axioms`].
#[derive(Debug, Clone, Default)]
pub struct MetricReport {
    pub violations: usize,
    pub asymmetric_pairs: usize,
    /// Largest `d(x,z) - d(x,y) - d(y,z)` seen; positive means a violation.
    pub worst_triangle_defect: f64,
    pub worst_triple: Option<(usize, usize, usize)>,
    pub triples_checked: usize,
    pub exhaustive: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> MetricMeasureSpace {
        MetricMeasureSpace::from_coords(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            MetricSpec::euclidean(1),
            vec![1.0; 3],
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn collinear_points() {
        let s = line3();
        assert_eq!(s.len(), 3);
        assert_eq!(s.total_mass(), 3.0);
        assert_eq!(s.ball_mass(0, 1.5).unwrap(), 2.0);
        // strict: the point at distance exactly 1 is outside B(0, 1)
        assert_eq!(s.ball_mass(0, 1.0).unwrap(), 1.0);
        assert_eq!(s.ball_mass(1, 1.0 + 1e-12).unwrap(), 3.0);
    }

    #[test]
    fn rejects_bad_input() {
        let err = MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]], vec![1.0; 2], 5.0);
        assert!(matches!(err, Err(Error::AsymmetricMatrix { .. })));
        assert!(err.unwrap_err().to_string().contains("asymmetric"));
        let err =
            MetricMeasureSpace::from_coords(vec![vec![0.0], vec![1.0]], MetricSpec::euclidean(1), vec![1.0, 0.0], 1.0);
        assert!(matches!(err, Err(Error::NonPositiveWeight { index: 1, .. })));
        let err = MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0]], vec![1.0], 1.0);
        assert!(matches!(err, Err(Error::NonSquareMatrix { .. })));
        assert!(matches!(line3().ball_mass(0, 0.0), Err(Error::InvalidRadius { .. })));
        assert!(matches!(line3().ball_mass(0, 11.0), Err(Error::InvalidRadius { .. })));
        assert!(matches!(line3().mass_profile(3), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn triangle_defect_reported() {
        let m = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        let s = MetricMeasureSpace::from_matrix(m, vec![1.0; 3], 10.0).unwrap();
        let r = s.verify_metric_axioms(10).unwrap();
        assert!(r.violations > 0);
        assert_eq!(r.worst_triangle_defect, 3.0);
        let r = line3().verify_metric_axioms(10).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.exhaustive);
    }
}
