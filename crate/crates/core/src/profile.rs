//! Sorted-distance profiles: the kernel behind every ball query.
//!
//! Around a center the in-cap points are sorted by `(distance, id)` and
//! grouped into shells of equal distance `d_1 < d_2 < ... < d_m`. For
//! `d_k < r <= d_{k+1}` the open ball `B(center, r)` holds exactly the shells
//! `1..=k`, so ball contents (and every average over them) change only at the
//! critical radii. Ball `k` is represented by its canonical radius
//! `min(d_{k+1}, cap)`, the largest radius giving that ball.

use crate::exact::ExactSum;

#[derive(Debug, Clone)]
pub struct Shells {
    /// Sample point at the center, `None` for off-sample probes.
    pub center: Option<usize>,
    /// Point ids sorted by `(distance, id)`, restricted to `distance < cap`.
    pub order: Vec<u32>,
    /// Distances aligned with `order`.
    pub dist: Vec<f64>,
    /// Distinct distances, strictly increasing.
    pub radii: Vec<f64>,
    /// `ends[k]` = number of points at distance `<= radii[k]`.
    pub ends: Vec<usize>,
    pub cap: f64,
}

impl Shells {
    pub fn from_distances(center: Option<usize>, distances: &[f64], cap: f64) -> Self {
        let mut order: Vec<u32> = (0..distances.len() as u32).filter(|&i| distances[i as usize] < cap).collect();
        order.sort_unstable_by(|&a, &b| distances[a as usize].total_cmp(&distances[b as usize]).then(a.cmp(&b)));
        let dist: Vec<f64> = order.iter().map(|&i| distances[i as usize]).collect();
        let mut radii = Vec::new();
        let mut ends = Vec::new();
        for (i, &d) in dist.iter().enumerate() {
            if radii.last() != Some(&d) {
                if !radii.is_empty() {
                    ends.push(i);
                }
                radii.push(d);
            }
        }
        if !radii.is_empty() {
            ends.push(dist.len());
        }
        Self { center, order, dist, radii, ends, cap }
    }

    /// Number of shells.
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Largest radius whose open ball is exactly shells `0..=k`.
    pub fn canonical_radius(&self, k: usize) -> f64 {
        if k + 1 < self.radii.len() {
            self.radii[k + 1]
        } else {
            self.cap
        }
    }

    /// Number of shells inside `B(center, r)`.
    pub fn shells_below(&self, r: f64) -> usize {
        self.radii.partition_point(|&d| d < r)
    }

    /// Number of points inside `B(center, r)`.
    pub fn points_below(&self, r: f64) -> usize {
        match self.shells_below(r) {
            0 => 0,
            k => self.ends[k - 1],
        }
    }

    /// Members of ball `k`, in `(distance, id)` order.
    pub fn ball_members(&self, k: usize) -> &[u32] {
        &self.order[..self.ends[k]]
    }

    /// Index of the smallest ball that contains a point at distance `dist`
    /// from the center, i.e. whose canonical radius exceeds `dist`. `None`
    /// when `dist >= cap`.
    pub fn first_ball_containing(&self, dist: f64) -> Option<usize> {
        if dist >= self.cap || self.radii.is_empty() {
            return None;
        }
        let at_or_below = self.radii.partition_point(|&d| d <= dist);
        Some(at_or_below.saturating_sub(1))
    }
}

/// Cumulative ball masses around one center.
#[derive(Debug, Clone, PartialEq)]
pub struct MassProfile {
    pub center: usize,
    pub radii: Vec<f64>,
    /// `cum_mass[k] = mu({y : d(center, y) <= radii[k]})`, correctly rounded.
    pub cum_mass: Vec<f64>,
}

impl MassProfile {
    pub fn new(center: usize, shells: &Shells, weights: &[f64]) -> Self {
        let profile = FieldProfile::build(shells, weights, &[]);
        Self { center, radii: shells.radii.clone(), cum_mass: profile.cum_mass }
    }

    /// Mass of the open ball of radius `r`.
    pub fn ball_mass(&self, r: f64) -> f64 {
        match self.radii.partition_point(|&d| d < r) {
            0 => 0.0,
            k => self.cum_mass[k - 1],
        }
    }
}

/// Cumulative weighted sums `sum w * v` of one or more value channels,
/// snapshotted at every shell boundary.
#[derive(Debug, Clone)]
pub struct FieldProfile {
    pub cum_mass: Vec<f64>,
    /// One vector per channel, aligned with `cum_mass`.
    pub channels: Vec<Vec<f64>>,
}

impl FieldProfile {
    pub fn build(shells: &Shells, weights: &[f64], channels: &[&[f64]]) -> Self {
        let m = shells.len();
        let mut mass = ExactSum::new();
        let mut sums: Vec<ExactSum> = vec![ExactSum::new(); channels.len()];
        let mut cum_mass = Vec::with_capacity(m);
        let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(m); channels.len()];
        let mut start = 0;
        for &end in &shells.ends {
            for &id in &shells.order[start..end] {
                let id = id as usize;
                let w = weights[id];
                mass.add(w);
                for (acc, values) in sums.iter_mut().zip(channels) {
                    acc.add(w * values[id]);
                }
            }
            cum_mass.push(mass.value());
            for (dst, acc) in out.iter_mut().zip(&sums) {
                dst.push(acc.value());
            }
            start = end;
        }
        Self { cum_mass, channels: out }
    }

    /// Average of channel `c` over ball `k`.
    pub fn average(&self, c: usize, k: usize) -> f64 {
        self.channels[c][k] / self.cum_mass[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_profile() {
        let s = Shells::from_distances(Some(0), &[0.0], 1.0);
        let p = MassProfile::new(0, &s, &[2.5]);
        assert_eq!(p.radii, vec![0.0]);
        assert_eq!(p.cum_mass, vec![2.5]);
        assert_eq!(s.canonical_radius(0), 1.0);
    }

    #[test]
    fn two_points_profile() {
        let s = Shells::from_distances(Some(0), &[0.0, 1.0], 5.0);
        let p = MassProfile::new(0, &s, &[1.0, 1.0]);
        assert_eq!(p.radii, vec![0.0, 1.0]);
        assert_eq!(p.cum_mass, vec![1.0, 2.0]);
        assert_eq!(p.ball_mass(1.0), 1.0);
        assert_eq!(p.ball_mass(1.0000001), 2.0);
        assert_eq!(s.canonical_radius(0), 1.0);
        assert_eq!(s.canonical_radius(1), 5.0);
    }

    #[test]
    fn ties_aggregate() {
        let d = [0.0, 1.0, 1.0, 2.0, 7.0];
        let s = Shells::from_distances(Some(0), &d, 3.0);
        assert_eq!(s.radii, vec![0.0, 1.0, 2.0]);
        assert_eq!(s.ends, vec![1, 3, 4]);
        assert_eq!(s.order, vec![0, 1, 2, 3]);
        assert_eq!(s.first_ball_containing(0.0), Some(0));
        assert_eq!(s.first_ball_containing(1.0), Some(1));
        assert_eq!(s.first_ball_containing(1.5), Some(1));
        assert_eq!(s.first_ball_containing(2.0), Some(2));
        assert_eq!(s.first_ball_containing(3.0), None);
        assert_eq!(s.points_below(1.0), 1);
        assert_eq!(s.points_below(1.01), 3);
    }
}
