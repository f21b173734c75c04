//! The line-plus-arc and cross examples: discontinuity of the maximal
//! function at the origin.

use std::f64::consts::{FRAC_PI_2, PI};

use super::checks::axis_slice;
use super::{gate, Check, ExperimentConfig, ExperimentId, Level, Report, Row, EXAMPLE_TOL};
use crate::error::{Error, Result};
use crate::gallery::{arc_integral, GalleryKind};
use crate::maxop::{frac_maximal, frac_maximal_noncentered, frac_maximal_probe, MaxField};

/// Points left of the origin where the line-plus-arc maximal function is probed.
pub const LEFT_PROBES: [f64; 7] = [-0.1, -0.05, -0.02, -0.01, -0.005, -0.002, -0.001];
/// Heights on the upper arm of the cross where the noncentered function is read.
pub const UPPER_PROBES: [f64; 4] = [0.01, 0.02, 0.05, 0.1];
/// Height used for the reported gap.
pub const GAP_HEIGHT: f64 = 0.05;
/// Smallest jump or gap that counts as a discontinuity.
pub const MIN_JUMP: f64 = 0.02;
pub const MIN_GAP: f64 = 0.1;

/// Upper bound `3π/(20+5π)` for `M u(0)` on the line-plus-arc space.
pub fn origin_upper_bound() -> f64 {
    3.0 * PI / (20.0 + 5.0 * PI)
}

/// Lower bound `π/(8+π)` for the left limit at the origin.
pub fn left_limit_bound() -> f64 {
    PI / (8.0 + PI)
}

/// `M u(0)` for the linear arc interpolant: the arc integral over `2 + π/2`.
pub fn interpolant_origin_value() -> f64 {
    arc_integral() / (2.0 + FRAC_PI_2)
}

pub(super) fn run_example(config: &ExperimentConfig) -> Result<Report> {
    let expected = match config.experiment {
        ExperimentId::Ex51 => GalleryKind::Buckley,
        ExperimentId::Ex51w => GalleryKind::BuckleyWeighted,
        _ => GalleryKind::Cross,
    };
    if config.space != expected {
        return Err(Error::WrongSpaceKind { expected: expected.name().into(), found: config.space.name().into() });
    }
    let report = match config.experiment {
        ExperimentId::Ex52 => cross(config)?,
        _ => line_plus_arc(config)?,
    };
    Ok(report.finish())
}

fn line_slice(level: &Level, m: &MaxField, half_width: f64) -> Vec<(f64, f64)> {
    axis_slice(level, &m.values).into_iter().filter(|&(x, _)| x.abs() <= half_width).collect()
}

fn line_plus_arc(config: &ExperimentConfig) -> Result<Report> {
    let id = config.experiment;
    let weighted = id == ExperimentId::Ex51w;
    let alpha = config.alpha.unwrap_or(if weighted { 0.5 } else { 0.0 });
    let mut report = Report::new(id);
    if weighted {
        gate(alpha >= 0.0 && alpha.is_finite(), id, format!("α ≥ 0 (α = {alpha})"))?;
        if alpha > 1.0 {
            report.note(format!("If α>1, it follows that M_α u ≡ ∞ (α = {alpha}); not computed"));
            for &h in &config.ladder {
                let level = config.level(h)?;
                report.rows.push(Row::new("infinite", &level, f64::INFINITY, Check::Info));
            }
            return Ok(report);
        }
    } else {
        gate(alpha == 0.0, id, format!("the unweighted example concerns M = M_0 (α = {alpha})"))?;
    }
    let interp = interpolant_origin_value();
    report.note(format!("interpolant value at the origin = {interp}"));
    for &h in &config.ladder {
        let level = config.level(h)?;
        let m = frac_maximal(&level.space, &level.u, alpha)?;
        let origin = level.space.locate(&[0.0, 0.0], h * 1e-6)?;
        let (v0, r0, t0) = (m.values[origin], m.argmax_radius[origin], m.truncated[origin]);
        let ball = format!("ball:{origin};{r0}");
        if weighted {
            report.rows.push(
                Row::new("origin", &level, v0, Check::exact((v0 - interp).abs() <= EXAMPLE_TOL))
                    .constant(interp)
                    .witness(ball.clone())
                    .truncated(t0 as usize),
            );
            let ok = (r0 - 1.0).abs() <= 5.0 * h.max(0.01) && !t0;
            report.rows.push(Row::new("origin_radius", &level, r0, Check::exact(ok)).constant(1.0).witness(ball));
        } else {
            let bound = origin_upper_bound();
            report.rows.push(
                Row::new("origin", &level, v0, Check::exact(v0 <= bound + EXAMPLE_TOL))
                    .constant(bound)
                    .witness(ball)
                    .truncated(t0 as usize),
            );
            report.rows.push(Row::new("origin_interpolant", &level, v0, Check::Info).constant(interp));
        }
        let mut left = 0.0;
        for (k, &x) in LEFT_PROBES.iter().enumerate() {
            let probe = frac_maximal_probe(&level.space, &level.u, alpha, &[x, 0.0])?;
            let last = k + 1 == LEFT_PROBES.len();
            let bound = left_limit_bound();
            let check = if last { Check::exact(probe.value >= bound - EXAMPLE_TOL) } else { Check::Info };
            let mut row = Row::new(&format!("left:{x}"), &level, probe.value, check)
                .witness(format!("radius:{}", probe.radius))
                .truncated(probe.truncated as usize);
            if last {
                row = row.constant(bound);
                left = probe.value;
            }
            report.rows.push(row);
        }
        let jump = left - v0;
        report.rows.push(Row::new("jump", &level, jump, Check::exact(jump >= MIN_JUMP)).constant(MIN_JUMP));
        report.slice = line_slice(&level, &m, 0.5);
    }
    report.slice_label = "M_a u along the line".into();
    Ok(report)
}

fn cross(config: &ExperimentConfig) -> Result<Report> {
    let id = config.experiment;
    let alpha = config.alpha.unwrap_or(0.5);
    gate((0.0..=1.0).contains(&alpha), id, format!("0≤α≤1 (α = {alpha})"))?;
    let mut report = Report::new(id);
    for &h in &config.ladder {
        let level = config.level(h)?;
        let m = frac_maximal_noncentered(&level.space, &level.u, alpha)?;
        let origin = level.space.locate(&[0.0, 0.0], h * 1e-6)?;
        let v0 = m.values[origin];
        let ball = |i: usize| format!("ball:{};{}", m.argmax_center[i], m.argmax_radius[i]);
        let third = 1.0 / 3.0;
        report.rows.push(
            Row::new("origin", &level, v0, Check::exact(v0 <= third + EXAMPLE_TOL))
                .constant(third)
                .witness(ball(origin))
                .truncated(m.truncated[origin] as usize),
        );
        let mut gap = None;
        for &t in &UPPER_PROBES {
            let Ok(y) = level.space.locate(&[0.0, t], h / 2.0) else {
                report.note(format!("no sample within h/2 of (0, {t}) at h = {h}"));
                continue;
            };
            let bound = 0.5 - t;
            let v = m.values[y];
            report.rows.push(
                Row::new(&format!("upper:{t}"), &level, v, Check::exact(v >= bound - EXAMPLE_TOL))
                    .constant(bound)
                    .witness(ball(y))
                    .truncated(m.truncated[y] as usize),
            );
            if t == GAP_HEIGHT {
                gap = Some(v - v0);
            }
        }
        match gap {
            Some(g) => report.rows.push(Row::new("gap", &level, g, Check::exact(g >= MIN_GAP)).constant(MIN_GAP)),
            None => report.note(format!("gap not measured at h = {h}")),
        }
        let mut slice: Vec<(f64, f64)> = (0..level.space.len())
            .filter_map(|i| {
                let c = level.space.coords(i)?;
                (c[0] == 0.0 && (-0.5..=1.0).contains(&c[1])).then(|| (c[1], m.values[i]))
            })
            .collect();
        slice.sort_by(|a, b| a.0.total_cmp(&b.0));
        report.slice = slice;
    }
    report.slice_label = "noncentered M_a u along the vertical arm".into();
    Ok(report)
}
