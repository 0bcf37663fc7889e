//! Iso-angle curves: flow lines through the points of a reference level line where
//! `arg P` takes a prescribed value.

use std::f64::consts::PI;

use super::contour::{level_lines, LevelLine};
use super::{sample_grid, FigureSpec, VizError, Window};
use crate::flow::{trace_backward, trace_flow, TraceOptions};
use crate::poly::Polynomial;
use crate::seed::SeedPoint;
use crate::Complex;

/// Bisection steps along a contour segment; far below the grid spacing.
const BISECTION_STEPS: usize = 60;
/// Finer time steps than root finding needs, so curves render smoothly.
const CURVE_DT_MAX: f64 = 0.05;
/// Backward tracing stops after this much flow time even inside the window.
const BACKWARD_TIME_LIMIT: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct IsoCurve {
    /// The prescribed value of `arg P` along the curve.
    pub arg: f64,
    /// Flow samples inside the window, from the window edge (or a critical point)
    /// towards a root.
    pub points: Vec<Complex>,
}

/// `arg P(z) - a` wrapped into `(-pi, pi]`.
fn arg_offset(p: &Polynomial, z: Complex, a: f64) -> f64 {
    let d = (p.eval(z).arg() - a).rem_euclid(2.0 * PI);
    if d > PI {
        d - 2.0 * PI
    } else {
        d
    }
}

/// Points on `line` where `arg P` crosses `a`, by bisection on each segment whose ends
/// straddle `a`. Crossings of the opposite ray `a + pi` are skipped.
fn crossings(p: &Polynomial, line: &LevelLine, a: f64) -> Vec<Complex> {
    let mut out = Vec::new();
    for poly in &line.polylines {
        for pair in poly.points.windows(2) {
            let (mut lo, mut hi) = (pair[0], pair[1]);
            let (mut f_lo, f_hi) = (arg_offset(p, lo, a), arg_offset(p, hi, a));
            if f_lo == 0.0 {
                out.push(lo);
                continue;
            }
            // an exact hit on the far end is picked up by the next segment
            if f_hi == 0.0 {
                continue;
            }
            if f_lo.signum() == f_hi.signum() || (f_lo - f_hi).abs() > PI {
                continue;
            }
            for _ in 0..BISECTION_STEPS {
                let mid = (lo + hi) * 0.5;
                let f_mid = arg_offset(p, mid, a);
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            out.push((lo + hi) * 0.5);
        }
    }
    out
}

/// Splits a sample sequence into the runs that stay inside the window.
fn clip(points: Vec<Complex>, w: &Window) -> Vec<Vec<Complex>> {
    let mut runs = Vec::new();
    let mut run = Vec::new();
    for z in points {
        if w.contains(z) {
            run.push(z);
        } else if !run.is_empty() {
            runs.push(std::mem::take(&mut run));
        }
    }
    if !run.is_empty() {
        runs.push(run);
    }
    runs.into_iter().filter(|r| r.len() >= 2).collect()
}

/// The reference level: the largest requested level whose line meets the window.
fn reference_level(p: &Polynomial, spec: &FigureSpec, w: &Window) -> Option<LevelLine> {
    let grid = sample_grid(p, w);
    level_lines(&grid, spec.level_exponents.clone().rev())
        .into_iter()
        .find(|l| !l.is_empty())
}

/// For each argument in `spec.iso_args`, the flow lines through the points of the
/// reference level line where `arg P` equals that argument: traced forward to a root and
/// backward to the window edge, clipped to the window. Curves running into a critical
/// point end there.
pub fn iso_angle_curves(
    p: &Polynomial,
    spec: &FigureSpec,
    w: &Window,
) -> Result<Vec<IsoCurve>, VizError> {
    spec.validate()?;
    Ok(match reference_level(p, spec, w) {
        Some(reference) => curves_through(p, &reference, &spec.iso_args, w),
        None => Vec::new(),
    })
}

pub(crate) fn curves_through(
    p: &Polynomial,
    reference: &LevelLine,
    args: &[f64],
    w: &Window,
) -> Vec<IsoCurve> {
    let opts = TraceOptions {
        dt_initial: CURVE_DT_MAX,
        dt_max: CURVE_DT_MAX,
        ..TraceOptions::default()
    };
    let mut curves = Vec::new();
    for &a in args {
        for z0 in crossings(p, reference, a) {
            let backward = trace_backward(p, z0, &opts, BACKWARD_TIME_LIMIT, |z| w.contains(z));
            let forward = trace_flow(p, SeedPoint::explicit(p, z0), &opts);
            let mut points: Vec<Complex> = backward.iter().rev().map(|s| s.z).collect();
            points.extend(forward.states.iter().skip(1).map(|s| s.z));
            for run in clip(points, w) {
                curves.push(IsoCurve {
                    arg: a,
                    points: run,
                });
            }
        }
    }
    curves
}
