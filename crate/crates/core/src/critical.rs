//! Critical points, critical values and the arguments a seed must avoid.

use std::f64::consts::PI;

use crate::poly::{quotient, Polynomial};
use crate::solver::{find_all_roots, SeedMode, SolveError, SolveOptions};
use crate::Complex;

/// Critical values closer than this (in argument) are reported once.
pub const ARG_MERGE_TOL: f64 = 1e-9;
/// Critical values with `|v| <= ZERO_VALUE_TOL * scale` count as roots.
pub const ZERO_VALUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData {
    /// Distinct zeros of `P'`.
    pub points: Vec<Complex>,
    /// `P(points[k])`.
    pub values: Vec<Complex>,
    /// Arguments of the non-zero critical values, sorted in `[0, 2pi)`.
    pub forbidden_args: Vec<f64>,
    /// Some critical value vanishes: `P` has a multiple root at a critical point.
    pub root_at_critical: bool,
}

impl CriticalData {
    /// Index of the critical point with the smallest `|P|`, if it is classified as a root.
    pub fn root_index(&self) -> Option<usize> {
        if !self.root_at_critical {
            return None;
        }
        (0..self.values.len())
            .min_by(|&a, &b| self.values[a].norm().total_cmp(&self.values[b].norm()))
    }
}

/// Maps an angle into `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Distance on the circle, in `[0, pi]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(2.0 * PI - d)
}

/// Zeros of `P'`, without multiplicity.
///
/// `P'` is solved with ladder seeding, which needs no critical data of its own, so the
/// recursion bottoms out after one level. Degree 2 is closed form.
pub fn critical_points(p: &Polynomial) -> Result<Vec<Complex>, SolveError> {
    critical_points_with(p, &SolveOptions::default())
}

pub fn critical_points_with(
    p: &Polynomial,
    opts: &SolveOptions,
) -> Result<Vec<Complex>, SolveError> {
    let dp = match p.derivative() {
        Ok(dp) if dp.degree() >= 1 => dp,
        Ok(_) => return Ok(Vec::new()),
        Err(e) => return Err(SolveError::Poly(e)),
    };
    if dp.degree() == 1 {
        return Ok(vec![quotient(-dp.coeffs()[0], dp.coeffs()[1])]);
    }
    let ladder = SolveOptions {
        seed_mode: SeedMode::Ladder,
        ..opts.clone()
    };
    let roots = find_all_roots(&dp, &ladder)?;
    Ok(roots.roots.iter().map(|r| r.value).collect())
}

pub fn critical_data(p: &Polynomial) -> Result<CriticalData, SolveError> {
    critical_data_with(p, &SolveOptions::default())
}

pub fn critical_data_with(p: &Polynomial, opts: &SolveOptions) -> Result<CriticalData, SolveError> {
    let points = critical_points_with(p, opts)?;
    Ok(classify(p, points))
}

/// Builds [`CriticalData`] from already computed critical points.
pub fn classify(p: &Polynomial, points: Vec<Complex>) -> CriticalData {
    let values: Vec<Complex> = points.iter().map(|&c| p.eval(c)).collect();
    let zero_tol = ZERO_VALUE_TOL * p.scale();
    let root_at_critical = values.iter().any(|v| v.norm() <= zero_tol);

    let mut args: Vec<f64> = values
        .iter()
        .filter(|v| v.norm() > zero_tol)
        .map(|v| normalize_angle(v.arg()))
        .collect();
    args.sort_by(f64::total_cmp);
    let mut forbidden_args: Vec<f64> = Vec::with_capacity(args.len());
    for a in args {
        match forbidden_args.last() {
            Some(&last) if a - last <= ARG_MERGE_TOL => {}
            _ => forbidden_args.push(a),
        }
    }
    // merge across the 0 / 2pi seam
    if forbidden_args.len() > 1 {
        let first = forbidden_args[0];
        let last = forbidden_args[forbidden_args.len() - 1];
        if first + 2.0 * PI - last <= ARG_MERGE_TOL {
            forbidden_args.pop();
        }
    }

    CriticalData {
        points,
        values,
        forbidden_args,
        root_at_critical,
    }
}

/// Circular distance from `theta` to the nearest forbidden argument; `pi` if there are none.
pub fn arg_distance(theta: f64, data: &CriticalData) -> f64 {
    data.forbidden_args
        .iter()
        .map(|&a| circular_distance(theta, a))
        .fold(PI, f64::min)
}
