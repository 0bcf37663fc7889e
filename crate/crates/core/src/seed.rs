//! Starting points `z0 = r e^{i theta}` far outside the root disk.
//!
//! For large `r`, `arg P(z0)` is close to `d theta + arg alpha`. Certified seeds choose
//! `theta` so that this predicted argument sits in the middle of a gap between the
//! arguments of the critical values; a flow started there cannot run into a critical
//! point, because `arg P` is constant along the flow. Ladder seeds need no critical data:
//! they walk through predicted arguments that are pairwise distinct, so only finitely
//! many of them can be bad.

use std::f64::consts::PI;

use thiserror::Error;

use crate::critical::{arg_distance, circular_distance, normalize_angle, CriticalData};
use crate::eval::PolyEval;
use crate::poly::Polynomial;
use crate::rng::XorShift64Star;
use crate::Complex;

pub const MAX_DOUBLINGS: usize = 8;
pub const DEFAULT_RADIUS_FACTOR: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeedError {
    #[error("no radius up to {radius:e} certified the seed argument (attempt {attempt})")]
    Exhausted { attempt: usize, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedOptions {
    /// Required margin to the forbidden arguments; `None` picks `pi / (4 max(8, d))`.
    pub delta_arg: Option<f64>,
    /// Initial radius, in multiples of the Cauchy bound.
    pub radius_factor: f64,
}

impl Default for SeedOptions {
    fn default() -> Self {
        SeedOptions {
            delta_arg: None,
            radius_factor: DEFAULT_RADIUS_FACTOR,
        }
    }
}

impl SeedOptions {
    pub fn delta_arg(&self, degree: usize) -> f64 {
        self.delta_arg.unwrap_or_else(|| default_delta_arg(degree))
    }

    /// Allowed disagreement between the predicted and the actual argument.
    pub fn delta_pred(&self, degree: usize) -> f64 {
        self.delta_arg(degree) / 4.0
    }
}

pub fn default_delta_arg(degree: usize) -> f64 {
    PI / (4.0 * degree.max(8) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedPoint {
    pub z0: Complex,
    pub theta: f64,
    pub radius: f64,
    /// `d theta + arg alpha`, in `[0, 2pi)`.
    pub predicted_arg: f64,
    /// `arg P(z0)`, in `[0, 2pi)`.
    pub actual_arg: f64,
    /// Distance of `actual_arg` to the forbidden arguments; `pi` for uncertified seeds.
    pub margin: f64,
    pub certified: bool,
}

impl SeedPoint {
    /// A user-supplied starting point, recorded without any certificate.
    pub fn explicit<P: PolyEval + ?Sized>(p: &P, z0: Complex) -> Self {
        let actual_arg = normalize_angle(p.eval(z0).arg());
        SeedPoint {
            z0,
            theta: normalize_angle(z0.arg()),
            radius: z0.norm(),
            predicted_arg: actual_arg,
            actual_arg,
            margin: PI,
            certified: false,
        }
    }

    fn uncertified<P: PolyEval + ?Sized>(p: &P, theta: f64, radius: f64) -> Self {
        let (d, arg_alpha) = p.leading_data();
        let z0 = Complex::from_polar(radius, theta);
        SeedPoint {
            z0,
            theta,
            radius,
            predicted_arg: normalize_angle(d as f64 * theta + arg_alpha),
            actual_arg: normalize_angle(p.eval(z0).arg()),
            margin: PI,
            certified: false,
        }
    }
}

/// Candidate angles: for each gap between consecutive forbidden arguments (widest gap
/// first), the `d` angles whose predicted argument is the gap midpoint.
pub fn candidate_angles(p: &Polynomial, data: &CriticalData) -> Vec<f64> {
    let (d, arg_alpha) = p.leading_data();
    let forbidden = &data.forbidden_args;
    let mut gaps: Vec<(f64, f64)> = if forbidden.is_empty() {
        vec![(2.0 * PI, normalize_angle(arg_alpha))]
    } else {
        (0..forbidden.len())
            .map(|i| {
                let lo = forbidden[i];
                let hi = if i + 1 < forbidden.len() {
                    forbidden[i + 1]
                } else {
                    forbidden[0] + 2.0 * PI
                };
                (hi - lo, normalize_angle(0.5 * (lo + hi)))
            })
            .collect()
    };
    // widest first; widths equal up to rounding fall back to ascending midpoint
    gaps.sort_by(|a, b| {
        if (a.0 - b.0).abs() <= 1e-9 {
            a.1.total_cmp(&b.1)
        } else {
            b.0.total_cmp(&a.0)
        }
    });

    let mut out = Vec::with_capacity(gaps.len() * d);
    for &(_, mid) in &gaps {
        let base = normalize_angle(mid - arg_alpha);
        for j in 0..d {
            out.push((base + 2.0 * PI * j as f64) / d as f64);
        }
    }
    out
}

/// Certified seed for `attempt`: a gap-midpoint angle, pushed outwards until the actual
/// argument agrees with the predicted one and clears the forbidden set.
pub fn select_seed(
    p: &Polynomial,
    data: &CriticalData,
    attempt: usize,
    opts: &SeedOptions,
) -> Result<SeedPoint, SeedError> {
    let d = p.degree();
    let candidates = candidate_angles(p, data);
    let theta = candidates[attempt % candidates.len()];
    let (_, arg_alpha) = p.leading_data();
    let predicted_arg = normalize_angle(d as f64 * theta + arg_alpha);
    let delta_arg = opts.delta_arg(d);
    let delta_pred = opts.delta_pred(d);

    let mut radius = opts.radius_factor * p.cauchy_bound();
    for _ in 0..=MAX_DOUBLINGS {
        let z0 = Complex::from_polar(radius, theta);
        let value = p.eval(z0);
        let norm = value.norm();
        if norm > 0.0 && norm.is_finite() {
            let actual_arg = normalize_angle(value.arg());
            let margin = arg_distance(actual_arg, data);
            if circular_distance(actual_arg, predicted_arg) <= delta_pred && margin >= delta_arg {
                return Ok(SeedPoint {
                    z0,
                    theta,
                    radius,
                    predicted_arg,
                    actual_arg,
                    margin,
                    certified: true,
                });
            }
        }
        radius *= 2.0;
    }
    Err(SeedError::Exhausted {
        attempt,
        radius: radius / 2.0,
    })
}

/// Offset of the ladder's predicted argument for `attempt`, before adding `arg alpha`.
///
/// Attempts `0..=2d` use `pi (2k + 1) / (2d + 1)`; later rounds shift the whole ladder
/// by a van der Corput fraction of one rung so no offset repeats.
pub fn ladder_offset(degree: usize, attempt: usize) -> f64 {
    let rungs = 2 * degree + 1;
    let k = attempt % rungs;
    let round = attempt / rungs;
    let step = 2.0 * PI / rungs as f64;
    PI * (2 * k + 1) as f64 / rungs as f64 + step * van_der_corput(round)
}

fn van_der_corput(mut n: usize) -> f64 {
    let mut out = 0.0;
    let mut base = 0.5;
    while n > 0 {
        if n & 1 == 1 {
            out += base;
        }
        base *= 0.5;
        n >>= 1;
    }
    out
}

/// Uncertified seed from the angle ladder at radius `radius_factor * cauchy_bound`.
pub fn seed_ladder<P: PolyEval + ?Sized>(p: &P, attempt: usize, opts: &SeedOptions) -> SeedPoint {
    let d = p.degree();
    let theta = ladder_offset(d, attempt) / d as f64;
    SeedPoint::uncertified(p, theta, opts.radius_factor * p.cauchy_bound())
}

/// Uncertified seed with a pseudo-random angle, reproducible from `(rng_seed, attempt)`.
pub fn seed_random<P: PolyEval + ?Sized>(
    p: &P,
    rng_seed: u64,
    attempt: usize,
    opts: &SeedOptions,
) -> SeedPoint {
    let mut rng =
        XorShift64Star::new(rng_seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let theta = 2.0 * PI * rng.uniform();
    SeedPoint::uncertified(p, theta, opts.radius_factor * p.cauchy_bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::critical_data;

    fn z2m1() -> Polynomial {
        Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap()
    }

    fn cubic() -> Polynomial {
        Polynomial::from_real(&[0.0, -3.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn certified_seed_for_z2_minus_1() {
        let p = z2m1();
        let data = critical_data(&p).unwrap();
        let cands = candidate_angles(&p, &data);
        assert_eq!(cands, vec![0.0, PI]);
        let seed = select_seed(&p, &data, 0, &SeedOptions::default()).unwrap();
        assert_eq!(seed.theta, 0.0);
        assert_eq!(seed.radius, 4.0);
        assert_eq!(seed.z0, Complex::new(4.0, 0.0));
        assert_eq!(p.eval(seed.z0), Complex::new(15.0, 0.0));
        assert_eq!(seed.actual_arg, 0.0);
        assert_eq!(seed.margin, PI);
        assert!(seed.certified);
    }

    #[test]
    fn certified_seed_without_critical_points() {
        let p = Polynomial::from_real(&[-5.0, 1.0]).unwrap();
        let data = critical_data(&p).unwrap();
        for attempt in 0..4 {
            let seed = select_seed(&p, &data, attempt, &SeedOptions::default()).unwrap();
            assert_eq!(seed.theta, 0.0);
            assert_eq!(seed.margin, PI);
        }
    }

    #[test]
    fn certified_seed_for_cubic() {
        let p = cubic();
        let data = critical_data(&p).unwrap();
        let opts = SeedOptions::default();
        let seed = select_seed(&p, &data, 0, &opts).unwrap();
        assert!((seed.predicted_arg - PI / 2.0).abs() < 1e-12);
        assert!((seed.theta - PI / 6.0).abs() < 1e-12);
        assert!(seed.radius >= 2.0 * p.cauchy_bound());
        assert!(seed.margin >= opts.delta_arg(3));
        // the argument converges to the prediction as the radius grows
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let z = Complex::from_polar(8.0 * 4f64.powi(k), seed.theta);
            let err = circular_distance(normalize_angle(p.eval(z).arg()), PI / 2.0);
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn seed_invariants_random() {
        let mut rng = XorShift64Star::new(4242);
        for degree in 2..12 {
            let p = rng.unit_disk_polynomial(degree, false);
            let data = critical_data(&p).unwrap();
            let (d, arg_alpha) = p.leading_data();
            let opts = SeedOptions::default();
            for attempt in 0..3 {
                let Ok(seed) = select_seed(&p, &data, attempt, &opts) else {
                    continue;
                };
                assert_eq!(
                    seed.predicted_arg,
                    normalize_angle(d as f64 * seed.theta + arg_alpha)
                );
                assert!(
                    (seed.z0 - Complex::from_polar(seed.radius, seed.theta)).norm()
                        <= 1e-12 * seed.radius
                );
                assert!(p.eval(seed.z0).norm() > 0.0);
                assert!(seed.z0.norm() >= 2.0 * p.cauchy_bound() * (1.0 - 1e-15));
                assert!(
                    circular_distance(seed.actual_arg, seed.predicted_arg) <= opts.delta_pred(d)
                );
                for &a in &data.forbidden_args {
                    assert!(
                        circular_distance(seed.actual_arg, a)
                            >= opts.delta_arg(d) - opts.delta_pred(d)
                    );
                }
            }
        }
    }

    #[test]
    fn exhaustion_when_margin_unreachable() {
        let p = cubic();
        let data = critical_data(&p).unwrap();
        let opts = SeedOptions {
            delta_arg: Some(PI),
            ..SeedOptions::default()
        };
        assert!(matches!(
            select_seed(&p, &data, 0, &opts),
            Err(SeedError::Exhausted { .. })
        ));
    }

    #[test]
    fn ladder_examples() {
        let linear = Polynomial::from_real(&[-5.0, 1.0]).unwrap();
        let seed = seed_ladder(&linear, 0, &SeedOptions::default());
        assert!((seed.theta - PI / 3.0).abs() < 1e-15);
        assert_eq!(seed.radius, 2.0 * linear.cauchy_bound());

        let p = z2m1();
        let seed = seed_ladder(&p, 0, &SeedOptions::default());
        assert!((seed.theta - PI / 10.0).abs() < 1e-15);
        assert!((seed.predicted_arg - PI / 5.0).abs() < 1e-15);
        assert_eq!(seed.margin, PI);
        assert!(!seed.certified);
    }

    #[test]
    fn ladder_predicted_args_are_distinct() {
        // offset / pi = (2k+1)/(2d+1): distinct odd numerators below 2(2d+1)
        for d in 1..40usize {
            let rungs = 2 * d + 1;
            let mut numerators: Vec<usize> =
                (0..rungs).map(|k| (2 * k + 1) % (2 * rungs)).collect();
            numerators.sort_unstable();
            numerators.dedup();
            assert_eq!(numerators.len(), rungs);

            let args: Vec<f64> = (0..rungs)
                .map(|a| normalize_angle(ladder_offset(d, a)))
                .collect();
            for i in 0..rungs {
                for j in 0..i {
                    assert!(circular_distance(args[i], args[j]) > 1e-9);
                }
            }
        }
        // later rounds never repeat an earlier offset
        let all: Vec<f64> = (0..5 * 7)
            .map(|a| normalize_angle(ladder_offset(3, a)))
            .collect();
        for i in 0..all.len() {
            for j in 0..i {
                assert!(circular_distance(all[i], all[j]) > 1e-9);
            }
        }
    }

    #[test]
    fn random_seeds_are_reproducible() {
        let p = cubic();
        let a = seed_random(&p, 77, 3, &SeedOptions::default());
        let b = seed_random(&p, 77, 3, &SeedOptions::default());
        assert_eq!(a, b);
        assert_ne!(
            a.theta,
            seed_random(&p, 77, 4, &SeedOptions::default()).theta
        );
    }
}
