//! Newton-flow tracking.
//!
//! Along the flow `z' = -P(z)/P'(z)` the value of the polynomial decays exactly as
//! `P(z(t)) = e^{-t} P(z0)`. The tracker uses that identity as its corrector equation:
//! an Euler step along the vector field predicts the next point, and Newton's method on
//! `P(z) = e^{-(t+dt)} P(z0)` pulls it back onto the value ray. Every accepted state
//! therefore satisfies the decay law and keeps `arg P` fixed, up to the corrector
//! tolerance.

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::eval::PolyEval;
use crate::poly::quotient;
use crate::seed::SeedPoint;
use crate::Complex;

/// Tolerances and the step-size policy of the tracker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Relative accuracy of `P(z)` against the target value at accepted states.
    pub tol_corrector: f64,
    /// `|P(z)| <= tol_root * scale` counts as a root.
    pub tol_root: f64,
    /// `|P'(z)| <= tol_crit * scale` counts as a critical point.
    pub tol_crit: f64,
    pub dt_initial: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Consecutive accepted steps before `dt` doubles.
    pub grow_after: usize,
    pub max_corrector_iterations: usize,
    /// Step underflow is read as an approach to a critical point when
    /// `|P'|^2 <= escape_ratio * |P| |P''|`.
    pub escape_ratio: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            tol_corrector: 1e-10,
            tol_root: 1e-12,
            tol_crit: 1e-12,
            dt_initial: 0.1,
            dt_min: 1e-8,
            dt_max: 1.0,
            grow_after: 3,
            max_corrector_iterations: 10,
            escape_ratio: 1e-4,
            max_steps: 200_000,
        }
    }
}

/// A point on the flow together with the value the decay law prescribes for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationState {
    pub t: f64,
    pub z: Complex,
    /// `P(z0)`.
    pub w0: Complex,
    /// `e^{-t} P(z0)`.
    pub target: Complex,
}

impl ContinuationState {
    pub fn initial<P: PolyEval + ?Sized>(p: &P, z0: Complex) -> Self {
        let w0 = p.eval(z0);
        ContinuationState {
            t: 0.0,
            z: z0,
            w0,
            target: w0,
        }
    }

    pub fn target_at(&self, t: f64) -> Complex {
        self.w0 * (-t).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// Corrector did not reach the tolerance within its iteration budget.
    NoConvergence,
    /// `|P'|` fell below `tol_crit * scale` during correction.
    DerivativeUnderflow,
    /// The corrector drifted further from the prediction than the prediction moved.
    PathJump,
    NonFinite,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("step rejected: {reason:?}")]
pub struct StepRejected {
    pub reason: RejectReason,
}

fn reject(reason: RejectReason) -> StepRejected {
    StepRejected { reason }
}

/// One predictor-corrector step forward in time by `dt > 0`.
pub fn flow_step<P: PolyEval + ?Sized>(
    p: &P,
    s: &ContinuationState,
    dt: f64,
    opts: &TraceOptions,
) -> Result<ContinuationState, StepRejected> {
    debug_assert!(dt > 0.0);
    directed_step(p, s, dt, opts)
}

/// Signed step: negative `dt` runs the flow backwards (towards larger `|P|`).
fn directed_step<P: PolyEval + ?Sized>(
    p: &P,
    s: &ContinuationState,
    dt: f64,
    opts: &TraceOptions,
) -> Result<ContinuationState, StepRejected> {
    let crit = opts.tol_crit * p.scale();
    let (v, dv) = p.eval_with_derivative(s.z);
    if dv.norm() <= crit {
        return Err(reject(RejectReason::DerivativeUnderflow));
    }
    let predicted = s.z - quotient(v, dv) * dt;
    if !predicted.re.is_finite() || !predicted.im.is_finite() {
        return Err(reject(RejectReason::NonFinite));
    }
    let move_len = (predicted - s.z).norm();

    let t = s.t + dt;
    let target = s.target_at(t);
    let tol = opts.tol_corrector * target.norm();
    let mut z = predicted;
    for _ in 0..=opts.max_corrector_iterations {
        let (v, dv) = p.eval_with_derivative(z);
        let residual = v - target;
        if residual.norm() <= tol {
            if (z - predicted).norm() > 0.5 * move_len {
                return Err(reject(RejectReason::PathJump));
            }
            return Ok(ContinuationState {
                t,
                z,
                w0: s.w0,
                target,
            });
        }
        if dv.norm() <= crit {
            return Err(reject(RejectReason::DerivativeUnderflow));
        }
        z -= quotient(residual, dv);
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(reject(RejectReason::NonFinite));
        }
    }
    Err(reject(RejectReason::NoConvergence))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallReason {
    /// Flow time passed `ln(|P(z0)| / (tol_root scale)) + 30`.
    TimeLimit,
    /// Step size underflowed away from any critical point and no root could be polished.
    StepUnderflow,
    StepLimit,
    /// `P(z0)` is not finite.
    NonFiniteStart,
}

impl fmt::Display for StallReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StallReason::TimeLimit => "time-limit",
            StallReason::StepUnderflow => "step-underflow",
            StallReason::StepLimit => "step-limit",
            StallReason::NonFiniteStart => "non-finite-start",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceOutcome {
    Converged {
        root: Complex,
        t_end: f64,
        multiplicity: usize,
        residual: f64,
    },
    /// The orbit ran into a critical point at finite time `t_estimate`.
    EscapeToCritical {
        point_estimate: Complex,
        t_estimate: f64,
    },
    Stalled {
        reason: StallReason,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub seed: SeedPoint,
    /// Accepted states, `t` strictly increasing.
    pub states: Vec<ContinuationState>,
    pub outcome: TraceOutcome,
    /// `|P(z0)|`: the orbit stays in `{ y : |P(y)| <= sup_value }`.
    pub sup_value: f64,
}

impl FlowTrace {
    pub fn is_converged(&self) -> bool {
        matches!(self.outcome, TraceOutcome::Converged { .. })
    }

    /// Tab-separated dump: `t, Re z, Im z, |P(z)|, arg P(z)` per state, then `#outcome`.
    pub fn write_dump<P: PolyEval + ?Sized, W: Write>(&self, p: &P, out: &mut W) -> io::Result<()> {
        for s in &self.states {
            let v = p.eval(s.z);
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                s.t,
                s.z.re,
                s.z.im,
                v.norm(),
                v.arg()
            )?;
        }
        writeln!(out, "{}", self.outcome_line())
    }

    pub fn outcome_line(&self) -> String {
        match self.outcome {
            TraceOutcome::Converged {
                root,
                t_end,
                multiplicity,
                residual,
            } => format!(
                "#outcome\tConverged\t{}\t{}\t{}\t{}\t{}",
                root.re, root.im, t_end, multiplicity, residual
            ),
            TraceOutcome::EscapeToCritical {
                point_estimate,
                t_estimate,
            } => format!(
                "#outcome\tEscapeToCritical\t{}\t{}\t{}",
                point_estimate.re, point_estimate.im, t_estimate
            ),
            TraceOutcome::Stalled { reason } => format!("#outcome\tStalled\t{reason}"),
        }
    }
}

/// Near a root the relative corrector tolerance drops below the evaluation noise; from
/// there Newton's method finishes the job instead of the flow.
const ENDGAME_NOISE_FACTOR: f64 = 16.0;

fn root_accepted<P: PolyEval + ?Sized>(
    p: &P,
    polished: &PolishedRoot,
    opts: &TraceOptions,
) -> bool {
    let tol = (opts.tol_root * p.scale()).max(32.0 * p.noise_floor(polished.root));
    polished.residual <= tol
}

/// Follows the Newton flow from `seed` until it reaches a root, runs into a critical
/// point, or stalls.
pub fn trace_flow<P: PolyEval + ?Sized>(p: &P, seed: SeedPoint, opts: &TraceOptions) -> FlowTrace {
    let scale = p.scale();
    let root_tol = opts.tol_root * scale;
    let start = ContinuationState::initial(p, seed.z0);
    let sup_value = start.w0.norm();
    let mut trace = FlowTrace {
        seed,
        states: vec![start],
        outcome: TraceOutcome::Stalled {
            reason: StallReason::StepLimit,
        },
        sup_value,
    };
    if !sup_value.is_finite() {
        trace.outcome = TraceOutcome::Stalled {
            reason: StallReason::NonFiniteStart,
        };
        return trace;
    }
    if sup_value == 0.0 {
        trace.outcome = TraceOutcome::Converged {
            root: seed.z0,
            t_end: 0.0,
            multiplicity: 1,
            residual: 0.0,
        };
        return trace;
    }

    let t_max = (sup_value / root_tol).ln().max(0.0) + 30.0;
    let mut dt = opts.dt_initial;
    let mut streak = 0;
    let mut last_endgame: Option<f64> = None;

    for _ in 0..opts.max_steps {
        let s = *trace.states.last().expect("initial state");
        let value = p.eval(s.z).norm();

        let in_endgame =
            opts.tol_corrector * value * (-dt).exp() <= ENDGAME_NOISE_FACTOR * p.noise_floor(s.z);
        let retry_endgame = last_endgame.is_none_or(|v| value <= 0.1 * v);
        if value <= root_tol || (in_endgame && retry_endgame) {
            last_endgame = Some(value);
            if let Some(outcome) = finish_at_root(p, s, opts) {
                trace.outcome = outcome;
                return trace;
            }
        }
        if s.t > t_max {
            trace.outcome = TraceOutcome::Stalled {
                reason: StallReason::TimeLimit,
            };
            return trace;
        }

        match flow_step(p, &s, dt, opts) {
            Ok(next) => {
                trace.states.push(next);
                streak += 1;
                if streak >= opts.grow_after {
                    dt = (2.0 * dt).min(opts.dt_max);
                    streak = 0;
                }
            }
            Err(_) => {
                streak = 0;
                dt *= 0.5;
                if dt < opts.dt_min {
                    trace.outcome = classify_underflow(p, s, opts);
                    return trace;
                }
            }
        }
    }
    trace
}

fn finish_at_root<P: PolyEval + ?Sized>(
    p: &P,
    s: ContinuationState,
    opts: &TraceOptions,
) -> Option<TraceOutcome> {
    let polished = match polish_root(p, s.z) {
        Ok(r) => r,
        Err(PolishError::Diverged { best }) => best,
    };
    root_accepted(p, &polished, opts).then_some(TraceOutcome::Converged {
        root: polished.root,
        t_end: s.t,
        multiplicity: polished.multiplicity,
        residual: polished.residual,
    })
}

/// Step size underflowed at `s`: either the orbit is running into a critical point,
/// or it is sitting on a root the corrector can no longer resolve.
fn classify_underflow<P: PolyEval + ?Sized>(
    p: &P,
    s: ContinuationState,
    opts: &TraceOptions,
) -> TraceOutcome {
    let (v, dv, ddv) = p.eval_with_two_derivatives(s.z);
    if dv.norm_sqr() <= opts.escape_ratio * v.norm() * ddv.norm() {
        if let Some(point) = refine_critical_point(p, s.z, opts) {
            return TraceOutcome::EscapeToCritical {
                point_estimate: point,
                t_estimate: s.t,
            };
        }
    }
    finish_at_root(p, s, opts).unwrap_or(TraceOutcome::Stalled {
        reason: StallReason::StepUnderflow,
    })
}

/// Newton's method on `P'` from `z`; `None` unless `|P'|` reaches the critical tolerance.
fn refine_critical_point<P: PolyEval + ?Sized>(
    p: &P,
    z: Complex,
    opts: &TraceOptions,
) -> Option<Complex> {
    let (_, dv, _) = p.eval_with_two_derivatives(z);
    let mut best = z;
    let mut best_norm = dv.norm();
    let mut cur = z;
    for _ in 0..30 {
        let (_, dv, ddv) = p.eval_with_two_derivatives(cur);
        if dv.norm() == 0.0 || ddv.norm() == 0.0 {
            break;
        }
        cur -= quotient(dv, ddv);
        let n = p.eval_with_derivative(cur).1.norm();
        if !n.is_finite() {
            break;
        }
        if n < best_norm {
            best = cur;
            best_norm = n;
        }
    }
    let tol = (opts.tol_crit * p.scale()).max(32.0 * p.derivative_noise(best));
    (best_norm <= tol).then_some(best)
}

/// Runs the flow backwards from `z0` (so `|P|` grows as `e^{|t|}`) while `keep` accepts
/// the current point. Stops at critical points, after `t_limit` units of time, or when
/// `|P|` leaves the floating-point range. The returned states have `t <= 0`.
pub fn trace_backward<P: PolyEval + ?Sized, F: Fn(Complex) -> bool>(
    p: &P,
    z0: Complex,
    opts: &TraceOptions,
    t_limit: f64,
    keep: F,
) -> Vec<ContinuationState> {
    let mut states = vec![ContinuationState::initial(p, z0)];
    if states[0].w0.norm() == 0.0 || !states[0].w0.norm().is_finite() {
        return states;
    }
    let mut dt = opts.dt_initial;
    let mut streak = 0;
    for _ in 0..opts.max_steps {
        let s = *states.last().expect("initial state");
        if !keep(s.z) || s.t < -t_limit || s.target.norm() > 1e300 {
            break;
        }
        match directed_step(p, &s, -dt, opts) {
            Ok(next) => {
                states.push(next);
                streak += 1;
                if streak >= opts.grow_after {
                    dt = (2.0 * dt).min(opts.dt_max);
                    streak = 0;
                }
            }
            Err(_) => {
                streak = 0;
                dt *= 0.5;
                if dt < opts.dt_min {
                    break;
                }
            }
        }
    }
    states
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolishedRoot {
    pub root: Complex,
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum PolishError {
    #[error("Newton polishing diverged; best residual {}", best.residual)]
    Diverged { best: PolishedRoot },
}

const POLISH_PLAIN_ITERATIONS: usize = 50;
const POLISH_MULTIPLE_ITERATIONS: usize = 20;
const POLISH_DIVERGE_STREAK: usize = 5;
const SIGNAL_FACTOR: f64 = 64.0;

/// Final Newton refinement of an approximate root.
///
/// Plain Newton runs until `|P|` stops decreasing. Its contraction factor `rho` between
/// successive steps tends to `1 - 1/m` at an `m`-fold root (and to 0 at a simple one),
/// which gives the multiplicity estimate. For `m > 1` the iteration switches to
/// `z - m P/P'`. The best iterate seen is returned.
pub fn polish_root<P: PolyEval + ?Sized>(p: &P, z: Complex) -> Result<PolishedRoot, PolishError> {
    let d = p.degree().max(1);
    let mut best = PolishedRoot {
        root: z,
        residual: p.eval(z).norm(),
        multiplicity: 1,
    };
    if best.residual == 0.0 {
        return Ok(best);
    }

    let mut cur = z;
    let mut step_lengths: Vec<f64> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    let mut improved = false;
    let mut worse = 0;
    for _ in 0..POLISH_PLAIN_ITERATIONS {
        let (v, dv) = p.eval_with_derivative(cur);
        if dv.norm() == 0.0 {
            break;
        }
        let delta = quotient(v, dv);
        let next = cur - delta;
        let r = p.eval(next).norm();
        if r < best.residual {
            // contraction is only meaningful while the step is resolved above rounding
            if r > SIGNAL_FACTOR * p.noise_floor(next) {
                if let Some(&prev) = step_lengths.last() {
                    ratios.push(delta.norm() / prev);
                }
                step_lengths.push(delta.norm());
            }
            best.root = next;
            best.residual = r;
            improved = true;
            worse = 0;
            cur = next;
            if r == 0.0 {
                break;
            }
        } else if improved || best.residual <= 32.0 * p.noise_floor(best.root) {
            break;
        } else {
            worse += 1;
            if worse >= POLISH_DIVERGE_STREAK || !r.is_finite() {
                return Err(PolishError::Diverged { best });
            }
            cur = next;
        }
    }

    let multiplicity = estimate_multiplicity(&ratios, d);
    best.multiplicity = multiplicity;
    if multiplicity > 1 {
        let m = multiplicity as f64;
        let mut cur = best.root;
        for _ in 0..POLISH_MULTIPLE_ITERATIONS {
            let (v, dv) = p.eval_with_derivative(cur);
            if v.norm() == 0.0 || dv.norm() == 0.0 {
                break;
            }
            let next = cur - quotient(v, dv) * m;
            let r = p.eval(next).norm();
            if r < best.residual {
                best.root = next;
                best.residual = r;
                cur = next;
            } else {
                break;
            }
        }
    }
    Ok(best)
}

/// `m = round(1 / (1 - rho))` from the median of the last three contraction ratios.
fn estimate_multiplicity(ratios: &[f64], degree: usize) -> usize {
    if ratios.is_empty() {
        return 1;
    }
    let mut tail: Vec<f64> = ratios[ratios.len().saturating_sub(3)..].to_vec();
    tail.sort_by(f64::total_cmp);
    let rho = tail[tail.len() / 2];
    if !(0.0..1.0).contains(&rho) {
        return 1;
    }
    let m = (1.0 / (1.0 - rho)).round();
    (m as usize).clamp(1, degree)
}
