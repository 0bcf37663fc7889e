//! Root finding on top of the flow tracker: one root by retrying seeds, all roots by
//! deflation, and the discrete Newton diagnostics.

use std::f64::consts::PI;

use thiserror::Error;

use crate::critical::{critical_data_with, CriticalData};
use crate::eval::{Deflated, PolyEval};
use crate::flow::{
    polish_root, trace_flow, FlowTrace, PolishError, PolishedRoot, TraceOptions, TraceOutcome,
};
use crate::poly::{quotient, PolyError, Polynomial};
use crate::seed::{seed_ladder, seed_random, select_seed, SeedOptions, SeedPoint};
use crate::Complex;

/// Roots closer than `MERGE_TOL * (1 + |root|)` are merged into one multiple root.
pub const MERGE_TOL: f64 = 1e-8;
/// Relative size of the deflation remainder, against `sum |c_k| |root|^k`, above which a
/// root polished on the original polynomial is not used to deflate the current one.
pub const DEFLATION_TOL: f64 = 1e-6;
/// Remainder bound for the second and later factors of a multiple root.
pub const REPEAT_DEFLATION_TOL: f64 = 1e-3;
/// Taylor coefficients below this fraction of the largest count as vanishing.
const TAYLOR_ZERO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMode {
    /// Margin-certified seeds from the critical data, up to `certified_degree_cap`;
    /// ladder seeds above it.
    Certified,
    Ladder,
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub seed_mode: SeedMode,
    pub seed: SeedOptions,
    pub trace: TraceOptions,
    /// `None` means `4d + 8`.
    pub max_attempts: Option<usize>,
    pub certified_degree_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            seed_mode: SeedMode::Certified,
            seed: SeedOptions::default(),
            trace: TraceOptions::default(),
            max_attempts: None,
            certified_degree_cap: 64,
        }
    }
}

impl SolveOptions {
    pub fn max_attempts(&self, degree: usize) -> usize {
        self.max_attempts.unwrap_or(4 * degree + 8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex,
    pub multiplicity: usize,
    /// `|P(value)|` on the input polynomial.
    pub residual: f64,
    /// Seeds traced to find this root (0 for closed-form and critical-point roots).
    pub seed_attempts: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub total_multiplicity: usize,
}

impl RootSet {
    /// Seeds traced over the whole solve.
    pub fn attempts(&self) -> usize {
        self.roots.iter().map(|r| r.seed_attempts).sum()
    }

    /// `alpha * prod (z - root)^m`, expanded.
    pub fn expand(&self, leading: Complex) -> Polynomial {
        let mut factors = Vec::with_capacity(self.total_multiplicity);
        for r in &self.roots {
            factors.extend(std::iter::repeat_n(r.value, r.multiplicity));
        }
        let monic = Polynomial::from_roots(&factors);
        Polynomial::new(monic.coeffs().iter().map(|&c| c * leading).collect())
            .expect("non-zero leading")
    }

    fn contains_near(&self, value: Complex) -> bool {
        self.roots
            .iter()
            .any(|r| (r.value - value).norm() <= DEFLATION_TOL * (1.0 + value.norm()))
    }

    fn insert(
        &mut self,
        p: &Polynomial,
        value: Complex,
        multiplicity: usize,
        seed_attempts: usize,
    ) {
        self.total_multiplicity += multiplicity;
        let near = self
            .roots
            .iter_mut()
            .find(|r| (r.value - value).norm() <= MERGE_TOL * (1.0 + value.norm()));
        let residual = p.eval(value).norm();
        match near {
            Some(existing) => {
                existing.multiplicity += multiplicity;
                existing.seed_attempts += seed_attempts;
                if residual < existing.residual {
                    existing.value = value;
                    existing.residual = residual;
                }
            }
            None => self.roots.push(Root {
                value,
                multiplicity,
                residual,
                seed_attempts,
            }),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("solve incomplete: {} of {degree} roots found after {attempts} attempts", partial.total_multiplicity)]
    Incomplete {
        partial: RootSet,
        degree: usize,
        attempts: usize,
    },
    #[error("{0}")]
    Precondition(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoundRoot {
    pub root: Complex,
    pub multiplicity: usize,
    pub residual: f64,
    /// Index of the seed attempt that converged.
    pub attempt: usize,
    /// The converged trace; `None` for closed-form and critical-point roots.
    pub trace: Option<FlowTrace>,
}

impl FoundRoot {
    fn seeds_used(&self) -> usize {
        if self.trace.is_some() {
            self.attempt + 1
        } else {
            0
        }
    }
}

/// Multiplicity of `root` read off the Taylor coefficients there: the index of the
/// first coefficient that does not vanish relative to the largest one.
pub fn taylor_multiplicity(p: &Polynomial, root: Complex) -> usize {
    let b = p.taylor_at(root);
    let largest = b[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    (1..b.len())
        .find(|&k| b[k].norm() > TAYLOR_ZERO_TOL * largest)
        .unwrap_or(p.degree())
}

fn best_of(result: Result<PolishedRoot, PolishError>) -> PolishedRoot {
    match result {
        Ok(r) => r,
        Err(PolishError::Diverged { best }) => best,
    }
}

/// One root of `p`, following the flow from successive seeds until one converges.
pub fn find_one_root(p: &Polynomial, opts: &SolveOptions) -> Result<FoundRoot, SolveError> {
    let d = p.degree();
    if d == 0 {
        return Err(PolyError::Constant.into());
    }
    if d == 1 {
        let root = quotient(-p.coeffs()[0], p.coeffs()[1]);
        return Ok(FoundRoot {
            root,
            multiplicity: 1,
            residual: p.eval(root).norm(),
            attempt: 0,
            trace: None,
        });
    }

    let data: Option<CriticalData> = match opts.seed_mode {
        SeedMode::Certified if d <= opts.certified_degree_cap => critical_data_with(p, opts).ok(),
        _ => None,
    };

    if let Some(i) = data.as_ref().and_then(CriticalData::root_index) {
        let point = data.as_ref().expect("checked").points[i];
        let polished = best_of(polish_root(p, point));
        let root = if polished.residual <= p.eval(point).norm() {
            polished.root
        } else {
            point
        };
        let multiplicity = taylor_multiplicity(p, root).clamp(2, d);
        return Ok(FoundRoot {
            root,
            multiplicity,
            residual: p.eval(root).norm(),
            attempt: 0,
            trace: None,
        });
    }

    let seed_for = |attempt: usize| match (opts.seed_mode, &data) {
        (SeedMode::Certified, Some(data)) => select_seed(p, data, attempt, &opts.seed)
            .unwrap_or_else(|_| seed_ladder(p, attempt, &opts.seed)),
        (SeedMode::Random { seed }, _) => seed_random(p, seed, attempt, &opts.seed),
        _ => seed_ladder(p, attempt, &opts.seed),
    };
    search(p, seed_for, opts)
}

/// Traces successive seeds until one converges.
fn search<P, S>(p: &P, seed_for: S, opts: &SolveOptions) -> Result<FoundRoot, SolveError>
where
    P: PolyEval + ?Sized,
    S: Fn(usize) -> SeedPoint,
{
    let d = p.degree();
    let max_attempts = opts.max_attempts(d);
    for attempt in 0..max_attempts {
        let trace = trace_flow(p, seed_for(attempt), &opts.trace);
        if let TraceOutcome::Converged {
            root,
            multiplicity,
            residual,
            ..
        } = trace.outcome
        {
            return Ok(FoundRoot {
                root,
                multiplicity: multiplicity.min(d),
                residual,
                attempt,
                trace: Some(trace),
            });
        }
    }
    Err(SolveError::Incomplete {
        partial: RootSet::default(),
        degree: d,
        attempts: max_attempts,
    })
}

/// All roots of `p` with multiplicities: find one root, polish it on `p` itself,
/// deflate, repeat.
pub fn find_all_roots(p: &Polynomial, opts: &SolveOptions) -> Result<RootSet, SolveError> {
    if p.degree() == 0 {
        return Err(PolyError::Constant.into());
    }
    if p.degree() > opts.certified_degree_cap {
        return find_all_roots_implicit(p, opts);
    }
    let mut set = RootSet::default();
    let mut current = p.clone();
    let mut attempts = 0;
    while current.degree() > 0 {
        let found = match find_one_root(&current, opts) {
            Ok(found) => found,
            Err(SolveError::Incomplete { attempts: a, .. }) => {
                return Err(SolveError::Incomplete {
                    partial: set,
                    degree: p.degree(),
                    attempts: attempts + a,
                })
            }
            Err(e) => return Err(e),
        };
        attempts += found.seeds_used();

        let polished = best_of(polish_root(p, found.root));
        let (_, remainder) = current.deflate_with_remainder(polished.root);
        let fits_current = remainder.norm() <= DEFLATION_TOL * current.magnitude_sum(polished.root);
        // rounding in earlier deflations can move the current roots; a polished root that
        // beats the raw one on `p` and is not already recorded is still the better value
        let improves =
            polished.residual < p.eval(found.root).norm() && !set.contains_near(polished.root);
        let value = if fits_current || improves {
            polished.root
        } else {
            found.root
        };

        let multiplicity = deflate_repeated(&mut current, value, found.multiplicity);
        set.insert(p, value, multiplicity, found.seeds_used());
    }
    Ok(set)
}

/// Deflation loop for high degree: the flow runs on `P / prod (z - r_i)` evaluated from
/// `P` itself, so the quotient's coefficients are never formed. One factor is removed per
/// root found; the copies of a multiple root are found separately and merged.
fn find_all_roots_implicit(p: &Polynomial, opts: &SolveOptions) -> Result<RootSet, SolveError> {
    let mut set = RootSet::default();
    let mut current = Deflated::new(p);
    let mut attempts = 0;
    while current.degree() > 0 {
        let q = &current;
        let seed_for = |attempt: usize| match opts.seed_mode {
            SeedMode::Random { seed } => seed_random(q, seed, attempt, &opts.seed),
            _ => seed_ladder(q, attempt, &opts.seed),
        };
        let found = match search(q, seed_for, opts) {
            Ok(found) => found,
            Err(SolveError::Incomplete { attempts: a, .. }) => {
                return Err(SolveError::Incomplete {
                    partial: set,
                    degree: p.degree(),
                    attempts: attempts + a,
                })
            }
            Err(e) => return Err(e),
        };
        attempts += found.seeds_used();

        let polished = best_of(polish_root(p, found.root));
        let value =
            if (polished.root - found.root).norm() <= DEFLATION_TOL * (1.0 + found.root.norm()) {
                polished.root
            } else {
                found.root
            };
        current.remove(value, 1);
        set.insert(p, value, 1, found.seeds_used());
    }
    Ok(set)
}

/// Divides `current` by `z - value` up to `multiplicity` times. The first division is
/// unconditional; each further one must leave a remainder below
/// `REPEAT_DEFLATION_TOL * sum |c_k| |value|^k`, otherwise the estimate is cut back.
/// Returns the number of factors removed.
fn deflate_repeated(current: &mut Polynomial, value: Complex, multiplicity: usize) -> usize {
    let mut removed = 0;
    while removed < multiplicity.max(1) && current.degree() > 0 {
        let (quotient, remainder) = current.deflate_with_remainder(value);
        if removed > 0 && remainder.norm() > REPEAT_DEFLATION_TOL * current.magnitude_sum(value) {
            break;
        }
        *current = quotient;
        removed += 1;
    }
    removed
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonDiagnostics {
    pub iterates: Vec<Complex>,
    /// `|P(z_{k+1})| / |P(z_k)|`.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NewtonError {
    #[error("Newton iterate {step} sits on a critical point")]
    HitCriticalPoint {
        step: usize,
        partial: NewtonDiagnostics,
    },
}

/// Up to `n` plain Newton steps from `z0`, recording how much each divides `|P|` by.
pub fn newton_iterates(
    p: &Polynomial,
    z0: Complex,
    n: usize,
    opts: &TraceOptions,
) -> Result<NewtonDiagnostics, NewtonError> {
    let scale = p.scale();
    let mut diag = NewtonDiagnostics {
        iterates: vec![z0],
        ratios: Vec::new(),
    };
    let mut z = z0;
    let (mut v, mut dv) = p.eval_with_derivative(z);
    for step in 0..n {
        if v.norm() <= opts.tol_root * scale {
            break;
        }
        if dv.norm() <= opts.tol_crit * scale {
            return Err(NewtonError::HitCriticalPoint {
                step,
                partial: diag,
            });
        }
        let next = z - quotient(v, dv);
        let (nv, ndv) = p.eval_with_derivative(next);
        diag.iterates.push(next);
        diag.ratios.push(nv.norm() / v.norm());
        z = next;
        v = nv;
        dv = ndv;
    }
    Ok(diag)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub ratios: Vec<f64>,
}

/// First-step Newton ratios from `samples` points spread evenly on the circle of radius
/// `ring_radius_factor * cauchy_bound(p)`.
pub fn step_ratio_survey(
    p: &Polynomial,
    ring_radius_factor: f64,
    samples: usize,
) -> Result<RatioSummary, SolveError> {
    if p.degree() < 2 {
        return Err(SolveError::Precondition("ratio survey needs degree >= 2"));
    }
    if samples == 0 {
        return Err(SolveError::Precondition(
            "ratio survey needs at least one sample",
        ));
    }
    let radius = ring_radius_factor * p.cauchy_bound();
    let ratios: Vec<f64> = (0..samples)
        .filter_map(|k| {
            let z = Complex::from_polar(radius, 2.0 * PI * k as f64 / samples as f64);
            let (v, dv) = p.eval_with_derivative(z);
            if v.norm() == 0.0 || dv.norm() == 0.0 {
                return None;
            }
            Some(p.eval(z - quotient(v, dv)).norm() / v.norm())
        })
        .collect();
    if ratios.is_empty() {
        return Err(SolveError::Precondition(
            "every survey point was degenerate",
        ));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RatioSummary {
        mean,
        min,
        max,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn monomial(d: usize) -> Polynomial {
        let mut coeffs = vec![0.0; d + 1];
        coeffs[d] = 1.0;
        Polynomial::from_real(&coeffs).unwrap()
    }

    fn sorted(set: &RootSet) -> Vec<Root> {
        let mut roots = set.roots.clone();
        roots.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
        roots
    }

    #[test]
    fn one_root_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let found = find_one_root(&p, &SolveOptions::default()).unwrap();
        assert!((found.root.norm() - 1.0).abs() < 1e-12 && found.root.im.abs() < 1e-12);
        assert!(found.residual <= 1e-12);
        assert_eq!(found.attempt, 0);

        let p = monomial(2);
        let found = find_one_root(&p, &SolveOptions::default()).unwrap();
        assert_eq!(found.root, c(0.0, 0.0));
        assert_eq!(found.multiplicity, 2);
        assert!(found.trace.is_none());

        let p = Polynomial::linear(c(3.0, 4.0));
        assert_eq!(
            find_one_root(&p, &SolveOptions::default()).unwrap().root,
            c(3.0, 4.0)
        );
    }

    #[test]
    fn all_roots_examples() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let set = find_all_roots(&p, &SolveOptions::default()).unwrap();
        let roots = sorted(&set);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1].value - c(1.0, 0.0)).norm() < 1e-12);
        assert!(roots.iter().all(|r| r.multiplicity == 1));

        let p = Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]).unwrap();
        for mode in [SeedMode::Certified, SeedMode::Ladder] {
            let opts = SolveOptions {
                seed_mode: mode,
                ..SolveOptions::default()
            };
            let set = find_all_roots(&p, &opts).unwrap();
            let roots = sorted(&set);
            assert_eq!(set.total_multiplicity, 3, "{mode:?}");
            assert_eq!(roots.len(), 2, "{mode:?}: {roots:?}");
            assert!((roots[0].value - c(-2.0, 0.0)).norm() < 1e-10);
            assert_eq!(roots[0].multiplicity, 1);
            assert!((roots[1].value - c(1.0, 0.0)).norm() < 1e-7);
            assert_eq!(roots[1].multiplicity, 2);
            assert!(roots.iter().all(|r| r.residual <= 1e-8));
        }
    }

    #[test]
    fn reconstruction_degree_twelve() {
        let mut rng = XorShift64Star::new(12);
        let p = rng.monic_polynomial(12);
        let set = find_all_roots(&p, &SolveOptions::default()).unwrap();
        assert_eq!(set.total_multiplicity, 12);
        let rebuilt = set.expand(p.leading());
        let inf = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in rebuilt.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() <= 1e-6 * inf);
        }
    }

    #[test]
    fn random_seed_mode_solves() {
        let mut rng = XorShift64Star::new(5);
        let p = rng.monic_polynomial(9);
        let opts = SolveOptions {
            seed_mode: SeedMode::Random { seed: 99 },
            ..SolveOptions::default()
        };
        assert_eq!(find_all_roots(&p, &opts).unwrap().total_multiplicity, 9);
    }

    #[test]
    fn incomplete_carries_partial_roots() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let opts = SolveOptions {
            max_attempts: Some(0),
            ..SolveOptions::default()
        };
        match find_all_roots(&p, &opts) {
            Err(SolveError::Incomplete {
                partial, degree, ..
            }) => {
                assert_eq!(degree, 2);
                assert_eq!(partial.total_multiplicity, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            find_all_roots(
                &Polynomial::from_real(&[3.0]).unwrap(),
                &SolveOptions::default()
            ),
            Err(SolveError::Poly(PolyError::Constant))
        ));
    }

    #[test]
    fn taylor_multiplicity_examples() {
        assert_eq!(taylor_multiplicity(&monomial(2), c(0.0, 0.0)), 2);
        let p = Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]).unwrap();
        assert_eq!(taylor_multiplicity(&p, c(1.0 + 1e-9, 0.0)), 2);
        assert_eq!(taylor_multiplicity(&p, c(-2.0, 0.0)), 1);
    }

    #[test]
    fn newton_on_monomial_divides_by_closed_form() {
        for d in [2usize, 5, 10, 100] {
            let p = monomial(d);
            let diag = newton_iterates(&p, c(1.0, 0.0), 10, &TraceOptions::default()).unwrap();
            let expected = (1.0 - 1.0 / d as f64).powi(d as i32);
            assert_eq!(diag.ratios.len(), diag.iterates.len() - 1);
            assert!(diag.ratios.iter().all(|r| (r - expected).abs() <= 1e-12));
        }
        let expected = (1.0 - 1.0 / 100f64).powi(100);
        assert!((expected - 0.366032).abs() < 1e-6);
    }

    #[test]
    fn newton_examples() {
        let root = c(2.0, -1.0);
        let p = Polynomial::linear(root);
        let diag = newton_iterates(&p, root + c(7.0, 0.0), 5, &TraceOptions::default()).unwrap();
        assert_eq!(diag.iterates, vec![root + c(7.0, 0.0), root]);
        assert_eq!(diag.ratios, vec![0.0]);

        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let diag = newton_iterates(&p, c(10.0, 0.0), 1, &TraceOptions::default()).unwrap();
        assert_eq!(diag.iterates[1], c(5.05, 0.0));
        assert!((diag.ratios[0] - 24.5025 / 99.0).abs() < 1e-12);

        match newton_iterates(&p, c(0.0, 0.0), 3, &TraceOptions::default()) {
            Err(NewtonError::HitCriticalPoint { step: 0, partial }) => {
                assert_eq!(partial.iterates.len(), 1)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn survey_examples() {
        let d = 7;
        let summary = step_ratio_survey(&monomial(d), 3.0, 16).unwrap();
        let expected = (1.0 - 1.0 / d as f64).powi(d as i32);
        for v in [summary.mean, summary.min, summary.max] {
            assert!((v - expected).abs() < 1e-12);
        }
        assert!(matches!(
            step_ratio_survey(&Polynomial::linear(c(1.0, 0.0)), 10.0, 4),
            Err(SolveError::Precondition(_))
        ));

        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let s = step_ratio_survey(&p, 10.0, 4).unwrap();
        assert!(s.ratios.iter().all(|&r| r > 0.0 && r < 1.0));
    }
}
