//! What the flow tracker needs from a polynomial, and a deflated view that divides out
//! known roots without ever forming the quotient's coefficients.
//!
//! Explicit deflation is exact in theory but the quotient's coefficients can grow by
//! many orders of magnitude once roots near the unit circle are removed, which pushes
//! the Cauchy radius and `|P|` at the seed circle beyond floating-point range at high
//! degree. [`Deflated`] evaluates `Q(z) = P(z) / prod (z - r_i)^{m_i}` directly from `P`.

use crate::poly::{quotient, Polynomial};
use crate::Complex;

/// Values, derivatives and rounding levels of a polynomial-valued function.
pub trait PolyEval {
    fn degree(&self) -> usize;
    fn eval(&self, z: Complex) -> Complex;
    fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex);
    fn eval_with_two_derivatives(&self, z: Complex) -> (Complex, Complex, Complex);
    /// Coefficient scale for absolute tolerances.
    fn scale(&self) -> f64;
    /// Rounding level of `eval(z)`.
    fn noise_floor(&self, z: Complex) -> f64;
    /// Rounding level of the first derivative at `z`.
    fn derivative_noise(&self, z: Complex) -> f64;
    /// Every root lies strictly inside this radius.
    fn cauchy_bound(&self) -> f64;
    /// Degree and `arg alpha` of the leading coefficient.
    fn leading_data(&self) -> (usize, f64);
}

fn horner_noise(degree: usize, magnitude_sum: f64) -> f64 {
    ((degree + 1) as f64).sqrt() * f64::EPSILON * magnitude_sum
}

impl PolyEval for Polynomial {
    fn degree(&self) -> usize {
        Polynomial::degree(self)
    }

    fn eval(&self, z: Complex) -> Complex {
        Polynomial::eval(self, z)
    }

    fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        Polynomial::eval_with_derivative(self, z)
    }

    fn eval_with_two_derivatives(&self, z: Complex) -> (Complex, Complex, Complex) {
        Polynomial::eval_with_two_derivatives(self, z)
    }

    fn scale(&self) -> f64 {
        Polynomial::scale(self)
    }

    fn noise_floor(&self, z: Complex) -> f64 {
        horner_noise(Polynomial::degree(self), self.magnitude_sum(z))
    }

    fn derivative_noise(&self, z: Complex) -> f64 {
        let r = z.norm();
        let sum = self
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * r + k as f64 * c.norm());
        horner_noise(Polynomial::degree(self), sum)
    }

    fn cauchy_bound(&self) -> f64 {
        Polynomial::cauchy_bound(self)
    }

    fn leading_data(&self) -> (usize, f64) {
        Polynomial::leading_data(self)
    }
}

/// `P(z) / prod (z - r_i)^{m_i}` for known roots `r_i` of `P`.
///
/// Roots, the Cauchy bound and the leading coefficient are inherited from `P`; values
/// and derivatives follow from those of `P` and the log-derivative of the divisor.
#[derive(Debug, Clone)]
pub struct Deflated<'a> {
    base: &'a Polynomial,
    removed: Vec<(Complex, usize)>,
    degree: usize,
}

impl<'a> Deflated<'a> {
    pub fn new(base: &'a Polynomial) -> Self {
        Deflated {
            base,
            removed: Vec::new(),
            degree: base.degree(),
        }
    }

    pub fn base(&self) -> &Polynomial {
        self.base
    }

    /// Divides out `(z - root)^multiplicity`, capped at the remaining degree; returns the
    /// multiplicity actually removed.
    pub fn remove(&mut self, root: Complex, multiplicity: usize) -> usize {
        let m = multiplicity.min(self.degree);
        if m > 0 {
            self.removed.push((root, m));
            self.degree -= m;
        }
        m
    }

    /// Divides each value by the divisor one factor at a time, so that no partial product
    /// leaves the floating-point range.
    fn divide<const N: usize>(&self, z: Complex, mut values: [Complex; N]) -> [Complex; N] {
        for &(r, m) in &self.removed {
            let f = z - r;
            for _ in 0..m {
                for v in values.iter_mut() {
                    *v = quotient(*v, f);
                }
            }
        }
        values
    }

    fn divide_norm(&self, z: Complex, mut value: f64) -> f64 {
        for &(r, m) in &self.removed {
            let f = (z - r).norm();
            for _ in 0..m {
                value /= f;
            }
        }
        value
    }

    /// `sum m / (z - r)` and `sum m / (z - r)^2`.
    fn log_derivative_sums(&self, z: Complex) -> (Complex, Complex) {
        let one = Complex::new(1.0, 0.0);
        self.removed.iter().fold(
            (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)),
            |(s1, s2), &(r, m)| {
                let inv = quotient(one, z - r);
                (s1 + inv * m as f64, s2 + inv * inv * m as f64)
            },
        )
    }
}

impl PolyEval for Deflated<'_> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn eval(&self, z: Complex) -> Complex {
        self.divide(z, [self.base.eval(z)])[0]
    }

    fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let (v, dv) = self.base.eval_with_derivative(z);
        let [q, dq_part] = self.divide(z, [v, dv]);
        let (s1, _) = self.log_derivative_sums(z);
        (q, dq_part - q * s1)
    }

    fn eval_with_two_derivatives(&self, z: Complex) -> (Complex, Complex, Complex) {
        let (v, dv, ddv) = self.base.eval_with_two_derivatives(z);
        let [q, dq_part, ddq_part] = self.divide(z, [v, dv, ddv]);
        let (s1, s2) = self.log_derivative_sums(z);
        let dq = dq_part - q * s1;
        let ddq = ddq_part - dq_part * s1 * 2.0 + q * (s1 * s1 + s2);
        (q, dq, ddq)
    }

    fn scale(&self) -> f64 {
        self.base.scale()
    }

    fn noise_floor(&self, z: Complex) -> f64 {
        self.divide_norm(z, self.base.noise_floor(z))
    }

    fn derivative_noise(&self, z: Complex) -> f64 {
        self.divide_norm(z, self.base.derivative_noise(z))
    }

    fn cauchy_bound(&self) -> f64 {
        self.base.cauchy_bound()
    }

    fn leading_data(&self) -> (usize, f64) {
        let (_, arg) = self.base.leading_data();
        (self.degree, arg)
    }
}
