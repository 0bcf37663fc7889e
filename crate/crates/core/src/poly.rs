//! Dense complex polynomials in ascending coefficient order.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Complex;

/// Trailing coefficients at or below this magnitude are dropped on construction.
pub const TRIM_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial has no coefficients")]
    Empty,
    #[error("zero polynomial has no degree")]
    Zero,
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("operation requires degree >= 1")]
    Constant,
    #[error("malformed polynomial JSON: {0}")]
    Parse(String),
}

/// A polynomial `coeffs[0] + coeffs[1] z + ... + coeffs[d] z^d` with `coeffs[d] != 0`.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    /// Builds a polynomial, trimming negligible trailing coefficients.
    pub fn new(mut coeffs: Vec<Complex>) -> Result<Self, PolyError> {
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        if let Some(index) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(PolyError::NonFinite { index });
        }
        while coeffs.last().is_some_and(|c| c.norm() <= TRIM_THRESHOLD) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(PolyError::Zero);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// `z - root`.
    pub fn linear(root: Complex) -> Self {
        Polynomial {
            coeffs: vec![-root, Complex::new(1.0, 0.0)],
        }
    }

    /// Monic polynomial `prod (z - r)` over `roots`.
    pub fn from_roots(roots: &[Complex]) -> Self {
        let mut coeffs = vec![Complex::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(Complex::new(0.0, 0.0));
            for k in (1..coeffs.len()).rev() {
                let prev = coeffs[k - 1];
                coeffs[k] = prev - r * coeffs[k];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The leading coefficient, `alpha` in `z^-d P(z) -> alpha`.
    pub fn leading(&self) -> Complex {
        self.coeffs[self.degree()]
    }

    /// `max(1, max |coeffs|)`, the reference magnitude for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max)
    }

    /// `sum |c_k| |z|^k`, the magnitude of the terms Horner accumulates at `z`.
    pub fn magnitude_sum(&self, z: Complex) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Fused Horner recurrence for `(P(z), P'(z))`.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `(P(z), P'(z), P''(z))`.
    pub fn eval_with_two_derivatives(&self, z: Complex) -> (Complex, Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        let mut ddp = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * z + dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, ddp * 2.0)
    }

    pub fn derivative(&self) -> Result<Polynomial, PolyError> {
        if self.degree() == 0 {
            return Err(PolyError::Constant);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Ok(Polynomial { coeffs })
    }

    /// Synthetic division by `z - root`, returning the quotient and the remainder `P(root)`.
    ///
    /// A constant input yields itself as the remainder and the zero polynomial is never
    /// produced: the quotient of a degree-1 input is its (non-zero) leading coefficient.
    pub fn deflate_with_remainder(&self, root: Complex) -> (Polynomial, Complex) {
        let d = self.degree();
        if d == 0 {
            return (self.clone(), self.coeffs[0]);
        }
        let mut quotient = vec![Complex::new(0.0, 0.0); d];
        let mut acc = self.coeffs[d];
        for k in (0..d).rev() {
            quotient[k] = acc;
            acc = acc * root + self.coeffs[k];
        }
        (Polynomial { coeffs: quotient }, acc)
    }

    /// Quotient of `P` by `z - root`; the remainder is discarded.
    pub fn deflate(&self, root: Complex) -> Polynomial {
        self.deflate_with_remainder(root).0
    }

    /// `1 + max_{k<d} |c_k| / |c_d|`; every root lies strictly inside this radius.
    pub fn cauchy_bound(&self) -> f64 {
        let d = self.degree();
        let lead = self.leading().norm();
        let max_lower = self.coeffs[..d]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        1.0 + max_lower / lead
    }

    /// Degree and `arg alpha` in `(-pi, pi]`.
    pub fn leading_data(&self) -> (usize, f64) {
        let mut arg = self.leading().arg();
        if arg <= -PI {
            arg += 2.0 * PI;
        }
        (self.degree(), arg)
    }

    /// Taylor coefficients of `P` about `center`: `b_k = P^(k)(center) / k!`.
    pub fn taylor_at(&self, center: Complex) -> Vec<Complex> {
        let mut b = self.coeffs.clone();
        let n = b.len();
        for start in 0..n {
            for k in (start..n - 1).rev() {
                let next = b[k + 1];
                b[k] += center * next;
            }
        }
        b
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolynomialJson::from(self)).expect("finite coefficients serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, PolyError> {
        let parsed: PolynomialJson =
            serde_json::from_str(text).map_err(|e| PolyError::Parse(e.to_string()))?;
        parsed.try_into()
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial(")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)z^{}", c.re, c.im, k)?;
        }
        write!(f, ")")
    }
}

/// Wire form: `{"coeffs": [[re, im], ...]}`, ascending degree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&Polynomial> for PolynomialJson {
    fn from(p: &Polynomial) -> Self {
        PolynomialJson {
            coeffs: p.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = PolyError;

    fn try_from(value: PolynomialJson) -> Result<Self, Self::Error> {
        Polynomial::new(
            value
                .coeffs
                .into_iter()
                .map(|[re, im]| Complex::new(re, im))
                .collect(),
        )
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PolynomialJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PolynomialJson::deserialize(deserializer)?;
        Polynomial::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// `a / b` without the overflow of the unscaled textbook formula when `|b|` is large.
pub(crate) fn quotient(a: Complex, b: Complex) -> Complex {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 || !s.is_finite() {
        return a / b;
    }
    (a / s) / (b / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn z2m1() -> Polynomial {
        Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn quotient_survives_large_denominators() {
        let big = c(3e200, -4e200);
        let q = quotient(c(6e200, -8e200), big);
        assert!((q - c(2.0, 0.0)).norm() < 1e-15);
        assert!((quotient(c(1.0, 1.0), c(0.0, 2.0)) - c(0.5, -0.5)).norm() < 1e-15);
    }

    fn naive_eval(p: &Polynomial, z: Complex) -> Complex {
        let mut sum = c(0.0, 0.0);
        for (k, &coef) in p.coeffs().iter().enumerate() {
            let mut power = c(1.0, 0.0);
            for _ in 0..k {
                power *= z;
            }
            sum += coef * power;
        }
        sum
    }

    #[test]
    fn construction_trims_and_rejects() {
        let p =
            Polynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1e-301, 0.0)]).unwrap();
        assert_eq!(p.degree(), 1);
        assert_eq!(Polynomial::new(vec![]), Err(PolyError::Empty));
        assert_eq!(
            Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0)]),
            Err(PolyError::Zero)
        );
        assert_eq!(
            Polynomial::new(vec![c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(PolyError::NonFinite { index: 1 })
        );
    }

    #[test]
    fn eval_examples() {
        assert_eq!(z2m1().eval(c(0.0, 2.0)), c(-5.0, 0.0));
        let root = c(0.3, -1.7);
        assert_eq!(Polynomial::linear(root).eval(root), c(0.0, 0.0));

        let p = Polynomial::from_real(&[7.0, -2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let z = c(1.1, 0.3);
        let bound = 1e-12 * p.magnitude_sum(z);
        assert!((p.eval(z) - naive_eval(&p, z)).norm() <= bound);
    }

    #[test]
    fn eval_with_derivative_examples() {
        assert_eq!(
            z2m1().eval_with_derivative(c(0.0, 2.0)),
            (c(-5.0, 0.0), c(0.0, 4.0))
        );
        let k = Polynomial::new(vec![c(2.0, -1.0)]).unwrap();
        assert_eq!(
            k.eval_with_derivative(c(9.0, 3.0)),
            (c(2.0, -1.0), c(0.0, 0.0))
        );

        let mut rng = XorShift64Star::new(99);
        let p = rng.unit_disk_polynomial(9, false);
        let z = rng.unit_disk() * 1.5;
        let (v, dv) = p.eval_with_derivative(z);
        let dp = p.derivative().unwrap();
        assert!((v - p.eval(z)).norm() <= 1e-14 * p.magnitude_sum(z));
        assert!((dv - dp.eval(z)).norm() <= 1e-14 * dp.magnitude_sum(z));

        let (v2, dv2, ddv2) = p.eval_with_two_derivatives(z);
        let ddp = dp.derivative().unwrap();
        assert_eq!((v2, dv2), (v, dv));
        assert!((ddv2 - ddp.eval(z)).norm() <= 1e-13 * ddp.magnitude_sum(z));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            z2m1().derivative().unwrap().coeffs(),
            &[c(0.0, 0.0), c(2.0, 0.0)]
        );
        let p = Polynomial::from_real(&[0.0, -3.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            p.derivative().unwrap().coeffs(),
            &[c(-3.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]
        );
        assert_eq!(
            Polynomial::from_real(&[4.0]).unwrap().derivative(),
            Err(PolyError::Constant)
        );
    }

    #[test]
    fn derivative_is_linear_on_random_degree_seven() {
        let mut rng = XorShift64Star::new(7);
        let p = rng.unit_disk_polynomial(7, false);
        let q = rng.unit_disk_polynomial(7, false);
        let sum = Polynomial::new(
            p.coeffs()
                .iter()
                .zip(q.coeffs())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let lhs = sum.derivative().unwrap();
        let (dp, dq) = (p.derivative().unwrap(), q.derivative().unwrap());
        for k in 0..7 {
            assert!((lhs.coeffs()[k] - (dp.coeffs()[k] + dq.coeffs()[k])).norm() <= 1e-15);
        }
    }

    #[test]
    fn deflate_examples() {
        assert_eq!(
            z2m1().deflate(c(1.0, 0.0)).coeffs(),
            &[c(1.0, 0.0), c(1.0, 0.0)]
        );
        let cube = Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            cube.deflate(c(0.0, 0.0)).coeffs(),
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn deflate_reconstructs_random_degree_ten() {
        let mut rng = XorShift64Star::new(1010);
        let roots: Vec<Complex> = (0..10).map(|_| rng.unit_disk()).collect();
        let p = Polynomial::from_roots(&roots);
        let r = roots[3];
        let (q, rem) = p.deflate_with_remainder(r);
        // (z - r) q, expanded by hand
        let mut expanded = vec![c(0.0, 0.0); q.coeffs().len() + 1];
        for (k, &qc) in q.coeffs().iter().enumerate() {
            expanded[k + 1] += qc;
            expanded[k] -= r * qc;
        }
        let inf = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in expanded.iter().zip(p.coeffs()) {
            assert!((a - b).norm() <= rem.norm() + 1e-12 * inf);
        }
    }

    #[test]
    fn cauchy_and_leading_examples() {
        assert_eq!(z2m1().cauchy_bound(), 2.0);
        for d in 1..6 {
            let mut coeffs = vec![0.0; d + 1];
            coeffs[d] = 1.0;
            assert_eq!(Polynomial::from_real(&coeffs).unwrap().cauchy_bound(), 1.0);
        }
        assert_eq!(z2m1().leading_data(), (2, 0.0));
        let p = Polynomial::from_real(&[0.0, 1.0, 0.0, 0.0, 0.0, -3.0]).unwrap();
        assert_eq!(p.leading_data(), (5, PI));
        let p = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(p.leading_data(), (3, PI / 2.0));
    }

    #[test]
    fn cauchy_bound_encloses_known_roots() {
        let mut rng = XorShift64Star::new(8);
        let roots: Vec<Complex> = (0..8).map(|_| rng.unit_disk() * 3.0).collect();
        let p = Polynomial::from_roots(&roots);
        let bound = p.cauchy_bound();
        assert!(roots.iter().all(|r| r.norm() < bound));
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = Polynomial::from_real(&[2.0, -3.0, 0.0, 1.0]).unwrap();
        let b = p.taylor_at(c(1.0, 0.0));
        // (z-1)^2 (z+2) = 3 (z-1)^2 + (z-1)^3
        assert_eq!(b, vec![c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn json_format() {
        let p = Polynomial::from_json(r#"{"coeffs": [[-1,0],[0,0],[1,0]]}"#).unwrap();
        assert_eq!(p, z2m1());
        assert_eq!(
            p.to_json(),
            r#"{"coeffs":[[-1.0,0.0],[0.0,0.0],[1.0,0.0]]}"#
        );
        assert_eq!(
            Polynomial::from_json(r#"{"coeffs": [[0,0]]}"#),
            Err(PolyError::Zero)
        );
        assert!(matches!(
            Polynomial::from_json(r#"{"coeffs": [[1,0],]}"#),
            Err(PolyError::Parse(_))
        ));
    }

    fn arb_poly(max_degree: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..=max_degree + 1)
            .prop_filter_map("non-zero", |pairs| {
                Polynomial::new(pairs.into_iter().map(|(re, im)| c(re, im)).collect()).ok()
            })
    }

    proptest! {
        #[test]
        fn horner_matches_power_sum(p in arb_poly(24), re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let z = c(re, im);
            let bound = 1e-12 * p.magnitude_sum(z);
            prop_assert!((p.eval(z) - naive_eval(&p, z)).norm() <= bound);
        }

        #[test]
        fn derivative_linear_on_dyadic_inputs(
            a in prop::collection::vec(-64i32..64, 2..12),
            b in prop::collection::vec(-64i32..64, 2..12),
            s in -8i32..8,
        ) {
            let n = a.len().max(b.len());
            let get = |v: &Vec<i32>, k: usize| v.get(k).copied().unwrap_or(0) as f64 * 0.25;
            let pa: Vec<f64> = (0..n).map(|k| get(&a, k)).collect();
            let pb: Vec<f64> = (0..n).map(|k| get(&b, k)).collect();
            let combo: Vec<f64> = (0..n).map(|k| s as f64 * pa[k] + pb[k]).collect();
            if let (Ok(p), Ok(q), Ok(r)) = (
                Polynomial::from_real(&pa), Polynomial::from_real(&pb), Polynomial::from_real(&combo),
            ) {
                if p.degree() >= 1 && q.degree() >= 1 && r.degree() >= 1 {
                    let (dp, dq, dr) = (p.derivative().unwrap(), q.derivative().unwrap(), r.derivative().unwrap());
                    for k in 0..n - 1 {
                        let at = |x: &Polynomial| x.coeffs().get(k).copied().unwrap_or(c(0.0, 0.0));
                        prop_assert_eq!(at(&dr), at(&dp) * s as f64 + at(&dq));
                    }
                }
            }
        }

        #[test]
        fn cauchy_exterior_is_root_free(p in arb_poly(12), phase in 0.0f64..1.0) {
            let bound = p.cauchy_bound();
            for j in 0..64 {
                let theta = 2.0 * PI * (j as f64 + phase) / 64.0;
                for scale in [1.0, 1.5, 4.0] {
                    prop_assert!(p.eval(Complex::from_polar(bound * scale, theta)).norm() > 0.0);
                }
            }
        }

        #[test]
        fn json_round_trip(p in arb_poly(10)) {
            prop_assert_eq!(Polynomial::from_json(&p.to_json()).unwrap(), p);
        }
    }
}
