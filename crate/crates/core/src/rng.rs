//! Reproducible random polynomials.
//!
//! The generator is xorshift64* (Vigna 2014), chosen so other implementations can
//! reproduce coefficient sequences bit for bit:
//!
//! ```text
//! state = seed, or 0x9E3779B97F4A7C15 when seed == 0
//! next():  x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D (wrapping)
//! uniform(): (next() >> 11) * 2^-53                     in [0, 1)
//! unit_disk(): repeat { re = 2u - 1; im = 2v - 1 } until re^2 + im^2 < 1
//! ```
//!
//! A random monic polynomial of degree d draws `c_0, ..., c_{d-1}` in that order from
//! `unit_disk()` and sets `c_d = 1`.

use crate::poly::Polynomial;
use crate::Complex;

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let state = if seed == 0 {
            0x9E37_79B9_7F4A_7C15
        } else {
            seed
        };
        XorShift64Star { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    /// Uniform point of the open unit disk, by rejection from the square.
    pub fn unit_disk(&mut self) -> Complex {
        loop {
            let re = 2.0 * self.uniform() - 1.0;
            let im = 2.0 * self.uniform() - 1.0;
            if re * re + im * im < 1.0 {
                return Complex::new(re, im);
            }
        }
    }

    /// Degree-`degree` polynomial with unit-disk coefficients; monic when `monic`,
    /// otherwise the leading coefficient is drawn too (and redrawn while tiny).
    pub fn unit_disk_polynomial(&mut self, degree: usize, monic: bool) -> Polynomial {
        let mut coeffs: Vec<Complex> = (0..degree).map(|_| self.unit_disk()).collect();
        let lead = if monic {
            Complex::new(1.0, 0.0)
        } else {
            loop {
                let c = self.unit_disk();
                if c.norm() > 0.05 {
                    break c;
                }
            }
        };
        coeffs.push(lead);
        Polynomial::new(coeffs).expect("non-zero leading coefficient")
    }

    pub fn monic_polynomial(&mut self, degree: usize) -> Polynomial {
        self.unit_disk_polynomial(degree, true)
    }
}
