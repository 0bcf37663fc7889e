//! Inputs shared by the criterion benchmarks in `benches/`.

use newtonflow::rng::XorShift64Star;
use newtonflow::Polynomial;

/// Degrees of the single-trace benchmarks.
pub const TRACE_DEGREES: [usize; 3] = [5, 20, 60];

/// Degrees of the all-roots benchmarks; the last one runs above the certified cap.
pub const SOLVE_DEGREES: [usize; 4] = [10, 30, 64, 128];

/// Non-monic unit-disk polynomial for tracing.
pub fn trace_input(degree: usize) -> Polynomial {
    XorShift64Star::new(degree as u64).unit_disk_polynomial(degree, false)
}

/// Monic unit-disk polynomial for solving.
pub fn solve_input(degree: usize) -> Polynomial {
    XorShift64Star::new(1000 + degree as u64).monic_polynomial(degree)
}
