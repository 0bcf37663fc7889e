//! Polynomial root finding by following the Newton flow.
//!
//! The flow `z' = -P(z)/P'(z)` satisfies `P(z(t)) = e^{-t} P(z(0))` exactly, so `|P|`
//! decays at a known rate and `arg P` never changes along an orbit. The tracker in
//! [`flow`] enforces that identity step by step. An orbit can only fail to reach a root
//! by running into a critical point, which requires `arg P(z0)` to be the argument of a
//! critical value; [`seed`] picks starting points far from the root disk whose argument
//! avoids that finite set. [`solver`] turns this into an all-roots driver and
//! [`viz`] draws level lines, flow lines and Newton steps as SVG.

pub mod critical;
pub mod eval;
pub mod flow;
pub mod poly;
pub mod rng;
pub mod seed;
pub mod solver;
pub mod viz;

pub use num_complex::Complex64 as Complex;

pub use critical::{arg_distance, critical_data, critical_points, CriticalData};
pub use eval::{Deflated, PolyEval};
pub use flow::{
    flow_step, polish_root, trace_flow, ContinuationState, FlowTrace, PolishedRoot, StepRejected,
    TraceOptions, TraceOutcome,
};
pub use poly::{PolyError, Polynomial};
pub use seed::{seed_ladder, select_seed, SeedError, SeedOptions, SeedPoint};
pub use solver::{
    find_all_roots, find_one_root, newton_iterates, step_ratio_survey, FoundRoot,
    NewtonDiagnostics, Root, RootSet, SeedMode, SolveError, SolveOptions,
};
pub use viz::{
    demo_polynomial, iso_angle_curves, level_lines, render_figure, sample_grid, Figure, FigureSpec,
    VizError, Window,
};
