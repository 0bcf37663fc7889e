//! Pictures of the flow: level lines `|P| = 2^n`, iso-angle flow lines, roots, critical
//! points and discrete Newton steps, rendered as SVG.

mod contour;
mod curves;
mod render;

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::poly::Polynomial;
use crate::solver::SolveError;
use crate::Complex;

pub use contour::{level_lines, LevelLine, Polyline};
pub use curves::{iso_angle_curves, IsoCurve};
pub use render::{render_figure, Figure, Style, MAX_FIGURE_DEGREE, NEWTON_OVERLAY_STEPS, STYLE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VizError {
    #[error("invalid window: {0}")]
    Window(&'static str),
    #[error("figure needs at least one level")]
    NoLevels,
    #[error("figures are limited to degree {max}, got {degree}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Rectangle of the plane sampled on a `cols x rows` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: Complex,
    pub half_width: f64,
    pub half_height: f64,
    /// `(cols, rows)`.
    pub resolution: (usize, usize),
}

impl Window {
    pub fn new(
        center: Complex,
        half_width: f64,
        half_height: f64,
        resolution: (usize, usize),
    ) -> Result<Self, VizError> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(VizError::Window("center must be finite"));
        }
        if !(half_width > 0.0
            && half_height > 0.0
            && half_width.is_finite()
            && half_height.is_finite())
        {
            return Err(VizError::Window("extents must be positive and finite"));
        }
        if resolution.0 < 2 || resolution.1 < 2 {
            return Err(VizError::Window("resolution must be at least 2x2"));
        }
        Ok(Window {
            center,
            half_width,
            half_height,
            resolution,
        })
    }

    /// Square window of half-size `half` centred at `center`.
    pub fn square(center: Complex, half: f64, resolution: usize) -> Result<Self, VizError> {
        Window::new(center, half, half, (resolution, resolution))
    }

    /// Grid point in column `i` and row `j`; row 0 is the bottom edge. The coordinates
    /// are symmetric about the centre so mirrored grid points are exact mirrors.
    pub fn point(&self, i: usize, j: usize) -> Complex {
        let (cols, rows) = self.resolution;
        let fx = (2.0 * i as f64 - (cols - 1) as f64) / (cols - 1) as f64;
        let fy = (2.0 * j as f64 - (rows - 1) as f64) / (rows - 1) as f64;
        Complex::new(
            self.center.re + self.half_width * fx,
            self.center.im + self.half_height * fy,
        )
    }

    pub fn contains(&self, z: Complex) -> bool {
        (z.re - self.center.re).abs() <= self.half_width
            && (z.im - self.center.im).abs() <= self.half_height
    }

    /// Grid spacing along x and y.
    pub fn cell_size(&self) -> (f64, f64) {
        let (cols, rows) = self.resolution;
        (
            2.0 * self.half_width / (cols - 1) as f64,
            2.0 * self.half_height / (rows - 1) as f64,
        )
    }
}

impl Default for Window {
    fn default() -> Self {
        Window {
            center: Complex::new(0.0, 0.0),
            half_width: 2.0,
            half_height: 2.0,
            resolution: (512, 512),
        }
    }
}

/// What to draw besides roots and critical points.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    /// Level lines `|P| = 2^n` for each `n`.
    pub level_exponents: RangeInclusive<i32>,
    /// Arguments of the iso-angle curves.
    pub iso_args: Vec<f64>,
    pub show_newton_overlay: bool,
    /// Start of the Newton overlay; the certified seed when `None`.
    pub newton_start: Option<Complex>,
}

impl Default for FigureSpec {
    fn default() -> Self {
        FigureSpec {
            level_exponents: -4..=4,
            iso_args: vec![0.0, PI / 2.0, PI, 3.0 * PI / 2.0],
            show_newton_overlay: false,
            newton_start: None,
        }
    }
}

impl FigureSpec {
    pub fn validate(&self) -> Result<(), VizError> {
        if self.level_exponents.is_empty() {
            return Err(VizError::NoLevels);
        }
        Ok(())
    }
}

/// `log2 |P|` and `arg P` on the grid of a window, row-major from the bottom row.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub window: Window,
    pub log2_magnitude: Vec<f64>,
    pub argument: Vec<f64>,
}

impl Grid {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.window.resolution.0 + i
    }

    pub fn log2_at(&self, i: usize, j: usize) -> f64 {
        self.log2_magnitude[self.index(i, j)]
    }

    pub fn arg_at(&self, i: usize, j: usize) -> f64 {
        self.argument[self.index(i, j)]
    }
}

/// Evaluates `p` at every grid point of `w`. `log2 |P|` is `-inf` exactly at a root.
pub fn sample_grid(p: &Polynomial, w: &Window) -> Grid {
    let (cols, rows) = w.resolution;
    let mut log2_magnitude = Vec::with_capacity(cols * rows);
    let mut argument = Vec::with_capacity(cols * rows);
    for j in 0..rows {
        for i in 0..cols {
            let v = p.eval(w.point(i, j));
            log2_magnitude.push(v.norm().log2());
            argument.push(v.arg());
        }
    }
    Grid {
        window: *w,
        log2_magnitude,
        argument,
    }
}

/// Degree-5 polynomial with five distinct roots, the default subject of `figure`:
/// `(z - 1.1 - 0.2i)(z - 0.2 - 1.2i)(z + 1 - 0.6i)(z + 0.7 + 0.9i)(z - 0.5 + i)`.
pub fn demo_polynomial() -> Polynomial {
    Polynomial::from_roots(&demo_roots())
}

pub fn demo_roots() -> [Complex; 5] {
    [
        Complex::new(1.1, 0.2),
        Complex::new(0.2, 1.2),
        Complex::new(-1.0, 0.6),
        Complex::new(-0.7, -0.9),
        Complex::new(0.5, -1.0),
    ]
}
