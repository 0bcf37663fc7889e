//! SVG assembly.

use std::fmt::Write;

use super::contour::{level_lines, LevelLine};
use super::curves::{curves_through, IsoCurve};
use super::{sample_grid, FigureSpec, VizError, Window};
use crate::critical::critical_data;
use crate::flow::TraceOptions;
use crate::poly::Polynomial;
use crate::seed::{seed_ladder, select_seed, SeedOptions};
use crate::solver::{find_all_roots, newton_iterates, NewtonError, SolveOptions};
use crate::Complex;

/// Largest degree a figure is drawn for; critical points come from the certified path.
pub const MAX_FIGURE_DEGREE: usize = 64;
/// Newton steps drawn by the overlay, at most.
pub const NEWTON_OVERLAY_STEPS: usize = 40;

/// Colours and stroke widths, in output pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Style {
    pub background: &'static str,
    pub level_stroke: &'static str,
    pub level_width: f64,
    pub iso_stroke: &'static str,
    pub iso_width: f64,
    pub root_fill: &'static str,
    pub critical_fill: &'static str,
    pub newton_stroke: &'static str,
    pub newton_width: f64,
    pub marker_radius: f64,
    /// Size of the longer side of the picture.
    pub size_px: f64,
}

pub const STYLE: Style = Style {
    background: "#4a5866",
    level_stroke: "#888",
    level_width: 0.5,
    iso_stroke: "#888",
    iso_width: 0.5,
    root_fill: "#d22",
    critical_fill: "#000",
    newton_stroke: "#fff",
    newton_width: 1.2,
    marker_radius: 4.0,
    size_px: 800.0,
};

/// A rendered figure and what went into it.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub svg: String,
    pub roots: Vec<Complex>,
    pub critical_points: Vec<Complex>,
    pub levels: Vec<LevelLine>,
    pub curves: Vec<IsoCurve>,
    /// Vertices of the Newton overlay, empty without one.
    pub newton: Vec<Complex>,
}

fn push_points(out: &mut String, points: &[Complex]) {
    for (k, z) in points.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        write!(out, "{},{}", z.re, z.im).expect("writing to a String");
    }
}

/// Draws level lines, iso-angle curves, roots, critical points and (optionally) Newton
/// steps of `p` over `w`. The document uses plane coordinates under a single transform,
/// so vertices appear exactly as computed. Identical inputs give identical bytes.
pub fn render_figure(p: &Polynomial, w: &Window, spec: &FigureSpec) -> Result<Figure, VizError> {
    spec.validate()?;
    if p.degree() > MAX_FIGURE_DEGREE {
        return Err(VizError::DegreeTooHigh {
            degree: p.degree(),
            max: MAX_FIGURE_DEGREE,
        });
    }

    let solve = SolveOptions::default();
    let roots: Vec<Complex> = find_all_roots(p, &solve)?
        .roots
        .iter()
        .map(|r| r.value)
        .collect();
    let data = critical_data(p)?;

    let grid = sample_grid(p, w);
    let levels = level_lines(&grid, spec.level_exponents.clone());
    let curves = match levels.iter().rev().find(|l| !l.is_empty()) {
        Some(reference) => curves_through(p, reference, &spec.iso_args, w),
        None => Vec::new(),
    };

    let newton = if spec.show_newton_overlay {
        let start = spec.newton_start.unwrap_or_else(|| {
            select_seed(p, &data, 0, &SeedOptions::default())
                .unwrap_or_else(|_| seed_ladder(p, 0, &SeedOptions::default()))
                .z0
        });
        match newton_iterates(p, start, NEWTON_OVERLAY_STEPS, &TraceOptions::default()) {
            Ok(diag) => diag.iterates,
            Err(NewtonError::HitCriticalPoint { partial, .. }) => partial.iterates,
        }
    } else {
        Vec::new()
    };

    let s = STYLE;
    let scale = s.size_px / (2.0 * w.half_width.max(w.half_height));
    let width = (2.0 * w.half_width * scale).round();
    let height = (2.0 * w.half_height * scale).round();
    let px = |v: f64| v / scale;

    let mut out = String::new();
    let o = &mut out;
    let _ = writeln!(o, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        o,
        r#"<rect width="{width}" height="{height}" fill="{}"/>"#,
        s.background
    );
    let _ = writeln!(
        o,
        r#"<g transform="translate({} {}) scale({scale} {}) translate({} {})" fill="none" stroke-linejoin="round" stroke-linecap="round">"#,
        width / 2.0,
        height / 2.0,
        -scale,
        -w.center.re,
        -w.center.im
    );
    let _ = writeln!(
        o,
        r#"<g class="levels" stroke="{}" stroke-width="{}">"#,
        s.level_stroke,
        px(s.level_width)
    );
    for line in &levels {
        let _ = writeln!(o, r#"<g class="level" data-level="{}">"#, line.level);
        for poly in &line.polylines {
            o.push_str(r#"<polyline points=""#);
            push_points(o, &poly.points);
            o.push_str("\"/>\n");
        }
        o.push_str("</g>\n");
    }
    o.push_str("</g>\n");

    let _ = writeln!(
        o,
        r#"<g class="iso-angles" stroke="{}" stroke-width="{}">"#,
        s.iso_stroke,
        px(s.iso_width)
    );
    for curve in &curves {
        let _ = write!(
            o,
            r#"<polyline class="iso-angle" data-arg="{}" points=""#,
            curve.arg
        );
        push_points(o, &curve.points);
        o.push_str("\"/>\n");
    }
    o.push_str("</g>\n");

    let radius = px(s.marker_radius);
    for z in &roots {
        let _ = writeln!(
            o,
            r#"<circle class="root" cx="{}" cy="{}" r="{radius}" fill="{}" stroke="none"/>"#,
            z.re, z.im, s.root_fill
        );
    }
    for z in &data.points {
        let _ = writeln!(
            o,
            r#"<circle class="critical" cx="{}" cy="{}" r="{radius}" fill="{}" stroke="none"/>"#,
            z.re, z.im, s.critical_fill
        );
    }
    if !newton.is_empty() {
        let _ = write!(
            o,
            r#"<polyline class="newton" stroke="{}" stroke-width="{}" points=""#,
            s.newton_stroke,
            px(s.newton_width)
        );
        push_points(o, &newton);
        o.push_str("\"/>\n");
    }
    o.push_str("</g>\n</svg>\n");

    Ok(Figure {
        svg: out,
        roots,
        critical_points: data.points,
        levels,
        curves,
        newton,
    })
}
