//! Marching squares on `log2 |P|`.

use super::Grid;
use crate::Complex;

/// Stand-in for `log2 |P|` at exact roots and overflow, so edge interpolation stays finite.
const LOG2_CLAMP: f64 = 4096.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<Complex>,
    /// The last point repeats the first.
    pub closed: bool,
}

/// All contour pieces of one level `|P| = 2^level`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLine {
    pub level: i32,
    pub polylines: Vec<Polyline>,
}

impl LevelLine {
    pub fn is_empty(&self) -> bool {
        self.polylines.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Complex> + '_ {
        self.polylines.iter().flat_map(|l| l.points.iter().copied())
    }
}

/// Contours of `log2 |P|` at each integer level, linearly interpolated along cell edges.
pub fn level_lines<I: IntoIterator<Item = i32>>(grid: &Grid, exponents: I) -> Vec<LevelLine> {
    exponents
        .into_iter()
        .map(|level| LevelLine {
            level,
            polylines: march(grid, level as f64),
        })
        .collect()
}

/// Edge ids: horizontal edges `(i, j)-(i+1, j)` first, then vertical `(i, j)-(i, j+1)`.
struct Edges {
    cols: usize,
    rows: usize,
}

impl Edges {
    fn horizontal(&self, i: usize, j: usize) -> usize {
        j * (self.cols - 1) + i
    }

    fn vertical(&self, i: usize, j: usize) -> usize {
        (self.cols - 1) * self.rows + j * self.cols + i
    }

    fn count(&self) -> usize {
        (self.cols - 1) * self.rows + self.cols * (self.rows - 1)
    }

    /// Grid corners at the two ends of an edge.
    fn ends(&self, e: usize) -> ((usize, usize), (usize, usize)) {
        let h = (self.cols - 1) * self.rows;
        if e < h {
            let (j, i) = (e / (self.cols - 1), e % (self.cols - 1));
            ((i, j), (i + 1, j))
        } else {
            let e = e - h;
            let (j, i) = (e / self.cols, e % self.cols);
            ((i, j), (i, j + 1))
        }
    }
}

fn value(grid: &Grid, i: usize, j: usize) -> f64 {
    let v = grid.log2_at(i, j);
    if v.is_nan() {
        LOG2_CLAMP
    } else {
        v.clamp(-LOG2_CLAMP, LOG2_CLAMP)
    }
}

fn crossing(grid: &Grid, edges: &Edges, e: usize, level: f64) -> Complex {
    let ((i0, j0), (i1, j1)) = edges.ends(e);
    let (a, b) = (value(grid, i0, j0), value(grid, i1, j1));
    let t = if a == b {
        0.5
    } else {
        ((level - a) / (b - a)).clamp(0.0, 1.0)
    };
    let p = grid.window.point(i0, j0);
    let q = grid.window.point(i1, j1);
    p + (q - p) * t
}

fn march(grid: &Grid, level: f64) -> Vec<Polyline> {
    let (cols, rows) = grid.window.resolution;
    let edges = Edges { cols, rows };
    let mut segments: Vec<[usize; 2]> = Vec::new();
    for j in 0..rows - 1 {
        for i in 0..cols - 1 {
            let corners = [
                value(grid, i, j),
                value(grid, i + 1, j),
                value(grid, i + 1, j + 1),
                value(grid, i, j + 1),
            ];
            let case = corners
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &v)| acc | (usize::from(v >= level) << k));
            let bottom = edges.horizontal(i, j);
            let right = edges.vertical(i + 1, j);
            let top = edges.horizontal(i, j + 1);
            let left = edges.vertical(i, j);
            let center_above = corners.iter().sum::<f64>() / 4.0 >= level;
            let pairs: &[[usize; 2]] = match case {
                0 | 15 => &[],
                1 | 14 => &[[left, bottom]],
                2 | 13 => &[[bottom, right]],
                3 | 12 => &[[left, right]],
                4 | 11 => &[[right, top]],
                6 | 9 => &[[bottom, top]],
                7 | 8 => &[[left, top]],
                5 if center_above => &[[bottom, right], [top, left]],
                5 => &[[left, bottom], [right, top]],
                10 if center_above => &[[left, bottom], [right, top]],
                10 => &[[bottom, right], [top, left]],
                _ => unreachable!("four corner bits"),
            };
            segments.extend_from_slice(pairs);
        }
    }
    chain(grid, &edges, &segments, level)
}

/// Joins segments that share an edge into polylines: open ones (ending on the grid
/// boundary) first, then closed loops.
fn chain(grid: &Grid, edges: &Edges, segments: &[[usize; 2]], level: f64) -> Vec<Polyline> {
    const NONE: usize = usize::MAX;
    let mut incident = vec![[NONE; 2]; edges.count()];
    for (s, seg) in segments.iter().enumerate() {
        for &e in seg {
            let slot = &mut incident[e];
            if slot[0] == NONE {
                slot[0] = s;
            } else {
                slot[1] = s;
            }
        }
    }

    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: usize, from: usize, used: &mut Vec<bool>| -> (Vec<usize>, bool) {
        let mut path = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let [a, b] = segments[seg];
            let next = if a == at { b } else { a };
            path.push(next);
            if next == from {
                return (path, true);
            }
            let [s0, s1] = incident[next];
            let other = if s0 == seg { s1 } else { s0 };
            if other == NONE || used[other] {
                return (path, false);
            }
            seg = other;
            at = next;
        }
    };

    for s in 0..segments.len() {
        if used[s] {
            continue;
        }
        let open_end = segments[s]
            .iter()
            .copied()
            .find(|&e| incident[e][1] == NONE);
        if let Some(end) = open_end {
            let (path, closed) = walk(s, end, &mut used);
            out.push((path, closed));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            let (path, closed) = walk(s, segments[s][0], &mut used);
            out.push((path, closed));
        }
    }

    out.into_iter()
        .map(|(path, closed)| Polyline {
            points: path
                .iter()
                .map(|&e| crossing(grid, edges, e, level))
                .collect(),
            closed,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::viz::{sample_grid, Window};

    fn centred(half: f64, res: usize) -> Window {
        Window::square(Complex::new(0.0, 0.0), half, res).unwrap()
    }

    #[test]
    fn identity_levels_are_circles() {
        let z = Polynomial::from_real(&[0.0, 1.0]).unwrap();
        let w = centred(3.0, 129);
        let cell = w.cell_size().0;
        let grid = sample_grid(&z, &w);
        for (level, radius) in [(0, 1.0), (1, 2.0)] {
            let lines = level_lines(&grid, [level]);
            assert_eq!(lines[0].polylines.len(), 1);
            let line = &lines[0].polylines[0];
            assert!(line.closed);
            assert_eq!(line.points.first(), line.points.last());
            let dev = line
                .points
                .iter()
                .map(|p| (p.norm() - radius).abs())
                .fold(0.0, f64::max);
            assert!(dev <= 2.0 * cell, "level {level}: deviation {dev}");
        }
    }

    #[test]
    fn lemniscate_vertices_are_on_the_level() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 1.0]).unwrap();
        let w = centred(2.0, 256);
        let lines = level_lines(&sample_grid(&p, &w), [0]);
        assert!(!lines[0].is_empty());
        for v in lines[0].vertices() {
            assert!((p.eval(v).norm() - 1.0).abs() <= 0.05, "vertex {v}");
        }
    }

    #[test]
    fn empty_level_and_open_contours() {
        let z = Polynomial::from_real(&[0.0, 1.0]).unwrap();
        let grid = sample_grid(&z, &centred(1.0, 32));
        // |z| = 16 never enters the window; |z| = 1.2 only crosses it in arcs
        let lines = level_lines(&grid, [4, 0]);
        assert!(lines[0].is_empty());
        let w = Window::new(Complex::new(1.0, 0.0), 0.5, 0.5, (32, 32)).unwrap();
        let arcs = level_lines(&sample_grid(&z, &w), [0]);
        assert_eq!(arcs[0].polylines.len(), 1);
        assert!(!arcs[0].polylines[0].closed);
    }
}
