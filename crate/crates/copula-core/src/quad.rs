//! Adaptive Simpson quadrature in one and two dimensions.
//!
//! Both integrators keep a worklist of subintervals (cells in 2d) ordered by
//! a per-piece error estimate and refine the worst one until the summed
//! estimate drops below the requested absolute tolerance. Integrands here are
//! piecewise smooth with finitely many kink lines, so the refinement
//! concentrates along the kinks and everything else terminates at the first
//! level. Known kink locations can be passed as seed points to start from an
//! aligned subdivision.

use crate::error::{CopulaError, Result};
use std::collections::BinaryHeap;

/// Default absolute tolerance for 1d integrals.
pub const QUAD_TOL_1D: f64 = 1e-10;
/// Default absolute tolerance for 2d integrals.
pub const QUAD_TOL_2D: f64 = 1e-9;
/// Maximum bisection depth per interval/cell.
pub const MAX_QUAD_DEPTH: u32 = 30;

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_depth: u32,
    pub max_cells: usize,
}

impl QuadOptions {
    pub fn d1(tol: f64) -> Self {
        QuadOptions {
            tol,
            max_depth: MAX_QUAD_DEPTH,
            max_cells: 400_000,
        }
    }

    pub fn d2(tol: f64) -> Self {
        QuadOptions {
            tol,
            max_depth: MAX_QUAD_DEPTH,
            max_cells: 4_000_000,
        }
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, len: f64) -> f64 {
    len * (fa + 4.0 * fm + fb) / 6.0
}

struct Piece {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
    depth: u32,
    // cached evaluations at a, midpoint, b
    fa: f64,
    fm: f64,
    fb: f64,
}

impl Piece {
    fn new(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, depth: u32) -> Self {
        let m = 0.5 * (a + b);
        let fm = f(m);
        let fq1 = f(0.5 * (a + m));
        let fq3 = f(0.5 * (m + b));
        let coarse = simpson(fa, fm, fb, b - a);
        let fine = simpson(fa, fq1, fm, m - a) + simpson(fm, fq3, fb, b - m);
        // Two independent indicators, both without the Richardson factor:
        // the integrands here have kink families on which a single symmetric
        // comparison can vanish identically while the true error does not.
        // The 3/8 rule samples at thirds, breaking that degeneracy.
        let h = b - a;
        let s38 = h * (fa + 3.0 * f(a + h / 3.0) + 3.0 * f(a + 2.0 * h / 3.0) + fb) / 8.0;
        let err = (fine - coarse).abs().max((s38 - fine).abs());
        Piece {
            err,
            a,
            b,
            value: fine + (fine - coarse) / 15.0,
            depth,
            fa,
            fm,
            fb,
        }
    }
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integrate `f` over `[a, b]` to absolute tolerance `opts.tol`.
///
/// `seeds` lists interior points where `f` may have kinks; the initial
/// subdivision is aligned to them.
pub fn integrate_1d(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    seeds: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    let proper = b > a;
    if !proper {
        // empty, inverted or NaN interval
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(seeds.iter().copied().filter(|&s| s > a && s < b));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut fa = f(cuts[0]);
    for w in cuts.windows(2) {
        let fb = f(w[1]);
        let piece = Piece::new(&f, w[0], w[1], fa, fb, 0);
        total += piece.value;
        total_err += piece.err;
        heap.push(piece);
        fa = fb;
    }

    while total_err > opts.tol {
        let worst = heap.pop().expect("non-empty worklist");
        if worst.depth >= opts.max_depth || heap.len() + 2 > opts.max_cells {
            return Err(CopulaError::ToleranceNotReached {
                tol: opts.tol,
                residual: total_err,
            });
        }
        total -= worst.value;
        total_err -= worst.err;
        let m = 0.5 * (worst.a + worst.b);
        for (lo, hi, flo, fhi) in [
            (worst.a, m, worst.fa, worst.fm),
            (m, worst.b, worst.fm, worst.fb),
        ] {
            let piece = Piece::new(&f, lo, hi, flo, fhi, worst.depth + 1);
            total += piece.value;
            total_err += piece.err;
            heap.push(piece);
        }
    }
    Ok(total)
}

struct Cell {
    err: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: f64,
    depth: u32,
}

impl Cell {
    fn new(f: &impl Fn(f64, f64) -> f64, x0: f64, x1: f64, y0: f64, y1: f64, depth: u32) -> Self {
        // 5x5 tensor grid: coarse Simpson on the corners/midpoints, fine
        // Simpson as the sum over the four quadrants.
        let xs = [x0, 0.25 * (3.0 * x0 + x1), 0.5 * (x0 + x1), 0.25 * (x0 + 3.0 * x1), x1];
        let ys = [y0, 0.25 * (3.0 * y0 + y1), 0.5 * (y0 + y1), 0.25 * (y0 + 3.0 * y1), y1];
        let mut g = [[0.0f64; 5]; 5];
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                g[i][j] = f(x, y);
            }
        }
        let tensor = |i0: usize, j0: usize, w: f64, h: f64| -> f64 {
            let mut s = 0.0;
            let wts = [1.0, 4.0, 1.0];
            for di in 0..3 {
                for dj in 0..3 {
                    s += wts[di] * wts[dj] * g[i0 + di][j0 + dj];
                }
            }
            s * w * h / 36.0
        };
        let w = x1 - x0;
        let h = y1 - y0;
        // coarse rule uses every other node of the 5x5 grid
        let wts = [1.0, 4.0, 1.0];
        let mut coarse = 0.0;
        for di in 0..3 {
            for dj in 0..3 {
                coarse += wts[di] * wts[dj] * g[2 * di][2 * dj];
            }
        }
        coarse *= w * h / 36.0;
        let fine = tensor(0, 0, 0.5 * w, 0.5 * h)
            + tensor(2, 0, 0.5 * w, 0.5 * h)
            + tensor(0, 2, 0.5 * w, 0.5 * h)
            + tensor(2, 2, 0.5 * w, 0.5 * h);
        // secondary indicator on third-point nodes; see Piece::new
        let x38 = [x0, x0 + w / 3.0, x0 + 2.0 * w / 3.0, x1];
        let y38 = [y0, y0 + h / 3.0, y0 + 2.0 * h / 3.0, y1];
        let w38 = [1.0, 3.0, 3.0, 1.0];
        let mut s38 = 0.0;
        for (i, &x) in x38.iter().enumerate() {
            for (j, &y) in y38.iter().enumerate() {
                s38 += w38[i] * w38[j] * f(x, y);
            }
        }
        s38 *= w * h / 64.0;
        let err = (fine - coarse).abs().max((s38 - fine).abs());
        Cell {
            err,
            x0,
            x1,
            y0,
            y1,
            value: fine + (fine - coarse) / 15.0,
            depth,
        }
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn cut_points(seeds: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    cuts.extend(seeds.iter().copied().filter(|&s| s > 0.0 && s < 1.0));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    cuts
}

/// Integrate `f` over the unit square to absolute tolerance `opts.tol`.
///
/// `seeds_x`/`seeds_y` list axis positions of known kink lines; the initial
/// cell grid is aligned to them.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    seeds_x: &[f64],
    seeds_y: &[f64],
    opts: QuadOptions,
) -> Result<f64> {
    let xs = cut_points(seeds_x);
    let ys = cut_points(seeds_y);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for wx in xs.windows(2) {
        for wy in ys.windows(2) {
            let cell = Cell::new(&f, wx[0], wx[1], wy[0], wy[1], 0);
            total += cell.value;
            total_err += cell.err;
            heap.push(cell);
        }
    }

    while total_err > opts.tol {
        let worst = heap.pop().expect("non-empty worklist");
        if worst.depth >= opts.max_depth || heap.len() + 4 > opts.max_cells {
            return Err(CopulaError::ToleranceNotReached {
                tol: opts.tol,
                residual: total_err,
            });
        }
        total -= worst.value;
        total_err -= worst.err;
        let mx = 0.5 * (worst.x0 + worst.x1);
        let my = 0.5 * (worst.y0 + worst.y1);
        for (x0, x1) in [(worst.x0, mx), (mx, worst.x1)] {
            for (y0, y1) in [(worst.y0, my), (my, worst.y1)] {
                let cell = Cell::new(&f, x0, x1, y0, y1, worst.depth + 1);
                total += cell.value;
                total_err += cell.err;
                heap.push(cell);
            }
        }
    }
    Ok(total)
}
