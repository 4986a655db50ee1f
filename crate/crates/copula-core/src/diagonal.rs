//! Symmetric diagonals and the copula families they generate.
//!
//! A symmetric diagonal is a candidate diagonal section delta with
//! `delta(u) = 2u - 1 + delta(1 - u)`, the hallmark of doubly symmetric
//! copulas. Two families are supported: piecewise-linear diagonals given by
//! breakpoints, and the smooth one-parameter family
//! `delta_s(u) = u - (s/pi) sin(pi u)`.

use crate::error::{CopulaError, Result};
use crate::{POINTWISE_TOL, WIDTH_TOL};

#[derive(Clone, Debug)]
pub enum SymmetricDiagonal {
    PiecewiseLinear(PiecewiseDiagonal),
    Sine { s: f64 },
}

/// Piecewise-linear diagonal with precomputed cumulative integrals.
#[derive(Clone, Debug)]
pub struct PiecewiseDiagonal {
    pts: Vec<(f64, f64)>,
    cum: Vec<f64>,
}

impl PiecewiseDiagonal {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.pts
    }
}

const BISECT_ITERS: u32 = 60;

impl SymmetricDiagonal {
    /// The diagonal `delta(u) = u` of the upper Fréchet bound.
    pub fn identity() -> Self {
        SymmetricDiagonal::Sine { s: 0.0 }
    }

    /// Smooth family `delta_s(u) = u - (s/pi) sin(pi u)` for `0 <= s < 1`.
    pub fn sine(s: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&s) {
            return Err(CopulaError::Domain {
                what: "s",
                value: s,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(SymmetricDiagonal::Sine { s })
    }

    /// The flat/identity/steep diagonal: 0 on `[0, a]`, slope 1 on
    /// `[a, 1-a]`, slope 2 on `[1-a, 1]`, for `a` in `[0, 1/2]`.
    pub fn family_a(a: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&a) {
            return Err(CopulaError::Domain {
                what: "a",
                value: a,
                lo: 0.0,
                hi: 0.5,
            });
        }
        let mut pts = vec![(0.0, 0.0)];
        if a > 0.0 {
            pts.push((a, 0.0));
        }
        if a < 0.5 {
            pts.push((1.0 - a, 1.0 - 2.0 * a));
        }
        pts.push((1.0, 1.0));
        Self::piecewise_linear(pts)
    }

    /// Validated piecewise-linear diagonal from breakpoints `(u, delta(u))`.
    pub fn piecewise_linear(pts: Vec<(f64, f64)>) -> Result<Self> {
        if pts.len() < 2 {
            return Err(CopulaError::InvalidDiagonal("need at least two breakpoints".into()));
        }
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if first.0.abs() > WIDTH_TOL || first.1.abs() > WIDTH_TOL {
            return Err(CopulaError::InvalidDiagonal("delta(0) must be 0".into()));
        }
        if (last.0 - 1.0).abs() > WIDTH_TOL || (last.1 - 1.0).abs() > WIDTH_TOL {
            return Err(CopulaError::InvalidDiagonal("delta(1) must be 1".into()));
        }
        for w in pts.windows(2) {
            let dx = w[1].0 - w[0].0;
            let dy = w[1].1 - w[0].1;
            if dx < 0.0 {
                return Err(CopulaError::InvalidDiagonal("breakpoints must be sorted".into()));
            }
            if dy < -WIDTH_TOL {
                return Err(CopulaError::InvalidDiagonal("diagonal must be nondecreasing".into()));
            }
            if dy > 2.0 * dx + WIDTH_TOL {
                return Err(CopulaError::InvalidDiagonal("diagonal must be 2-Lipschitz".into()));
            }
        }
        let mut cum = Vec::with_capacity(pts.len());
        cum.push(0.0);
        let mut acc = 0.0;
        for w in pts.windows(2) {
            acc += 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0);
            cum.push(acc);
        }
        let d = SymmetricDiagonal::PiecewiseLinear(PiecewiseDiagonal { pts, cum });
        d.check_bounds_and_symmetry()?;
        Ok(d)
    }

    fn check_bounds_and_symmetry(&self) -> Result<()> {
        let probes: Vec<f64> = match self {
            SymmetricDiagonal::PiecewiseLinear(p) => {
                let mut xs: Vec<f64> = p.pts.iter().map(|&(x, _)| x).collect();
                xs.extend(p.pts.iter().map(|&(x, _)| 1.0 - x));
                xs
            }
            SymmetricDiagonal::Sine { .. } => (0..=64).map(|i| i as f64 / 64.0).collect(),
        };
        for &x in &probes {
            if !(0.0..=1.0).contains(&x) {
                continue;
            }
            let d = self.value(x);
            if d > x + POINTWISE_TOL || d < (2.0 * x - 1.0).max(0.0) - POINTWISE_TOL {
                return Err(CopulaError::InvalidDiagonal(format!(
                    "delta({x}) = {d} violates the Fréchet envelope"
                )));
            }
            let sym = 2.0 * x - 1.0 + self.value(1.0 - x);
            if (d - sym).abs() > POINTWISE_TOL {
                return Err(CopulaError::InvalidDiagonal(format!(
                    "symmetry fails at u = {x}: delta = {d}, 2u-1+delta(1-u) = {sym}"
                )));
            }
        }
        Ok(())
    }

    pub fn value(&self, u: f64) -> f64 {
        match self {
            SymmetricDiagonal::PiecewiseLinear(p) => {
                let i = locate(&p.pts, u);
                let (x0, y0) = p.pts[i];
                let (x1, y1) = p.pts[i + 1];
                if x1 > x0 {
                    y0 + (y1 - y0) * (u - x0) / (x1 - x0)
                } else {
                    y0
                }
            }
            SymmetricDiagonal::Sine { s } => {
                u - s / std::f64::consts::PI * (std::f64::consts::PI * u).sin()
            }
        }
    }

    /// Cumulative integral `alpha(u) = int_0^u delta`.
    pub fn alpha(&self, u: f64) -> f64 {
        match self {
            SymmetricDiagonal::PiecewiseLinear(p) => {
                let i = locate(&p.pts, u);
                let (x0, y0) = p.pts[i];
                let t = u - x0;
                p.cum[i] + y0 * t + 0.5 * self.slope_right(i) * t * t
            }
            SymmetricDiagonal::Sine { s } => {
                let pi = std::f64::consts::PI;
                0.5 * u * u - s / (pi * pi) * (1.0 - (pi * u).cos())
            }
        }
    }

    fn slope_right(&self, piece: usize) -> f64 {
        match self {
            SymmetricDiagonal::PiecewiseLinear(p) => {
                let (x0, y0) = p.pts[piece];
                let (x1, y1) = p.pts[piece + 1];
                if x1 > x0 {
                    (y1 - y0) / (x1 - x0)
                } else {
                    0.0
                }
            }
            SymmetricDiagonal::Sine { .. } => unreachable!(),
        }
    }

    /// Derivative where it exists (right-continuous at breakpoints).
    pub fn derivative(&self, u: f64) -> f64 {
        match self {
            SymmetricDiagonal::PiecewiseLinear(p) => {
                let i = locate(&p.pts, u);
                self.slope_right(i.min(p.pts.len() - 2))
            }
            SymmetricDiagonal::Sine { s } => 1.0 - s * (std::f64::consts::PI * u).cos(),
        }
    }

    /// Inverse by bisection on `[0, 1]`; requires `y` in `[0, 1]`.
    pub fn inverse(&self, y: f64) -> f64 {
        bisect(|u| self.value(u), y)
    }

    /// True when the derivative stays strictly inside (0, 2), so that delta,
    /// g = 2u - delta and h = delta^{-1}(g) are all invertible.
    pub fn is_smooth_invertible(&self) -> bool {
        match self {
            SymmetricDiagonal::PiecewiseLinear(p) => (0..p.pts.len() - 1).all(|i| {
                let (x0, _) = p.pts[i];
                let (x1, _) = p.pts[i + 1];
                if x1 <= x0 {
                    return false;
                }
                let m = self.slope_right(i);
                m > 1e-9 && m < 2.0 - 1e-9
            }),
            SymmetricDiagonal::Sine { s } => *s < 1.0,
        }
    }

    /// Interior breakpoint abscissas, used to seed quadrature grids.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            SymmetricDiagonal::PiecewiseLinear(p) => p.pts[1..p.pts.len() - 1]
                .iter()
                .map(|&(x, _)| x)
                .collect(),
            SymmetricDiagonal::Sine { .. } => Vec::new(),
        }
    }
}

fn locate(pts: &[(f64, f64)], u: f64) -> usize {
    // index of the piece containing u; clamps to the last piece at u = 1
    let k = pts.partition_point(|&(x, _)| x <= u);
    k.saturating_sub(1).min(pts.len() - 2)
}

/// Bisection solve of `f(u) = y` for nondecreasing `f` on `[0, 1]`.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, y: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The diagonal copula `K_delta(u, v) = min(u, v, (delta(u) + delta(v)) / 2)`,
/// the pointwise-largest symmetric copula with diagonal section delta.
#[derive(Clone, Debug)]
pub struct DiagonalCopula {
    delta: SymmetricDiagonal,
}

impl DiagonalCopula {
    pub fn new(delta: SymmetricDiagonal) -> Result<Self> {
        delta.check_bounds_and_symmetry()?;
        Ok(DiagonalCopula { delta })
    }

    pub fn delta(&self) -> &SymmetricDiagonal {
        &self.delta
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        u.min(v).min(0.5 * (self.delta.value(u) + self.delta.value(v)))
    }
}

/// A copula with all its mass on the two diagonals of the unit square.
///
/// The surface is determined by the diagonal section: constant-plus-delta on
/// the vertical/horizontal "wedges" cut out by the diagonals.
#[derive(Clone, Debug)]
pub struct TwoDiagonalCopula {
    delta: SymmetricDiagonal,
}

impl TwoDiagonalCopula {
    /// Requires delta nondecreasing and 1-Lipschitz on `[0, 1/2]` (the
    /// symmetry identity then pins the rest).
    pub fn new(delta: SymmetricDiagonal) -> Result<Self> {
        delta.check_bounds_and_symmetry()?;
        match &delta {
            SymmetricDiagonal::PiecewiseLinear(p) => {
                // absolute increment test restricted to the overlap with
                // [0, 1/2], so vanishing piece widths and splits that land a
                // hair before 1/2 cannot produce spurious slopes
                for i in 0..p.pts.len() - 1 {
                    let (x0, y0) = p.pts[i];
                    let (x1, _) = p.pts[i + 1];
                    if x0 >= 0.5 || x1 <= x0 {
                        continue;
                    }
                    let hi = x1.min(0.5);
                    let dy = delta.value(hi) - y0;
                    if dy > (hi - x0) + WIDTH_TOL {
                        return Err(CopulaError::InvalidDiagonal(format!(
                            "increment {dy} on [{x0}, {hi}] exceeds 1-Lipschitz growth on [0, 1/2]"
                        )));
                    }
                }
            }
            SymmetricDiagonal::Sine { .. } => {
                // derivative on [0, 1/2] is 1 - s cos(pi u) in [1 - s, 1]
            }
        }
        Ok(TwoDiagonalCopula { delta })
    }

    pub fn delta(&self) -> &SymmetricDiagonal {
        &self.delta
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        let d = &self.delta;
        if u <= 0.5 && v >= u && v <= 1.0 - u {
            d.value(u)
        } else if v <= 0.5 && u >= v && u <= 1.0 - v {
            d.value(v)
        } else if u >= 0.5 && v >= 1.0 - u && v <= u {
            d.value(u) + v - u
        } else {
            d.value(v) + u - v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_family_basics() {
        let d = SymmetricDiagonal::sine(0.5).unwrap();
        // alpha(1) = 1/2 - 2s/pi^2
        let expect = 0.5 - 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((d.alpha(1.0) - expect).abs() < 1e-14);
        for i in 0..=40 {
            let u = i as f64 / 40.0;
            let dd = d.derivative(u);
            assert!(dd > 0.49 && dd < 1.51);
        }
        assert!(SymmetricDiagonal::sine(1.0).is_err());
    }

    #[test]
    fn family_a_matches_closed_form() {
        let d = SymmetricDiagonal::family_a(0.25).unwrap();
        assert_eq!(d.value(0.1), 0.0);
        assert!((d.value(0.5) - 0.25).abs() < 1e-15);
        assert!((d.value(0.9) - 0.8).abs() < 1e-15);
        // int delta = 1/2 - a + a^2 = 5/16 at a = 1/4
        assert!((d.alpha(1.0) - 5.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn symmetry_violation_is_rejected() {
        // any two-piece diagonal split at 1/2 is automatically symmetric
        let r = SymmetricDiagonal::piecewise_linear(vec![(0.0, 0.0), (0.5, 0.1), (1.0, 1.0)]);
        assert!(r.is_ok());
        // a breakpoint off 1/2 with no mirrored counterpart is not
        let r = SymmetricDiagonal::piecewise_linear(vec![(0.0, 0.0), (0.25, 0.2), (1.0, 1.0)]);
        assert!(r.is_err(), "asymmetric diagonal must be rejected");
    }

    #[test]
    fn inverse_brackets_value() {
        let d = SymmetricDiagonal::sine(0.3).unwrap();
        for i in 1..20 {
            let y = i as f64 / 20.0;
            let u = d.inverse(y);
            assert!((d.value(u) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_copula_has_delta_as_diagonal() {
        let k = DiagonalCopula::new(SymmetricDiagonal::family_a(0.3).unwrap()).unwrap();
        for i in 0..=50 {
            let u = i as f64 / 50.0;
            assert!((k.eval_unchecked(u, u) - k.delta().value(u)).abs() < 1e-14);
        }
        let m = DiagonalCopula::new(SymmetricDiagonal::identity()).unwrap();
        assert!((m.eval_unchecked(0.3, 0.8) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn two_diagonal_rejects_steep_slopes() {
        // valid symmetric diagonal with slope 2 on [0.2, 0.3] (mirrored by a
        // flat piece on [0.7, 0.8]); fine for K_delta, too steep on [0, 1/2]
        // for the two-diagonal construction
        let steep = SymmetricDiagonal::piecewise_linear(vec![
            (0.0, 0.0),
            (0.2, 0.0),
            (0.3, 0.2),
            (0.7, 0.6),
            (0.8, 0.6),
            (1.0, 1.0),
        ])
        .expect("valid symmetric diagonal");
        assert!(DiagonalCopula::new(steep.clone()).is_ok());
        assert!(TwoDiagonalCopula::new(steep).is_err());
    }

    #[test]
    fn two_diagonal_of_identity_is_m() {
        let c = TwoDiagonalCopula::new(SymmetricDiagonal::identity()).unwrap();
        for i in 0..=20 {
            for j in 0..=20 {
                let u = i as f64 / 20.0;
                let v = j as f64 / 20.0;
                assert!((c.eval_unchecked(u, v) - u.min(v)).abs() < 1e-14);
            }
        }
    }
}
