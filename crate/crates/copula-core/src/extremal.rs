//! Extremal families and the boundary curves of the footrule–rho region.
//!
//! The lower boundary is attained by the three-piece family `C_a`; the
//! upper-boundary estimate is touched by the two-by-two block family `C_n`;
//! between those touch points the attained curve `r` interpolates with
//! diagonal copulas and convex combinations.

use crate::copula::{Copula, Mixture, OrdinalSum};
use crate::diagonal::{bisect, DiagonalCopula, SymmetricDiagonal, TwoDiagonalCopula};
use crate::error::{CopulaError, Result};
use crate::quad::{integrate_1d, integrate_2d, QuadOptions, QUAD_TOL_1D, QUAD_TOL_2D};
use crate::shuffle::ShuffleOfM;

const SQRT3: f64 = 1.7320508075688772;

fn check_range(what: &'static str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if !(lo..=hi).contains(&x) {
        return Err(CopulaError::Domain { what, value: x, lo, hi });
    }
    Ok(())
}

/// The shuffle `M(3, (a, 1-a), (3, 2, 1), (-1, 1, -1))` for `a` in
/// `[0, 1/2]`: mass on the main diagonal flanked by two opposite-diagonal
/// runs. Its measures are `phi = 6a^2 - 6a + 1` and `rho = 2(1-2a)^3 - 1`,
/// which trace the entire lower boundary (`a = 0` gives M, `a = 1/2` gives W).
pub fn family_ca(a: f64) -> Result<ShuffleOfM> {
    check_range("a", a, 0.0, 0.5)?;
    ShuffleOfM::new(3, &[a, 1.0 - a], &[3, 2, 1], &[-1, 1, -1])
}

/// The straight shuffle `M(2n, (1/2n, ..., (2n-1)/2n), (2, 1, 4, 3, ...), 1)`:
/// n swapped pairs of blocks with `phi = 1 - 3/(2n)`, `rho = 1 - 3/(2n^2)`,
/// sitting exactly on the upper-boundary estimate.
pub fn family_cn(n: usize) -> Result<ShuffleOfM> {
    if n == 0 {
        return Err(CopulaError::Domain {
            what: "n",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let pieces = 2 * n;
    let splits: Vec<f64> = (1..pieces).map(|k| k as f64 / pieces as f64).collect();
    let mut pi = Vec::with_capacity(pieces);
    for k in 0..n {
        pi.push(2 * k + 2);
        pi.push(2 * k + 1);
    }
    ShuffleOfM::new(pieces, &splits, &pi, &vec![1; pieces])
}

/// Copula with all mass on the two diagonals, built from a diagonal that is
/// nondecreasing and 1-Lipschitz on `[0, 1/2]`.
pub fn two_diagonal_from_delta(delta: SymmetricDiagonal) -> Result<TwoDiagonalCopula> {
    TwoDiagonalCopula::new(delta)
}

/// The diagonal copula `K_delta`.
pub fn diagonal_copula(delta: SymmetricDiagonal) -> Result<DiagonalCopula> {
    DiagonalCopula::new(delta)
}

/// `K_{delta_a}` for the flat/identity/steep diagonal family, `a` in
/// `[1/4, 1/2]`; traces the attained curve below `phi = -1/8` with
/// `rho = 8a^3 - 6a + 3/2`.
pub fn kdelta_a(a: f64) -> Result<DiagonalCopula> {
    check_range("a", a, 0.25, 0.5)?;
    DiagonalCopula::new(SymmetricDiagonal::family_a(a)?)
}

/// Ordinal sum of `components` on the given disjoint open intervals, equal to
/// `min(u, v)` outside the squares. Sums of shuffles flatten to one shuffle,
/// keeping the exact measure paths.
pub fn ordinal_sum(intervals: &[(f64, f64)], components: &[Copula]) -> Result<Copula> {
    if intervals.len() != components.len() {
        return Err(CopulaError::InvalidOrdinalSum(format!(
            "{} intervals but {} components",
            intervals.len(),
            components.len()
        )));
    }
    if intervals.is_empty() {
        return Err(CopulaError::InvalidOrdinalSum("no components".into()));
    }
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&i, &j| intervals[i].0.total_cmp(&intervals[j].0));
    let mut prev_end = 0.0;
    for &k in &order {
        let (a, b) = intervals[k];
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
            return Err(CopulaError::InvalidOrdinalSum(format!(
                "bad interval ({a}, {b})"
            )));
        }
        if a < prev_end {
            return Err(CopulaError::InvalidOrdinalSum(format!(
                "intervals overlap near {a}"
            )));
        }
        prev_end = b;
    }

    let shuffles: Option<Vec<ShuffleOfM>> =
        components.iter().map(|c| c.as_shuffle()).collect();
    if let Some(shuffles) = shuffles {
        return Ok(Copula::Shuffle(flatten_ordinal(
            &order
                .iter()
                .map(|&k| (intervals[k], shuffles[k].clone()))
                .collect::<Vec<_>>(),
        )));
    }
    let sorted_intervals: Vec<(f64, f64)> = order.iter().map(|&k| intervals[k]).collect();
    let sorted_components: Vec<Copula> = order.iter().map(|&k| components[k].clone()).collect();
    Ok(Copula::OrdinalSum(OrdinalSum::new_unchecked(
        sorted_intervals,
        sorted_components,
    )))
}

/// Rescale shuffle components into their intervals and fill the gaps with
/// identity pieces.
fn flatten_ordinal(blocks: &[((f64, f64), ShuffleOfM)]) -> ShuffleOfM {
    let mut widths: Vec<f64> = Vec::new();
    let mut pi: Vec<usize> = Vec::new();
    let mut omega: Vec<i8> = Vec::new();
    let mut cursor = 0.0;
    let push_gap = |from: f64, to: f64, widths: &mut Vec<f64>, pi: &mut Vec<usize>, omega: &mut Vec<i8>| {
        if to > from {
            pi.push(widths.len());
            widths.push(to - from);
            omega.push(1);
        }
    };
    for &((a, b), ref s) in blocks {
        push_gap(cursor, a, &mut widths, &mut pi, &mut omega);
        let base = widths.len();
        let scale = b - a;
        for i in 0..s.n() {
            widths.push(scale * s.width(i));
            pi.push(base + s.pi0(i));
            omega.push(s.omega(i));
        }
        cursor = b;
    }
    push_gap(cursor, 1.0, &mut widths, &mut pi, &mut omega);
    let n = widths.len();
    let splits: Vec<f64> = {
        let mut acc = 0.0;
        widths[..n - 1]
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect()
    };
    let pi_one: Vec<usize> = pi.iter().map(|p| p + 1).collect();
    ShuffleOfM::new(n, &splits, &pi_one, &omega).expect("flattened ordinal sum is a valid shuffle")
}

// ---------------------------------------------------------------------------
// boundary curves
// ---------------------------------------------------------------------------

/// Smallest Spearman's rho compatible with footrule value `p`:
/// `(2 sqrt(3) / 9)(1 + 2p)^{3/2} - 1`.
pub fn lower_bound_curve(p: f64) -> Result<f64> {
    check_range("p", p, -0.5, 1.0)?;
    Ok(2.0 * SQRT3 / 9.0 * (1.0 + 2.0 * p).max(0.0).powf(1.5) - 1.0)
}

/// Upper estimate `1 - (2/3)(1 - p)^2` for rho at footrule value `p`;
/// attained exactly at `p = 1 - 3/(2n)`.
pub fn upper_estimate_curve(p: f64) -> Result<f64> {
    check_range("p", p, -0.5, 1.0)?;
    Ok(1.0 - 2.0 / 3.0 * (1.0 - p) * (1.0 - p))
}

const R_PIECE_MAX: usize = 1_000_000;

/// The attained curve `r(x)`: the largest rho realized by the explicit
/// constructions at footrule value `x`. Piecewise: a diagonal-copula arc on
/// `[-1/2, -1/8]`, the chord `(4/3)x + 7/24` on `[-1/8, 1/4]`, then chords
/// between consecutive touch points `1 - 3/(2n)`.
pub fn attained_curve_r(x: f64) -> Result<f64> {
    check_range("x", x, -0.5, 1.0)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    if x <= -0.125 {
        return Ok(2.0 * x + 0.5 - SQRT3 / 9.0 * (1.0 + 2.0 * x).max(0.0).powf(1.5));
    }
    if x <= 0.25 {
        return Ok(4.0 / 3.0 * x + 7.0 / 24.0);
    }
    let n = r_piece_index(x)?;
    let nf = n as f64;
    Ok(((2.0 * nf + 1.0) * x + nf * nf - nf + 0.5) / (nf * nf + nf))
}

/// Index `n >= 2` with `1 - 3/(2n) <= x <= 1 - 3/(2(n+1))`.
fn r_piece_index(x: f64) -> Result<usize> {
    let raw = 3.0 / (2.0 * (1.0 - x));
    if raw >= R_PIECE_MAX as f64 {
        return Err(CopulaError::PieceIndexOverflow { x, max: R_PIECE_MAX });
    }
    let mut n = (raw.floor() as usize).max(2);
    while n > 2 && 1.0 - 3.0 / (2.0 * n as f64) > x {
        n -= 1;
    }
    while 1.0 - 3.0 / (2.0 * (n + 1) as f64) < x {
        n += 1;
    }
    Ok(n)
}

/// Pointwise lower envelope for the cumulative diagonal integral of a
/// two-diagonal copula with footrule value `p`: zero up to
/// `u_0 = (1 - sqrt((1 + 2p) / 3)) / 2` and a half-parabola beyond.
pub fn alpha0_envelope(u: f64, p: f64) -> Result<f64> {
    check_range("u", u, 0.0, 0.5)?;
    check_range("p", p, -0.5, 1.0)?;
    let u0 = alpha0_u0(p);
    if u <= u0 {
        Ok(0.0)
    } else {
        Ok(0.5 * (u - u0) * (u - u0))
    }
}

/// The knee `u_0` of the envelope.
pub fn alpha0_u0(p: f64) -> f64 {
    0.5 * (1.0 - ((1.0 + 2.0 * p).max(0.0) / 3.0).sqrt())
}

/// Smooth test family `delta_s(u) = u - (s/pi) sin(pi u)` with
/// `delta' = 1 - s cos(pi u)` strictly inside `(0, 2)`.
pub fn smooth_diagonal_family(s: f64) -> Result<SymmetricDiagonal> {
    if !(s > 0.0 && s < 1.0) {
        return Err(CopulaError::Domain {
            what: "s",
            value: s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    SymmetricDiagonal::sine(s)
}

// ---------------------------------------------------------------------------
// diagonal-copula identity verification
// ---------------------------------------------------------------------------

/// Residuals of the seven integral identities and the inequality that drive
/// the upper-bound estimate for diagonal copulas.
#[derive(Clone, Debug)]
pub struct DiagonalIdentityReport {
    /// identities (a)-(g), in order
    pub residuals: [f64; 7],
    /// slack of the inequality (h): bound minus the double integral
    pub inequality_slack: f64,
    pub tol: f64,
}

impl DiagonalIdentityReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn all_within(&self) -> bool {
        self.max_residual() <= self.tol && self.inequality_slack >= -self.tol
    }
}

/// Numerically verify, for a smooth strictly increasing symmetric diagonal:
///
/// (a) `g^{-1}(u) = 1 - delta^{-1}(1-u)` with `g = 2u - delta`,
/// (b) `int u delta = alpha(1)/2 + 1/12`,
/// (c) `int alpha = alpha(1)/2 - 1/12`,
/// (d) `int delta^{-1} = 1 - alpha(1)`,
/// (e) `int (delta^{-1})^2 = 5/6 - alpha(1)`,
/// (f) `int alpha(h(u)) du = alpha(1) - 1 + int (4u - delta - u delta') h`,
/// (g) `int int K_delta = int g^{-1} delta^{-1}`,
/// (h) `int int K_delta <= 2 alpha(1) - 2 alpha(1)^2 - 1/6`.
///
/// Inverses are computed by bisection; integrals by adaptive Simpson.
pub fn verify_diagonal_identities(
    delta: &SymmetricDiagonal,
    tol: f64,
) -> Result<DiagonalIdentityReport> {
    if !delta.is_smooth_invertible() {
        return Err(CopulaError::InvalidDiagonal(
            "identities require 0 < delta' < 2 (no flat or slope-2 pieces)".into(),
        ));
    }
    let alpha1 = delta.alpha(1.0);
    let d1 = QuadOptions::d1(QUAD_TOL_1D);
    let seeds = delta.breakpoints();

    let g = |u: f64| 2.0 * u - delta.value(u);
    let g_inv = |y: f64| bisect(g, y);
    let d_inv = |y: f64| delta.inverse(y);
    let h = |u: f64| d_inv(g(u));

    // (a)
    let mut res_a = 0.0f64;
    for i in 0..=200 {
        let u = i as f64 / 200.0;
        res_a = res_a.max((g_inv(u) - (1.0 - d_inv(1.0 - u))).abs());
    }

    // (b)
    let int_ud = integrate_1d(|u| u * delta.value(u), 0.0, 1.0, &seeds, d1)?;
    let res_b = (int_ud - (0.5 * alpha1 + 1.0 / 12.0)).abs();

    // (c)
    let int_alpha = integrate_1d(|u| delta.alpha(u), 0.0, 1.0, &seeds, d1)?;
    let res_c = (int_alpha - (0.5 * alpha1 - 1.0 / 12.0)).abs();

    // (d)
    let int_dinv = integrate_1d(d_inv, 0.0, 1.0, &[], d1)?;
    let res_d = (int_dinv - (1.0 - alpha1)).abs();

    // (e)
    let int_dinv2 = integrate_1d(
        |u| {
            let t = d_inv(u);
            t * t
        },
        0.0,
        1.0,
        &[],
        d1,
    )?;
    let res_e = (int_dinv2 - (5.0 / 6.0 - alpha1)).abs();

    // (f)
    let lhs_f = integrate_1d(|u| delta.alpha(h(u)), 0.0, 1.0, &seeds, d1)?;
    let rhs_f = alpha1 - 1.0
        + integrate_1d(
            |u| (4.0 * u - delta.value(u) - u * delta.derivative(u)) * h(u),
            0.0,
            1.0,
            &seeds,
            d1,
        )?;
    let res_f = (lhs_f - rhs_f).abs();

    // (g) and (h)
    let k = DiagonalCopula::new(delta.clone())?;
    let int_k = integrate_2d(
        |u, v| k.eval_unchecked(u, v),
        &seeds,
        &seeds,
        QuadOptions::d2(QUAD_TOL_2D),
    )?;
    let rhs_g = integrate_1d(|u| g_inv(u) * d_inv(u), 0.0, 1.0, &[], d1)?;
    let res_g = (int_k - rhs_g).abs();
    let bound_h = 2.0 * alpha1 - 2.0 * alpha1 * alpha1 - 1.0 / 6.0;

    Ok(DiagonalIdentityReport {
        residuals: [res_a, res_b, res_c, res_d, res_e, res_f, res_g],
        inequality_slack: bound_h - int_k,
        tol,
    })
}

// ---------------------------------------------------------------------------
// attainment of the r curve
// ---------------------------------------------------------------------------

/// A copula whose (footrule, rho) pair lands on `(x, r(x))`.
///
/// Diagonal copulas cover `[-1/2, -1/8]`; the chords are covered by convex
/// combinations of the endpoints' witnesses (both measures are affine in the
/// mixing weight).
pub fn attainment_copula(x: f64) -> Result<Copula> {
    check_range("x", x, -0.5, 1.0)?;
    if x == 1.0 {
        return Ok(Copula::M);
    }
    if x <= -0.125 {
        let a = alpha0_u0(x);
        return Ok(Copula::Diagonal(kdelta_a(a.clamp(0.25, 0.5))?));
    }
    if x <= 0.25 {
        let k = Copula::Diagonal(kdelta_a(0.25)?);
        let c2 = Copula::Shuffle(family_cn(2)?);
        // phi(K) = -1/8, phi(C_2) = 1/4: interpolate in the weight
        let t = ((0.25 - x) / 0.375).clamp(0.0, 1.0);
        return Ok(Copula::Mixture(Mixture::new(vec![(t, k), (1.0 - t, c2)])?));
    }
    let n = r_piece_index(x)?;
    let lo = 1.0 - 3.0 / (2.0 * n as f64);
    let hi = 1.0 - 3.0 / (2.0 * (n + 1) as f64);
    let t = ((hi - x) / (hi - lo)).clamp(0.0, 1.0);
    let cn = Copula::Shuffle(family_cn(n)?);
    let cn1 = Copula::Shuffle(family_cn(n + 1)?);
    Ok(Copula::Mixture(Mixture::new(vec![(t, cn), (1.0 - t, cn1)])?))
}
