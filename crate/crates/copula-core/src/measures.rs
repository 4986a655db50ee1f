//! The concordance function and the five (weak) concordance measures.
//!
//! For shuffles of M every measure is exact: the mass parametrization makes
//! each integrand a piecewise polynomial of degree at most two, integrated in
//! closed form. Mixtures inherit exactness by linearity for everything except
//! Kendall's tau. Other surfaces fall back to adaptive quadrature with an
//! honest method tag.

use crate::copula::Copula;
use crate::error::{CopulaError, Result};
use crate::quad::{integrate_1d, integrate_2d, QuadOptions, QUAD_TOL_1D, QUAD_TOL_2D};
use crate::shuffle::{Segment, ShuffleOfM};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How a reported measure value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Quadrature { tol: f64 },
    MonteCarlo { n: u64, stderr: f64 },
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Exact => write!(f, "exact"),
            Method::Quadrature { tol } => write!(f, "quadrature({tol:e})"),
            Method::MonteCarlo { n, stderr } => write!(f, "monte-carlo({n},{stderr:e})"),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: f64,
    pub method: Method,
}

/// All five measures of one copula. Kendall's tau is absent when no exact
/// path exists for the input (it is not affine in the copula, so mixtures
/// and quadrature surfaces get no shortcut).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureReport {
    pub phi: MeasureValue,
    pub rho: MeasureValue,
    pub tau: Option<MeasureValue>,
    pub gamma: MeasureValue,
    pub beta: MeasureValue,
}

pub const MEASURE_CSV_HEADER: &str =
    "phi,rho,tau,gamma,beta,method_phi,method_rho,method_tau,method_gamma,method_beta";

impl MeasureReport {
    pub fn compute(c: &Copula) -> Result<MeasureReport> {
        let (phi, mp) = phi_with_method(c)?;
        let (rho, mr) = rho_with_method(c)?;
        let (gamma, mg) = gamma_with_method(c)?;
        let beta = blomqvist_beta(c)?;
        let tau = match kendall_tau_copula(c) {
            Ok(t) => Some(MeasureValue { value: t, method: Method::Exact }),
            Err(CopulaError::UnsupportedExact(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(MeasureReport {
            phi: MeasureValue { value: phi, method: mp },
            rho: MeasureValue { value: rho, method: mr },
            tau,
            gamma: MeasureValue { value: gamma, method: mg },
            beta: MeasureValue { value: beta, method: Method::Exact },
        })
    }

    /// Seeded Monte Carlo report for samplable copulas.
    pub fn compute_monte_carlo(c: &Copula, n: usize, seed: u64) -> Result<MeasureReport> {
        let mc = monte_carlo_measures(c, n, seed)?;
        let mv = |e: McEstimate| MeasureValue {
            value: e.value,
            method: Method::MonteCarlo { n: n as u64, stderr: e.stderr },
        };
        Ok(MeasureReport {
            phi: mv(mc.phi),
            rho: mv(mc.rho),
            tau: Some(mv(mc.tau)),
            gamma: mv(mc.gamma),
            beta: mv(mc.beta),
        })
    }

    pub fn csv_row(&self) -> String {
        let tau_v = self.tau.map_or(String::new(), |t| format!("{}", t.value));
        let tau_m = self.tau.map_or("none".into(), |t| t.method.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.phi.value,
            self.rho.value,
            tau_v,
            self.gamma.value,
            self.beta.value,
            self.phi.method,
            self.rho.method,
            tau_m,
            self.gamma.method,
            self.beta.method
        )
    }
}

// ---------------------------------------------------------------------------
// concordance function
// ---------------------------------------------------------------------------

/// Kink-line inventory of a surface whose restriction to any slope ±1 line is
/// piecewise polynomial of degree at most two.
struct KinkSet {
    verticals: Vec<f64>,
    horizontals: Vec<f64>,
    /// lines u - v = d
    diagonals: Vec<f64>,
    /// lines u + v = s
    antidiagonals: Vec<f64>,
}

fn exact_kinks(surface: &Copula) -> Option<KinkSet> {
    let mut k = KinkSet {
        verticals: Vec::new(),
        horizontals: Vec::new(),
        diagonals: Vec::new(),
        antidiagonals: Vec::new(),
    };
    fn collect(c: &Copula, k: &mut KinkSet) -> bool {
        match c {
            Copula::M => {
                k.diagonals.push(0.0);
                true
            }
            Copula::W => {
                k.antidiagonals.push(1.0);
                true
            }
            Copula::Pi => true,
            Copula::Shuffle(s) => {
                for seg in s.segments() {
                    k.verticals.push(seg.u_lo);
                    k.verticals.push(seg.u_lo + seg.width);
                    k.horizontals.push(seg.v_lo);
                    k.horizontals.push(seg.v_hi);
                    if seg.rising {
                        k.diagonals.push(seg.u_lo - seg.v_lo);
                    } else {
                        k.antidiagonals.push(seg.u_lo + seg.v_hi);
                    }
                }
                true
            }
            Copula::Mixture(m) => m.components().iter().all(|(_, c)| collect(c, k)),
            _ => false,
        }
    }
    if collect(surface, &mut k) {
        Some(k)
    } else {
        None
    }
}

/// The concordance function `Q = 4 int C2 dC1 - 1` with `C1` given by a
/// shuffle (the mass) and `C2` an evaluable surface.
///
/// When the surface is a shuffle, M, W, Pi or a mixture of those, each mass
/// segment is cut at its crossings with the surface's kink lines and every
/// piece is integrated exactly by Simpson's rule (the integrand is piecewise
/// polynomial of degree at most two). Otherwise per-segment adaptive Simpson
/// to `1e-10` is used.
pub fn concordance_q(mass: &ShuffleOfM, surface: &Copula) -> Result<f64> {
    Ok(concordance_q_with_method(mass, surface)?.0)
}

pub(crate) fn concordance_q_with_method(
    mass: &ShuffleOfM,
    surface: &Copula,
) -> Result<(f64, Method)> {
    if let Some(kinks) = exact_kinks(surface) {
        let mut total = 0.0;
        for seg in mass.segments() {
            total += segment_integral_exact(&seg, surface, &kinks);
        }
        Ok((4.0 * total - 1.0, Method::Exact))
    } else {
        let mut total = 0.0;
        for seg in mass.segments() {
            let g = |t: f64| {
                let (u, v) = seg.point(t);
                surface.eval_unchecked(u.clamp(0.0, 1.0), v.clamp(0.0, 1.0))
            };
            total += integrate_1d(g, 0.0, seg.width, &[], QuadOptions::d1(QUAD_TOL_1D))?;
        }
        Ok((4.0 * total - 1.0, Method::Quadrature { tol: QUAD_TOL_1D }))
    }
}

fn segment_integral_exact(seg: &Segment, surface: &Copula, kinks: &KinkSet) -> f64 {
    let w = seg.width;
    let mut ts: Vec<f64> = vec![0.0, w];
    let push = |t: f64, ts: &mut Vec<f64>| {
        if t > 0.0 && t < w {
            ts.push(t);
        }
    };
    for &x in &kinks.verticals {
        push(x - seg.u_lo, &mut ts);
    }
    for &y in &kinks.horizontals {
        let t = if seg.rising { y - seg.v_lo } else { seg.v_hi - y };
        push(t, &mut ts);
    }
    if seg.rising {
        // rising segments are parallel to diagonal kink lines
        for &s in &kinks.antidiagonals {
            push(0.5 * (s - seg.u_lo - seg.v_lo), &mut ts);
        }
    } else {
        for &d in &kinks.diagonals {
            push(0.5 * (d - seg.u_lo + seg.v_hi), &mut ts);
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let g = |t: f64| {
        let (u, v) = seg.point(t);
        surface.eval_unchecked(u.clamp(0.0, 1.0), v.clamp(0.0, 1.0))
    };
    let mut acc = 0.0;
    for pair in ts.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let m = 0.5 * (t0 + t1);
        acc += (t1 - t0) * (g(t0) + 4.0 * g(m) + g(t1)) / 6.0;
    }
    acc
}

// ---------------------------------------------------------------------------
// diagonal sections
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionKind {
    Main,
    Anti,
}

/// Piecewise-linear restriction of a copula to the main or opposite diagonal.
#[derive(Clone, Debug)]
pub struct DiagonalSection {
    points: Vec<(f64, f64)>,
    exact: bool,
}

impl DiagonalSection {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn value(&self, u: f64) -> f64 {
        let i = self
            .points
            .partition_point(|&(x, _)| x <= u)
            .saturating_sub(1)
            .min(self.points.len() - 2);
        let (x0, y0) = self.points[i];
        let (x1, y1) = self.points[i + 1];
        if x1 > x0 {
            y0 + (y1 - y0) * (u - x0) / (x1 - x0)
        } else {
            y0
        }
    }

    /// Exact integral over `[0, 1]` (trapezoid on the breakpoints).
    pub fn integral(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum()
    }

    /// Cumulative integral `alpha(u) = int_0^u` of the section.
    pub fn alpha(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for w in self.points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if u <= x0 {
                break;
            }
            let hi = u.min(x1);
            let dx = x1 - x0;
            if dx > 0.0 {
                let slope = (y1 - y0) / dx;
                let t = hi - x0;
                acc += y0 * t + 0.5 * slope * t * t;
            }
        }
        acc
    }

    /// Exact integral of `alpha` over `[0, hi]` (alpha is piecewise
    /// quadratic between breakpoints).
    pub fn integral_alpha(&self, hi: f64) -> f64 {
        let mut acc = 0.0;
        let mut alpha0 = 0.0;
        for w in self.points.windows(2) {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            let dx = x1 - x0;
            if dx <= 0.0 {
                continue;
            }
            let slope = (y1 - y0) / dx;
            if hi > x0 {
                let t = (hi.min(x1)) - x0;
                acc += alpha0 * t + 0.5 * y0 * t * t + slope * t * t * t / 6.0;
            }
            alpha0 += y0 * dx + 0.5 * slope * dx * dx;
            if hi <= x1 {
                break;
            }
        }
        acc
    }
}

/// Restriction of a copula to a diagonal.
///
/// Exact breakpoint enumeration for shuffles (and for M and W); a sampled
/// 2049-node approximation otherwise.
pub fn diagonal_section(c: &Copula, which: SectionKind) -> DiagonalSection {
    match (c, which) {
        (Copula::Shuffle(s), _) => shuffle_section(s, which),
        (Copula::M, SectionKind::Main) => DiagonalSection {
            points: vec![(0.0, 0.0), (1.0, 1.0)],
            exact: true,
        },
        (Copula::M, SectionKind::Anti) => DiagonalSection {
            points: vec![(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)],
            exact: true,
        },
        (Copula::W, SectionKind::Main) => DiagonalSection {
            points: vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)],
            exact: true,
        },
        (Copula::W, SectionKind::Anti) => DiagonalSection {
            points: vec![(0.0, 0.0), (1.0, 0.0)],
            exact: true,
        },
        _ => {
            let n = 2048;
            let points = (0..=n)
                .map(|i| {
                    let u = i as f64 / n as f64;
                    let v = match which {
                        SectionKind::Main => u,
                        SectionKind::Anti => 1.0 - u,
                    };
                    (u, c.eval_unchecked(u, v))
                })
                .collect();
            DiagonalSection { points, exact: false }
        }
    }
}

fn shuffle_section(s: &ShuffleOfM, which: SectionKind) -> DiagonalSection {
    let mut xs: Vec<f64> = vec![0.0, 1.0];
    for seg in s.segments() {
        xs.push(seg.u_lo);
        xs.push(seg.u_lo + seg.width);
        match which {
            SectionKind::Main => {
                xs.push(seg.v_lo);
                xs.push(seg.v_hi);
                if !seg.rising {
                    // crossing of the falling segment with the main diagonal
                    xs.push(0.5 * (seg.u_lo + seg.v_hi));
                }
            }
            SectionKind::Anti => {
                xs.push(1.0 - seg.v_lo);
                xs.push(1.0 - seg.v_hi);
                if seg.rising {
                    // crossing of the rising segment with the opposite diagonal
                    xs.push(0.5 * (1.0 + seg.u_lo - seg.v_lo));
                }
            }
        }
    }
    xs.retain(|&x| (0.0..=1.0).contains(&x));
    xs.sort_by(f64::total_cmp);
    // breakpoints closer than the width tolerance are one kink; the section
    // moves by at most twice the merged gap there
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let points = xs
        .into_iter()
        .map(|u| {
            let v = match which {
                SectionKind::Main => u,
                SectionKind::Anti => 1.0 - u,
            };
            (u, s.eval_unchecked(u, v))
        })
        .collect();
    DiagonalSection { points, exact: true }
}

// ---------------------------------------------------------------------------
// the five measures
// ---------------------------------------------------------------------------

/// Spearman's footrule `phi = 6 int C(u, u) du - 2`, in `[-1/2, 1]`.
pub fn footrule_phi(c: &Copula) -> Result<f64> {
    Ok(phi_with_method(c)?.0)
}

pub(crate) fn phi_with_method(c: &Copula) -> Result<(f64, Method)> {
    match c {
        Copula::Shuffle(_) | Copula::M | Copula::W => {
            Ok((6.0 * diagonal_section(c, SectionKind::Main).integral() - 2.0, Method::Exact))
        }
        Copula::Pi => Ok((0.0, Method::Exact)),
        Copula::Mixture(m) => {
            let mut acc = 0.0;
            let mut method = Method::Exact;
            for (w, comp) in m.components() {
                let (v, mm) = phi_with_method(comp)?;
                acc += w * v;
                if let Method::Quadrature { .. } = mm {
                    method = mm;
                }
            }
            Ok((acc, method))
        }
        _ => {
            let v = footrule_phi_quadrature(c, QUAD_TOL_1D)?;
            Ok((v, Method::Quadrature { tol: QUAD_TOL_1D }))
        }
    }
}

/// Footrule by adaptive quadrature of the diagonal, for any surface.
pub fn footrule_phi_quadrature(c: &Copula, tol: f64) -> Result<f64> {
    let (sx, sy) = seeds_of(c);
    let mut seeds = sx;
    seeds.extend(sy);
    let i = integrate_1d(|u| c.eval_unchecked(u, u), 0.0, 1.0, &seeds, QuadOptions::d1(tol))?;
    Ok(6.0 * i - 2.0)
}

/// Spearman's rho `rho = 12 int int C - 3`, in `[-1, 1]`.
pub fn spearman_rho(c: &Copula) -> Result<f64> {
    Ok(rho_with_method(c)?.0)
}

pub(crate) fn rho_with_method(c: &Copula) -> Result<(f64, Method)> {
    match c {
        Copula::Shuffle(s) => Ok((rho_exact_shuffle(s), Method::Exact)),
        Copula::M => Ok((1.0, Method::Exact)),
        Copula::W => Ok((-1.0, Method::Exact)),
        Copula::Pi => Ok((0.0, Method::Exact)),
        Copula::Mixture(m) => {
            let mut acc = 0.0;
            let mut method = Method::Exact;
            for (w, comp) in m.components() {
                let (v, mm) = rho_with_method(comp)?;
                acc += w * v;
                if let Method::Quadrature { .. } = mm {
                    method = mm;
                }
            }
            Ok((acc, method))
        }
        _ => {
            let v = spearman_rho_quadrature(c, QUAD_TOL_2D)?;
            Ok((v, Method::Quadrature { tol: QUAD_TOL_2D }))
        }
    }
}

/// Exact rho of a shuffle through `int int C du dv = E[(1-U)(1-V)]`: the
/// expectation is a sum of closed-form cubic integrals along the segments.
fn rho_exact_shuffle(s: &ShuffleOfM) -> f64 {
    let mut e = 0.0;
    for seg in s.segments() {
        let w = seg.width;
        let a = 1.0 - seg.u_lo;
        if seg.rising {
            let b = 1.0 - seg.v_lo;
            e += a * b * w - 0.5 * (a + b) * w * w + w * w * w / 3.0;
        } else {
            let b = 1.0 - seg.v_hi;
            e += a * b * w + 0.5 * (a - b) * w * w - w * w * w / 3.0;
        }
    }
    12.0 * e - 3.0
}

/// Rho by 2d adaptive quadrature, for any surface.
pub fn spearman_rho_quadrature(c: &Copula, tol: f64) -> Result<f64> {
    let (sx, sy) = seeds_of(c);
    let i = integrate_2d(
        |u, v| c.eval_unchecked(u, v),
        &sx,
        &sy,
        QuadOptions::d2(tol),
    )?;
    Ok(12.0 * i - 3.0)
}

/// Kendall's tau `tau = Q(C, C)`, exact for shuffles and the builtins;
/// rejected for every other representation.
pub fn kendall_tau(c: &ShuffleOfM) -> Result<f64> {
    concordance_q(c, &Copula::Shuffle(c.clone()))
}

pub(crate) fn kendall_tau_copula(c: &Copula) -> Result<f64> {
    match c {
        Copula::Shuffle(s) => kendall_tau(s),
        Copula::M => Ok(1.0),
        Copula::W => Ok(-1.0),
        Copula::Pi => Ok(0.0),
        _ => Err(CopulaError::UnsupportedExact("kendall_tau")),
    }
}

/// Gini's gamma `gamma = 4 int C(u,u) + 4 int C(u,1-u) - 2`.
pub fn gini_gamma(c: &Copula) -> Result<f64> {
    Ok(gamma_with_method(c)?.0)
}

pub(crate) fn gamma_with_method(c: &Copula) -> Result<(f64, Method)> {
    match c {
        Copula::Shuffle(_) | Copula::M | Copula::W => {
            let main = diagonal_section(c, SectionKind::Main).integral();
            let anti = diagonal_section(c, SectionKind::Anti).integral();
            Ok((4.0 * main + 4.0 * anti - 2.0, Method::Exact))
        }
        Copula::Pi => Ok((0.0, Method::Exact)),
        Copula::Mixture(m) => {
            let mut acc = 0.0;
            let mut method = Method::Exact;
            for (w, comp) in m.components() {
                let (v, mm) = gamma_with_method(comp)?;
                acc += w * v;
                if let Method::Quadrature { .. } = mm {
                    method = mm;
                }
            }
            Ok((acc, method))
        }
        _ => {
            let v = gini_gamma_quadrature(c, QUAD_TOL_1D)?;
            Ok((v, Method::Quadrature { tol: QUAD_TOL_1D }))
        }
    }
}

/// Gamma by adaptive quadrature of both diagonal sections.
pub fn gini_gamma_quadrature(c: &Copula, tol: f64) -> Result<f64> {
    let (sx, sy) = seeds_of(c);
    let mut main_seeds = sx.clone();
    main_seeds.extend(sy.iter().copied());
    let mut anti_seeds = sx;
    anti_seeds.extend(sy.iter().map(|y| 1.0 - y));
    let main = integrate_1d(|u| c.eval_unchecked(u, u), 0.0, 1.0, &main_seeds, QuadOptions::d1(tol))?;
    let anti = integrate_1d(
        |u| c.eval_unchecked(u, 1.0 - u),
        0.0,
        1.0,
        &anti_seeds,
        QuadOptions::d1(tol),
    )?;
    Ok(4.0 * main + 4.0 * anti - 2.0)
}

/// Blomqvist's beta `beta = 4 C(1/2, 1/2) - 1`; exact for every surface.
pub fn blomqvist_beta(c: &Copula) -> Result<f64> {
    Ok(4.0 * c.eval_unchecked(0.5, 0.5) - 1.0)
}

/// Total mass on the two diagonals: the widths of segments lying exactly on
/// `u = v` or on `u + v = 1`.
pub fn diagonal_mass_q(s: &ShuffleOfM) -> f64 {
    // + 0.0 turns the empty sum's -0.0 into a plain zero
    s.segments()
        .filter(|seg| seg.on_main_diagonal() || seg.on_opposite_diagonal())
        .map(|seg| seg.width)
        .sum::<f64>()
        + 0.0
}

/// Gap functional `f = rho - (2 sqrt(3) / 9)(1 + 2 phi)^{3/2} + 1`;
/// nonnegative for every copula, zero exactly on the lower boundary.
pub fn f_functional(c: &Copula) -> Result<f64> {
    let phi = footrule_phi(c)?;
    let rho = spearman_rho(c)?;
    Ok(f_of(phi, rho))
}

/// The same functional from precomputed measure values. The radicand is
/// clamped at zero: at `phi = -1/2` the curve has infinite slope and a tiny
/// negative radicand is floating-point noise.
pub fn f_of(phi: f64, rho: f64) -> f64 {
    let r = (1.0 + 2.0 * phi).max(0.0);
    rho - 2.0 * 3.0_f64.sqrt() / 9.0 * r.powf(1.5) + 1.0
}

fn seeds_of(c: &Copula) -> (Vec<f64>, Vec<f64>) {
    c.kink_seeds()
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug)]
pub struct McMeasures {
    pub phi: McEstimate,
    pub rho: McEstimate,
    pub tau: McEstimate,
    pub gamma: McEstimate,
    pub beta: McEstimate,
}

/// Draw from any copula assembled out of shuffles, the builtins and mixtures.
pub fn sample_copula(c: &Copula, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(sample_one(c, &mut rng)?);
    }
    Ok(out)
}

fn sample_one(c: &Copula, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    match c {
        Copula::M => {
            let u: f64 = rng.gen();
            Ok((u, u))
        }
        Copula::W => {
            let u: f64 = rng.gen();
            Ok((u, 1.0 - u))
        }
        Copula::Pi => Ok((rng.gen(), rng.gen())),
        Copula::Shuffle(s) => Ok(s.point_at(rng.gen())),
        Copula::Mixture(m) => {
            let x: f64 = rng.gen();
            let mut acc = 0.0;
            for (w, comp) in m.components() {
                acc += w;
                if x < acc {
                    return sample_one(comp, rng);
                }
            }
            let (_, last) = m.components().last().expect("nonempty mixture");
            sample_one(last, rng)
        }
        _ => Err(CopulaError::UnsupportedExact("sampling")),
    }
}

/// Monte Carlo estimates of all five measures from seeded samples.
///
/// Footrule, rho, gamma and beta use the pointwise identities
/// `int C(u,u) du = E[1 - max(U, V)]`, `int int C = E[(1-U)(1-V)]` and
/// `int C(u,1-u) du = E[max(0, 1-U-V)]`; tau averages `4 C(U, V) - 1` with
/// the exact surface evaluated at the sampled points.
pub fn monte_carlo_measures(c: &Copula, n: usize, seed: u64) -> Result<McMeasures> {
    let pts = sample_copula(c, n, seed)?;
    let stat = |vals: &[f64]| {
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        McEstimate { value: mean, stderr: (var / n).sqrt() }
    };
    let phi: Vec<f64> = pts.iter().map(|&(u, v)| 6.0 * (1.0 - u.max(v)) - 2.0).collect();
    let rho: Vec<f64> = pts.iter().map(|&(u, v)| 12.0 * (1.0 - u) * (1.0 - v) - 3.0).collect();
    let gam: Vec<f64> = pts
        .iter()
        .map(|&(u, v)| 4.0 * (1.0 - u.max(v)) + 4.0 * (1.0 - u - v).max(0.0) - 2.0)
        .collect();
    let bet: Vec<f64> = pts
        .iter()
        .map(|&(u, v)| if u <= 0.5 && v <= 0.5 { 3.0 } else { -1.0 })
        .collect();
    let tau: Vec<f64> = pts
        .iter()
        .map(|&(u, v)| 4.0 * c.eval_unchecked(u, v) - 1.0)
        .collect();
    Ok(McMeasures {
        phi: stat(&phi),
        rho: stat(&rho),
        tau: stat(&tau),
        gamma: stat(&gam),
        beta: stat(&bet),
    })
}
