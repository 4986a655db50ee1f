//! The evaluable copula surface: builtins, shuffles, mixtures and the
//! diagonal-based families behind one enum, with the reflection transforms
//! and grid-based validity checks.

use crate::bernstein::BernsteinCopula;
use crate::diagonal::{DiagonalCopula, TwoDiagonalCopula};
use crate::error::{CopulaError, Result};
use crate::shuffle::{check_unit, ShuffleOfM};
use crate::POINTWISE_TOL;

/// A bivariate copula surface.
#[derive(Clone, Debug)]
pub enum Copula {
    /// Upper Fréchet–Hoeffding bound `min(u, v)`.
    M,
    /// Lower Fréchet–Hoeffding bound `max(0, u + v - 1)`.
    W,
    /// Independence `uv`.
    Pi,
    Shuffle(ShuffleOfM),
    Mixture(Mixture),
    /// Diagonal copula `K_delta`.
    Diagonal(DiagonalCopula),
    TwoDiagonal(TwoDiagonalCopula),
    Bernstein(BernsteinCopula),
    OrdinalSum(OrdinalSum),
    /// Pointwise reflection wrapper for families with no closed-form rewrite.
    Reflected(Box<Copula>, Reflection),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reflection {
    Sigma1,
    Sigma2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    Transpose,
    Sigma1,
    Sigma2,
    Survival,
}

/// Convex combination of copulas; weights are nonnegative and sum to 1.
#[derive(Clone, Debug)]
pub struct Mixture {
    components: Vec<(f64, Copula)>,
}

impl Mixture {
    pub fn new(components: Vec<(f64, Copula)>) -> Result<Self> {
        if components.is_empty() {
            return Err(CopulaError::InvalidMixture("no components".into()));
        }
        let mut total = 0.0;
        for &(w, _) in &components {
            if w < 0.0 {
                return Err(CopulaError::InvalidMixture(format!("negative weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > POINTWISE_TOL {
            return Err(CopulaError::InvalidMixture(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Mixture { components })
    }

    pub fn components(&self) -> &[(f64, Copula)] {
        &self.components
    }
}

/// Ordinal sum with at least one non-shuffle component (all-shuffle sums are
/// flattened to a single shuffle at construction).
#[derive(Clone, Debug)]
pub struct OrdinalSum {
    intervals: Vec<(f64, f64)>,
    components: Vec<Copula>,
}

impl OrdinalSum {
    pub(crate) fn new_unchecked(intervals: Vec<(f64, f64)>, components: Vec<Copula>) -> Self {
        OrdinalSum { intervals, components }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn components(&self) -> &[Copula] {
        &self.components
    }

    fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        for (&(a, b), c) in self.intervals.iter().zip(&self.components) {
            if u >= a && u <= b && v >= a && v <= b {
                let len = b - a;
                return a + len * c.eval_unchecked((u - a) / len, (v - a) / len);
            }
        }
        u.min(v)
    }
}

/// Axis-aligned rectangle inside the unit square.
#[derive(Clone, Copy, Debug)]
pub struct Rectangle {
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl Rectangle {
    pub fn new(u1: f64, u2: f64, v1: f64, v2: f64) -> Result<Self> {
        check_unit("u1", u1)?;
        check_unit("u2", u2)?;
        check_unit("v1", v1)?;
        check_unit("v2", v2)?;
        if u1 > u2 || v1 > v2 {
            return Err(CopulaError::Domain {
                what: "rectangle corners",
                value: if u1 > u2 { u1 } else { v1 },
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Rectangle { u1, u2, v1, v2 })
    }
}

impl Copula {
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        match self {
            Copula::M => u.min(v),
            Copula::W => (u + v - 1.0).max(0.0),
            Copula::Pi => u * v,
            Copula::Shuffle(s) => s.eval_unchecked(u, v),
            Copula::Mixture(m) => m
                .components
                .iter()
                .map(|(w, c)| w * c.eval_unchecked(u, v))
                .sum(),
            Copula::Diagonal(k) => k.eval_unchecked(u, v),
            Copula::TwoDiagonal(t) => t.eval_unchecked(u, v),
            Copula::Bernstein(b) => b.eval_unchecked(u, v),
            Copula::OrdinalSum(o) => o.eval_unchecked(u, v),
            Copula::Reflected(c, Reflection::Sigma1) => v - c.eval_unchecked(1.0 - u, v),
            Copula::Reflected(c, Reflection::Sigma2) => u - c.eval_unchecked(u, 1.0 - v),
        }
    }

    /// H-volume of a rectangle.
    pub fn volume(&self, b: &Rectangle) -> f64 {
        self.eval_unchecked(b.u2, b.v2) - self.eval_unchecked(b.u2, b.v1)
            - self.eval_unchecked(b.u1, b.v2)
            + self.eval_unchecked(b.u1, b.v1)
    }

    /// Apply one of the reflection-induced transforms.
    ///
    /// Shuffles, Bernstein copulas and the builtins rewrite in closed form;
    /// the diagonal families are fixed by transpose and survival; anything
    /// else gets a pointwise wrapper.
    pub fn transform(&self, t: Transform) -> Copula {
        match t {
            Transform::Transpose => match self {
                Copula::M | Copula::W | Copula::Pi => self.clone(),
                Copula::Shuffle(s) => Copula::Shuffle(s.transpose()),
                Copula::Mixture(m) => Copula::Mixture(Mixture {
                    components: m
                        .components
                        .iter()
                        .map(|(w, c)| (*w, c.transform(t)))
                        .collect(),
                }),
                Copula::Diagonal(_) | Copula::TwoDiagonal(_) => self.clone(),
                Copula::Bernstein(b) => Copula::Bernstein(b.transpose()),
                Copula::OrdinalSum(o) => Copula::OrdinalSum(OrdinalSum {
                    intervals: o.intervals.clone(),
                    components: o.components.iter().map(|c| c.transform(t)).collect(),
                }),
                Copula::Reflected(c, Reflection::Sigma1) => {
                    Copula::Reflected(Box::new(c.transform(Transform::Transpose)), Reflection::Sigma2)
                }
                Copula::Reflected(c, Reflection::Sigma2) => {
                    Copula::Reflected(Box::new(c.transform(Transform::Transpose)), Reflection::Sigma1)
                }
            },
            Transform::Sigma1 => match self {
                Copula::M => Copula::W,
                Copula::W => Copula::M,
                Copula::Pi => Copula::Pi,
                Copula::Shuffle(s) => Copula::Shuffle(s.sigma1()),
                Copula::Mixture(m) => Copula::Mixture(Mixture {
                    components: m
                        .components
                        .iter()
                        .map(|(w, c)| (*w, c.transform(t)))
                        .collect(),
                }),
                Copula::Bernstein(b) => Copula::Bernstein(b.sigma1()),
                Copula::Reflected(c, Reflection::Sigma1) => (**c).clone(),
                _ => Copula::Reflected(Box::new(self.clone()), Reflection::Sigma1),
            },
            Transform::Sigma2 => match self {
                Copula::M => Copula::W,
                Copula::W => Copula::M,
                Copula::Pi => Copula::Pi,
                Copula::Shuffle(s) => Copula::Shuffle(s.sigma2()),
                Copula::Mixture(m) => Copula::Mixture(Mixture {
                    components: m
                        .components
                        .iter()
                        .map(|(w, c)| (*w, c.transform(t)))
                        .collect(),
                }),
                Copula::Bernstein(b) => Copula::Bernstein(b.sigma2()),
                Copula::Reflected(c, Reflection::Sigma2) => (**c).clone(),
                _ => Copula::Reflected(Box::new(self.clone()), Reflection::Sigma2),
            },
            Transform::Survival => match self {
                Copula::M | Copula::W | Copula::Pi => self.clone(),
                Copula::Shuffle(s) => Copula::Shuffle(s.survival()),
                Copula::Mixture(m) => Copula::Mixture(Mixture {
                    components: m
                        .components
                        .iter()
                        .map(|(w, c)| (*w, c.transform(t)))
                        .collect(),
                }),
                Copula::Diagonal(_) | Copula::TwoDiagonal(_) => self.clone(),
                Copula::Bernstein(b) => Copula::Bernstein(b.survival()),
                Copula::Reflected(c, Reflection::Sigma1) => c.transform(Transform::Sigma2),
                Copula::Reflected(c, Reflection::Sigma2) => c.transform(Transform::Sigma1),
                Copula::OrdinalSum(_) => self
                    .transform(Transform::Sigma1)
                    .transform(Transform::Sigma2),
            },
        }
    }

    /// The equal-weight mixture of a copula with its transpose, survival
    /// copula and transposed survival copula; always doubly symmetric and
    /// measure-preserving for footrule and rho.
    pub fn symmetrize(&self) -> Mixture {
        let t = self.transform(Transform::Transpose);
        let hat = self.transform(Transform::Survival);
        let hat_t = hat.transform(Transform::Transpose);
        Mixture {
            components: vec![
                (0.25, self.clone()),
                (0.25, t),
                (0.25, hat),
                (0.25, hat_t),
            ],
        }
    }

    pub fn as_shuffle(&self) -> Option<ShuffleOfM> {
        match self {
            Copula::Shuffle(s) => Some(s.clone()),
            Copula::M => Some(ShuffleOfM::new(1, &[], &[1], &[1]).expect("valid")),
            Copula::W => Some(ShuffleOfM::new(1, &[], &[1], &[-1]).expect("valid")),
            _ => None,
        }
    }

    /// Axis positions of kink lines, used to seed quadrature subdivisions.
    pub(crate) fn kink_seeds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Copula::M | Copula::W | Copula::Pi => (Vec::new(), Vec::new()),
            Copula::Shuffle(s) => (s.u_splits().to_vec(), s.v_splits().to_vec()),
            Copula::Mixture(m) => {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for (_, c) in &m.components {
                    let (cx, cy) = c.kink_seeds();
                    xs.extend(cx);
                    ys.extend(cy);
                }
                (xs, ys)
            }
            Copula::Diagonal(k) => {
                let b = k.delta().breakpoints();
                (b.clone(), b)
            }
            Copula::TwoDiagonal(t) => {
                let mut b = t.delta().breakpoints();
                b.extend(b.clone().iter().map(|x| 1.0 - x));
                b.push(0.5);
                (b.clone(), b)
            }
            Copula::Bernstein(_) => (Vec::new(), Vec::new()),
            Copula::OrdinalSum(o) => {
                let mut xs = Vec::new();
                let mut ys = Vec::new();
                for (&(a, b), c) in o.intervals.iter().zip(&o.components) {
                    xs.push(a);
                    xs.push(b);
                    ys.push(a);
                    ys.push(b);
                    let (cx, cy) = c.kink_seeds();
                    xs.extend(cx.iter().map(|x| a + (b - a) * x));
                    ys.extend(cy.iter().map(|y| a + (b - a) * y));
                }
                (xs, ys)
            }
            Copula::Reflected(c, r) => {
                let (cx, cy) = c.kink_seeds();
                match r {
                    Reflection::Sigma1 => (cx.iter().map(|x| 1.0 - x).collect(), cy),
                    Reflection::Sigma2 => (cx, cy.iter().map(|y| 1.0 - y).collect()),
                }
            }
        }
    }
}

/// Largest absolute difference between two copulas on an
/// `(grid + 1) x (grid + 1)` lattice. Both surfaces are 1-Lipschitz in each
/// argument, so the true sup distance exceeds this by at most `2 / grid`.
pub fn sup_distance(c1: &Copula, c2: &Copula, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(CopulaError::Domain {
            what: "grid",
            value: grid as f64,
            lo: 2.0,
            hi: f64::INFINITY,
        });
    }
    let mut best = 0.0f64;
    for i in 0..=grid {
        let u = i as f64 / grid as f64;
        for j in 0..=grid {
            let v = j as f64 / grid as f64;
            best = best.max((c1.eval_unchecked(u, v) - c2.eval_unchecked(u, v)).abs());
        }
    }
    Ok(best)
}

/// One failed copula-axiom check.
#[derive(Clone, Debug)]
pub struct Violation {
    pub what: String,
    pub u: f64,
    pub v: f64,
    pub amount: f64,
}

/// Grid check of groundedness, uniform marginals, the Fréchet–Hoeffding
/// envelope and 2-increasingness (all cell volumes nonnegative).
pub fn check_validity(c: &Copula, grid: usize, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    let pt = |i: usize| i as f64 / grid as f64;
    for i in 0..=grid {
        let x = pt(i);
        let g1 = c.eval_unchecked(0.0, x);
        let g2 = c.eval_unchecked(x, 0.0);
        if g1.abs() > tol {
            out.push(Violation { what: "grounded C(0, v) = 0".into(), u: 0.0, v: x, amount: g1 });
        }
        if g2.abs() > tol {
            out.push(Violation { what: "grounded C(u, 0) = 0".into(), u: x, v: 0.0, amount: g2 });
        }
        let m1 = c.eval_unchecked(x, 1.0) - x;
        let m2 = c.eval_unchecked(1.0, x) - x;
        if m1.abs() > tol {
            out.push(Violation { what: "marginal C(u, 1) = u".into(), u: x, v: 1.0, amount: m1 });
        }
        if m2.abs() > tol {
            out.push(Violation { what: "marginal C(1, v) = v".into(), u: 1.0, v: x, amount: m2 });
        }
    }
    let mut prev_row: Vec<f64> = (0..=grid).map(|j| c.eval_unchecked(0.0, pt(j))).collect();
    for i in 1..=grid {
        let u = pt(i);
        let row: Vec<f64> = (0..=grid).map(|j| c.eval_unchecked(u, pt(j))).collect();
        for j in 0..=grid {
            let v = pt(j);
            let x = row[j];
            if x < (u + v - 1.0).max(0.0) - tol || x > u.min(v) + tol {
                out.push(Violation {
                    what: "Fréchet–Hoeffding bounds".into(),
                    u,
                    v,
                    amount: x,
                });
            }
            if j > 0 {
                let vol = row[j] - row[j - 1] - prev_row[j] + prev_row[j - 1];
                if vol < -tol {
                    out.push(Violation {
                        what: "2-increasing (cell volume)".into(),
                        u,
                        v,
                        amount: vol,
                    });
                }
            }
        }
        prev_row = row;
    }
    out
}

/// Max deviation from `C = C^t = C-hat` on a grid; `None` when within `tol`.
pub fn doubly_symmetric_deviation(c: &Copula, grid: usize, tol: f64) -> Option<(f64, f64, f64)> {
    let mut worst: Option<(f64, f64, f64)> = None;
    for i in 0..=grid {
        let u = i as f64 / grid as f64;
        for j in 0..=grid {
            let v = j as f64 / grid as f64;
            let x = c.eval_unchecked(u, v);
            let dt = (x - c.eval_unchecked(v, u)).abs();
            let dh = (x - (u + v - 1.0 + c.eval_unchecked(1.0 - u, 1.0 - v))).abs();
            let d = dt.max(dh);
            if d > tol && worst.is_none_or(|(w, _, _)| d > w) {
                worst = Some((d, u, v));
            }
        }
    }
    worst
}
