//! Shuffles of M: copulas whose mass lies on finitely many slope ±1 segments.
//!
//! A shuffle is described by a partition of the unit interval into `n` pieces,
//! a permutation assigning each piece its column of mass, and an orientation
//! flag per piece. All five concordance measures are computable exactly for
//! this family, which makes it the workhorse representation of the crate.

use crate::error::{CopulaError, Result};
use crate::WIDTH_TOL;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A shuffle of M.
///
/// Internally 0-based: `u[i]..u[i+1]` is piece `i`, `pi[i]` the index of its
/// column on the v-axis and `omega[i]` its slope sign. The v-axis splits are
/// recomputed from the widths and never stored independently.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffleOfM {
    u: Vec<f64>,
    v: Vec<f64>,
    pi: Vec<usize>,
    inv_pi: Vec<usize>,
    omega: Vec<i8>,
}

/// One mass-carrying segment of a shuffle.
///
/// The segment occupies the square `[u_lo, u_lo+width] x [v_lo, v_hi]` and
/// runs from corner to corner: rising segments pass through
/// `(u_lo + t, v_lo + t)`, falling ones through `(u_lo + t, v_hi - t)`.
#[derive(Clone, Copy, Debug)]
pub struct Segment {
    pub index: usize,
    pub u_lo: f64,
    pub v_lo: f64,
    pub v_hi: f64,
    pub width: f64,
    pub rising: bool,
}

impl Segment {
    /// Point at arclength-projection parameter `t` in `[0, width]`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        let u = self.u_lo + t;
        let v = if self.rising { self.v_lo + t } else { self.v_hi - t };
        (u, v)
    }

    /// Mass of this segment inside `[0, u] x [0, v]`.
    pub fn mass_below(&self, u: f64, v: f64) -> f64 {
        let du = u - self.u_lo;
        let dv = v - self.v_lo;
        if self.rising {
            du.min(dv).min(self.width).max(0.0)
        } else {
            (du.min(self.width) + dv.min(self.width) - self.width).max(0.0)
        }
    }

    /// True when every point of the segment satisfies `u = v`.
    pub fn on_main_diagonal(&self) -> bool {
        self.rising && (self.v_lo - self.u_lo).abs() <= WIDTH_TOL
    }

    /// True when every point of the segment satisfies `u + v = 1`.
    pub fn on_opposite_diagonal(&self) -> bool {
        !self.rising && (self.u_lo + self.v_hi - 1.0).abs() <= WIDTH_TOL
    }
}

impl ShuffleOfM {
    /// Build a shuffle from its description.
    ///
    /// `splits` are the `n - 1` interior partition points (the implicit 0 and
    /// 1 are excluded), `pi` is 1-based as in the written form, `omega` takes
    /// values in `{-1, +1}`. Pieces of zero width are allowed.
    pub fn new(n: usize, splits: &[f64], pi: &[usize], omega: &[i8]) -> Result<Self> {
        if n == 0 {
            return Err(CopulaError::InvalidShuffle("n must be positive".into()));
        }
        if splits.len() != n - 1 {
            return Err(CopulaError::InvalidShuffle(format!(
                "expected {} splits, got {}",
                n - 1,
                splits.len()
            )));
        }
        if pi.len() != n || omega.len() != n {
            return Err(CopulaError::InvalidShuffle(format!(
                "pi/omega must have length {n}"
            )));
        }
        let mut u = Vec::with_capacity(n + 1);
        u.push(0.0);
        u.extend_from_slice(splits);
        u.push(1.0);
        for w in u.windows(2) {
            // ordered comparison also rejects NaN splits
            let ordered = w[0] >= 0.0 && w[0] <= w[1] && w[1] <= 1.0;
            if !ordered {
                return Err(CopulaError::InvalidShuffle(format!(
                    "splits must be nondecreasing within [0, 1]: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let mut seen = vec![false; n];
        let mut pi0 = Vec::with_capacity(n);
        for &p in pi {
            if p < 1 || p > n || seen[p - 1] {
                return Err(CopulaError::InvalidShuffle(format!(
                    "pi is not a permutation of 1..={n}"
                )));
            }
            seen[p - 1] = true;
            pi0.push(p - 1);
        }
        if omega.iter().any(|&o| o != 1 && o != -1) {
            return Err(CopulaError::InvalidShuffle("omega entries must be ±1".into()));
        }
        Ok(Self::from_parts(u, pi0, omega.to_vec()))
    }

    /// Internal constructor from 0-based parts; recomputes the v-splits.
    fn from_parts(u: Vec<f64>, pi: Vec<usize>, omega: Vec<i8>) -> Self {
        let n = pi.len();
        let mut inv_pi = vec![0usize; n];
        for (i, &p) in pi.iter().enumerate() {
            inv_pi[p] = i;
        }
        let mut v = Vec::with_capacity(n + 1);
        v.push(0.0);
        let mut acc = 0.0;
        for &k in &inv_pi {
            acc += u[k + 1] - u[k];
            v.push(acc);
        }
        v[n] = 1.0;
        ShuffleOfM { u, v, pi, inv_pi, omega }
    }

    fn from_widths(widths: &[f64], pi: Vec<usize>, omega: Vec<i8>) -> Self {
        let n = widths.len();
        let mut u = Vec::with_capacity(n + 1);
        u.push(0.0);
        let mut acc = 0.0;
        for &w in widths {
            acc += w;
            u.push(acc);
        }
        u[n] = 1.0;
        Self::from_parts(u, pi, omega)
    }

    /// Build the straight shuffle whose piece `i = m*j + k` (0-based) carries
    /// the mass of cell `(k, j)` of an m x m grid, with `pi(m*j + k) = m*k + j`.
    /// `cells[k][j]` is the mass in u-strip `k`, v-strip `j`; masses must be
    /// nonnegative and sum to 1.
    pub fn from_cell_masses(cells: &[Vec<f64>]) -> Result<Self> {
        let m = cells.len();
        if m == 0 || cells.iter().any(|row| row.len() != m) {
            return Err(CopulaError::InvalidShuffle("cell matrix must be square".into()));
        }
        let mut total = 0.0;
        for row in cells {
            for &c in row {
                if c < -1e-12 {
                    return Err(CopulaError::InvalidShuffle(format!(
                        "negative cell mass {c}"
                    )));
                }
                total += c.max(0.0);
            }
        }
        if (total - 1.0).abs() > 1e-6 {
            return Err(CopulaError::InvalidShuffle(format!(
                "cell masses sum to {total}, expected 1"
            )));
        }
        let n = m * m;
        let mut widths = vec![0.0; n];
        let mut pi = vec![0usize; n];
        for j in 0..m {
            for k in 0..m {
                widths[m * j + k] = cells[k][j].max(0.0) / total;
                pi[m * j + k] = m * k + j;
            }
        }
        Ok(Self::from_widths(&widths, pi, vec![1; n]))
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    /// Partition splits on the u-axis, including the endpoints 0 and 1.
    pub fn u_splits(&self) -> &[f64] {
        &self.u
    }

    /// Implied splits on the v-axis, including the endpoints 0 and 1.
    pub fn v_splits(&self) -> &[f64] {
        &self.v
    }

    pub fn width(&self, i: usize) -> f64 {
        self.u[i + 1] - self.u[i]
    }

    /// 1-based permutation, as in the written form of the shuffle.
    pub fn pi_one_based(&self) -> Vec<usize> {
        self.pi.iter().map(|&p| p + 1).collect()
    }

    /// 0-based column index of piece `i`.
    pub fn pi0(&self, i: usize) -> usize {
        self.pi[i]
    }

    pub fn omega(&self, i: usize) -> i8 {
        self.omega[i]
    }

    pub fn interior_splits(&self) -> &[f64] {
        &self.u[1..self.n()]
    }

    pub fn segment(&self, i: usize) -> Segment {
        let j = self.pi[i];
        Segment {
            index: i,
            u_lo: self.u[i],
            v_lo: self.v[j],
            v_hi: self.v[j + 1],
            width: self.u[i + 1] - self.u[i],
            rising: self.omega[i] == 1,
        }
    }

    /// Iterator over segments of positive width (zero-width pieces carry no
    /// mass and are skipped everywhere).
    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.n()).map(|i| self.segment(i)).filter(|s| s.width > 0.0)
    }

    /// Evaluate the copula at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        check_unit("u", u)?;
        check_unit("v", v)?;
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        self.segments().map(|s| s.mass_below(u, v)).sum()
    }

    /// Transpose: reflect the mass across the main diagonal.
    pub fn transpose(&self) -> Self {
        let n = self.n();
        let widths: Vec<f64> = (0..n).map(|k| self.width(self.inv_pi[k])).collect();
        let pi: Vec<usize> = self.inv_pi.clone();
        let omega: Vec<i8> = (0..n).map(|k| self.omega[self.inv_pi[k]]).collect();
        Self::from_widths(&widths, pi, omega)
    }

    /// Reflection `u -> 1 - u` (the induced copula `v - C(1-u, v)`).
    pub fn sigma1(&self) -> Self {
        let n = self.n();
        let widths: Vec<f64> = (0..n).map(|k| self.width(n - 1 - k)).collect();
        let pi: Vec<usize> = (0..n).map(|k| self.pi[n - 1 - k]).collect();
        let omega: Vec<i8> = (0..n).map(|k| -self.omega[n - 1 - k]).collect();
        Self::from_widths(&widths, pi, omega)
    }

    /// Reflection `v -> 1 - v` (the induced copula `u - C(u, 1-v)`).
    pub fn sigma2(&self) -> Self {
        let n = self.n();
        let widths: Vec<f64> = (0..n).map(|k| self.width(k)).collect();
        let pi: Vec<usize> = (0..n).map(|k| n - 1 - self.pi[k]).collect();
        let omega: Vec<i8> = self.omega.iter().map(|&o| -o).collect();
        Self::from_widths(&widths, pi, omega)
    }

    /// Survival transform (both reflections composed).
    pub fn survival(&self) -> Self {
        let n = self.n();
        let widths: Vec<f64> = (0..n).map(|k| self.width(n - 1 - k)).collect();
        let pi: Vec<usize> = (0..n).map(|k| n - 1 - self.pi[n - 1 - k]).collect();
        let omega: Vec<i8> = (0..n).map(|k| self.omega[n - 1 - k]).collect();
        Self::from_widths(&widths, pi, omega)
    }

    /// Replace permutation/orientation entries, keeping the partition.
    pub(crate) fn with_rewrite(&self, pi: Vec<usize>, omega: Vec<i8>) -> Self {
        Self::from_parts(self.u.clone(), pi, omega)
    }

    /// Check the four structural conditions of a doubly symmetric shuffle:
    /// even `n`, reflection-compatible involution, orientation symmetry and
    /// width symmetry. Returns the first violated clause, if any.
    pub fn doubly_symmetric_violation(&self) -> Option<DsViolation> {
        let n = self.n();
        if !n.is_multiple_of(2) {
            return Some(DsViolation::OddPieceCount);
        }
        for i in 0..n {
            if self.pi[self.pi[i]] != i {
                return Some(DsViolation::NotInvolution { piece: i + 1 });
            }
            if self.pi[n - 1 - i] != n - 1 - self.pi[i] {
                return Some(DsViolation::ReflectionIncompatible { piece: i + 1 });
            }
        }
        for i in 0..n {
            if self.omega[i] != self.omega[self.pi[i]] || self.omega[i] != self.omega[n - 1 - i] {
                return Some(DsViolation::OrientationMismatch { piece: i + 1 });
            }
        }
        for i in 0..n {
            let w = self.width(i);
            if (w - self.width(self.pi[i])).abs() > WIDTH_TOL
                || (w - self.width(n - 1 - i)).abs() > WIDTH_TOL
            {
                return Some(DsViolation::WidthMismatch { piece: i + 1 });
            }
        }
        None
    }

    pub fn is_doubly_symmetric(&self) -> bool {
        self.doubly_symmetric_violation().is_none()
    }

    /// The support point with u-coordinate `x` in `[0, 1)`. Ties at piece
    /// boundaries resolve to the right piece, so seeded runs reproduce.
    pub fn point_at(&self, x: f64) -> (f64, f64) {
        let i = self.interior_splits().partition_point(|&s| s <= x);
        let seg = self.segment(i);
        seg.point(x - seg.u_lo)
    }

    /// Draw `count` points distributed by this copula. The u coordinate is
    /// uniform; v follows from the segment containing u.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.point_at(rng.gen())).collect()
    }
}

/// First violated clause of the doubly-symmetric-shuffle definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsViolation {
    OddPieceCount,
    NotInvolution { piece: usize },
    ReflectionIncompatible { piece: usize },
    OrientationMismatch { piece: usize },
    WidthMismatch { piece: usize },
}

impl std::fmt::Display for DsViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DsViolation::OddPieceCount => write!(f, "(i) the number of pieces is odd"),
            DsViolation::NotInvolution { piece } => {
                write!(f, "(ii) permutation is not an involution at piece {piece}")
            }
            DsViolation::ReflectionIncompatible { piece } => {
                write!(f, "(ii) permutation breaks reflection symmetry at piece {piece}")
            }
            DsViolation::OrientationMismatch { piece } => {
                write!(f, "(iii) orientation symmetry fails at piece {piece}")
            }
            DsViolation::WidthMismatch { piece } => {
                write!(f, "(iv) width symmetry fails at piece {piece}")
            }
        }
    }
}

pub(crate) fn check_unit(what: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CopulaError::Domain {
            what,
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}
