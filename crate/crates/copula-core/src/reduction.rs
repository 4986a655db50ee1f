//! Grid approximation of doubly symmetric copulas and the mass-shifting
//! driver that pushes all mass of a doubly symmetric shuffle onto the two
//! diagonals.
//!
//! Each off-diagonal orbit of squares falls into one of four cases; a step
//! rewrites the permutation/orientation on that orbit only. Every step
//! increases the diagonal mass `q` and never increases the gap functional
//! `f`, so the driver terminates at a two-diagonal copula witnessing the
//! lower bound for rho in terms of the footrule.

use crate::copula::{doubly_symmetric_deviation, Copula};
use crate::error::{CopulaError, Result};
use crate::measures::{diagonal_mass_q, f_of, footrule_phi, spearman_rho};
use crate::shuffle::ShuffleOfM;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Straight doubly symmetric shuffle on the m x m grid whose cell masses are
/// the cell volumes of `c`; converges uniformly to `c` as `m` grows.
pub fn approx_doubly_symmetric(c: &Copula, m: usize) -> Result<ShuffleOfM> {
    if m == 0 || !m.is_multiple_of(2) {
        return Err(CopulaError::OddGrid(m));
    }
    if let Some((dev, u, v)) = doubly_symmetric_deviation(c, 100, 1e-9) {
        return Err(CopulaError::NotDoublySymmetric { max_dev: dev, u, v });
    }
    let mf = m as f64;
    let mut cells = vec![vec![0.0; m]; m];
    for (k, row) in cells.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let (u0, u1) = (k as f64 / mf, (k + 1) as f64 / mf);
            let (v0, v1) = (j as f64 / mf, (j + 1) as f64 / mf);
            let vol = c.eval_unchecked(u1, v1) - c.eval_unchecked(u1, v0)
                - c.eval_unchecked(u0, v1)
                + c.eval_unchecked(u0, v0);
            *cell = vol.max(0.0);
        }
    }
    let s = ShuffleOfM::from_cell_masses(&cells)?;
    debug_assert!(s.is_doubly_symmetric());
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitCase {
    I,
    II,
    III,
    IV,
    OnDiagonal,
}

/// One orbit of mass squares under the two diagonal reflections.
///
/// `index` is the representative segment (0-based) whose square
/// `[a, a+side] x [b, b+side]` satisfies `a < b < 1 - a`; `members` lists the
/// distinct segments of the orbit.
#[derive(Clone, Debug)]
pub struct OrbitSquare {
    pub index: usize,
    pub members: Vec<usize>,
    pub a: f64,
    pub b: f64,
    pub side: f64,
    pub case: OrbitCase,
}

/// Classify the orbit of segment `i` of a doubly symmetric shuffle.
///
/// Cases, for the representative square: I when the paired column is the
/// reflection of the row (two segments crossing the opposite diagonal); II
/// when the column sits strictly inside the upper half; III and IV when it
/// sits in the lower half, split by the threshold
/// `b >= a + sqrt(1 + 2 phi) / sqrt(3)` evaluated on the current shuffle.
pub fn classify_orbit(s: &ShuffleOfM, i: usize) -> Result<OrbitSquare> {
    let n = s.n();
    if i >= n {
        return Err(CopulaError::NonSteppable {
            index: i,
            reason: format!("segment index out of range (n = {n})"),
        });
    }
    let seg = s.segment(i);
    let members = orbit_members(s, i);
    if seg.width <= 0.0 {
        return Ok(OrbitSquare {
            index: i,
            members,
            a: seg.u_lo,
            b: seg.v_lo,
            side: 0.0,
            case: OrbitCase::OnDiagonal,
        });
    }
    if !seg.rising {
        if seg.on_opposite_diagonal() {
            return Ok(OrbitSquare {
                index: i,
                members,
                a: seg.u_lo,
                b: seg.v_lo,
                side: seg.width,
                case: OrbitCase::OnDiagonal,
            });
        }
        return Err(CopulaError::NonSteppable {
            index: i,
            reason: "orientation -1 off the opposite diagonal".into(),
        });
    }
    if seg.on_main_diagonal() {
        return Ok(OrbitSquare {
            index: i,
            members,
            a: seg.u_lo,
            b: seg.v_lo,
            side: seg.width,
            case: OrbitCase::OnDiagonal,
        });
    }

    // pick the orbit member above the main diagonal with a + b < 1
    let rep = members
        .iter()
        .copied()
        .find(|&j| {
            let sq = s.segment(j);
            sq.v_lo > sq.u_lo && sq.u_lo + sq.v_lo < 1.0 - 1e-15
        })
        .ok_or_else(|| CopulaError::NonSteppable {
            index: i,
            reason: "no representative with a < b < 1 - a in the orbit".into(),
        })?;
    let sq = s.segment(rep);
    let (a, b, x) = (sq.u_lo, sq.v_lo, sq.width);
    let col = s.pi0(rep);
    let case = if col == n - 1 - rep {
        OrbitCase::I
    } else if col >= n / 2 {
        OrbitCase::II
    } else {
        let phi = footrule_phi(&Copula::Shuffle(s.clone()))?;
        let threshold = a + ((1.0 + 2.0 * phi).max(0.0) / 3.0).sqrt();
        if b + 1e-15 >= threshold {
            OrbitCase::III
        } else {
            OrbitCase::IV
        }
    };
    Ok(OrbitSquare {
        index: rep,
        members,
        a,
        b,
        side: x,
        case,
    })
}

fn orbit_members(s: &ShuffleOfM, i: usize) -> Vec<usize> {
    let n = s.n();
    let mut set = BTreeSet::new();
    set.insert(i);
    set.insert(s.pi0(i));
    set.insert(n - 1 - i);
    set.insert(n - 1 - s.pi0(i));
    set.into_iter().collect()
}

/// Apply one mass-shifting step to a steppable orbit, returning the rewritten
/// shuffle. The partition is untouched; only the permutation and orientation
/// change on the orbit:
///
/// * Case I flips the two segments onto the opposite diagonal,
/// * Cases II and III send the four segments to their reflected columns with
///   orientation -1 (opposite diagonal),
/// * Case IV fixes the four segments on the main diagonal.
pub fn apply_step(s: &ShuffleOfM, orbit: &OrbitSquare) -> Result<ShuffleOfM> {
    let n = s.n();
    let mut pi: Vec<usize> = (0..n).map(|k| s.pi0(k)).collect();
    let mut omega: Vec<i8> = (0..n).map(|k| s.omega(k)).collect();
    match orbit.case {
        OrbitCase::I => {
            for &j in &orbit.members {
                omega[j] = -1;
            }
        }
        OrbitCase::II | OrbitCase::III => {
            for &j in &orbit.members {
                pi[j] = n - 1 - j;
                omega[j] = -1;
            }
        }
        OrbitCase::IV => {
            for &j in &orbit.members {
                pi[j] = j;
            }
        }
        OrbitCase::OnDiagonal => {
            return Err(CopulaError::NonSteppable {
                index: orbit.index,
                reason: "orbit already on a diagonal".into(),
            })
        }
    }
    let out = s.with_rewrite(pi, omega);
    debug_assert!(out.is_doubly_symmetric());
    Ok(out)
}

/// Exact measures of a shuffle at one point of the reduction.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureSnapshot {
    pub phi: f64,
    pub rho: f64,
    pub f: f64,
    pub q: f64,
}

impl MeasureSnapshot {
    pub fn of(s: &ShuffleOfM) -> Result<Self> {
        let c = Copula::Shuffle(s.clone());
        let phi = footrule_phi(&c)?;
        let rho = spearman_rho(&c)?;
        Ok(MeasureSnapshot {
            phi,
            rho,
            f: f_of(phi, rho),
            q: diagonal_mass_q(s),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceStep {
    pub case: OrbitCase,
    /// 1-based segment indices of the orbit, as in the written form
    pub orbit: Vec<usize>,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub before: MeasureSnapshot,
    pub after: MeasureSnapshot,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    /// One JSON object per line, one line per step.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&serde_json::to_string(step).expect("trace step serializes"));
            out.push('\n');
        }
        out
    }
}

const Q_DONE_TOL: f64 = 1e-12;

/// Run mass-shifting steps, largest square first, until all mass sits on the
/// two diagonals (`q = 1`). Terminates in at most `n` steps; errors if an
/// off-diagonal orbit with no valid representative appears (that would break
/// the doubly-symmetric invariant).
pub fn reduce_to_diagonals(s: &ShuffleOfM) -> Result<(ShuffleOfM, ReductionTrace)> {
    if let Some(v) = s.doubly_symmetric_violation() {
        return Err(CopulaError::InvalidShuffle(format!(
            "reduction needs a doubly symmetric shuffle: {v}"
        )));
    }
    let mut current = s.clone();
    let mut trace = ReductionTrace::default();
    let max_steps = s.n() + 1;
    for _ in 0..max_steps {
        let before = MeasureSnapshot::of(&current)?;
        if (before.q - 1.0).abs() <= Q_DONE_TOL {
            return Ok((current, trace));
        }
        let mut seen = BTreeSet::new();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..current.n() {
            let seg = current.segment(i);
            if seg.width <= 0.0 {
                continue;
            }
            if !seg.rising && !seg.on_opposite_diagonal() {
                return Err(CopulaError::InvalidShuffle(format!(
                    "segment {} has orientation -1 off the opposite diagonal",
                    i + 1
                )));
            }
            if (!seg.rising) || seg.on_main_diagonal() {
                continue;
            }
            let members = orbit_members(&current, i);
            if !seen.insert(members[0]) {
                continue;
            }
            if best.is_none_or(|(_, side)| seg.width > side) {
                best = Some((i, seg.width));
            }
        }
        let (rep, _) = best.ok_or(CopulaError::NonSteppable {
            index: 0,
            reason: format!("q = {} < 1 but no steppable orbit exists", before.q),
        })?;
        // only the chosen orbit needs the case split (and hence phi)
        let orbit = classify_orbit(&current, rep)?;
        current = apply_step(&current, &orbit)?;
        let after = MeasureSnapshot::of(&current)?;
        trace.steps.push(TraceStep {
            case: orbit.case,
            orbit: orbit.members.iter().map(|&j| j + 1).collect(),
            a: orbit.a,
            b: orbit.b,
            x: orbit.side,
            before,
            after,
        });
    }
    Err(CopulaError::StepLimit(max_steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::sup_distance;
    use crate::measures::gini_gamma;

    fn c1() -> ShuffleOfM {
        ShuffleOfM::new(2, &[0.5], &[2, 1], &[1, 1]).unwrap()
    }

    #[test]
    fn approx_of_independence_on_the_coarse_grid() {
        let s = approx_doubly_symmetric(&Copula::Pi, 2).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.pi_one_based(), vec![1, 3, 2, 4]);
        for i in 0..4 {
            assert!((s.width(i) - 0.25).abs() < 1e-15);
            assert_eq!(s.omega(i), 1);
        }
        assert!(s.is_doubly_symmetric());
    }

    #[test]
    fn approx_of_m_is_m() {
        let s = approx_doubly_symmetric(&Copula::M, 4).unwrap();
        // off-diagonal cells of M carry no mass, so every nonzero piece maps
        // to its own column
        for seg in s.segments() {
            assert!(seg.on_main_diagonal());
        }
        assert!(sup_distance(&Copula::Shuffle(s), &Copula::M, 64).unwrap() < 1e-12);
    }

    #[test]
    fn approx_sup_distance_decreases() {
        let mut last = f64::INFINITY;
        for m in [2usize, 4, 8, 16] {
            let s = approx_doubly_symmetric(&Copula::Pi, m).unwrap();
            let d = sup_distance(&Copula::Shuffle(s), &Copula::Pi, 4 * m).unwrap();
            assert!(d <= 2.0 / m as f64 + 1e-12, "m = {m}: {d}");
            assert!(d < last, "m = {m}: {d} !< {last}");
            last = d;
        }
    }

    #[test]
    fn approx_rejects_bad_inputs() {
        assert!(matches!(
            approx_doubly_symmetric(&Copula::Pi, 3),
            Err(CopulaError::OddGrid(3))
        ));
        let skew = Copula::Shuffle(
            ShuffleOfM::new(3, &[0.2, 0.5], &[2, 3, 1], &[1, -1, 1]).unwrap(),
        );
        assert!(matches!(
            approx_doubly_symmetric(&skew, 4),
            Err(CopulaError::NotDoublySymmetric { .. })
        ));
    }

    #[test]
    fn classify_case_i_on_the_coarse_grid() {
        let s = approx_doubly_symmetric(&Copula::Pi, 2).unwrap();
        let orbit = classify_orbit(&s, 1).unwrap();
        assert_eq!(orbit.case, OrbitCase::I);
        assert!((orbit.a - 0.25).abs() < 1e-15);
        assert!((orbit.b - 0.5).abs() < 1e-15);
        assert!((orbit.side - 0.25).abs() < 1e-15);
        assert_eq!(orbit.members, vec![1, 2]);
        // diagonal pieces are tagged, not steppable
        assert_eq!(classify_orbit(&s, 0).unwrap().case, OrbitCase::OnDiagonal);
    }

    #[test]
    fn case_i_step_closed_forms() {
        // C_1's single orbit is Case I with a = 0, b = x = 1/2
        let (final_shuffle, trace) = reduce_to_diagonals(&c1()).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let step = &trace.steps[0];
        assert_eq!(step.case, OrbitCase::I);
        assert!((step.before.f - 0.5).abs() < 1e-12);
        assert!(step.after.f.abs() < 1e-12);
        assert!((step.before.f - step.after.f - 4.0 * step.x.powi(3)).abs() < 1e-12);
        assert!((step.after.q - 1.0).abs() < 1e-15);
        // the fixed point is W
        assert!(sup_distance(&Copula::Shuffle(final_shuffle), &Copula::W, 64).unwrap() < 1e-13);
    }

    #[test]
    fn case_ii_step_closed_forms() {
        let s = ShuffleOfM::new(
            8,
            &[0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875],
            &[6, 7, 8, 5, 4, 1, 2, 3],
            &[1, -1, 1, -1, -1, 1, -1, 1],
        )
        .unwrap();
        assert!(s.is_doubly_symmetric());
        let orbit = classify_orbit(&s, 0).unwrap();
        assert_eq!(orbit.case, OrbitCase::II);
        let before = MeasureSnapshot::of(&s).unwrap();
        let stepped = apply_step(&s, &orbit).unwrap();
        let after = MeasureSnapshot::of(&stepped).unwrap();
        let (a, b, x) = (orbit.a, orbit.b, orbit.side);
        assert!((before.phi - after.phi).abs() < 1e-12, "phi must not move");
        let expect_drho = 24.0 * x * (1.0 - a - b - x).powi(2) + 8.0 * x.powi(3);
        assert!((before.rho - after.rho - expect_drho).abs() < 1e-12);
        assert!((after.q - before.q - 4.0 * x).abs() < 1e-12);
        assert!(sup_distance(&Copula::Shuffle(stepped), &Copula::W, 64).unwrap() < 1e-13);
    }

    #[test]
    fn case_iii_step_closed_forms() {
        let mut pi = vec![0usize; 16];
        for j in 1..=16usize {
            pi[j - 1] = 17 - j;
        }
        // orbit {1, 8, 9, 16} rises; everything else lies on the opposite
        // diagonal
        pi[0] = 8;
        pi[7] = 1;
        pi[8] = 16;
        pi[15] = 9;
        let mut omega = vec![-1i8; 16];
        for &j in &[0usize, 7, 8, 15] {
            omega[j] = 1;
        }
        let splits: Vec<f64> = (1..16).map(|k| k as f64 / 16.0).collect();
        let s = ShuffleOfM::new(16, &splits, &pi, &omega).unwrap();
        assert!(s.is_doubly_symmetric());
        let before = MeasureSnapshot::of(&s).unwrap();
        assert!((before.phi + 29.0 / 64.0).abs() < 1e-13);

        let orbit = classify_orbit(&s, 0).unwrap();
        assert_eq!(orbit.case, OrbitCase::III);
        let stepped = apply_step(&s, &orbit).unwrap();
        let after = MeasureSnapshot::of(&stepped).unwrap();
        let (b, x) = (orbit.b, orbit.side);
        let expect_dphi = 12.0 * x * (1.0 - 2.0 * b - x);
        assert!((before.phi - after.phi - expect_dphi).abs() < 1e-12);
        assert!((after.q - before.q - 4.0 * x).abs() < 1e-12);
        assert!(sup_distance(&Copula::Shuffle(stepped), &Copula::W, 64).unwrap() < 1e-13);
    }

    #[test]
    fn case_iv_step_closed_forms() {
        // C_2's off-diagonal orbit sits below the threshold and moves onto
        // the main diagonal, producing M
        let s = crate::extremal::family_cn(2).unwrap();
        let orbit = classify_orbit(&s, 0).unwrap();
        assert_eq!(orbit.case, OrbitCase::IV);
        let before = MeasureSnapshot::of(&s).unwrap();
        let stepped = apply_step(&s, &orbit).unwrap();
        let after = MeasureSnapshot::of(&stepped).unwrap();
        let (a, b, x) = (orbit.a, orbit.b, orbit.side);
        assert!((after.phi - before.phi - 12.0 * x * (b - a)).abs() < 1e-12);
        assert!((after.rho - before.rho - 24.0 * x * (b - a) * (b - a)).abs() < 1e-12);
        assert!(sup_distance(&Copula::Shuffle(stepped), &Copula::M, 64).unwrap() < 1e-13);
    }

    #[test]
    fn reduce_coarse_independence_in_one_step() {
        let s = approx_doubly_symmetric(&Copula::Pi, 2).unwrap();
        let (out, trace) = reduce_to_diagonals(&s).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert!((diagonal_mass_q(&out) - 1.0).abs() < 1e-12);
        // splits are never touched by a step
        assert_eq!(out.u_splits(), s.u_splits());
    }

    #[test]
    fn reduce_fine_independence() {
        let s = approx_doubly_symmetric(&Copula::Pi, 8).unwrap();
        let (out, trace) = reduce_to_diagonals(&s).unwrap();
        assert!((diagonal_mass_q(&out) - 1.0).abs() < 1e-12);
        let mut q_last = -1.0;
        let mut f_last = f64::INFINITY;
        for step in &trace.steps {
            assert!(step.after.q > q_last);
            assert!(step.after.f <= f_last + 1e-10);
            // phi moves only in cases III and IV
            if matches!(step.case, OrbitCase::I | OrbitCase::II) {
                assert!((step.after.phi - step.before.phi).abs() < 1e-12);
            }
            q_last = step.after.q;
            f_last = step.after.f;
        }
        let final_snap = MeasureSnapshot::of(&out).unwrap();
        assert!(final_snap.f >= -1e-9);
        // the fixed point is a two-diagonal copula; gamma stays within range
        assert!(gini_gamma(&Copula::Shuffle(out)).unwrap().abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn trace_serializes_to_jsonl() {
        let (_, trace) = reduce_to_diagonals(&c1()).unwrap();
        let jsonl = trace.to_jsonl();
        assert_eq!(jsonl.lines().count(), 1);
        let v: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
        assert_eq!(v["case"], "I");
        assert!(v["before"]["q"].as_f64().unwrap() < 1.0);
    }
}
