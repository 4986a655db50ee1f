//! Seeded random generators for shuffles, used by property suites and the
//! region scanner.

use crate::shuffle::ShuffleOfM;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random valid shuffle with up to `max_n` pieces: sorted uniform splits
/// (occasionally coincident, exercising zero-width pieces), a uniform random
/// permutation and independent orientation flags.
pub fn random_shuffle(rng: &mut impl Rng, max_n: usize) -> ShuffleOfM {
    let n = rng.gen_range(1..=max_n.max(1));
    let mut splits: Vec<f64> = (0..n - 1).map(|_| rng.gen::<f64>()).collect();
    splits.sort_by(f64::total_cmp);
    let mut pi: Vec<usize> = (1..=n).collect();
    pi.shuffle(rng);
    let omega: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    ShuffleOfM::new(n, &splits, &pi, &omega).expect("generated description is valid")
}

/// Random straight doubly symmetric shuffle with `m^2` pieces (`m` even).
///
/// A random positive matrix is balanced by Sinkhorn iteration to near-doubly
/// stochastic cell masses, then averaged over the orbits of the two diagonal
/// reflections so the width symmetries hold exactly, and finally laid out on
/// the grid.
pub fn random_doubly_symmetric_shuffle(rng: &mut impl Rng, m: usize) -> ShuffleOfM {
    assert!(m >= 2 && m.is_multiple_of(2), "m must be a positive even integer");
    let mut a = vec![vec![0.0f64; m]; m];
    for row in a.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_range(0.25..1.75);
        }
    }
    for _ in 0..200 {
        for row in a.iter_mut() {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        #[allow(clippy::needless_range_loop)]
        for j in 0..m {
            let s: f64 = (0..m).map(|k| a[k][j]).sum();
            (0..m).for_each(|k| a[k][j] /= s);
        }
    }
    // exact orbit averaging: every reflected cell gets the identical value
    let mut sym = vec![vec![0.0f64; m]; m];
    for k in 0..m {
        for j in 0..m {
            let orbit = [
                (k, j),
                (j, k),
                (m - 1 - k, m - 1 - j),
                (m - 1 - j, m - 1 - k),
            ];
            let avg = orbit.iter().map(|&(x, y)| a[x][y]).sum::<f64>() / 4.0;
            for &(x, y) in &orbit {
                sym[x][y] = avg;
            }
        }
    }
    let total: f64 = sym.iter().flatten().sum();
    for row in sym.iter_mut() {
        for cell in row.iter_mut() {
            *cell /= total;
        }
    }
    ShuffleOfM::from_cell_masses(&sym).expect("orbit-averaged masses are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_shuffles_are_valid_copulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = random_shuffle(&mut rng, 20);
            let c = crate::copula::Copula::Shuffle(s);
            assert!(crate::copula::check_validity(&c, 40, 1e-12).is_empty());
        }
    }

    #[test]
    fn random_ds_shuffles_pass_the_structural_predicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for m in [2usize, 4, 6, 8] {
            let s = random_doubly_symmetric_shuffle(&mut rng, m);
            assert!(s.is_doubly_symmetric(), "m = {m}");
            assert_eq!(s.n(), m * m);
            let c = crate::copula::Copula::Shuffle(s);
            assert!(crate::copula::doubly_symmetric_deviation(&c, 50, 1e-12).is_none());
        }
    }
}
