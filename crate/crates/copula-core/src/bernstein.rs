//! Bernstein polynomial smoothing of a copula.
//!
//! `B_n(u, v) = sum_{i,j} C(i/n, j/n) b_{n,i}(u) b_{n,j}(v)` with the
//! Bernstein basis `b_{n,i}`. The base surface is sampled once on the
//! `(n+1) x (n+1)` grid at construction; evaluation is a direct double sum.

use crate::copula::Copula;
use crate::error::{CopulaError, Result};

#[derive(Clone, Debug)]
pub struct BernsteinCopula {
    n: usize,
    /// grid[i * (n+1) + j] = C(i/n, j/n)
    grid: Vec<f64>,
    /// log binomial coefficients ln C(n, i)
    ln_binom: Vec<f64>,
}

impl BernsteinCopula {
    pub fn new(base: &Copula, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(CopulaError::Domain {
                what: "bernstein order n",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        let mut grid = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                grid.push(base.eval_unchecked(i as f64 / n as f64, j as f64 / n as f64));
            }
        }
        Ok(BernsteinCopula {
            n,
            grid,
            ln_binom: ln_binomials(n),
        })
    }

    fn from_grid(n: usize, grid: Vec<f64>, ln_binom: Vec<f64>) -> Self {
        BernsteinCopula { n, grid, ln_binom }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    fn basis(&self, u: f64) -> Vec<f64> {
        let n = self.n;
        let mut b = vec![0.0; n + 1];
        if u == 0.0 {
            b[0] = 1.0;
        } else if u == 1.0 {
            b[n] = 1.0;
        } else {
            let lu = u.ln();
            let l1u = (-u).ln_1p();
            for (i, slot) in b.iter_mut().enumerate() {
                *slot = (self.ln_binom[i] + i as f64 * lu + (n - i) as f64 * l1u).exp();
            }
        }
        b
    }

    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        let bu = self.basis(u);
        let bv = self.basis(v);
        let n1 = self.n + 1;
        let mut acc = 0.0;
        for (i, &wu) in bu.iter().enumerate() {
            if wu == 0.0 {
                continue;
            }
            let row = &self.grid[i * n1..(i + 1) * n1];
            let mut inner = 0.0;
            for (j, &wv) in bv.iter().enumerate() {
                inner += row[j] * wv;
            }
            acc += wu * inner;
        }
        acc
    }

    /// The four reflection transforms act on the sampled grid in closed form.
    pub fn transpose(&self) -> Self {
        let n1 = self.n + 1;
        let mut grid = vec![0.0; n1 * n1];
        for i in 0..n1 {
            for j in 0..n1 {
                grid[i * n1 + j] = self.grid[j * n1 + i];
            }
        }
        Self::from_grid(self.n, grid, self.ln_binom.clone())
    }

    pub fn sigma1(&self) -> Self {
        let n = self.n;
        let n1 = n + 1;
        let mut grid = vec![0.0; n1 * n1];
        for i in 0..n1 {
            for j in 0..n1 {
                grid[i * n1 + j] = j as f64 / n as f64 - self.grid[(n - i) * n1 + j];
            }
        }
        Self::from_grid(n, grid, self.ln_binom.clone())
    }

    pub fn sigma2(&self) -> Self {
        let n = self.n;
        let n1 = n + 1;
        let mut grid = vec![0.0; n1 * n1];
        for i in 0..n1 {
            for j in 0..n1 {
                grid[i * n1 + j] = i as f64 / n as f64 - self.grid[i * n1 + (n - j)];
            }
        }
        Self::from_grid(n, grid, self.ln_binom.clone())
    }

    pub fn survival(&self) -> Self {
        let n = self.n;
        let n1 = n + 1;
        let mut grid = vec![0.0; n1 * n1];
        for i in 0..n1 {
            for j in 0..n1 {
                grid[i * n1 + j] = (i + j) as f64 / n as f64 - 1.0
                    + self.grid[(n - i) * n1 + (n - j)];
            }
        }
        Self::from_grid(n, grid, self.ln_binom.clone())
    }
}

fn ln_binomials(n: usize) -> Vec<f64> {
    let mut ln_fact = vec![0.0; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    (0..=n)
        .map(|i| ln_fact[n] - ln_fact[i] - ln_fact[n - i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_one_of_m_is_independence() {
        let b = BernsteinCopula::new(&Copula::M, 1).unwrap();
        for i in 0..=20 {
            for j in 0..=20 {
                let u = i as f64 / 20.0;
                let v = j as f64 / 20.0;
                assert!((b.eval_unchecked(u, v) - u * v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn independence_is_a_fixed_point() {
        for n in [1, 2, 5, 17] {
            let b = BernsteinCopula::new(&Copula::Pi, n).unwrap();
            for i in 0..=25 {
                for j in 0..=25 {
                    let u = i as f64 / 25.0;
                    let v = j as f64 / 25.0;
                    assert!(
                        (b.eval_unchecked(u, v) - u * v).abs() < 1e-12,
                        "n = {n}, ({u}, {v})"
                    );
                }
            }
        }
    }

    #[test]
    fn smoothing_m_stays_strictly_between_pi_and_m() {
        let b = BernsteinCopula::new(&Copula::M, 20).unwrap();
        let x = b.eval_unchecked(0.5, 0.5);
        assert!(x > 0.25 && x < 0.5, "got {x}");
    }
}
