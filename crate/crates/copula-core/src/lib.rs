//! Exact concordance measures for structured bivariate copulas.
//!
//! The crate represents copulas whose dependence structure is piecewise
//! explicit (shuffles of M, their mixtures, diagonal copulas, two-diagonal
//! copulas, ordinal sums and Bernstein smoothings) and computes Spearman's
//! footrule, Spearman's rho, Kendall's tau, Gini's gamma and Blomqvist's
//! beta for them, exactly wherever the representation allows it. On top of
//! the measures sit the boundary curves of the attainable (footrule, rho)
//! region and the constructive machinery behind them: grid approximation of
//! doubly symmetric copulas by doubly symmetric shuffles and the
//! mass-shifting reduction onto the two diagonals.

pub mod bernstein;
pub mod copula;
pub mod diagonal;
pub mod error;
pub mod extremal;
pub mod generate;
pub mod json;
pub mod measures;
pub mod quad;
pub mod reduction;
pub mod shuffle;

/// Absolute tolerance for structural width equalities.
pub const WIDTH_TOL: f64 = 1e-12;
/// Absolute tolerance for pointwise copula identities.
pub const POINTWISE_TOL: f64 = 1e-12;

pub use bernstein::BernsteinCopula;
pub use copula::{
    check_validity, doubly_symmetric_deviation, sup_distance, Copula, Mixture, OrdinalSum,
    Rectangle, Reflection, Transform, Violation,
};
pub use diagonal::{DiagonalCopula, SymmetricDiagonal, TwoDiagonalCopula};
pub use error::{CopulaError, Result};
pub use measures::{
    blomqvist_beta, concordance_q, diagonal_mass_q, diagonal_section, f_functional, f_of,
    footrule_phi, gini_gamma, kendall_tau, monte_carlo_measures, sample_copula, spearman_rho,
    DiagonalSection, MeasureReport, MeasureValue, Method, SectionKind,
};
pub use shuffle::{DsViolation, Segment, ShuffleOfM};

#[cfg(test)]
mod concurrency_contract {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn values_are_shareable_across_threads() {
        assert_send_sync::<Copula>();
        assert_send_sync::<ShuffleOfM>();
        assert_send_sync::<SymmetricDiagonal>();
        assert_send_sync::<MeasureReport>();
    }
}
