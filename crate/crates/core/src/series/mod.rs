//! Truncated series: hypergeometric and Frobenius expansions, the
//! quasi-period series, termwise calculus and certified evaluation.

mod evaluate;
mod hyper;
mod jet;
mod logseries;
mod ratseries;

pub use evaluate::{eval_series, moment_sums, moment_sums_with, RatioBound};
pub use hyper::{
    frobenius_basis, frobenius_series, frobenius_series_raw, hg_coefficient, hg_coefficients,
    hg_coefficients_raw, quasiperiod_coefficient, quasiperiod_series,
};
pub use jet::{Jet, JetSeries};
pub use logseries::LogSeries;
pub use ratseries::{Measure, RatSeries};

/// Termwise antiderivative; see [`RatSeries::integrate`].
pub fn integrate_termwise(s: &RatSeries, measure: Measure) -> crate::Result<RatSeries> {
    s.integrate(measure)
}
