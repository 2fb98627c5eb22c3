//! Self-contained statistics: OLS with inference, two-sample t-tests, the
//! 2×2 chi-square test, and the special functions behind their p-values.

mod dist;
mod hypothesis;
mod ols;
pub mod special;

pub use dist::{chi2_cdf, chi2_sf, f_sf, t_cdf, t_two_tailed_p};
pub use hypothesis::{
    chi_square_2x2, group_compare, pooled_t_test, welch_t_test, ChiSquareTest, GroupComparison, GroupSummary, TTest,
};
pub use ols::{ols_fit, render_table, Design, RegressionResult, INTERCEPT, RANK_TOLERANCE};
