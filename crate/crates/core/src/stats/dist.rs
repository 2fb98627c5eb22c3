//! CDFs and tail probabilities for Student-t, chi-square and F.

use super::special::{beta_inc_pair, gamma_inc_pair};

/// Student-t CDF with `df` degrees of freedom.
pub fn t_cdf(x: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    if x == 0.0 {
        return 0.5;
    }
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * t_two_tailed_p(x, df);
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// `P(|T| ≥ |t|)`, computed directly rather than as `2(1 - F(|t|))`.
pub fn t_two_tailed_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    beta_inc_pair(0.5 * df, 0.5, x, y).0
}

pub fn chi2_cdf(x: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    gamma_inc_pair(0.5 * df, 0.5 * x).0
}

/// Upper tail `P(X ≥ x)`.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_inc_pair(0.5 * df, 0.5 * x).1
}

/// Upper tail of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    let denom = d2 + d1 * f;
    beta_inc_pair(0.5 * d2, 0.5 * d1, d2 / denom, d1 * f / denom).0
}
