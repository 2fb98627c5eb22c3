use serde::{Deserialize, Serialize};

use super::dist::{chi2_sf, t_two_tailed_p};
use crate::error::{Error, Result};

/// Sample size, mean and `n - 1` standard deviation of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl GroupSummary {
    pub fn new(n: usize, mean: f64, sd: f64) -> Self {
        GroupSummary { n, mean, sd }
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::contract(format!("group of size {n}; need at least 2")));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        Ok(GroupSummary { n, mean, sd: (ss / (n - 1) as f64).sqrt() })
    }

    fn variance(&self) -> f64 {
        self.sd * self.sd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    /// Signed as `a.mean - b.mean`.
    pub t: f64,
    pub df: f64,
    /// Two-tailed.
    pub p: f64,
    /// Both groups have zero spread but different means.
    pub degenerate: bool,
}

fn check_sizes(a: &GroupSummary, b: &GroupSummary) -> Result<()> {
    if a.n < 2 || b.n < 2 {
        return Err(Error::contract("t-test needs at least two observations per group"));
    }
    Ok(())
}

fn finish(diff: f64, se: f64, df: f64) -> TTest {
    if se == 0.0 {
        return if diff == 0.0 {
            TTest { t: 0.0, df, p: 1.0, degenerate: false }
        } else {
            TTest { t: diff.signum() * f64::INFINITY, df, p: 0.0, degenerate: true }
        };
    }
    let t = diff / se;
    TTest { t, df, p: t_two_tailed_p(t, df), degenerate: false }
}

/// Equal-variance two-sample t-test, `df = n_a + n_b - 2`.
pub fn pooled_t_test(a: &GroupSummary, b: &GroupSummary) -> Result<TTest> {
    check_sizes(a, b)?;
    let (na, nb) = (a.n as f64, b.n as f64);
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * a.variance() + (nb - 1.0) * b.variance()) / df;
    let se = (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(finish(a.mean - b.mean, se, df))
}

/// Unequal-variance t-test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &GroupSummary, b: &GroupSummary) -> Result<TTest> {
    check_sizes(a, b)?;
    let va = a.variance() / a.n as f64;
    let vb = b.variance() / b.n as f64;
    let se = (va + vb).sqrt();
    let df = if se == 0.0 {
        (a.n + b.n - 2) as f64
    } else {
        (va + vb).powi(2) / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64)
    };
    Ok(finish(a.mean - b.mean, se, df))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub p: f64,
    pub df: u32,
}

/// Pearson chi-square on a 2×2 table, no continuity correction.
pub fn chi_square_2x2(table: [[u64; 2]; 2]) -> Result<ChiSquareTest> {
    let rows = [table[0][0] + table[0][1], table[1][0] + table[1][1]];
    let cols = [table[0][0] + table[1][0], table[0][1] + table[1][1]];
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::contract("chi-square table has an empty row or column"));
    }
    let n = (rows[0] + rows[1]) as f64;
    let mut statistic = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = rows[i] as f64 * cols[j] as f64 / n;
            statistic += (observed as f64 - expected).powi(2) / expected;
        }
    }
    Ok(ChiSquareTest { statistic, p: chi2_sf(statistic, 1.0), df: 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    /// Values labelled `true`.
    pub positive: GroupSummary,
    pub negative: GroupSummary,
    pub test: TTest,
}

impl GroupComparison {
    /// How much larger the negative group's mean is, relative to the positive group's.
    pub fn relative_gap(&self) -> f64 {
        (self.negative.mean - self.positive.mean) / self.positive.mean
    }
}

/// Splits `values` by `labels` and runs a pooled t-test between the groups.
pub fn group_compare(values: &[f64], labels: &[bool]) -> Result<GroupComparison> {
    if values.len() != labels.len() {
        return Err(Error::contract("values and labels differ in length"));
    }
    let pick =
        |want: bool| -> Vec<f64> { values.iter().zip(labels).filter(|(_, &l)| l == want).map(|(&v, _)| v).collect() };
    let positive = GroupSummary::from_values(&pick(true))?;
    let negative = GroupSummary::from_values(&pick(false))?;
    let test = pooled_t_test(&positive, &negative)?;
    Ok(GroupComparison { positive, negative, test })
}
