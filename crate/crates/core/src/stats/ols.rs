//! Ordinary least squares via Householder QR, with classical inference.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::dist::{f_sf, t_two_tailed_p};
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest pivot are rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Row-major design matrix. The caller supplies the intercept column.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    data: Vec<f64>,
}

impl Design {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Design { names: names.into_iter().map(Into::into).collect(), data: Vec::new() }
    }

    /// Design whose first column is a constant named `(Intercept)`.
    pub fn with_intercept<S: Into<String>>(regressors: impl IntoIterator<Item = S>) -> Self {
        let mut names = vec![INTERCEPT.to_string()];
        names.extend(regressors.into_iter().map(Into::into));
        Design { names, data: Vec::new() }
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        let k = self.cols();
        let intercept = self.names.first().is_some_and(|n| n == INTERCEPT);
        match (row.len(), intercept) {
            (n, _) if n == k => self.data.extend_from_slice(row),
            (n, true) if n + 1 == k => {
                self.data.push(1.0);
                self.data.extend_from_slice(row);
            }
            (n, _) => return Err(Error::contract(format!("row has {n} values, design has {k} columns"))),
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        if self.cols() == 0 {
            0
        } else {
            self.data.len() / self.cols()
        }
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let k = self.cols();
        &self.data[i * k..(i + 1) * k]
    }
}

pub const INTERCEPT: &str = "(Intercept)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub f_statistic: f64,
    pub f_p_value: f64,
    pub residual_std_error: f64,
    pub df_model: usize,
    pub df_residual: usize,
    pub n: usize,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.coefficients[j])
    }

    pub fn p_value(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|j| self.p_values[j])
    }
}

/// Householder QR of the column-major copy of `x`, returning `R` (upper
/// triangle, row-major `k×k`) and `Qᵀy`.
fn householder_qr(design: &Design, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (n, k) = (design.rows(), design.cols());
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| (0..n).map(|i| design.get(i, j)).collect()).collect();
    let mut qty = y.to_vec();
    let mut r = vec![0.0; k * k];

    for j in 0..k {
        let norm = cols[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|e| e * e).sum();
        if vtv > 0.0 {
            let reflect = |target: &mut [f64]| {
                let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
                let scale = 2.0 * dot / vtv;
                for (t, vi) in target.iter_mut().zip(&v) {
                    *t -= scale * vi;
                }
            };
            for col in cols.iter_mut().skip(j) {
                reflect(&mut col[j..]);
            }
            reflect(&mut qty[j..]);
        }
        for (c, col) in cols.iter().enumerate().skip(j) {
            r[j * k + c] = col[j];
        }
        r[j * k + j] = if vtv > 0.0 { alpha } else { cols[j][j] };
    }
    (r, qty)
}

/// Inverse of an upper-triangular `k×k` matrix.
fn invert_upper(r: &[f64], k: usize) -> Vec<f64> {
    let mut inv = vec![0.0; k * k];
    for col in 0..k {
        for i in (0..=col).rev() {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let acc: f64 = (i + 1..=col).map(|m| r[i * k + m] * inv[m * k + col]).sum();
            inv[i * k + col] = (rhs - acc) / r[i * k + i];
        }
    }
    inv
}

pub fn ols_fit(design: &Design, response: &[f64]) -> Result<RegressionResult> {
    let (n, k) = (design.rows(), design.cols());
    if response.len() != n {
        return Err(Error::contract(format!("{n} design rows but {} responses", response.len())));
    }
    if k == 0 || n <= k {
        return Err(Error::contract(format!("need more observations ({n}) than columns ({k})")));
    }
    if design.data.iter().chain(response).any(|v| !v.is_finite()) {
        return Err(Error::contract("design and response must be finite"));
    }

    let (r, qty) = householder_qr(design, response);
    let largest = (0..k).map(|j| r[j * k + j].abs()).fold(0.0, f64::max);
    if let Some(j) = (0..k).find(|&j| r[j * k + j].abs() <= RANK_TOLERANCE * largest) {
        return Err(Error::RankDeficient { column: design.names[j].clone() });
    }

    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let acc: f64 = (i + 1..k).map(|m| r[i * k + m] * beta[m]).sum();
        beta[i] = (qty[i] - acc) / r[i * k + i];
    }

    let residuals: Vec<f64> =
        (0..n).map(|i| response[i] - design.row(i).iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>()).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let mean_y = response.iter().sum::<f64>() / n as f64;
    let tss: f64 = response.iter().map(|y| (y - mean_y).powi(2)).sum();

    let df_residual = n - k;
    let df_model = k - 1;
    let sigma2 = rss / df_residual as f64;

    let r_inv = invert_upper(&r, k);
    let standard_errors: Vec<f64> =
        (0..k).map(|j| (sigma2 * (j..k).map(|m| r_inv[j * k + m].powi(2)).sum::<f64>()).sqrt()).collect();
    let t_statistics: Vec<f64> =
        beta.iter().zip(&standard_errors).map(|(&b, &se)| if b == 0.0 { 0.0 } else { b / se }).collect();
    let p_values = t_statistics.iter().map(|&t| t_two_tailed_p(t, df_residual as f64)).collect();

    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let adjusted_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df_residual as f64;
    let (f_statistic, f_p_value) = if df_model == 0 {
        (0.0, 1.0)
    } else {
        let f = ((tss - rss).max(0.0) / df_model as f64) / sigma2;
        (f, f_sf(f, df_model as f64, df_residual as f64))
    };

    Ok(RegressionResult {
        names: design.names.clone(),
        coefficients: beta,
        standard_errors,
        t_statistics,
        p_values,
        r_squared,
        adjusted_r_squared,
        f_statistic,
        f_p_value,
        residual_std_error: sigma2.sqrt(),
        df_model,
        df_residual,
        n,
        residuals,
    })
}

fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

fn thousands(v: usize) -> String {
    let digits = v.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn fmt_p(p: f64) -> String {
    if p >= 0.001 || p == 0.0 {
        format!("p = {p:.3}")
    } else {
        format!("p = {p:.1e}")
    }
}

/// Side-by-side text table of several fits, one column per model. The
/// intercept is listed last as `Constant`.
pub fn render_table(models: &[(&str, &RegressionResult)]) -> String {
    let mut rows: Vec<&str> = Vec::new();
    for (_, m) in models {
        for name in m.names.iter().filter(|n| n.as_str() != INTERCEPT) {
            if !rows.contains(&name.as_str()) {
                rows.push(name);
            }
        }
    }
    rows.push(INTERCEPT);

    let label_w = rows.iter().map(|r| r.len()).max().unwrap_or(0).max(19) + 2;
    let col_w = 26;
    let mut out = String::new();
    let _ = write!(out, "{:label_w$}", "");
    for (label, _) in models {
        let _ = write!(out, "{label:>col_w$}");
    }
    out.push('\n');
    let rule = "-".repeat(label_w + col_w * models.len());
    let _ = writeln!(out, "{rule}");

    for name in &rows {
        let shown = if *name == INTERCEPT { "Constant" } else { name };
        let _ = write!(out, "{shown:label_w$}");
        for (_, m) in models {
            let cell = m
                .index_of(name)
                .map(|j| format!("{:.3}{}", m.coefficients[j], stars(m.p_values[j])))
                .unwrap_or_default();
            let _ = write!(out, "{cell:>col_w$}");
        }
        out.push('\n');
        let _ = write!(out, "{:label_w$}", "");
        for (_, m) in models {
            let cell = m.index_of(name).map(|j| fmt_p(m.p_values[j])).unwrap_or_default();
            let _ = write!(out, "{cell:>col_w$}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{rule}");

    type Cell = Box<dyn Fn(&RegressionResult) -> String>;
    let footer: [(&str, Cell); 5] = [
        ("Observations", Box::new(|m| thousands(m.n))),
        ("R2", Box::new(|m| format!("{:.3}", m.r_squared))),
        ("Adjusted R2", Box::new(|m| format!("{:.3}", m.adjusted_r_squared))),
        ("Residual Std. Error", Box::new(|m| format!("{:.3} (df = {})", m.residual_std_error, m.df_residual))),
        (
            "F Statistic",
            Box::new(|m| {
                format!("{:.3}{} (df = {}; {})", m.f_statistic, stars(m.f_p_value), m.df_model, m.df_residual)
            }),
        ),
    ];
    for (label, cell) in &footer {
        let _ = write!(out, "{label:label_w$}");
        for (_, m) in models {
            let _ = write!(out, "{:>col_w$}", cell(m));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "Note: *p<0.1; **p<0.05; ***p<0.01");
    out
}
