//! Independent reference implementations used by the property tests and the
//! acceptance suite. Deliberately naive.
#![allow(dead_code)]

/// Strict peaks by explicit zero padding, and the earliest argmax.
pub fn peaks(counts: &[u64]) -> (Vec<usize>, usize) {
    let mut padded = vec![0u64];
    padded.extend_from_slice(counts);
    padded.push(0);
    let mut out = Vec::new();
    for i in 1..=counts.len() {
        if padded[i] > padded[i - 1] && padded[i] > padded[i + 1] {
            out.push(i);
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let global = counts.iter().position(|&c| c == max).unwrap() + 1;
    (out, global)
}

/// `(excess numerator, total)` for E_Tot as exact integers.
pub fn e_tot_fraction(counts: &[u64]) -> (u64, u64) {
    let (idx, _) = peaks(counts);
    let at = |i: usize| if i == 0 || i > counts.len() { 0 } else { counts[i - 1] };
    let num = idx.iter().map(|&i| at(i) - at(i - 1).max(at(i + 1))).sum();
    (num, counts.iter().sum())
}

pub fn e_gpo_fraction(counts: &[u64]) -> (u64, u64) {
    let (_, g) = peaks(counts);
    let at = |i: usize| if i == 0 || i > counts.len() { 0 } else { counts[i - 1] };
    let neighbour = at(g - 1).max(at(g + 1));
    (at(g).saturating_sub(neighbour), counts.iter().sum())
}

pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub degenerate: bool,
}

/// Central moments from exact integer power sums. Every numerator is exact
/// in `i128`; only the final divisions round.
pub fn moments_exact(counts: &[u64]) -> Moments {
    let (mut w, mut s1, mut s2, mut s3, mut s4) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for (pos, &c) in counts.iter().enumerate() {
        let i = (pos + 1) as i128;
        let c = c as i128;
        w += c;
        s1 += c * i;
        s2 += c * i * i;
        s3 += c * i * i * i;
        s4 += c * i * i * i * i;
    }
    // W^k * m_k
    let n2 = w * s2 - s1 * s1;
    let n3 = w * w * s3 - 3 * w * s1 * s2 + 2 * s1 * s1 * s1;
    let n4 = w * w * w * s4 - 4 * w * w * s1 * s3 + 6 * w * s1 * s1 * s2 - 3 * s1 * s1 * s1 * s1;
    let mean = s1 as f64 / w as f64;
    if n2 == 0 {
        return Moments { mean, variance: 0.0, skewness: 0.0, excess_kurtosis: 0.0, degenerate: true };
    }
    let n2f = n2 as f64;
    Moments {
        mean,
        variance: n2f / (w as f64 * w as f64),
        skewness: n3 as f64 / n2f.powf(1.5),
        excess_kurtosis: n4 as f64 / (n2f * n2f) - 3.0,
        degenerate: false,
    }
}

/// Moments of the explicit multiset `{i repeated S(i) times}`.
pub fn moments_multiset(counts: &[u64]) -> Moments {
    let xs: Vec<f64> =
        counts.iter().enumerate().flat_map(|(pos, &c)| std::iter::repeat_n((pos + 1) as f64, c as usize)).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
    let (m2, m3, m4) = (m(2), m(3), m(4));
    if xs.iter().all(|&x| x == xs[0]) {
        return Moments { mean, variance: 0.0, skewness: 0.0, excess_kurtosis: 0.0, degenerate: true };
    }
    Moments {
        mean,
        variance: m2,
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        degenerate: false,
    }
}

pub fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs() + 1e-12
}

/// Solves `XᵀX β = Xᵀy` with nalgebra's Cholesky; `x` is row-major `n × k`.
pub fn normal_equations(x: &[f64], n: usize, k: usize, y: &[f64]) -> Vec<f64> {
    let xm = nalgebra::DMatrix::from_row_slice(n, k, x);
    let yv = nalgebra::DVector::from_column_slice(y);
    let xtx = xm.transpose() * &xm;
    let xty = xm.transpose() * yv;
    xtx.cholesky().expect("well-conditioned system").solve(&xty).iter().copied().collect()
}
