use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeline::AdoptionSeries;

/// Moments of the period index, weighting period `i` by `S(i) / ΣS`.
///
/// Population moments throughout; kurtosis is reported in excess form so a
/// normal shape sits at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeMoments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Set for point masses; skewness and kurtosis are then reported as 0.
    pub degenerate: bool,
}

pub fn shape_moments(series: &AdoptionSeries) -> Result<ShapeMoments> {
    let total = series.total();
    if total == 0 {
        return Err(Error::UndefinedMetric("shape moments"));
    }
    let n = total as f64;
    let weighted =
        || series.counts().iter().enumerate().filter(|(_, &c)| c > 0).map(|(pos, &c)| ((pos + 1) as f64, c as f64));

    let mean = weighted().map(|(i, c)| i * c).sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for (i, c) in weighted() {
        let d = i - mean;
        let d2 = d * d;
        m2 += c * d2;
        m3 += c * d2 * d;
        m4 += c * d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let nonzero_bins = weighted().count();
    if nonzero_bins < 2 || m2 <= 0.0 {
        return Ok(ShapeMoments { mean, variance: 0.0, skewness: 0.0, excess_kurtosis: 0.0, degenerate: true });
    }
    Ok(ShapeMoments {
        mean,
        variance: m2,
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        degenerate: false,
    })
}
