//! Log-log least-squares rate fits over eps sweeps.

use serde::{Deserialize, Serialize};

use super::diff::DiffRecord;
use crate::error::{contract, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(ln eps, ln norm)`.
    pub points: Vec<(f64, f64)>,
}

pub const MIN_SLOPE: f64 = 0.8;
pub const MIN_R_SQUARED: f64 = 0.95;

impl RateFit {
    pub fn passes(&self, min_slope: f64, min_r2: f64) -> bool {
        self.slope >= min_slope && self.r_squared >= min_r2
    }
}

/// Fits `ln y = slope ln x + intercept`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<RateFit> {
    if x.len() != y.len() {
        return contract("abscissa and ordinate lengths differ");
    }
    if x.len() < 3 {
        return contract(format!("rate fit needs at least 3 points, got {}", x.len()));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return contract("rate fit needs positive finite values");
    }
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return contract("rate fit needs distinct abscissae");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points: pts,
    })
}

/// Rate of one tracked norm across a sweep.
pub fn fit_rate(records: &[DiffRecord], key: &str) -> Result<RateFit> {
    let mut eps = Vec::with_capacity(records.len());
    let mut vals = Vec::with_capacity(records.len());
    for r in records {
        let Some(v) = r.get(key) else {
            return contract(format!("unknown norm key {key}"));
        };
        eps.push(r.eps);
        vals.push(v);
    }
    let mut sorted = eps.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return contract("rate fit needs distinct eps values");
    }
    fit_power_law(&eps, &vals)
}

/// True when the values strictly decrease along with their keys.
pub fn decreasing_with(keys: &[f64], values: &[f64]) -> bool {
    let mut pairs: Vec<(f64, f64)> = keys.iter().copied().zip(values.iter().copied()).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs.windows(2).all(|w| w[1].1 < w[0].1)
}
