//! Height profiles, growth classification and valuation growth along
//! sequences.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact_numbers::{rat, rational_str, valuation, weil_height, ExactRational, Height};

/// Relative variation below which a tail ratio counts as stable.
pub const STABILITY_THRESHOLD: f64 = 0.1;
/// Fewest heights `growth_classify` accepts.
pub const MIN_PROFILE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeightError {
    #[error("value at index {0} is zero")]
    ZeroValue(usize),
    #[error("need at least {needed} heights, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

pub fn height_sequence(values: &[ExactRational]) -> Result<Vec<Height>, HeightError> {
    values.iter().enumerate().map(|(i, v)| weil_height(v).map_err(|_| HeightError::ZeroValue(i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    Bounded,
    Linear,
    NLogN,
    Subquadratic,
    QuadraticOrMore,
}

/// Detrended ratio of the log-height envelope against one growth scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleFit {
    pub scale: &'static str,
    pub mean_slope: f64,
    pub relative_variation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub class: GrowthClass,
    pub horizon: usize,
    pub threshold: f64,
    #[serde(serialize_with = "biguint_str")]
    pub max_first_half: BigUint,
    #[serde(serialize_with = "biguint_str")]
    pub max_last_half: BigUint,
    pub fits: Vec<ScaleFit>,
}

fn biguint_str<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn scale_value(scale: &str, n: f64) -> f64 {
    match scale {
        "n" => n,
        "n_log_n" => n * n.max(1.0).ln(),
        _ => n * n,
    }
}

/// Classifies the growth of `log H_n`.
///
/// Bounded when the last half never exceeds the first half's maximum.
/// Otherwise, with `M(n)` the running maximum of `log H_n` and `n0` the half
/// point, the slopes `(M(n) − M(n0)) / (f(n) − f(n0))` over the last quarter
/// are compared for `f = n, n·log n, n²`; the most stable one under the
/// threshold wins. If none is stable the label is `QuadraticOrMore` when
/// `M(n)/n²` is increasing on the last quarter and `Subquadratic` otherwise.
pub fn growth_classify(heights: &[Height]) -> Result<GrowthReport, HeightError> {
    let len = heights.len();
    if len < MIN_PROFILE {
        return Err(HeightError::TooShort { needed: MIN_PROFILE, got: len });
    }
    let half = len / 2;
    let max_first_half = heights[..half].iter().map(|h| &h.max).max().unwrap().clone();
    let max_last_half = heights[half..].iter().map(|h| &h.max).max().unwrap().clone();
    let horizon = len - 1;
    let mut envelope = Vec::with_capacity(len);
    let mut running = f64::NEG_INFINITY;
    for h in heights {
        running = running.max(h.log);
        envelope.push(running);
    }
    let n0 = half;
    let quarter = len - len / 4;
    let mut fits = Vec::new();
    for scale in ["n", "n_log_n", "n_squared"] {
        let f0 = scale_value(scale, n0 as f64);
        let slopes: Vec<f64> = (quarter..len)
            .map(|n| (envelope[n] - envelope[n0]) / (scale_value(scale, n as f64) - f0))
            .collect();
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let relative_variation = (mean > 0.0).then(|| (hi - lo) / mean);
        fits.push(ScaleFit { scale, mean_slope: mean, relative_variation });
    }
    let class = if max_last_half <= max_first_half {
        GrowthClass::Bounded
    } else {
        let best = fits
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.relative_variation.filter(|v| *v < STABILITY_THRESHOLD).map(|v| (i, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((0, _)) => GrowthClass::Linear,
            Some((1, _)) => GrowthClass::NLogN,
            Some(_) => GrowthClass::QuadraticOrMore,
            None => {
                let ratio = |n: usize| envelope[n] / (n as f64 * n as f64);
                if (quarter + 1..len).all(|n| ratio(n) >= ratio(n - 1)) {
                    GrowthClass::QuadraticOrMore
                } else {
                    GrowthClass::Subquadratic
                }
            }
        }
    };
    Ok(GrowthReport { class, horizon, threshold: STABILITY_THRESHOLD, max_first_half, max_last_half, fits })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValuationVerdict {
    Linear,
    ExceedsLinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationReport {
    pub prime: u64,
    pub horizon: usize,
    /// `max |ν_p(a_n)| / max(n, 1)` over the last half.
    #[serde(with = "rational_str")]
    pub sup_slope: ExactRational,
    /// `|ν_p(a_n)| ≤ C·n + B` candidate.
    #[serde(with = "rational_str")]
    pub c: ExactRational,
    #[serde(with = "rational_str")]
    pub b: ExactRational,
    pub verdict: ValuationVerdict,
    /// First index violating the bound, when it fails.
    pub first_violation: Option<usize>,
}

/// Fits `|ν_p(a_n)| ≤ C·n + B` on the first half and verifies it exactly on
/// the whole horizon.
pub fn valuation_growth(values: &[ExactRational], p: u64) -> Result<ValuationReport, HeightError> {
    let mut y = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        if v.is_zero() {
            return Err(HeightError::ZeroValue(i));
        }
        y.push(valuation(p, v).map_err(|_| HeightError::NotPrime(p))?.unsigned_abs());
    }
    let len = y.len();
    let horizon = len.saturating_sub(1);
    let half = len.div_ceil(2);
    let sup_slope = (len / 2..len)
        .map(|n| BigRational::new(BigInt::from(y[n]), BigInt::from(n.max(1))))
        .max()
        .unwrap_or_else(ExactRational::zero);

    // records of the running maximum on the first half
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut best: Option<u64> = None;
    for (n, &yn) in y.iter().enumerate().take(half) {
        if best.is_none_or(|b| yn > b) {
            best = Some(yn);
            pts.push((n as f64, yn as f64));
        }
    }
    let slope = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        (sxy / sxx).max(0.0)
    } else {
        0.0
    };
    let c = BigRational::new(BigInt::from((slope * 1000.0).round().to_i64().unwrap_or(i64::MAX)), BigInt::from(1000));
    let b = (0..half)
        .map(|n| rat(y[n] as i64) - &c * rat(n as i64))
        .max()
        .unwrap_or_else(ExactRational::zero)
        .max(ExactRational::zero());
    let first_violation = (0..len).find(|&n| rat(y[n] as i64) > &c * rat(n as i64) + &b);
    let verdict = if first_violation.is_none() { ValuationVerdict::Linear } else { ValuationVerdict::ExceedsLinear };
    Ok(ValuationReport { prime: p, horizon, sup_slope, c, b, verdict, first_violation })
}

/// `log H` values for reporting.
pub fn log_heights(heights: &[Height]) -> Vec<f64> {
    heights.iter().map(|h| h.log).collect()
}
