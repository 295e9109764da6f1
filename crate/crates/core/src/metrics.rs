//! Statistics and smoothness scores over acceleration-magnitude series.
//!
//! Every metric here is a pure function of a [`MagnitudeSeries`]. The
//! display score is the sample variance scaled by 100 and rounded to an
//! integer; the other metrics (mean, mean squared successive difference,
//! lagged autocorrelation) are reported alongside it for comparison.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed trace sample rate in samples per second.
pub const SAMPLE_RATE_HZ: u32 = 20;

/// A trailing partial window is scored only if it holds at least this many samples.
pub const MIN_TAIL_WINDOW_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("series is empty")]
    EmptySeries,
    #[error("series is degenerate: {0}")]
    DegenerateSeries(&'static str),
    #[error("invalid magnitude {value} at index {index}")]
    InvalidValue { index: usize, value: String },
    #[error("sample rate must be positive")]
    InvalidSampleRate,
}

/// Ordered acceleration magnitudes (multiples of g) sampled at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSeries {
    values: Vec<f64>,
    sample_rate: u32,
}

impl MagnitudeSeries {
    pub fn new(values: Vec<f64>, sample_rate: u32) -> Result<Self, MetricsError> {
        if sample_rate == 0 {
            return Err(MetricsError::InvalidSampleRate);
        }
        if let Some((index, value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(MetricsError::InvalidValue {
                index,
                value: value.to_string(),
            });
        }
        Ok(Self {
            values,
            sample_rate,
        })
    }

    /// Series at the standard 20 Hz rate.
    pub fn at_default_rate(values: Vec<f64>) -> Result<Self, MetricsError> {
        Self::new(values, SAMPLE_RATE_HZ)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Seconds spanned from the first to the last sample.
    pub fn duration(&self) -> f64 {
        self.values.len().saturating_sub(1) as f64 / f64::from(self.sample_rate)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn require_len(series: &MagnitudeSeries, min: usize) -> Result<(), MetricsError> {
    match series.len() {
        0 => Err(MetricsError::EmptySeries),
        n if n < min => Err(MetricsError::DegenerateSeries("too few samples")),
        _ => Ok(()),
    }
}

fn mean_of(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn variance_of(values: &[f64]) -> f64 {
    let m = mean_of(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    ss / (values.len() - 1) as f64
}

pub fn mean(series: &MagnitudeSeries) -> Result<f64, MetricsError> {
    require_len(series, 1)?;
    Ok(mean_of(series.values()))
}

/// Sample variance with the `N - 1` divisor.
pub fn variance(series: &MagnitudeSeries) -> Result<f64, MetricsError> {
    require_len(series, 2)?;
    Ok(variance_of(series.values()))
}

/// Sum of squared successive differences divided by `N` (not `N - 1`).
pub fn mean_sq_diff(series: &MagnitudeSeries) -> Result<f64, MetricsError> {
    require_len(series, 2)?;
    let values = series.values();
    let sum: f64 = values
        .windows(2)
        .map(|w| (w[0] - w[1]) * (w[0] - w[1]))
        .sum();
    Ok(sum / values.len() as f64)
}

/// Lag-`k` autocorrelation. The numerator runs over the `N - k` overlapping
/// pairs, the denominator over all `N` centred squares.
pub fn lag_autocorr(series: &MagnitudeSeries, k: usize) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::DegenerateSeries("lag must be positive"));
    }
    require_len(series, 1)?;
    let values = series.values();
    if values.len() <= k {
        return Err(MetricsError::DegenerateSeries("series shorter than lag + 1"));
    }
    let m = mean_of(values);
    let denom: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    if denom == 0.0 {
        return Err(MetricsError::DegenerateSeries("constant series"));
    }
    let numer: f64 = values
        .iter()
        .zip(&values[k..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum();
    Ok(numer / denom)
}

/// `round(100 * variance)`, half away from zero.
pub fn display_score(variance: f64) -> u32 {
    let scaled = (100.0 * variance).round();
    if scaled <= 0.0 {
        0
    } else if scaled >= f64::from(u32::MAX) {
        u32::MAX
    } else {
        scaled as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicStats {
    pub min: f64,
    pub max: f64,
    pub duration: f64,
}

pub fn basic_stats(series: &MagnitudeSeries) -> Result<BasicStats, MetricsError> {
    require_len(series, 1)?;
    let (min, max) = series
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    Ok(BasicStats {
        min,
        max,
        duration: series.duration(),
    })
}

/// Score of one 1 s window of the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowScore {
    pub window: usize,
    pub score: u32,
}

/// Splits the trace into consecutive one-second windows and scores each.
///
/// A trailing partial window survives only when it holds at least
/// [`MIN_TAIL_WINDOW_SAMPLES`] samples.
pub fn per_second_scores(series: &MagnitudeSeries) -> Result<Vec<WindowScore>, MetricsError> {
    require_len(series, 2)?;
    let window_len = series.sample_rate() as usize;
    let tail_min = MIN_TAIL_WINDOW_SAMPLES.max(2);
    Ok(series
        .values()
        .chunks(window_len)
        .enumerate()
        .filter(|(_, chunk)| chunk.len() == window_len || chunk.len() >= tail_min)
        .map(|(window, chunk)| {
            let score = if chunk.len() < 2 {
                0
            } else {
                display_score(variance_of(chunk))
            };
            WindowScore { window, score }
        })
        .collect())
}

/// Every statistic the analysis surfaces report for a climb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub mean: f64,
    pub variance: f64,
    pub mean_sq_diff: f64,
    /// Absent when the trace is constant.
    pub lag1_autocorr: Option<f64>,
    pub display_score: u32,
    pub min: f64,
    pub max: f64,
    pub duration: f64,
    pub per_second_scores: Vec<WindowScore>,
}

impl SmoothnessReport {
    pub fn compute(series: &MagnitudeSeries) -> Result<Self, MetricsError> {
        let variance = variance(series)?;
        let stats = basic_stats(series)?;
        let lag1_autocorr = match lag_autocorr(series, 1) {
            Ok(r) => Some(r),
            Err(MetricsError::DegenerateSeries(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            mean: mean(series)?,
            variance,
            mean_sq_diff: mean_sq_diff(series)?,
            lag1_autocorr,
            display_score: display_score(variance),
            min: stats.min,
            max: stats.max,
            duration: stats.duration,
            per_second_scores: per_second_scores(series)?,
        })
    }
}

/// Deliberate climbing style of a recorded ascent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Static,
    Hybrid,
    Dynamic,
}

/// One metric value measured for a (route, style) ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleRow {
    pub route: String,
    pub style: Style,
    pub value: f64,
}

impl StyleRow {
    pub fn new(route: impl Into<String>, style: Style, value: f64) -> Self {
        Self {
            route: route.into(),
            style,
            value,
        }
    }
}

/// A pair of rows on the same route where a smoother style did not score
/// strictly below a less smooth one.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingViolation {
    pub route: String,
    pub smoother: (Style, f64),
    pub rougher: (Style, f64),
}

/// Lists every within-route pair that breaks static < hybrid < dynamic.
pub fn style_ordering_violations(rows: &[StyleRow]) -> Vec<OrderingViolation> {
    let mut violations = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.route != b.route || a.style == b.style {
                continue;
            }
            let (smooth, rough) = if a.style < b.style { (a, b) } else { (b, a) };
            if smooth.value >= rough.value {
                violations.push(OrderingViolation {
                    route: a.route.clone(),
                    smoother: (smooth.style, smooth.value),
                    rougher: (rough.style, rough.value),
                });
            }
        }
    }
    violations
}

/// True iff, within every route, each static value is below each hybrid
/// value, which is below each dynamic value.
pub fn metric_style_ordering(rows: &[StyleRow]) -> bool {
    style_ordering_violations(rows).is_empty()
}
