//! Step-response characteristics and integral error indices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{Sample, SimTrace};

/// Minimum trace length accepted by [`transient_metrics`].
pub const MIN_SAMPLES: usize = 20;
/// Default settling band, as a fraction of the final value.
pub const DEFAULT_BAND: f64 = 0.02;
/// Overshoot (in percent) below which no peak time is reported.
const PEAK_OVERSHOOT_FLOOR: f64 = 0.1;
/// Final values smaller than this fall back to the reference amplitude.
const TINY_FINAL_VALUE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("trace has {0} samples, need at least 20")]
    DegenerateTrace(usize),
    #[error("settling band fraction {0} outside (0, 0.5)")]
    InvalidBand(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientMetrics {
    pub peak_time: Option<f64>,
    pub percent_overshoot: f64,
    pub settling_time: Option<f64>,
    pub rise_time_10_90: Option<f64>,
    pub steady_state_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexKind {
    #[serde(rename = "ITAE")]
    Itae,
    #[serde(rename = "IAE")]
    Iae,
    #[serde(rename = "ISE")]
    Ise,
    #[serde(rename = "ITSE")]
    Itse,
}

impl IndexKind {
    pub const ALL: [IndexKind; 4] = [
        IndexKind::Itae,
        IndexKind::Iae,
        IndexKind::Ise,
        IndexKind::Itse,
    ];

    /// Integrand at time `t` for error `e`.
    #[inline]
    pub fn integrand(self, t: f64, e: f64) -> f64 {
        match self {
            IndexKind::Itae => t * e.abs(),
            IndexKind::Iae => e.abs(),
            IndexKind::Ise => e * e,
            IndexKind::Itse => t * e * e,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Itae => "ITAE",
            IndexKind::Iae => "IAE",
            IndexKind::Ise => "ISE",
            IndexKind::Itse => "ITSE",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IndexKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown error index {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorIndex {
    pub kind: IndexKind,
    pub value: f64,
}

/// Running trapezoidal integral of an error index over uniformly spaced
/// samples.
#[derive(Debug, Clone)]
pub struct IndexAccumulator {
    kind: IndexKind,
    previous: Option<(f64, f64)>,
    sum: f64,
    max_abs_error: f64,
}

impl IndexAccumulator {
    pub fn new(kind: IndexKind) -> Self {
        Self {
            kind,
            previous: None,
            sum: 0.0,
            max_abs_error: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, t: f64, e: f64) {
        let f = self.kind.integrand(t, e);
        if let Some((t0, f0)) = self.previous {
            self.sum += 0.5 * (f0 + f) * (t - t0);
        }
        self.previous = Some((t, f));
        self.max_abs_error = self.max_abs_error.max(e.abs());
    }

    pub fn push_sample(&mut self, s: &Sample) {
        self.push(s.t, s.e);
    }

    pub fn value(&self) -> f64 {
        self.sum
    }

    pub fn max_abs_error(&self) -> f64 {
        self.max_abs_error
    }
}

/// Trapezoidal quadrature of the chosen index over the whole trace.
pub fn error_index(trace: &SimTrace, kind: IndexKind) -> ErrorIndex {
    let mut acc = IndexAccumulator::new(kind);
    for (&t, &e) in trace.t().iter().zip(trace.e()) {
        acc.push(t, e);
    }
    ErrorIndex {
        kind,
        value: acc.value(),
    }
}

/// Peak time, overshoot, settling time and 10–90 % rise time of a step
/// response.
///
/// The final value is the mean of the last 5 % of samples. The settling time
/// is the first sample after the last excursion outside
/// `±band_fraction·|final|`; it is absent when the last sample is itself
/// outside the band.
pub fn transient_metrics(
    trace: &SimTrace,
    band_fraction: f64,
) -> Result<TransientMetrics, MetricsError> {
    let n = trace.len();
    if n < MIN_SAMPLES {
        return Err(MetricsError::DegenerateTrace(n));
    }
    if !(band_fraction > 0.0 && band_fraction < 0.5) {
        return Err(MetricsError::InvalidBand(band_fraction));
    }
    let y = trace.y();
    let t = trace.t();

    let tail = ((n as f64) * 0.05).ceil() as usize;
    let ss = y[n - tail..].iter().sum::<f64>() / tail as f64;

    let (peak_idx, peak) =
        y.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });

    let scale = if ss.abs() > TINY_FINAL_VALUE {
        ss.abs()
    } else {
        trace.r().last().map_or(0.0, |r| r.abs())
    };
    let percent_overshoot = if scale > 0.0 {
        ((peak - ss) / scale * 100.0).max(0.0)
    } else {
        0.0
    };
    let peak_time = (percent_overshoot > PEAK_OVERSHOOT_FLOOR).then(|| t[peak_idx]);

    let band = band_fraction * scale;
    let settling_time = match y.iter().rposition(|v| (v - ss).abs() > band) {
        None => Some(t[0]),
        Some(k) if k + 1 < n => Some(t[k + 1]),
        Some(_) => None,
    };

    let crossing = |level: f64| {
        let idx = if ss >= 0.0 {
            y.iter().position(|&v| v >= level)
        } else {
            y.iter().position(|&v| v <= level)
        };
        idx.map(|i| t[i])
    };
    let rise_time_10_90 = if ss.abs() > TINY_FINAL_VALUE {
        match (crossing(0.1 * ss), crossing(0.9 * ss)) {
            (Some(lo), Some(hi)) => Some(hi - lo),
            _ => None,
        }
    } else {
        None
    };

    Ok(TransientMetrics {
        peak_time,
        percent_overshoot,
        settling_time,
        rise_time_10_90,
        steady_state_value: ss,
    })
}
