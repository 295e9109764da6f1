//! Raw accelerometer logs: CSV parsing, axis collapse, 20 Hz resampling and
//! a synthetic climb generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{MagnitudeSeries, SAMPLE_RATE_HZ};

/// Raw inter-sample gaps longer than this (seconds) are flagged on the trace.
pub const GAP_THRESHOLD_S: f64 = 0.25;

/// Grid spacing of a resampled trace in milliseconds.
pub const GRID_STEP_MS: i64 = 1000 / SAMPLE_RATE_HZ as i64;

const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("non-finite accelerometer input")]
    NonFiniteInput,
    #[error("malformed row on line {0}")]
    MalformedRow(u64),
    #[error("unknown header {0:?}; expected `t,ax,ay,az` or `t,mag`")]
    UnknownHeader(String),
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("timestamps must be strictly increasing (sample {0})")]
    NonMonotonicTimestamps(usize),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
}

/// Euclidean norm of a tri-axial reading.
pub fn magnitude(ax: f64, ay: f64, az: f64) -> Result<f64, IngestError> {
    if !(ax.is_finite() && ay.is_finite() && az.is_finite()) {
        return Err(IngestError::NonFiniteInput);
    }
    Ok((ax * ax + ay * ay + az * az).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reading {
    Axes { ax: f64, ay: f64, az: f64 },
    Magnitude(f64),
}

impl Reading {
    pub fn magnitude(&self) -> Result<f64, IngestError> {
        match *self {
            Reading::Axes { ax, ay, az } => magnitude(ax, ay, az),
            Reading::Magnitude(m) if m.is_finite() => Ok(m),
            Reading::Magnitude(_) => Err(IngestError::NonFiniteInput),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawSample {
    /// Seconds since log start.
    pub t: f64,
    pub reading: Reading,
}

/// Timestamped accelerometer readings as captured, at irregular intervals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawSampleLog {
    pub samples: Vec<RawSample>,
    pub source_epoch_ms: i64,
}

impl RawSampleLog {
    pub fn magnitudes(&self) -> Result<Vec<f64>, IngestError> {
        self.samples.iter().map(|s| s.reading.magnitude()).collect()
    }

    /// Drops every sample recorded before `lead_s` seconds.
    pub fn trim_lead(mut self, lead_s: f64) -> Self {
        if lead_s > 0.0 {
            self.samples.retain(|s| s.t >= lead_s);
        }
        self
    }
}

/// A raw sampling stall, in trace seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapFlag(pub f64, pub f64);

/// Uniform 20 Hz acceleration-magnitude trace.
///
/// Sample `i` sits at `i * 50` ms after `start_epoch_ms`; timestamps are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbTrace {
    magnitudes: MagnitudeSeries,
    pub start_epoch_ms: i64,
    pub gap_flags: Vec<GapFlag>,
}

impl ClimbTrace {
    pub fn new(
        magnitudes: Vec<f64>,
        start_epoch_ms: i64,
        gap_flags: Vec<GapFlag>,
    ) -> Result<Self, IngestError> {
        let series = MagnitudeSeries::at_default_rate(magnitudes)
            .map_err(|e| IngestError::InvalidTrace(e.to_string()))?;
        if series.is_empty() {
            return Err(IngestError::InvalidTrace("trace has no samples".into()));
        }
        let duration = series.duration();
        for g in &gap_flags {
            if !(g.0.is_finite() && g.1.is_finite())
                || g.0 < 0.0
                || g.0 > g.1
                || g.1 > duration + TIME_EPS
            {
                return Err(IngestError::InvalidTrace(format!(
                    "gap flag [{}, {}] outside [0, {duration}]",
                    g.0, g.1
                )));
            }
        }
        Ok(Self {
            magnitudes: series,
            start_epoch_ms,
            gap_flags,
        })
    }

    pub fn series(&self) -> &MagnitudeSeries {
        &self.magnitudes
    }

    pub fn values(&self) -> &[f64] {
        self.magnitudes.values()
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn sample_rate(&self) -> u32 {
        self.magnitudes.sample_rate()
    }

    pub fn duration(&self) -> f64 {
        self.magnitudes.duration()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        index as f64 / f64::from(self.sample_rate())
    }

    pub fn time_ms_at(&self, index: usize) -> i64 {
        index as i64 * GRID_STEP_MS
    }

    /// Keeps only samples with `t <= cut_s`. Gap flags are clipped to the
    /// retained span. Cutting at or past the end leaves the trace unchanged.
    pub fn truncated(&self, cut_s: f64) -> Self {
        let keep = if cut_s < 0.0 {
            1
        } else {
            ((cut_s * f64::from(self.sample_rate()) + TIME_EPS).floor() as usize + 1)
                .min(self.len())
        };
        let values = self.values()[..keep].to_vec();
        let duration = (keep - 1) as f64 / f64::from(self.sample_rate());
        let gap_flags = self
            .gap_flags
            .iter()
            .filter(|g| g.0 < duration)
            .map(|g| GapFlag(g.0, g.1.min(duration)))
            .collect();
        Self {
            magnitudes: MagnitudeSeries::at_default_rate(values)
                .expect("prefix of a valid series is valid"),
            start_epoch_ms: self.start_epoch_ms,
            gap_flags,
        }
    }
}

/// Collapses the log to magnitudes and linearly interpolates them onto a
/// 20 Hz grid starting at the first raw timestamp. Grid points past the
/// last raw timestamp are not emitted.
pub fn resample(log: &RawSampleLog) -> Result<ClimbTrace, IngestError> {
    let samples = &log.samples;
    if samples.len() < 2 {
        return Err(IngestError::TooFewSamples(samples.len()));
    }
    for (i, pair) in samples.windows(2).enumerate() {
        if !(pair[1].t > pair[0].t) || !pair[0].t.is_finite() || !pair[1].t.is_finite() {
            return Err(IngestError::NonMonotonicTimestamps(i + 1));
        }
    }
    let mags = log.magnitudes()?;
    let t0 = samples[0].t;
    let span = samples[samples.len() - 1].t - t0;
    let rate = f64::from(SAMPLE_RATE_HZ);
    let count = (span * rate + TIME_EPS).floor() as usize + 1;

    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        let t = t0 + k as f64 / rate;
        while seg + 2 < samples.len() && samples[seg + 1].t < t {
            seg += 1;
        }
        let (ta, tb) = (samples[seg].t, samples[seg + 1].t);
        let frac = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        out.push(mags[seg] + (mags[seg + 1] - mags[seg]) * frac);
    }

    let duration = (count - 1) as f64 / rate;
    let gap_flags = samples
        .windows(2)
        .filter(|p| p[1].t - p[0].t > GAP_THRESHOLD_S)
        .map(|p| GapFlag((p[0].t - t0).min(duration), (p[1].t - t0).min(duration)))
        .collect();

    let start_epoch_ms = log.source_epoch_ms + (t0 * 1000.0).round() as i64;
    ClimbTrace::new(out, start_epoch_ms, gap_flags)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Axes,
    Magnitude,
}

fn parse_field(field: &str, line: u64) -> Result<f64, IngestError> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or(IngestError::MalformedRow(line))
}

/// Parses a CSV log with a `t,ax,ay,az` or `t,mag` header. `t` is in seconds.
/// The returned log has `source_epoch_ms = 0`.
pub fn parse_csv(bytes: &[u8]) -> Result<RawSampleLog, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|_| IngestError::MalformedRow(1))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect::<Vec<_>>();
    let layout = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["t", "ax", "ay", "az"] => Layout::Axes,
        ["t", "mag"] => Layout::Magnitude,
        _ => return Err(IngestError::UnknownHeader(header.join(","))),
    };
    let width = match layout {
        Layout::Axes => 4,
        Layout::Magnitude => 2,
    };

    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            IngestError::MalformedRow(e.position().map(|p| p.line()).unwrap_or(0))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != width {
            return Err(IngestError::MalformedRow(line));
        }
        let f: Vec<f64> = record
            .iter()
            .map(|s| parse_field(s, line))
            .collect::<Result<_, _>>()?;
        let reading = match layout {
            Layout::Axes => Reading::Axes {
                ax: f[1],
                ay: f[2],
                az: f[3],
            },
            Layout::Magnitude if f[1] >= 0.0 => Reading::Magnitude(f[1]),
            Layout::Magnitude => return Err(IngestError::MalformedRow(line)),
        };
        samples.push(RawSample { t: f[0], reading });
    }
    Ok(RawSampleLog {
        samples,
        source_epoch_ms: 0,
    })
}

/// Parameters for [`synth_climb`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub duration_s: f64,
    /// Mean number of transient spikes per second.
    pub jerk_rate: f64,
    /// Peak spike amplitude in g.
    pub jerk_amplitude: f64,
    pub seed: u64,
}

const SYNTH_NOISE_SD: f64 = 0.02;
const SYNTH_SPIKE_WIDTH_S: f64 = 0.2;
const SYNTH_DT_RANGE: (f64, f64) = (0.004, 0.006);

/// Generates a deterministic raw log: a resting 1 g baseline with small
/// per-axis noise, plus Poisson-timed half-sine spikes along random
/// directions. Noise and spike timing use independent random streams so
/// runs with the same seed share their baseline across jerk rates.
pub fn synth_climb(params: SynthParams) -> RawSampleLog {
    let SynthParams {
        duration_s,
        jerk_rate,
        jerk_amplitude,
        seed,
    } = params;

    let mut spike_rng = ChaCha8Rng::seed_from_u64(seed);
    spike_rng.set_stream(1);
    let mut spikes: Vec<(f64, [f64; 3])> = Vec::new();
    if jerk_rate > 0.0 {
        let gap = Exp::new(jerk_rate).expect("positive rate");
        let mut t = gap.sample(&mut spike_rng);
        while t < duration_s {
            spikes.push((t, random_unit(&mut spike_rng)));
            t += gap.sample(&mut spike_rng);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, SYNTH_NOISE_SD).expect("valid sd");
    let mut samples = Vec::new();
    let mut first_active = 0;
    let mut t = 0.0;
    while t <= duration_s {
        let mut acc = [
            noise.sample(&mut rng),
            noise.sample(&mut rng),
            1.0 + noise.sample(&mut rng),
        ];
        while first_active < spikes.len() && spikes[first_active].0 + SYNTH_SPIKE_WIDTH_S <= t {
            first_active += 1;
        }
        for (start, dir) in spikes[first_active..].iter().take_while(|(s, _)| *s <= t) {
            let phase = (t - start) / SYNTH_SPIKE_WIDTH_S;
            if (0.0..1.0).contains(&phase) {
                let a = jerk_amplitude * (std::f64::consts::PI * phase).sin();
                for (c, d) in acc.iter_mut().zip(dir) {
                    *c += a * d;
                }
            }
        }
        samples.push(RawSample {
            t,
            reading: Reading::Axes {
                ax: acc[0],
                ay: acc[1],
                az: acc[2],
            },
        });
        t += rng.random_range(SYNTH_DT_RANGE.0..=SYNTH_DT_RANGE.1);
    }
    RawSampleLog {
        samples,
        source_epoch_ms: 0,
    }
}

fn random_unit<R: Rng>(rng: &mut R) -> [f64; 3] {
    let n = Normal::<f64>::new(0.0, 1.0).expect("valid sd");
    loop {
        let v = [n.sample(rng), n.sample(rng), n.sample(rng)];
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > 1e-6 {
            return [v[0] / len, v[1] / len, v[2] / len];
        }
    }
}
