//! Spectral Hilbert transform and instantaneous amplitude and frequency.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::TimeSeries;

/// Analytic signal `z = x + i H(x)` on a shared grid.
#[derive(Debug, Clone)]
pub struct AnalyticSignal {
    real: TimeSeries,
    imag: TimeSeries,
}

impl AnalyticSignal {
    /// Pair two series sharing a grid (used by tests constructing exact pairs).
    pub fn from_parts(real: TimeSeries, imag: TimeSeries) -> Result<Self> {
        if real.len() != imag.len() || real.dt() != imag.dt() || real.t0() != imag.t0() {
            return Err(Error::DimensionMismatch(
                "analytic signal components must share one grid".into(),
            ));
        }
        Ok(Self { real, imag })
    }

    pub fn real(&self) -> &TimeSeries {
        &self.real
    }

    pub fn imag(&self) -> &TimeSeries {
        &self.imag
    }

    pub fn len(&self) -> usize {
        self.real.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dt(&self) -> f64 {
        self.real.dt()
    }
}

/// Instantaneous amplitude and frequency with the index range where the
/// frequency estimate is trustworthy (`valid` is half-open).
#[derive(Debug, Clone)]
pub struct InstantTrace {
    pub amplitude: TimeSeries,
    pub frequency: TimeSeries,
    pub valid: (usize, usize),
}

impl InstantTrace {
    pub fn valid_frequency(&self) -> &[f64] {
        &self.frequency.samples()[self.valid.0..self.valid.1]
    }

    pub fn valid_amplitude(&self) -> &[f64] {
        &self.amplitude.samples()[self.valid.0..self.valid.1]
    }
}

/// Options for [`instantaneous_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstantOptions {
    /// Fraction of samples distrusted at each end of the frequency trace.
    pub edge_trim: f64,
    /// Centered moving-average width for the frequency trace; `None` = raw.
    pub smooth_window: Option<usize>,
}

impl Default for InstantOptions {
    fn default() -> Self {
        Self {
            edge_trim: 0.05,
            smooth_window: None,
        }
    }
}

/// Analytic signal via the spectral method: zero the negative frequencies,
/// double the positive ones, keep DC (and Nyquist for even lengths) as is.
pub fn hilbert_transform(x: &TimeSeries) -> Result<AnalyticSignal> {
    let n = x.len();
    if n < 4 {
        return Err(Error::DegenerateInput(format!(
            "hilbert transform needs at least 4 samples, got {n}"
        )));
    }
    let mut buf: Vec<Complex<f64>> = x.samples().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == half) {
            // DC and Nyquist keep unit weight.
        } else if k < half || (n % 2 == 1 && k == half) {
            *c *= 2.0;
        } else {
            *c = Complex::new(0.0, 0.0);
        }
    }

    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let imag: Vec<f64> = buf.iter().map(|c| c.im * scale).collect();
    Ok(AnalyticSignal {
        real: x.clone(),
        imag: TimeSeries::raw(imag, x.dt(), x.t0()),
    })
}

/// Phase of the analytic signal, unwrapped so no step exceeds pi.
pub fn unwrapped_phase(z: &AnalyticSignal) -> Vec<f64> {
    let re = z.real.samples();
    let im = z.imag.samples();
    let mut phase = Vec::with_capacity(re.len());
    let mut offset = 0.0;
    let mut prev = 0.0;
    for i in 0..re.len() {
        let raw = im[i].atan2(re[i]);
        if i > 0 {
            let mut d = raw + offset - prev;
            while d > std::f64::consts::PI {
                offset -= std::f64::consts::TAU;
                d -= std::f64::consts::TAU;
            }
            while d < -std::f64::consts::PI {
                offset += std::f64::consts::TAU;
                d += std::f64::consts::TAU;
            }
        }
        prev = raw + offset;
        phase.push(prev);
    }
    phase
}

/// Amplitude and central-difference instantaneous frequency with the default
/// 5% edge trim and no smoothing.
pub fn instantaneous(z: &AnalyticSignal) -> InstantTrace {
    instantaneous_with(z, &InstantOptions::default()).expect("default options are valid")
}

/// As [`instantaneous`] with explicit edge trim and optional smoothing.
pub fn instantaneous_with(z: &AnalyticSignal, opt: &InstantOptions) -> Result<InstantTrace> {
    if !(0.0..0.5).contains(&opt.edge_trim) {
        return Err(Error::Config(format!(
            "edge_trim must lie in [0, 0.5), got {}",
            opt.edge_trim
        )));
    }
    let n = z.len();
    let dt = z.dt();
    let re = z.real.samples();
    let im = z.imag.samples();

    let amplitude: Vec<f64> = (0..n).map(|i| re[i].hypot(im[i])).collect();
    let phase = unwrapped_phase(z);

    let two_pi = std::f64::consts::TAU;
    let mut frequency = vec![0.0; n];
    frequency[0] = (phase[1] - phase[0]) / (two_pi * dt);
    frequency[n - 1] = (phase[n - 1] - phase[n - 2]) / (two_pi * dt);
    for i in 1..n - 1 {
        frequency[i] = (phase[i + 1] - phase[i - 1]) / (2.0 * two_pi * dt);
    }

    if let Some(w) = opt.smooth_window {
        if w > 1 {
            frequency = moving_average(&frequency, w);
        }
    }

    let trim = (n as f64 * opt.edge_trim).ceil() as usize;
    let (start, end) = (trim, n - trim);
    if end <= start {
        return Err(Error::DegenerateInput(format!(
            "edge trim {} leaves no valid samples for length {n}",
            opt.edge_trim
        )));
    }

    Ok(InstantTrace {
        amplitude: TimeSeries::raw(amplitude, dt, z.real.t0()),
        frequency: TimeSeries::raw(frequency, dt, z.real.t0()),
        valid: (start, end),
    })
}

/// Centered moving average; the window shrinks near the ends.
fn moving_average(v: &[f64], w: usize) -> Vec<f64> {
    let half = w / 2;
    (0..v.len())
        .map(|i| {
            let a = i.saturating_sub(half);
            let b = (i + half + 1).min(v.len());
            v[a..b].iter().sum::<f64>() / (b - a) as f64
        })
        .collect()
}
