//! One-sided power spectral density estimation.
//!
//! Both estimators remove the (per-segment) mean and use density scaling, so
//! `sum(power) * df` equals the variance of the input for a single
//! rectangular segment. For even segment lengths the grid runs from 0 to the
//! Nyquist frequency `fs / 2`; for odd lengths it has `(n + 1) / 2` bins and
//! stops short of Nyquist.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{require_complete, require_len};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Periodogram,
    Welch,
    /// Built directly from frequency/power arrays.
    Custom,
}

/// Taper applied to each segment. Hann and Hamming are the periodic
/// (DFT-even) variants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[serde(alias = "boxcar")]
    Rectangular,
    #[default]
    Hann,
    Hamming,
}

impl Window {
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        let m = n as f64;
        let cosine =
            |a0: f64, i: usize| a0 - (1.0 - a0) * (2.0 * std::f64::consts::PI * i as f64 / m).cos();
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n).map(|i| cosine(0.5, i)).collect(),
            Window::Hamming => (0..n).map(|i| cosine(0.54, i)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub fs: f64,
    pub method: SpectrumMethod,
    df: f64,
}

impl Spectrum {
    /// Builds a spectrum from explicit arrays (used for synthetic spectra
    /// and tests). Frequencies must be strictly ascending and powers
    /// nonnegative; bin spacing is taken from the first two bins.
    pub fn from_parts(freqs: Vec<f64>, power: Vec<f64>, fs: f64) -> Result<Spectrum> {
        if freqs.len() != power.len() {
            return Err(Error::invalid(
                "power",
                format!(
                    "{} power values for {} frequencies",
                    power.len(),
                    freqs.len()
                ),
            ));
        }
        if freqs.len() < 2 {
            return Err(Error::invalid("freqs", "a spectrum needs at least 2 bins"));
        }
        if !(fs > 0.0) {
            return Err(Error::invalid("fs", "sampling rate must be positive"));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "freqs",
                "frequencies must be strictly ascending",
            ));
        }
        if power.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::invalid(
                "power",
                "power must be nonnegative and finite",
            ));
        }
        let df = freqs[1] - freqs[0];
        Ok(Spectrum {
            freqs,
            power,
            fs,
            method: SpectrumMethod::Custom,
            df,
        })
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Bin spacing in Hz.
    pub fn df(&self) -> f64 {
        self.df
    }

    /// Plain sum of the power values.
    pub fn power_sum(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Integrated power, `sum(power) * df`.
    pub fn total_power(&self) -> f64 {
        self.power_sum() * self.df
    }
}

/// Parameters for [`welch`]. `nperseg = None` means `min(256, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchParams {
    pub nperseg: Option<usize>,
    pub overlap_ratio: f64,
    pub window: Window,
}

impl Default for WelchParams {
    fn default() -> Self {
        WelchParams {
            nperseg: None,
            overlap_ratio: 0.5,
            window: Window::Hann,
        }
    }
}

impl WelchParams {
    pub fn resolved_nperseg(&self, n: usize) -> usize {
        self.nperseg.unwrap_or_else(|| n.min(256))
    }
}

/// Raw periodogram with a rectangular window over the whole input.
pub fn periodogram(x: &[f64], fs: f64) -> Result<Spectrum> {
    require_len("periodogram", x, 2)?;
    require_complete("periodogram", x)?;
    check_fs(fs)?;
    Ok(averaged_psd(
        x,
        fs,
        x.len(),
        x.len(),
        Window::Rectangular,
        SpectrumMethod::Periodogram,
    ))
}

/// Welch's averaged periodogram.
pub fn welch(x: &[f64], fs: f64, params: &WelchParams) -> Result<Spectrum> {
    require_complete("welch", x)?;
    check_fs(fs)?;
    let nperseg = params.resolved_nperseg(x.len());
    if nperseg < 4 {
        return Err(Error::invalid(
            "nperseg",
            format!("must be at least 4, got {nperseg}"),
        ));
    }
    if nperseg > x.len() {
        return Err(Error::invalid(
            "nperseg",
            format!("{nperseg} exceeds the signal length {}", x.len()),
        ));
    }
    if !(0.0..1.0).contains(&params.overlap_ratio) {
        return Err(Error::invalid(
            "overlap",
            format!("must lie in [0, 1), got {}", params.overlap_ratio),
        ));
    }
    let noverlap = (nperseg as f64 * params.overlap_ratio).floor() as usize;
    let step = nperseg - noverlap;
    Ok(averaged_psd(
        x,
        fs,
        nperseg,
        step,
        params.window,
        SpectrumMethod::Welch,
    ))
}

fn check_fs(fs: f64) -> Result<()> {
    if fs > 0.0 && fs.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            "fs",
            format!("sampling rate must be positive, got {fs}"),
        ))
    }
}

/// Shared estimator body. Callers guarantee `2 <= nperseg <= x.len()`.
fn averaged_psd(
    x: &[f64],
    fs: f64,
    nperseg: usize,
    step: usize,
    window: Window,
    method: SpectrumMethod,
) -> Spectrum {
    let taper = window.coefficients(nperseg);
    let scale = 1.0 / (fs * taper.iter().map(|w| w * w).sum::<f64>());
    let n_freqs = nperseg / 2 + 1;

    let fft = FftPlanner::<f64>::new().plan_fft_forward(nperseg);
    let mut buf = vec![Complex64::new(0.0, 0.0); nperseg];
    let mut acc = vec![0.0; n_freqs];

    let n_segments = (x.len() - nperseg) / step + 1;
    for seg in 0..n_segments {
        let segment = &x[seg * step..seg * step + nperseg];
        let mean = segment.iter().sum::<f64>() / nperseg as f64;
        for ((slot, v), w) in buf.iter_mut().zip(segment).zip(&taper) {
            *slot = Complex64::new((v - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf) {
            *a += c.norm_sqr();
        }
    }

    // One-sided folding: every bin except DC (and Nyquist for even lengths)
    // carries the energy of its negative-frequency twin.
    let last_doubled = if nperseg.is_multiple_of(2) {
        n_freqs - 1
    } else {
        n_freqs
    };
    let power = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = a / n_segments as f64 * scale;
            if k > 0 && k < last_doubled {
                2.0 * p
            } else {
                p
            }
        })
        .collect();
    let freqs = (0..n_freqs)
        .map(|k| k as f64 * fs / nperseg as f64)
        .collect();

    Spectrum {
        freqs,
        power,
        fs,
        method,
        df: fs / nperseg as f64,
    }
}
