//! Butterworth IIR design (bilinear transform with pre-warping) and
//! filtering as a cascade of second-order sections, including forward-backward
//! zero-phase filtering.

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::require_complete;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandType {
    Lowpass,
    Highpass,
    Bandpass,
}

/// One second-order section `b(z) / a(z)` with `a[0] == 1`. First-order
/// sections carry zero trailing coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Section {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let eval = |c: &[f64; 3]| (Complex64::new(c[2], 0.0) * z_inv + c[1]) * z_inv + c[0];
        eval(&self.b) / eval(&self.a)
    }
}

/// A designed filter. `b` and `a` are the expanded transfer function
/// `B(z) / A(z)` with `a[0] == 1`; `sections` is the same filter as a cascade
/// of second-order sections, which is what gets applied. The expanded form
/// loses accuracy for high orders at low cutoffs, the cascade does not.
#[derive(Debug, Clone, PartialEq)]
pub struct IirCoefficients {
    pub b: Vec<f64>,
    pub a: Vec<f64>,
    pub sections: Vec<Section>,
}

impl IirCoefficients {
    /// Complex response at `freq` Hz for sampling rate `fs`, evaluated on the
    /// section cascade.
    pub fn response(&self, freq: f64, fs: f64) -> Complex64 {
        let w = 2.0 * std::f64::consts::PI * freq / fs;
        let z_inv = Complex64::from_polar(1.0, -w);
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(z_inv))
    }

    pub fn gain(&self, freq: f64, fs: f64) -> f64 {
        self.response(freq, fs).norm()
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }
}

pub const MAX_ORDER: usize = 10;

/// Checks order and cutoff edges against the band type and `fs`.
pub fn validate_design(order: usize, cutoff: &[f64], btype: BandType, fs: f64) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::invalid(
            "order",
            format!("must be in [1, {MAX_ORDER}], got {order}"),
        ));
    }
    let needed = if btype == BandType::Bandpass { 2 } else { 1 };
    if cutoff.len() != needed {
        return Err(Error::invalid(
            "cutoff",
            format!(
                "{btype:?} needs {needed} cutoff value(s), got {}",
                cutoff.len()
            )
            .to_lowercase(),
        ));
    }
    validate_cutoff(cutoff, fs)?;
    if needed == 2 && !(cutoff[0] < cutoff[1]) {
        return Err(Error::invalid("cutoff", "band edges must be increasing"));
    }
    Ok(())
}

/// Each edge must satisfy `0 < edge < fs / 2`.
pub fn validate_cutoff(cutoff: &[f64], fs: f64) -> Result<()> {
    let nyquist = fs / 2.0;
    for &c in cutoff {
        if !(c > 0.0 && c < nyquist) {
            return Err(Error::invalid(
                "cutoff",
                format!(
                    "{c} Hz must lie strictly between 0 and the Nyquist frequency {nyquist} Hz"
                ),
            ));
        }
    }
    Ok(())
}

/// Designs a digital Butterworth filter.
///
/// The analog prototype's poles are scaled to the pre-warped edges and
/// mapped through the bilinear transform. Analog zeros at the origin land on
/// z = 1 and zeros at infinity on z = -1; `pair_sections` places them. Each
/// section is scaled to unity gain at DC (lowpass), Nyquist (highpass) or the
/// geometric band centre (bandpass).
pub fn butter_design(
    order: usize,
    cutoff: &[f64],
    btype: BandType,
    fs: f64,
) -> Result<IirCoefficients> {
    validate_design(order, cutoff, btype, fs)?;
    let pi = std::f64::consts::PI;
    // Work at a normalized rate of 2 so edges are fractions of Nyquist.
    let fs_n = 2.0;
    let warp = |edge: f64| 2.0 * fs_n * (pi * (edge / (fs / 2.0)) / fs_n).tan();

    let prototype: Vec<Complex64> = (0..order)
        .map(|k| {
            let theta = pi * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex64::from_polar(1.0, theta)
        })
        .collect();

    let poles: Vec<Complex64> = match btype {
        BandType::Lowpass => {
            let wc = warp(cutoff[0]);
            prototype.iter().map(|p| p * wc).collect()
        }
        BandType::Highpass => {
            let wc = warp(cutoff[0]);
            prototype.iter().map(|p| wc / p).collect()
        }
        BandType::Bandpass => {
            let (w1, w2) = (warp(cutoff[0]), warp(cutoff[1]));
            let bw = w2 - w1;
            let w0 = (w1 * w2).sqrt();
            let mut poles = Vec::with_capacity(2 * order);
            for p in &prototype {
                let p = p * bw / 2.0;
                let root = (p * p - w0 * w0).sqrt();
                poles.push(p + root);
                poles.push(p - root);
            }
            poles
        }
    };

    let fs2 = 2.0 * fs_n;
    let bilinear = |s: &Complex64| (fs2 + s) / (fs2 - s);
    let z_poles: Vec<Complex64> = poles.iter().map(bilinear).collect();

    if let Some(p) = z_poles.iter().find(|p| p.norm() >= 1.0) {
        return Err(Error::invalid(
            "order",
            format!("design is unstable (pole at |z| = {})", p.norm()),
        ));
    }

    let reference = match btype {
        BandType::Lowpass => 0.0,
        BandType::Highpass => fs / 2.0,
        BandType::Bandpass => {
            // Digital frequency whose warped image is the analog centre.
            let w0 = (warp(cutoff[0]) * warp(cutoff[1])).sqrt();
            (w0 / (2.0 * fs_n)).atan() * fs_n / pi * (fs / 2.0)
        }
    };
    let z_ref = Complex64::from_polar(1.0, -pi * reference / (fs / 2.0));
    let mut sections = pair_sections(&z_poles, btype);
    for s in &mut sections {
        let g = s.response(z_ref).norm();
        for v in &mut s.b {
            *v /= g;
        }
    }

    let mut b = vec![1.0];
    let mut a = vec![1.0];
    for s in &sections {
        let keep = if s.a[2] == 0.0 && s.b[2] == 0.0 { 2 } else { 3 };
        b = convolve(&b, &s.b[..keep]);
        a = convolve(&a, &s.a[..keep]);
    }
    if btype == BandType::Lowpass {
        // Exact DC ratio of the expanded form in plain summation order.
        let ratio = a.iter().sum::<f64>() / b.iter().sum::<f64>();
        for v in b.iter_mut() {
            *v *= ratio;
        }
    }
    Ok(IirCoefficients { b, a, sections })
}

/// Groups z-plane poles into sections: each upper-half-plane pole with its
/// conjugate, real poles two at a time, a leftover real pole on its own.
/// Zeros follow the band type: `-1` for lowpass, `+1` for highpass, one of
/// each per bandpass section.
fn pair_sections(poles: &[Complex64], btype: BandType) -> Vec<Section> {
    let is_real = |p: &Complex64| p.im.abs() <= 1e-12 * p.norm().max(1.0);
    let mut complex: Vec<Complex64> = poles
        .iter()
        .filter(|p| !is_real(p) && p.im > 0.0)
        .copied()
        .collect();
    let mut real: Vec<f64> = poles.iter().filter(|p| is_real(p)).map(|p| p.re).collect();
    // Poles closest to the unit circle last, the usual ordering for cascades.
    complex.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    real.sort_by(|x, y| x.abs().total_cmp(&y.abs()));

    let zeros2 = match btype {
        BandType::Lowpass => [1.0, 2.0, 1.0],
        BandType::Highpass => [1.0, -2.0, 1.0],
        BandType::Bandpass => [1.0, 0.0, -1.0],
    };
    let zeros1 = match btype {
        BandType::Lowpass => [1.0, 1.0, 0.0],
        _ => [1.0, -1.0, 0.0],
    };
    let mut sections = Vec::new();
    for pair in real.chunks(2) {
        match *pair {
            [p, q] => sections.push(Section {
                b: zeros2,
                a: [1.0, -(p + q), p * q],
            }),
            [p] => sections.push(Section {
                b: zeros1,
                a: [1.0, -p, 0.0],
            }),
            _ => unreachable!(),
        }
    }
    for p in complex {
        sections.push(Section {
            b: zeros2,
            a: [1.0, -2.0 * p.re, p.norm_sqr()],
        });
    }
    sections
}

fn convolve(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Direct-form II transposed filter on the expanded transfer function.
/// `zi` is the initial state, length `max(len(a), len(b)) - 1`.
pub fn lfilter(c: &IirCoefficients, x: &[f64], zi: Option<&[f64]>) -> Vec<f64> {
    df2t(&c.b, &c.a, x, zi)
}

/// Steady-state initial conditions of the expanded transfer function for a
/// unit step, so that filtering a constant `x0` with `zi * x0` has no
/// transient.
pub fn lfilter_zi(c: &IirCoefficients) -> Vec<f64> {
    steady_state(&c.b, &c.a)
}

/// Runs the section cascade. `zi` holds two state values per section.
pub fn sosfilt(sections: &[Section], x: &[f64], zi: Option<&[[f64; 2]]>) -> Vec<f64> {
    let mut y = x.to_vec();
    for (k, s) in sections.iter().enumerate() {
        y = df2t(&s.b, &s.a, &y, zi.map(|z| &z[k][..]));
    }
    y
}

/// Per-section steady state for a unit step entering the cascade: each
/// section's state is scaled by the DC gain of the sections before it.
pub fn sosfilt_zi(sections: &[Section]) -> Vec<[f64; 2]> {
    let mut scale = 1.0;
    sections
        .iter()
        .map(|s| {
            let z = steady_state(&s.b, &s.a);
            let out = [z[0] * scale, z[1] * scale];
            scale *= s.b.iter().sum::<f64>() / s.a.iter().sum::<f64>();
            out
        })
        .collect()
}

fn df2t(b: &[f64], a: &[f64], x: &[f64], zi: Option<&[f64]>) -> Vec<f64> {
    let n = a.len().max(b.len());
    let coef = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let mut z: Vec<f64> = match zi {
        Some(zi) => zi.to_vec(),
        None => vec![0.0; n - 1],
    };
    let mut y = Vec::with_capacity(x.len());
    for &xn in x {
        let yn = coef(b, 0) * xn + z.first().copied().unwrap_or(0.0);
        for i in 0..n - 1 {
            let next = z.get(i + 1).copied().unwrap_or(0.0);
            z[i] = coef(b, i + 1) * xn + next - coef(a, i + 1) * yn;
        }
        y.push(yn);
    }
    y
}

fn steady_state(b: &[f64], a: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let m = n - 1;
    if m == 0 {
        return Vec::new();
    }
    let coef = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    // (I - companion(a)^T) zi = b[1:] - a[1:] * b[0]
    let mut lhs = DMatrix::<f64>::identity(m, m);
    for i in 0..m {
        lhs[(i, 0)] += coef(a, i + 1);
        if i + 1 < m {
            lhs[(i, i + 1)] -= 1.0;
        }
    }
    let rhs = DVector::from_iterator(
        m,
        (0..m).map(|i| coef(b, i + 1) - coef(a, i + 1) * coef(b, 0)),
    );
    lhs.lu()
        .solve(&rhs)
        .map(|v| v.iter().copied().collect())
        .unwrap_or_else(|| vec![0.0; m])
}

/// Applies the filter once (causal) or forward-backward with odd edge
/// extension and steady-state initial conditions.
pub fn butter_apply(x: &[f64], c: &IirCoefficients, zero_phase: bool) -> Result<Vec<f64>> {
    require_complete("butter_filter", x)?;
    if x.is_empty() {
        return Ok(Vec::new());
    }
    if !zero_phase {
        return Ok(sosfilt(&c.sections, x, None));
    }
    filtfilt(c, x)
}

fn filtfilt(c: &IirCoefficients, x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 2 {
        return Ok(x.to_vec());
    }
    let pad = (3 * (2 * c.sections.len() + 1)).min(n - 1);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
    ext.extend_from_slice(x);
    ext.extend((n - 1 - pad..n - 1).rev().map(|i| 2.0 * x[n - 1] - x[i]));

    let zi = sosfilt_zi(&c.sections);
    let scaled = |s: f64| zi.iter().map(|z| [z[0] * s, z[1] * s]).collect::<Vec<_>>();

    let forward = sosfilt(&c.sections, &ext, Some(&scaled(ext[0])));
    let reversed: Vec<f64> = forward.into_iter().rev().collect();
    let backward = sosfilt(&c.sections, &reversed, Some(&scaled(reversed[0])));
    let mut y: Vec<f64> = backward.into_iter().rev().collect();
    y.drain(..pad);
    y.truncate(n);
    Ok(y)
}
