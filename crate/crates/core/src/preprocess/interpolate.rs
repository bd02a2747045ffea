//! Gap filling for missing samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationKind {
    #[default]
    Linear,
    /// Natural cubic spline through all present samples.
    Cubic,
}

/// Fills interior gaps with the chosen interpolant over the sample index.
/// Leading and trailing gaps take the nearest present value.
pub fn interpolate(x: &[f64], kind: InterpolationKind) -> Result<Vec<f64>> {
    let anchors: Vec<usize> = (0..x.len()).filter(|&i| !x[i].is_nan()).collect();
    if anchors.len() == x.len() {
        return Ok(x.to_vec());
    }
    let needed = match kind {
        InterpolationKind::Linear => 2,
        InterpolationKind::Cubic => 4,
    };
    if anchors.len() < needed {
        return Err(Error::invalid(
            "kind",
            format!(
                "{kind:?} interpolation needs at least {needed} present samples, got {}",
                anchors.len()
            )
            .to_lowercase(),
        ));
    }
    let first = anchors[0];
    let last = anchors[anchors.len() - 1];
    let ys: Vec<f64> = anchors.iter().map(|&i| x[i]).collect();
    let spline = match kind {
        InterpolationKind::Cubic => Some(natural_spline_moments(&anchors, &ys)),
        InterpolationKind::Linear => None,
    };

    let mut out = x.to_vec();
    let mut seg = 0;
    for (i, v) in out.iter_mut().enumerate() {
        if !v.is_nan() {
            continue;
        }
        if i < first {
            *v = x[first];
            continue;
        }
        if i > last {
            *v = x[last];
            continue;
        }
        while anchors[seg + 1] < i {
            seg += 1;
        }
        let (x0, x1) = (anchors[seg] as f64, anchors[seg + 1] as f64);
        let (y0, y1) = (ys[seg], ys[seg + 1]);
        let t = i as f64;
        *v = match &spline {
            None => y0 + (y1 - y0) * (t - x0) / (x1 - x0),
            Some(m) => {
                let h = x1 - x0;
                let (a, b) = ((x1 - t) / h, (t - x0) / h);
                a * y0
                    + b * y1
                    + ((a * a * a - a) * m[seg] + (b * b * b - b) * m[seg + 1]) * h * h / 6.0
            }
        };
    }
    Ok(out)
}

/// Second derivatives of the natural cubic spline through `(xs, ys)`,
/// solved with the Thomas algorithm.
fn natural_spline_moments(xs: &[usize], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let k = n - 2;
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        diag[j] = 2.0 * (h[i - 1] + h[i]);
        upper[j] = h[i];
        rhs[j] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    // Sub-diagonal entries are h[j] (j >= 1).
    for j in 1..k {
        let w = h[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
    }
    m
}
