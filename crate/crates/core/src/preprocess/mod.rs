//! Filter chain: outlier masking, Butterworth filtering and interpolation,
//! applied strictly in the declared order.

pub mod butterworth;
pub mod interpolate;
pub mod outlier;

use serde::{Deserialize, Serialize};

pub use butterworth::{
    butter_apply, butter_design, lfilter, sosfilt, BandType, IirCoefficients, Section,
};
pub use interpolate::{interpolate, InterpolationKind};
pub use outlier::{rm_outlier, rm_outliers_quantile};

use crate::error::{Error, Result};
use crate::signal::Signal;

/// One or two cutoff edges in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Single(f64),
    Band([f64; 2]),
}

impl Cutoff {
    pub fn edges(&self) -> &[f64] {
        match self {
            Cutoff::Single(c) => std::slice::from_ref(c),
            Cutoff::Band(b) => b,
        }
    }
}

fn default_order() -> usize {
    5
}

fn default_true() -> bool {
    true
}

fn default_btype() -> BandType {
    BandType::Lowpass
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FilterStep {
    RmOutlier {
        low: f64,
        high: f64,
    },
    RmOutliersQuantile {
        low_q: f64,
        high_q: f64,
    },
    ButterFilter {
        cutoff: Cutoff,
        #[serde(default = "default_btype")]
        btype: BandType,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default = "default_true")]
        zero_phase: bool,
    },
    Interpolate {
        #[serde(default)]
        kind: InterpolationKind,
    },
}

impl FilterStep {
    /// Lowpass Butterworth with the default order (5) and zero-phase
    /// application.
    pub fn lowpass(cutoff: f64) -> FilterStep {
        FilterStep::ButterFilter {
            cutoff: Cutoff::Single(cutoff),
            btype: BandType::Lowpass,
            order: default_order(),
            zero_phase: true,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FilterStep::RmOutlier { .. } => "rm_outlier",
            FilterStep::RmOutliersQuantile { .. } => "rm_outliers_quantile",
            FilterStep::ButterFilter { .. } => "butter_filter",
            FilterStep::Interpolate { .. } => "interpolate",
        }
    }

    /// Checks parameters that do not depend on the data. With `fs` known,
    /// Butterworth edges are also checked against Nyquist.
    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        match self {
            FilterStep::RmOutlier { low, high } => rm_outlier(&[], *low, *high).map(drop),
            FilterStep::RmOutliersQuantile { low_q, high_q } => {
                rm_outliers_quantile(&[], *low_q, *high_q).map(drop)
            }
            FilterStep::ButterFilter {
                cutoff,
                btype,
                order,
                ..
            } => match fs {
                Some(fs) => butterworth::validate_design(*order, cutoff.edges(), *btype, fs),
                // Without a rate, check everything except the Nyquist bound.
                None => butterworth::validate_design(*order, cutoff.edges(), *btype, f64::INFINITY),
            },
            FilterStep::Interpolate { .. } => Ok(()),
        }
    }

    pub fn apply(&self, x: &[f64], fs: f64) -> Result<Vec<f64>> {
        match self {
            FilterStep::RmOutlier { low, high } => rm_outlier(x, *low, *high),
            FilterStep::RmOutliersQuantile { low_q, high_q } => {
                rm_outliers_quantile(x, *low_q, *high_q)
            }
            FilterStep::ButterFilter {
                cutoff,
                btype,
                order,
                zero_phase,
            } => {
                let c = butter_design(*order, cutoff.edges(), *btype, fs)?;
                butter_apply(x, &c, *zero_phase)
            }
            FilterStep::Interpolate { kind } => interpolate(x, *kind),
        }
    }
}

/// Ordered list of filter steps. The empty chain is the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterChain {
    steps: Vec<FilterStep>,
}

impl FilterChain {
    pub fn new() -> Self {
        Self::default()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(mut self, step: FilterStep) -> Self {
        self.steps.push(step);
        self
    }

    pub fn steps(&self) -> &[FilterStep] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn validate(&self, fs: Option<f64>) -> Result<()> {
        for (i, step) in self.steps.iter().enumerate() {
            step.validate(fs)
                .map_err(|e| Error::Config(format!("filters[{i}] ({}): {e}", step.name())))?;
        }
        Ok(())
    }

    pub fn apply(&self, signal: &Signal) -> Result<Signal> {
        let mut samples = signal.samples.clone();
        for step in &self.steps {
            samples = step.apply(&samples, signal.fs)?;
        }
        Ok(signal.with_samples(samples))
    }
}

impl FromIterator<FilterStep> for FilterChain {
    fn from_iter<I: IntoIterator<Item = FilterStep>>(iter: I) -> Self {
        FilterChain {
            steps: iter.into_iter().collect(),
        }
    }
}
