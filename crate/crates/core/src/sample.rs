//! Subjects, populations and the probability grid shared by every estimator.

use std::fmt;

use crate::error::{Error, Result};

/// Which of the two populations a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Diseased,
    Healthy,
}

impl Label {
    /// Single-letter token used in dataset files.
    pub fn token(self) -> &'static str {
        match self {
            Label::Diseased => "D",
            Label::Healthy => "H",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One subject: a possibly missing biomarker and a fully observed covariate
/// vector. The observed indicator is derived from `y`, so it can never
/// disagree with it.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub y: Option<f64>,
    pub x: Vec<f64>,
}

impl LabeledSample {
    pub fn observed(y: f64, x: Vec<f64>) -> Self {
        Self { y: Some(y), x }
    }

    pub fn missing(x: Vec<f64>) -> Self {
        Self { y: None, x }
    }

    /// 1 when the biomarker is observed, 0 otherwise.
    pub fn delta(&self) -> u8 {
        u8::from(self.y.is_some())
    }

    pub fn is_observed(&self) -> bool {
        self.y.is_some()
    }
}

/// All samples of one population. Every sample carries a covariate vector of
/// the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationData {
    label: Label,
    dim: usize,
    samples: Vec<LabeledSample>,
}

impl PopulationData {
    pub fn new(label: Label, samples: Vec<LabeledSample>) -> Result<Self> {
        let first = samples.first().ok_or(Error::Empty("population"))?;
        let dim = first.x.len();
        for s in &samples {
            if s.x.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: s.x.len(),
                });
            }
            if s.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("covariates"));
            }
            if matches!(s.y, Some(y) if !y.is_finite()) {
                return Err(Error::NonFinite("biomarker"));
            }
        }
        Ok(Self {
            label,
            dim,
            samples,
        })
    }

    /// Complete data without covariates.
    pub fn from_values(label: Label, values: &[f64]) -> Result<Self> {
        Self::new(
            label,
            values
                .iter()
                .map(|&y| LabeledSample::observed(y, Vec::new()))
                .collect(),
        )
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// Covariate dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<LabeledSample> {
        self.samples
    }

    pub fn n_observed(&self) -> usize {
        self.samples.iter().filter(|s| s.is_observed()).count()
    }

    /// Observed biomarker values in sample order.
    pub fn observed_values(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.y).collect()
    }

    pub fn require_observed(&self) -> Result<()> {
        if self.samples.iter().any(LabeledSample::is_observed) {
            Ok(())
        } else {
            Err(Error::NoObserved)
        }
    }

    pub(crate) fn check_columns(&self, columns: &[usize]) -> Result<()> {
        match columns.iter().find(|&&c| c >= self.dim) {
            Some(&column) => Err(Error::Column {
                column,
                dim: self.dim,
            }),
            None => Ok(()),
        }
    }
}

/// Equidistant interior grid `p_j = j / (n + 1)`, `j = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityGrid {
    values: Vec<f64>,
}

impl ProbabilityGrid {
    pub const DEFAULT_POINTS: usize = 99;

    pub fn new(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::Empty("probability grid"));
        }
        let denom = (n_points + 1) as f64;
        Ok(Self {
            values: (1..=n_points).map(|j| j as f64 / denom).collect(),
        })
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Distance between neighbouring grid points.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.values.len() + 1) as f64
    }
}

impl Default for ProbabilityGrid {
    fn default() -> Self {
        Self::new(Self::DEFAULT_POINTS).expect("default grid is nonempty")
    }
}
