//! Data-generating models and missingness mechanisms.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimators::{binormal_roc, BiNormalParams};
use crate::propensity::{logistic, KnownPropensity, PropensityFit};
use crate::sample::{Label, LabeledSample, PopulationData, ProbabilityGrid};

/// Homoscedastic linear models with `X ~ N(0, I/9)`.
///
/// * `Dim1`: `Y_D = 2 + 4X + ε`, `Y_H = 0.5 + X + √(24/9) ε`.
/// * `Dim2`: `Y_D = 2 + X'(4, 20) + ε/3`, `Y_H = 0.5 + X'(√(17/2), 20) + √(24/9) ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Dim1,
    Dim2,
}

impl Model {
    pub fn dim(self) -> usize {
        match self {
            Model::Dim1 => 1,
            Model::Dim2 => 2,
        }
    }

    fn coefficients(self, label: Label) -> (f64, &'static [f64], f64) {
        const SLOPE_D1: [f64; 1] = [4.0];
        const SLOPE_H1: [f64; 1] = [1.0];
        const SLOPE_D2: [f64; 2] = [4.0, 20.0];
        // √(17/2)
        const SLOPE_H2: [f64; 2] = [2.915_475_947_422_65, 20.0];
        let noise_h = (24.0f64 / 9.0).sqrt();
        match (self, label) {
            (Model::Dim1, Label::Diseased) => (2.0, &SLOPE_D1, 1.0),
            (Model::Dim1, Label::Healthy) => (0.5, &SLOPE_H1, noise_h),
            (Model::Dim2, Label::Diseased) => (2.0, &SLOPE_D2, 1.0 / 3.0),
            (Model::Dim2, Label::Healthy) => (0.5, &SLOPE_H2, noise_h),
        }
    }

    /// Mean and standard deviation of the (Gaussian) biomarker marginal.
    pub fn marginal(self, label: Label) -> (f64, f64) {
        let (intercept, slopes, noise) = self.coefficients(label);
        let var = slopes.iter().map(|b| b * b / 9.0).sum::<f64>() + noise * noise;
        (intercept, var.sqrt())
    }

    pub fn binormal(self) -> BiNormalParams {
        let (mu_d, sigma_d) = self.marginal(Label::Diseased);
        let (mu_h, sigma_h) = self.marginal(Label::Healthy);
        BiNormalParams {
            mu_d,
            mu_h,
            sigma_d,
            sigma_h,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Dim1 => "dim1",
            Model::Dim2 => "dim2",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dim1" => Ok(Model::Dim1),
            "dim2" => Ok(Model::Dim2),
            _ => Err(Error::Config(format!("unknown model {s:?} (expected dim1 or dim2)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub model: Model,
    /// Sample size of each population.
    pub n: usize,
}

impl GeneratorSpec {
    pub const MIN_N: usize = 5;

    pub fn new(model: Model, n: usize) -> Result<Self> {
        let spec = Self { model, n };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < Self::MIN_N {
            return Err(Error::Config(format!(
                "sample size {} below minimum {}",
                self.n,
                Self::MIN_N
            )));
        }
        Ok(())
    }
}

/// Draws a fully observed population. Each subject consumes `dim` covariate
/// normals followed by one noise normal from `rng`.
pub fn generate_population<R: Rng + ?Sized>(spec: &GeneratorSpec, label: Label, rng: &mut R) -> Result<PopulationData> {
    spec.validate()?;
    let (intercept, slopes, noise) = spec.model.coefficients(label);
    let samples = (0..spec.n)
        .map(|_| {
            let x: Vec<f64> = slopes
                .iter()
                .map(|_| Distribution::<f64>::sample(&StandardNormal, rng) / 3.0)
                .collect::<Vec<f64>>();
            let eps: f64 = StandardNormal.sample(rng);
            let y = intercept + x.iter().zip(slopes).map(|(a, b)| a * b).sum::<f64>() + noise * eps;
            LabeledSample::observed(y, x)
        })
        .collect();
    PopulationData::new(label, samples)
}

/// True ROC curve of a model on the grid (both marginals are Gaussian).
pub fn true_roc_on_grid(spec: &GeneratorSpec, grid: &ProbabilityGrid) -> Vec<f64> {
    binormal_curve(&spec.model.binormal(), grid)
}

pub fn binormal_curve(params: &BiNormalParams, grid: &ProbabilityGrid) -> Vec<f64> {
    grid.values()
        .iter()
        .map(|&p| binormal_roc(params, p).expect("grid points lie in (0, 1)"))
        .collect()
}

/// How the observed indicator is drawn given the covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MissingMechanism {
    None,
    /// `π(x) = 1 / (1 + exp(2 (x − 0.5)))`.
    M1,
    /// `π(x) = 1 / (1 + exp(−(x − 0.5) / 2))`.
    M2,
    /// `π(x) = 1 / (1 + exp(2 x₁))` on the first of two covariates.
    Logistic2D,
}

impl MissingMechanism {
    pub fn probability(self, x: &[f64]) -> f64 {
        match self {
            MissingMechanism::None => 1.0,
            MissingMechanism::M1 => logistic(-2.0 * (x[0] - 0.5)),
            MissingMechanism::M2 => logistic((x[0] - 0.5) / 2.0),
            MissingMechanism::Logistic2D => logistic(-2.0 * x[0]),
        }
    }

    pub fn is_compatible(self, model: Model) -> bool {
        match self {
            MissingMechanism::None => true,
            MissingMechanism::M1 | MissingMechanism::M2 => model == Model::Dim1,
            MissingMechanism::Logistic2D => model == Model::Dim2,
        }
    }

    /// Covariate columns the mechanism depends on; these are the regressors
    /// of a fitted logistic propensity.
    pub fn covariates(self) -> &'static [usize] {
        match self {
            MissingMechanism::None => &[],
            MissingMechanism::Logistic2D => &[0, 1],
            _ => &[0],
        }
    }

    /// The true propensity as a known model.
    pub fn known_propensity(self) -> PropensityFit {
        PropensityFit::known(KnownPropensity::new(self.name(), move |x| self.probability(x)))
    }

    pub fn name(self) -> &'static str {
        match self {
            MissingMechanism::None => "none",
            MissingMechanism::M1 => "m1",
            MissingMechanism::M2 => "m2",
            MissingMechanism::Logistic2D => "logistic2d",
        }
    }
}

impl fmt::Display for MissingMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MissingMechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(MissingMechanism::None),
            "m1" => Ok(MissingMechanism::M1),
            "m2" => Ok(MissingMechanism::M2),
            "logistic2d" => Ok(MissingMechanism::Logistic2D),
            _ => Err(Error::Config(format!(
                "unknown missingness mechanism {s:?} (expected none, m1, m2 or logistic2d)"
            ))),
        }
    }
}

/// Draws `δ ~ Bernoulli(π(x))` for each subject and erases `y` where `δ = 0`.
/// The `None` mechanism consumes no randomness.
pub fn apply_missingness<R: Rng + ?Sized>(
    pop: PopulationData,
    mechanism: MissingMechanism,
    rng: &mut R,
) -> Result<PopulationData> {
    if mechanism == MissingMechanism::None {
        return Ok(pop);
    }
    if pop.dim() < 1 || (mechanism == MissingMechanism::Logistic2D && pop.dim() < 2) {
        return Err(Error::Config(format!(
            "mechanism {mechanism} is incompatible with covariate dimension {}",
            pop.dim()
        )));
    }
    let label = pop.label();
    let samples = pop
        .into_samples()
        .into_iter()
        .map(|mut s| {
            let u: f64 = rng.random();
            if u >= mechanism.probability(&s.x) {
                s.y = None;
            }
            s
        })
        .collect();
    PopulationData::new(label, samples)
}
