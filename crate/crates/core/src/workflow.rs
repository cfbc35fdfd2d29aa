//! Estimation on a user dataset: fit the nuisance models and build one curve.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::{roc_conv, roc_empirical, roc_ipw, roc_kernel_ipw, Method, RocEstimate};
use crate::io::Dataset;
use crate::propensity::{fit_constant, fit_logistic, PropensityFit};
use crate::regression::{RegressionSpec, Term};
use crate::sample::{PopulationData, ProbabilityGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropensityKind {
    Logistic,
    Constant,
}

impl FromStr for PropensityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" => Ok(PropensityKind::Logistic),
            "constant" => Ok(PropensityKind::Constant),
            _ => Err(Error::Config(format!("unknown propensity {s:?} (expected logistic or constant)"))),
        }
    }
}

impl fmt::Display for PropensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropensityKind::Logistic => "logistic",
            PropensityKind::Constant => "constant",
        })
    }
}

/// Settings shared by both populations. Column indices are zero-based;
/// `None` selects every covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub propensity: PropensityKind,
    pub propensity_cols: Option<Vec<usize>>,
    pub regression_cols: Option<Vec<usize>>,
    pub intercept: bool,
    pub grid: ProbabilityGrid,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            propensity: PropensityKind::Logistic,
            propensity_cols: None,
            regression_cols: None,
            intercept: true,
            grid: ProbabilityGrid::default(),
        }
    }
}

impl EstimateOptions {
    fn columns(selected: &Option<Vec<usize>>, dim: usize) -> Result<Vec<usize>> {
        match selected {
            None => Ok((0..dim).collect()),
            Some(cols) => {
                if let Some(&column) = cols.iter().find(|&&c| c >= dim) {
                    return Err(Error::Column { column, dim });
                }
                Ok(cols.clone())
            }
        }
    }

    pub fn regression_spec(&self, dim: usize) -> Result<RegressionSpec> {
        let cols = Self::columns(&self.regression_cols, dim)?;
        RegressionSpec::new(self.intercept, cols.into_iter().map(Term::linear).collect())
    }

    pub fn propensity_fit(&self, pop: &PopulationData) -> Result<PropensityFit> {
        match self.propensity {
            PropensityKind::Constant => fit_constant(pop),
            PropensityKind::Logistic => fit_logistic(pop, &Self::columns(&self.propensity_cols, pop.dim())?),
        }
    }
}

/// Builds the requested estimate. `Method::Empirical` is the complete-case
/// estimator and fits no nuisance model.
pub fn estimate(data: &Dataset, method: Method, opts: &EstimateOptions) -> Result<RocEstimate> {
    let (d, h) = (&data.diseased, &data.healthy);
    match method {
        Method::Empirical => roc_empirical(d, h, &opts.grid),
        Method::Ipw => roc_ipw(d, h, &opts.propensity_fit(d)?, &opts.propensity_fit(h)?, &opts.grid),
        Method::Kernel => roc_kernel_ipw(d, h, &opts.propensity_fit(d)?, &opts.propensity_fit(h)?, &opts.grid),
        Method::Conv => {
            let spec = opts.regression_spec(data.dim())?;
            roc_conv(d, h, &spec, &spec, &opts.grid)
        }
    }
}
