//! Models for the probability `π(x) = P(δ = 1 | x)` that a biomarker is
//! observed, and the inverse-probability weights built from them.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sample::PopulationData;

const GRADIENT_TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 40;
/// Coefficient norm beyond which the likelihood is taken to have no maximizer.
const SEPARATION_NORM: f64 = 50.0;
/// Relative singular-value cutoff for the rank check on `XᵀX`.
const RANK_TOLERANCE: f64 = 1e-12;

type PropensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A propensity function supplied by the caller, e.g. the true missingness
/// mechanism of a simulation.
#[derive(Clone)]
pub struct KnownPropensity {
    name: String,
    func: PropensityFn,
}

impl KnownPropensity {
    pub fn new(name: impl Into<String>, func: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            func: Arc::new(func),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for KnownPropensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("KnownPropensity").field(&self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum PropensityModel {
    /// `π(x) = 1 / (1 + exp(-(θ₀ + Σ θ_k x[columns[k]])))`.
    Logistic {
        coefficients: Vec<f64>,
        columns: Vec<usize>,
    },
    /// Missing completely at random.
    Constant(f64),
    Known(KnownPropensity),
}

/// A propensity model together with the lower clamp applied on evaluation.
#[derive(Debug, Clone)]
pub struct PropensityFit {
    model: PropensityModel,
    floor: f64,
    dim: Option<usize>,
}

impl PropensityFit {
    pub const DEFAULT_FLOOR: f64 = 1e-3;

    /// Logistic model over the given covariate columns of a `dim`-dimensional
    /// covariate vector. `coefficients[0]` is the intercept.
    pub fn logistic(coefficients: Vec<f64>, columns: Vec<usize>, dim: usize) -> Result<Self> {
        if coefficients.len() != columns.len() + 1 {
            return Err(Error::LengthMismatch {
                what: "coefficients and columns + intercept",
                left: coefficients.len(),
                right: columns.len() + 1,
            });
        }
        if let Some(&column) = columns.iter().find(|&&c| c >= dim) {
            return Err(Error::Column { column, dim });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("coefficients"));
        }
        Ok(Self {
            model: PropensityModel::Logistic {
                coefficients,
                columns,
            },
            floor: Self::DEFAULT_FLOOR,
            dim: Some(dim),
        })
    }

    pub fn constant(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Probability(p, "(0, 1]"));
        }
        Ok(Self {
            model: PropensityModel::Constant(p),
            floor: Self::DEFAULT_FLOOR,
            dim: None,
        })
    }

    pub fn known(known: KnownPropensity) -> Self {
        Self {
            model: PropensityModel::Known(known),
            floor: Self::DEFAULT_FLOOR,
            dim: None,
        }
    }

    /// Replaces the lower clamp; must lie in `(0, 1]`.
    pub fn with_floor(mut self, floor: f64) -> Result<Self> {
        if !(floor > 0.0 && floor <= 1.0) {
            return Err(Error::Probability(floor, "(0, 1]"));
        }
        self.floor = floor;
        Ok(self)
    }

    pub fn model(&self) -> &PropensityModel {
        &self.model
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Logistic coefficients, intercept first.
    pub fn coefficients(&self) -> Option<&[f64]> {
        match &self.model {
            PropensityModel::Logistic { coefficients, .. } => Some(coefficients),
            _ => None,
        }
    }

    /// Clamped propensity and whether the floor was hit.
    pub fn eval_clamped(&self, x: &[f64]) -> Result<(f64, bool)> {
        if let Some(dim) = self.dim {
            if x.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: x.len(),
                });
            }
        }
        let raw = match &self.model {
            PropensityModel::Logistic {
                coefficients,
                columns,
            } => {
                let eta = coefficients[0]
                    + columns
                        .iter()
                        .zip(&coefficients[1..])
                        .map(|(&c, &b)| b * x[c])
                        .sum::<f64>();
                logistic(eta)
            }
            PropensityModel::Constant(p) => *p,
            PropensityModel::Known(k) => (k.func)(x),
        };
        if raw.is_nan() {
            return Err(Error::NonFinite("propensity"));
        }
        if raw < self.floor {
            Ok((self.floor, true))
        } else {
            Ok((raw.min(1.0), false))
        }
    }

    /// Propensity at `x`, never below the floor.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.eval_clamped(x).map(|(p, _)| p)
    }
}

pub(crate) fn logistic(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

/// `ln(1 + exp(eta))` without overflow.
fn softplus(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn design(pop: &PopulationData, columns: &[usize]) -> DMatrix<f64> {
    let p = columns.len() + 1;
    DMatrix::from_fn(pop.n(), p, |i, k| {
        if k == 0 {
            1.0
        } else {
            pop.samples()[i].x[columns[k - 1]]
        }
    })
}

pub(crate) fn full_rank_gram(gram: &DMatrix<f64>) -> bool {
    let sv = gram.clone().singular_values();
    let max = sv.max();
    max > 0.0 && sv.min() > max * RANK_TOLERANCE
}

fn log_likelihood(x: &DMatrix<f64>, delta: &DVector<f64>, theta: &DVector<f64>) -> f64 {
    let eta = x * theta;
    eta.iter()
        .zip(delta.iter())
        .map(|(&e, &d)| d * e - softplus(e))
        .sum()
}

/// Maximum-likelihood logistic regression of the observed indicator on the
/// selected covariate columns (plus intercept), by Newton–Raphson with step
/// halving.
pub fn fit_logistic(pop: &PopulationData, columns: &[usize]) -> Result<PropensityFit> {
    pop.check_columns(columns)?;
    let p = columns.len() + 1;
    if pop.n() < p + 1 {
        return Err(Error::TooFewCases {
            needed: p + 1,
            have: pop.n(),
        });
    }
    let n_obs = pop.n_observed();
    if n_obs == 0 {
        return Err(Error::ConstantIndicator(0));
    }
    if n_obs == pop.n() {
        return Err(Error::ConstantIndicator(1));
    }

    let x = design(pop, columns);
    if !full_rank_gram(&(x.transpose() * &x)) {
        return Err(Error::RankDeficient);
    }
    let delta = DVector::from_iterator(pop.n(), pop.samples().iter().map(|s| f64::from(s.delta())));

    let mut theta = DVector::<f64>::zeros(p);
    let mut ll = log_likelihood(&x, &delta, &theta);
    for _ in 0..MAX_ITERATIONS {
        let mu = (&x * &theta).map(logistic);
        let gradient = x.transpose() * (&delta - &mu);
        if gradient.amax() < GRADIENT_TOLERANCE {
            break;
        }
        let w = mu.map(|m| m * (1.0 - m));
        let weighted = DMatrix::from_fn(x.nrows(), p, |i, k| x[(i, k)] * w[i]);
        let hessian = x.transpose() * weighted;
        let step = hessian
            .cholesky()
            .ok_or(Error::RankDeficient)?
            .solve(&gradient);

        let mut scale = 1.0;
        let mut candidate = &theta + &step;
        let mut candidate_ll = log_likelihood(&x, &delta, &candidate);
        for _ in 0..MAX_HALVINGS {
            if candidate_ll >= ll {
                break;
            }
            scale *= 0.5;
            candidate = &theta + &step * scale;
            candidate_ll = log_likelihood(&x, &delta, &candidate);
        }
        if candidate_ll < ll {
            // no ascent direction left at working precision
            break;
        }
        theta = candidate;
        ll = candidate_ll;

        let norm = theta.norm();
        if !norm.is_finite() || norm > SEPARATION_NORM {
            return Err(Error::Separation { norm });
        }
        if (&step * scale).amax() < 1e-15 * (1.0 + theta.amax()) {
            break;
        }
    }

    PropensityFit::logistic(theta.iter().copied().collect(), columns.to_vec(), pop.dim())
}

/// Fraction of observed biomarkers (the MCAR model).
pub fn fit_constant(pop: &PopulationData) -> Result<PropensityFit> {
    let n_obs = pop.n_observed();
    if n_obs == 0 {
        return Err(Error::NoObserved);
    }
    PropensityFit::constant(n_obs as f64 / pop.n() as f64)
}

/// Self-normalized inverse-probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct IpwWeights {
    /// One weight per sample; zero exactly where the biomarker is missing.
    pub weights: Vec<f64>,
    /// Unnormalized `δ_j / π̂(x_j)`.
    pub inverse: Vec<f64>,
    /// Observed samples whose propensity was raised to the floor.
    pub clamped: usize,
}

/// `τ_j = (δ_j / π̂(x_j)) / Σ_ℓ (δ_ℓ / π̂(x_ℓ))`.
pub fn ipw_weights(pop: &PopulationData, fit: &PropensityFit) -> Result<IpwWeights> {
    pop.require_observed()?;
    let mut clamped = 0;
    let mut raw = Vec::with_capacity(pop.n());
    for s in pop.samples() {
        if s.is_observed() {
            let (pi, hit) = fit.eval_clamped(&s.x)?;
            clamped += usize::from(hit);
            raw.push(1.0 / pi);
        } else {
            raw.push(0.0);
        }
    }
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|r| r / total).collect();
    Ok(IpwWeights {
        weights,
        inverse: raw,
        clamped,
    })
}
