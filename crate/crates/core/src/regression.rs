//! Linear regression of the biomarker on covariates and the convolution
//! estimator of the biomarker distribution.
//!
//! Under `y = μ(x) + ε` with `ε` independent of `x`, the marginal law of `y`
//! is the convolution of the law of `μ(x)` and the law of `ε`. Plugging in the
//! empirical law of the fitted values (over *all* subjects, including those
//! with a missing biomarker) and of the residuals (over observed subjects)
//! gives a step distribution with an atom at every `μ̂(x_ℓ) + ε̂_j`.

use nalgebra::{DMatrix, DVector};

use crate::ecdf::{check_level, StepCdf, WeightedEcdf, LEVEL_TOLERANCE};
use crate::error::{Error, Result};
use crate::propensity::full_rank_gram;
use crate::sample::PopulationData;

/// Largest convolution support that is sorted in memory; beyond it the
/// distribution is evaluated by merging sorted fitted values and residuals.
pub const MATERIALIZE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Square,
}

impl Transform {
    fn apply(self, v: f64) -> f64 {
        match self {
            Transform::Identity => v,
            Transform::Square => v * v,
        }
    }
}

/// One regressor: a covariate column, possibly transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub column: usize,
    pub transform: Transform,
}

impl Term {
    pub fn linear(column: usize) -> Self {
        Self {
            column,
            transform: Transform::Identity,
        }
    }

    pub fn squared(column: usize) -> Self {
        Self {
            column,
            transform: Transform::Square,
        }
    }
}

/// Which regressors enter the linear model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegressionSpec {
    pub include_intercept: bool,
    pub terms: Vec<Term>,
}

impl RegressionSpec {
    pub fn new(include_intercept: bool, terms: Vec<Term>) -> Result<Self> {
        if !include_intercept && terms.is_empty() {
            return Err(Error::Config("regression needs an intercept or at least one regressor".into()));
        }
        Ok(Self {
            include_intercept,
            terms,
        })
    }

    /// Intercept plus every covariate, linearly.
    pub fn full(dim: usize) -> Self {
        Self {
            include_intercept: true,
            terms: (0..dim).map(Term::linear).collect(),
        }
    }

    /// Every covariate, linearly, without intercept.
    pub fn without_intercept(dim: usize) -> Self {
        Self {
            include_intercept: false,
            terms: (0..dim).map(Term::linear).collect(),
        }
    }

    /// Intercept plus the first covariate only.
    pub fn first_only() -> Self {
        Self {
            include_intercept: true,
            terms: vec![Term::linear(0)],
        }
    }

    /// Intercept plus the square of the first covariate.
    pub fn first_squared() -> Self {
        Self {
            include_intercept: true,
            terms: vec![Term::squared(0)],
        }
    }

    /// Number of coefficients.
    pub fn n_params(&self) -> usize {
        self.terms.len() + usize::from(self.include_intercept)
    }

    fn row(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        if self.include_intercept {
            out.push(1.0);
        }
        out.extend(self.terms.iter().map(|t| t.transform.apply(x[t.column])));
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n_params() == 0 {
            return Err(Error::Config("empty regression specification".into()));
        }
        match self.terms.iter().find(|t| t.column >= dim) {
            Some(t) => Err(Error::Column {
                column: t.column,
                dim,
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub spec: RegressionSpec,
    pub beta: Vec<f64>,
    /// `μ̂(x_j)` for every subject, observed or not.
    pub fitted: Vec<f64>,
    /// `y_j − μ̂(x_j)` for observed subjects, in sample order.
    pub residuals: Vec<f64>,
}

impl RegressionFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut row = Vec::with_capacity(self.beta.len());
        self.spec.row(x, &mut row);
        row.iter().zip(&self.beta).map(|(a, b)| a * b).sum()
    }
}

/// Least squares on the complete cases.
pub fn fit_ols(pop: &PopulationData, spec: &RegressionSpec) -> Result<RegressionFit> {
    spec.validate(pop.dim())?;
    let p = spec.n_params();
    let m = pop.n_observed();
    if m < p + 1 {
        return Err(Error::TooFewCases {
            needed: p + 1,
            have: m,
        });
    }

    let mut design = DMatrix::<f64>::zeros(m, p);
    let mut response = DVector::<f64>::zeros(m);
    let mut row = Vec::with_capacity(p);
    for (i, (s, y)) in pop
        .samples()
        .iter()
        .filter_map(|s| s.y.map(|y| (s, y)))
        .enumerate()
    {
        spec.row(&s.x, &mut row);
        for (k, v) in row.iter().enumerate() {
            design[(i, k)] = *v;
        }
        response[i] = y;
    }
    if !full_rank_gram(&(design.transpose() * &design)) {
        return Err(Error::RankDeficient);
    }
    let beta = design
        .svd(true, true)
        .solve(&response, 0.0)
        .map_err(|_| Error::RankDeficient)?;
    let beta: Vec<f64> = beta.iter().copied().collect();

    let fitted: Vec<f64> = pop
        .samples()
        .iter()
        .map(|s| {
            spec.row(&s.x, &mut row);
            row.iter().zip(&beta).map(|(a, b)| a * b).sum()
        })
        .collect();
    let residuals = pop
        .samples()
        .iter()
        .zip(&fitted)
        .filter_map(|(s, &mu)| s.y.map(|y| y - mu))
        .collect();
    Ok(RegressionFit {
        spec: spec.clone(),
        beta,
        fitted,
        residuals,
    })
}

/// Convolution estimate of a biomarker distribution: an atom of mass
/// `1 / (n m)` at every `μ̂(x_ℓ) + ε̂_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvDistribution {
    Materialized(WeightedEcdf),
    Merged(SumCdf),
}

impl StepCdf for ConvDistribution {
    fn cdf(&self, y: f64) -> f64 {
        match self {
            ConvDistribution::Materialized(f) => f.cdf(y),
            ConvDistribution::Merged(f) => f.cdf(y),
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            ConvDistribution::Materialized(f) => f.quantile(p),
            ConvDistribution::Merged(f) => f.quantile(p),
        }
    }
}

pub fn conv_distribution(pop: &PopulationData, fit: &RegressionFit) -> Result<ConvDistribution> {
    conv_distribution_with_limit(pop, fit, MATERIALIZE_LIMIT)
}

pub(crate) fn conv_distribution_with_limit(
    pop: &PopulationData,
    fit: &RegressionFit,
    limit: usize,
) -> Result<ConvDistribution> {
    if fit.fitted.len() != pop.n() {
        return Err(Error::LengthMismatch {
            what: "fitted values and population",
            left: fit.fitted.len(),
            right: pop.n(),
        });
    }
    if fit.residuals.len() != pop.n_observed() {
        return Err(Error::LengthMismatch {
            what: "residuals and observed cases",
            left: fit.residuals.len(),
            right: pop.n_observed(),
        });
    }
    if fit.residuals.is_empty() {
        return Err(Error::NoObserved);
    }

    let size = fit.fitted.len() * fit.residuals.len();
    if size <= limit {
        let mut support = Vec::with_capacity(size);
        for &mu in &fit.fitted {
            support.extend(fit.residuals.iter().map(|&e| mu + e));
        }
        WeightedEcdf::uniform(&support).map(ConvDistribution::Materialized)
    } else {
        SumCdf::new(fit.fitted.clone(), fit.residuals.clone()).map(ConvDistribution::Merged)
    }
}

/// Law of `A + B` for independent uniform empirical laws `A` and `B`,
/// evaluated without forming the `|A| |B|` pairwise sums.
#[derive(Debug, Clone, PartialEq)]
pub struct SumCdf {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl SumCdf {
    pub fn new(mut left: Vec<f64>, mut right: Vec<f64>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::Empty("convolution operand"));
        }
        if left.iter().chain(&right).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("convolution operand"));
        }
        left.sort_unstable_by(f64::total_cmp);
        right.sort_unstable_by(f64::total_cmp);
        Ok(Self { left, right })
    }

    /// Number of pairs with `a + b <= y`, by a two-pointer sweep.
    fn count_le(&self, y: f64) -> u64 {
        let mut j = self.right.len();
        let mut count = 0u64;
        for &a in &self.left {
            while j > 0 && a + self.right[j - 1] > y {
                j -= 1;
            }
            if j == 0 {
                break;
            }
            count += j as u64;
        }
        count
    }

    fn total(&self) -> f64 {
        (self.left.len() * self.right.len()) as f64
    }
}

impl StepCdf for SumCdf {
    fn cdf(&self, y: f64) -> f64 {
        self.count_le(y) as f64 / self.total()
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_level(p)?;
        let target = p - LEVEL_TOLERANCE;
        let smallest = self.left[0] + self.right[0];
        let largest = self.left[self.left.len() - 1] + self.right[self.right.len() - 1];
        if self.cdf(smallest) >= target {
            return Ok(smallest);
        }
        // Bisect over the total order of doubles; the first double at which the
        // count reaches the target is necessarily one of the pairwise sums.
        let (mut lo, mut hi) = (order_key(smallest), order_key(largest));
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.cdf(from_order_key(mid)) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(from_order_key(hi))
    }
}

fn order_key(v: f64) -> u64 {
    let bits = v.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

fn from_order_key(k: u64) -> f64 {
    if k >> 63 == 1 {
        f64::from_bits(k & !(1 << 63))
    } else {
        f64::from_bits(!k)
    }
}
