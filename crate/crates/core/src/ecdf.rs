//! Weighted empirical distribution functions and their generalized inverse.
//!
//! Every distribution estimate in this crate (IPW, complete-case, convolution,
//! residual and fitted-value distributions) is a right-continuous step
//! function with finitely many atoms. [`WeightedEcdf`] stores the atoms in
//! increasing order together with the cumulative mass up to each atom.

use crate::error::{Error, Result};

/// Cumulative levels closer than this are treated as equal when inverting.
/// Grid levels such as `1 - 0.29` and cumulative masses such as `71 / 100`
/// differ by an ulp or two and must still hit the same atom.
pub const LEVEL_TOLERANCE: f64 = 1e-12;

/// Above this many atoms the cumulative weights are accumulated with
/// compensated summation.
const COMPENSATED_THRESHOLD: usize = 10_000;

/// A step distribution function that can be evaluated and inverted.
pub trait StepCdf {
    /// `P(Y <= y)`.
    fn cdf(&self, y: f64) -> f64;

    /// Generalized inverse `inf { y : F(y) >= p }` for `0 < p <= 1`.
    fn quantile(&self, p: f64) -> Result<f64>;
}

pub(crate) fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Probability(p, "(0, 1]"))
    }
}

/// Right-continuous step function with strictly increasing atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEcdf {
    points: Vec<f64>,
    cum_weights: Vec<f64>,
}

impl WeightedEcdf {
    /// Builds the distribution putting mass `weights[k] / sum(weights)` at
    /// `values[k]`. Duplicate values are merged; atoms with zero mass are
    /// dropped so that every stored point carries positive mass.
    pub fn new(values: &[f64], weights: &[f64]) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::LengthMismatch {
                what: "values and weights",
                left: values.len(),
                right: weights.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::Empty("values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("values"));
        }
        for &w in weights {
            if !w.is_finite() {
                return Err(Error::NonFinite("weights"));
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight(w));
            }
        }

        let mut order: Vec<usize> = (0..values.len()).filter(|&i| weights[i] > 0.0).collect();
        if order.is_empty() {
            return Err(Error::ZeroWeights);
        }
        order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
        let pairs: Vec<(f64, f64)> = order.into_iter().map(|i| (values[i], weights[i])).collect();
        Ok(Self::from_sorted_pairs(pairs))
    }

    /// Equal mass on every value.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("values"));
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(Self::from_sorted_pairs(sorted.into_iter().map(|v| (v, 1.0)).collect()))
    }

    /// `pairs` must be sorted by value, finite, with positive weights.
    fn from_sorted_pairs(pairs: Vec<(f64, f64)>) -> Self {
        let compensated = pairs.len() > COMPENSATED_THRESHOLD;
        let mut points = Vec::with_capacity(pairs.len());
        let mut partial = Vec::with_capacity(pairs.len());
        let mut acc = Neumaier::default();
        for (v, w) in pairs {
            if compensated {
                acc.add(w);
            } else {
                acc.sum += w;
            }
            if points.last() == Some(&v) {
                *partial.last_mut().unwrap() = acc.total();
            } else {
                points.push(v);
                partial.push(acc.total());
            }
        }
        let total = acc.total();
        let last = partial.len() - 1;
        let mut cum_weights: Vec<f64> = partial.into_iter().map(|s| (s / total).min(1.0)).collect();
        cum_weights[last] = 1.0;
        Self {
            points,
            cum_weights,
        }
    }

    /// Atoms in increasing order.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `F(points[k])` for every atom; the last entry is exactly 1.
    pub fn cum_weights(&self) -> &[f64] {
        &self.cum_weights
    }

    /// Mass at each atom.
    pub fn masses(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cum_weights
            .iter()
            .map(|&c| {
                let m = c - prev;
                prev = c;
                m
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// `P(Y <= y)`, rejecting non-finite arguments.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::NonFinite("evaluation point"));
        }
        Ok(self.cdf(y))
    }
}

impl StepCdf for WeightedEcdf {
    fn cdf(&self, y: f64) -> f64 {
        match self.points.partition_point(|&p| p <= y) {
            0 => 0.0,
            k => self.cum_weights[k - 1],
        }
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        check_level(p)?;
        let k = self
            .cum_weights
            .partition_point(|&c| c < p - LEVEL_TOLERANCE)
            .min(self.points.len() - 1);
        Ok(self.points[k])
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}
