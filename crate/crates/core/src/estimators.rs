//! ROC curve estimators for biomarkers missing at random, and the bi-normal
//! closed forms used as ground truth.
//!
//! All plug-in estimators share one shape,
//! `ROC(p) = 1 − F̂_D(F̂_H⁻¹(1 − p))`, and differ only in how the two marginal
//! distributions are estimated:
//!
//! * [`roc_empirical`]: complete-case empirical distributions;
//! * [`roc_ipw`]: inverse-probability-weighted distributions;
//! * [`roc_conv`]: regression convolution distributions.
//!
//! [`roc_kernel`] instead smooths the distribution of the pseudo-observations
//! `Ẑ_j = 1 − F̂_H(y_{D,j})` with an integrated Epanechnikov kernel and a
//! local bandwidth.

use std::fmt;

use crate::ecdf::{StepCdf, WeightedEcdf};
use crate::error::{Error, Result};
use crate::normal;
use crate::propensity::{ipw_weights, PropensityFit};
use crate::regression::{conv_distribution, fit_ols, RegressionSpec};
use crate::sample::{PopulationData, ProbabilityGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ipw,
    Kernel,
    Conv,
    /// Complete-case empirical estimator (ignores missingness).
    Empirical,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ipw => "ipw",
            Method::Kernel => "kernel",
            Method::Conv => "conv",
            Method::Empirical => "empirical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// ROC values on a probability grid and the grid-average AUC.
#[derive(Debug, Clone, PartialEq)]
pub struct RocEstimate {
    pub grid: ProbabilityGrid,
    pub values: Vec<f64>,
    pub method: Method,
    pub auc: f64,
    /// Propensity evaluations raised to the floor while building the estimate.
    pub clamped: usize,
}

impl RocEstimate {
    pub fn new(grid: ProbabilityGrid, values: Vec<f64>, method: Method) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                what: "ROC values and grid",
                left: values.len(),
                right: grid.n_points(),
            });
        }
        let auc = mean(&values);
        Ok(Self {
            grid,
            values,
            method,
            auc,
            clamped: 0,
        })
    }

    fn with_clamped(mut self, clamped: usize) -> Self {
        self.clamped = clamped;
        self
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Area under the curve approximated by the grid average.
pub fn auc(est: &RocEstimate) -> f64 {
    mean(&est.values)
}

/// `1 − F_D(F_H⁻¹(1 − p))` at every grid point.
pub fn roc_plugin<D, H>(f_d: &D, f_h: &H, grid: &ProbabilityGrid, method: Method) -> Result<RocEstimate>
where
    D: StepCdf + ?Sized,
    H: StepCdf + ?Sized,
{
    let values = grid
        .values()
        .iter()
        .map(|&p| Ok(1.0 - f_d.cdf(f_h.quantile(1.0 - p)?)))
        .collect::<Result<Vec<_>>>()?;
    RocEstimate::new(grid.clone(), values, method)
}

/// Complete-case ("simplified") estimator: empirical distributions of the
/// observed biomarkers only.
pub fn roc_empirical(pop_d: &PopulationData, pop_h: &PopulationData, grid: &ProbabilityGrid) -> Result<RocEstimate> {
    pop_d.require_observed()?;
    pop_h.require_observed()?;
    let f_d = WeightedEcdf::uniform(&pop_d.observed_values())?;
    let f_h = WeightedEcdf::uniform(&pop_h.observed_values())?;
    roc_plugin(&f_d, &f_h, grid, Method::Empirical)
}

/// IPW estimate of a marginal distribution, with the number of clamped
/// propensities.
pub fn ipw_distribution(pop: &PopulationData, fit: &PropensityFit) -> Result<(WeightedEcdf, usize)> {
    let w = ipw_weights(pop, fit)?;
    // Normalizing inside the ECDF keeps unit weights exact, so complete data
    // reproduces the empirical estimator bit for bit.
    let (values, weights): (Vec<f64>, Vec<f64>) = pop
        .samples()
        .iter()
        .zip(&w.inverse)
        .filter_map(|(s, &tau)| s.y.map(|y| (y, tau)))
        .unzip();
    Ok((WeightedEcdf::new(&values, &weights)?, w.clamped))
}

pub fn roc_ipw(
    pop_d: &PopulationData,
    pop_h: &PopulationData,
    fit_d: &PropensityFit,
    fit_h: &PropensityFit,
    grid: &ProbabilityGrid,
) -> Result<RocEstimate> {
    let (f_d, clamped_d) = ipw_distribution(pop_d, fit_d)?;
    let (f_h, clamped_h) = ipw_distribution(pop_h, fit_h)?;
    Ok(roc_plugin(&f_d, &f_h, grid, Method::Ipw)?.with_clamped(clamped_d + clamped_h))
}

pub fn roc_conv(
    pop_d: &PopulationData,
    pop_h: &PopulationData,
    spec_d: &RegressionSpec,
    spec_h: &RegressionSpec,
    grid: &ProbabilityGrid,
) -> Result<RocEstimate> {
    let f_d = conv_distribution(pop_d, &fit_ols(pop_d, spec_d)?)?;
    let f_h = conv_distribution(pop_h, &fit_ols(pop_h, spec_h)?)?;
    roc_plugin(&f_d, &f_h, grid, Method::Conv)
}

/// `Ẑ_j = 1 − F_H(y_{D,j})` for each observed diseased biomarker, in sample
/// order.
pub fn pseudo_observations<H: StepCdf + ?Sized>(pop_d: &PopulationData, f_h: &H) -> Result<Vec<f64>> {
    pop_d.require_observed()?;
    Ok(pop_d.samples().iter().filter_map(|s| s.y).map(|y| 1.0 - f_h.cdf(y)).collect())
}

/// Integrated Epanechnikov kernel.
pub fn kernel_cdf(t: f64) -> f64 {
    if t <= -1.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        0.5 + 0.75 * t - 0.25 * t * t * t
    }
}

/// Local bandwidth `h(p) = c √(5 p (1 − p) / (2 n_H))` with
/// `c = 1 + 1.8 n_D^(−1/5)`, floored at `1 / (n_D + n_H)`.
pub fn bandwidth_pulit(p: f64, n_d: usize, n_h: usize) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Probability(p, "(0, 1)"));
    }
    if n_d == 0 || n_h == 0 {
        return Err(Error::Empty("sample size for bandwidth"));
    }
    let c = 1.0 + 1.8 * (n_d as f64).powf(-0.2);
    let h = c * (5.0 * p * (1.0 - p) / (2.0 * n_h as f64)).sqrt();
    Ok(h.max(1.0 / (n_d + n_h) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// [`bandwidth_pulit`] with `n_D` the diseased sample size (missing
    /// included) and the given healthy sample size.
    Pulit { n_h: usize },
    Fixed(f64),
}

impl Bandwidth {
    fn at(self, p: f64, n_d: usize) -> Result<f64> {
        match self {
            Bandwidth::Pulit { n_h } => bandwidth_pulit(p, n_d, n_h),
            Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => Ok(h),
            Bandwidth::Fixed(h) => Err(Error::Config(format!("bandwidth must be positive, got {h}"))),
        }
    }
}

/// Kernel-smoothed distribution of the pseudo-observations, weighted by
/// self-normalized inverse propensities of the observed diseased cases.
pub fn roc_kernel<H: StepCdf + ?Sized>(
    pop_d: &PopulationData,
    fit_d: &PropensityFit,
    f_h: &H,
    bandwidth: Bandwidth,
    grid: &ProbabilityGrid,
) -> Result<RocEstimate> {
    let z = pseudo_observations(pop_d, f_h)?;
    let w = ipw_weights(pop_d, fit_d)?;
    let tau: Vec<f64> = pop_d
        .samples()
        .iter()
        .zip(&w.weights)
        .filter(|(s, _)| s.is_observed())
        .map(|(_, &t)| t)
        .collect();
    let n_d = pop_d.n();
    let values = grid
        .values()
        .iter()
        .map(|&p| {
            let h = bandwidth.at(p, n_d)?;
            let v: f64 = z.iter().zip(&tau).map(|(&zj, &t)| t * kernel_cdf((p - zj) / h)).sum();
            Ok(v.clamp(0.0, 1.0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RocEstimate::new(grid.clone(), values, Method::Kernel)?.with_clamped(w.clamped))
}

/// [`roc_kernel`] with the healthy distribution estimated by IPW and the
/// local bandwidth.
pub fn roc_kernel_ipw(
    pop_d: &PopulationData,
    pop_h: &PopulationData,
    fit_d: &PropensityFit,
    fit_h: &PropensityFit,
    grid: &ProbabilityGrid,
) -> Result<RocEstimate> {
    let (f_h, clamped_h) = ipw_distribution(pop_h, fit_h)?;
    let est = roc_kernel(pop_d, fit_d, &f_h, Bandwidth::Pulit { n_h: pop_h.n() }, grid)?;
    let clamped = est.clamped + clamped_h;
    Ok(est.with_clamped(clamped))
}

/// Gaussian marker in both populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiNormalParams {
    pub mu_d: f64,
    pub mu_h: f64,
    pub sigma_d: f64,
    pub sigma_h: f64,
}

impl BiNormalParams {
    pub fn new(mu_d: f64, mu_h: f64, sigma_d: f64, sigma_h: f64) -> Result<Self> {
        if !(sigma_d > 0.0 && sigma_h > 0.0) || !mu_d.is_finite() || !mu_h.is_finite() {
            return Err(Error::Config(format!(
                "invalid bi-normal parameters ({mu_d}, {mu_h}, {sigma_d}, {sigma_h})"
            )));
        }
        Ok(Self {
            mu_d,
            mu_h,
            sigma_d,
            sigma_h,
        })
    }
}

/// `Φ((μ_D − μ_H)/σ_D + (σ_H/σ_D) Φ⁻¹(p))`.
pub fn binormal_roc(params: &BiNormalParams, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Probability(p, "(0, 1)"));
    }
    let a = (params.mu_d - params.mu_h) / params.sigma_d;
    let b = params.sigma_h / params.sigma_d;
    Ok(normal::cdf(a + b * normal::quantile(p)))
}

/// `Φ((μ_D − μ_H) / √(σ_D² + σ_H²))`.
pub fn binormal_auc(params: &BiNormalParams) -> f64 {
    normal::cdf((params.mu_d - params.mu_h) / params.sigma_d.hypot(params.sigma_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propensity::KnownPropensity;
    use crate::sample::{Label, LabeledSample};

    fn uniform(v: &[f64]) -> WeightedEcdf {
        WeightedEcdf::uniform(v).unwrap()
    }

    fn grid_of(ps: &[f64]) -> Vec<f64> {
        let f_h = uniform(&[1.0, 3.0]);
        let f_d = uniform(&[2.0, 4.0]);
        ps.iter().map(|&p| 1.0 - f_d.cdf(f_h.quantile(1.0 - p).unwrap())).collect()
    }

    #[test]
    fn four_point_plugin() {
        assert_eq!(grid_of(&[0.25, 0.5]), vec![0.5, 1.0]);
        let g = ProbabilityGrid::new(3).unwrap();
        let est = roc_plugin(&uniform(&[2.0, 4.0]), &uniform(&[1.0, 3.0]), &g, Method::Empirical).unwrap();
        assert_eq!(est.values, vec![0.5, 1.0, 1.0]);
        assert!((est.auc - 2.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_separation_is_one() {
        let est = roc_plugin(
            &uniform(&[10.0, 11.0, 12.0]),
            &uniform(&[0.0, 1.0, 2.0]),
            &ProbabilityGrid::default(),
            Method::Empirical,
        )
        .unwrap();
        assert!(est.values.iter().all(|&v| v == 1.0));
        assert_eq!(auc(&est), 1.0);
    }

    #[test]
    fn pseudo_observation_examples() {
        let f_h = uniform(&[1.0, 3.0]);
        let one = |y: f64| {
            let pop = PopulationData::from_values(Label::Diseased, &[y]).unwrap();
            pseudo_observations(&pop, &f_h).unwrap()[0]
        };
        assert_eq!(one(2.0), 0.5);
        assert_eq!(one(0.0), 1.0);
        assert_eq!(one(3.0), 0.0);
        let none = PopulationData::new(Label::Diseased, vec![LabeledSample::missing(vec![])]).unwrap();
        assert!(pseudo_observations(&none, &f_h).is_err());
    }

    #[test]
    fn kernel_cdf_values() {
        assert_eq!(kernel_cdf(-1.0), 0.0);
        assert_eq!(kernel_cdf(1.0), 1.0);
        assert_eq!(kernel_cdf(0.0), 0.5);
        assert_eq!(kernel_cdf(0.5), 0.84375);
        assert_eq!(kernel_cdf(-7.0), 0.0);
        assert_eq!(kernel_cdf(7.0), 1.0);
        // symmetric: K(t) + K(-t) = 1
        for t in [0.1, 0.3, 0.77] {
            assert!((kernel_cdf(t) + kernel_cdf(-t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_cdf_integrates_epanechnikov() {
        // midpoint rule on 0.75 (1 - u^2) over [-1, t]
        for &t in &[-0.6, 0.0, 0.5, 0.9] {
            let steps = 200_000;
            let width = (t + 1.0) / steps as f64;
            let integral: f64 = (0..steps)
                .map(|i| {
                    let u = -1.0 + (i as f64 + 0.5) * width;
                    0.75 * (1.0 - u * u) * width
                })
                .sum();
            assert!((integral - kernel_cdf(t)).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn bandwidth_examples() {
        let h = bandwidth_pulit(0.5, 100, 100).unwrap();
        let c = 1.0 + 1.8 * 100f64.powf(-0.2);
        assert!((c - 1.716_592_907).abs() < 1e-8);
        assert!((h - 0.135_708_6).abs() < 1e-6, "h = {h}");
        for p in [0.01, 0.2, 0.37] {
            let (a, b) = (bandwidth_pulit(p, 30, 70).unwrap(), bandwidth_pulit(1.0 - p, 30, 70).unwrap());
            assert!((a - b).abs() < 1e-15);
        }
        let floor = bandwidth_pulit(1e-20, 10, 1_000_000_000_000).unwrap();
        assert_eq!(floor, 1.0 / (10.0 + 1e12));
        assert!(bandwidth_pulit(0.0, 10, 10).is_err());
        assert!(bandwidth_pulit(1.0, 10, 10).is_err());
    }

    #[test]
    fn kernel_single_case_and_dominance() {
        let f_h = uniform(&[1.0, 3.0]);
        let pop = PopulationData::from_values(Label::Diseased, &[2.0]).unwrap();
        let fit = PropensityFit::constant(1.0).unwrap();
        let g = ProbabilityGrid::new(1).unwrap();
        let est = roc_kernel(&pop, &fit, &f_h, Bandwidth::Fixed(0.2), &g).unwrap();
        assert_eq!(est.values, vec![0.5]);

        // all pseudo-observations zero
        let pop = PopulationData::from_values(Label::Diseased, &[5.0, 6.0, 7.0]).unwrap();
        let g = ProbabilityGrid::default();
        let est = roc_kernel(&pop, &fit, &f_h, Bandwidth::Pulit { n_h: 2 }, &g).unwrap();
        for (&p, &v) in g.values().iter().zip(&est.values) {
            let h = bandwidth_pulit(p, 3, 2).unwrap();
            assert!((v - kernel_cdf(p / h)).abs() < 1e-15);
            if p >= h {
                assert_eq!(v, 1.0);
            }
        }
    }

    #[test]
    fn kernel_three_cases_by_hand() {
        // H = {0, 1, 2, 3} uniform; D observed at 0.5, 1.5, 2.5 -> Z = 0.75, 0.5, 0.25
        let f_h = uniform(&[0.0, 1.0, 2.0, 3.0]);
        let samples = vec![
            LabeledSample::observed(0.5, vec![0.0]),
            LabeledSample::observed(1.5, vec![1.0]),
            LabeledSample::missing(vec![2.0]),
            LabeledSample::observed(2.5, vec![3.0]),
        ];
        let pop = PopulationData::new(Label::Diseased, samples).unwrap();
        let pis = [0.5, 0.8, 0.3, 0.25];
        let fit = PropensityFit::known(KnownPropensity::new("table", move |x| pis[x[0] as usize]));
        let h = 0.3;
        let g = ProbabilityGrid::new(9).unwrap();
        let est = roc_kernel(&pop, &fit, &f_h, Bandwidth::Fixed(h), &g).unwrap();
        let z = [0.75, 0.5, 0.25];
        let inv = [2.0, 1.25, 4.0];
        let total: f64 = inv.iter().sum();
        for (&p, &v) in g.values().iter().zip(&est.values) {
            let expected: f64 = (0..3).map(|j| inv[j] / total * kernel_cdf((p - z[j]) / h)).sum();
            assert!((v - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ipw_constant_propensity_cancels() {
        let pop_h = PopulationData::from_values(Label::Healthy, &[1.0, 3.0]).unwrap();
        let pop_d = PopulationData::from_values(Label::Diseased, &[2.0, 4.0]).unwrap();
        let half = PropensityFit::known(KnownPropensity::new("half", |_| 0.5));
        let g = ProbabilityGrid::new(3).unwrap();
        let est = roc_ipw(&pop_d, &pop_h, &half, &half, &g).unwrap();
        assert_eq!(est.values[0], 0.5);
        let emp = roc_empirical(&pop_d, &pop_h, &g).unwrap();
        assert_eq!(est.values, emp.values);
    }

    #[test]
    fn binormal_identities() {
        let same = BiNormalParams::new(1.0, 1.0, 2.0, 2.0).unwrap();
        for j in 1..100 {
            let p = j as f64 / 100.0;
            assert!((binormal_roc(&same, p).unwrap() - p).abs() < 1e-15);
        }
        assert_eq!(binormal_auc(&same), 0.5);
        let far = BiNormalParams::new(40.0, 0.0, 1.0, 1.0).unwrap();
        assert!(binormal_roc(&far, 0.01).unwrap() > 1.0 - 1e-12);
        assert!(binormal_roc(&same, 0.0).is_err());
        assert!(BiNormalParams::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn binormal_two_covariate_model() {
        let params = BiNormalParams::new(2.0, 0.5, (417.0f64 / 9.0).sqrt(), (432.5f64 / 9.0).sqrt()).unwrap();
        let direct = normal::cdf(1.5 / params.sigma_d);
        assert!((binormal_roc(&params, 0.5).unwrap() - direct).abs() < 1e-15);
        let auc = binormal_auc(&params);
        assert!((auc - 0.561_35).abs() < 1e-4, "auc = {auc}");
        let g = ProbabilityGrid::default();
        let grid_mean = g.values().iter().map(|&p| binormal_roc(&params, p).unwrap()).sum::<f64>() / 99.0;
        assert!((grid_mean - auc).abs() < 2e-3);
    }
}
