//! ROC curve and AUC estimation when the biomarker is missing at random.
//!
//! Three estimators are provided: inverse probability weighting of the
//! empirical distributions ([`roc_ipw`]), a kernel smoother of the IPW
//! placement values ([`roc_kernel_ipw`]) and a regression-based convolution
//! estimator ([`roc_conv`]). The [`simulation`] module replicates them under
//! Gaussian linear models and summarizes their accuracy.

pub mod ecdf;
pub mod error;
pub mod estimators;
pub mod io;
pub mod metrics;
pub mod normal;
pub mod propensity;
pub mod regression;
pub mod sample;
pub mod simulation;
pub mod workflow;

pub use ecdf::{StepCdf, WeightedEcdf};
pub use error::{Error, Result};
pub use estimators::{
    auc, bandwidth_pulit, binormal_auc, binormal_roc, ipw_distribution, kernel_cdf, pseudo_observations,
    roc_conv, roc_empirical, roc_ipw, roc_kernel, roc_kernel_ipw, roc_plugin, Bandwidth, BiNormalParams, Method,
    RocEstimate,
};
pub use metrics::{auc_summary, curve_ks, curve_mse, curve_sm, AucSummary, CurveSummary};
pub use propensity::{
    fit_constant, fit_logistic, ipw_weights, IpwWeights, KnownPropensity, PropensityFit, PropensityModel,
};
pub use regression::{conv_distribution, fit_ols, ConvDistribution, RegressionFit, RegressionSpec, Term, Transform};
pub use sample::{Label, LabeledSample, PopulationData, ProbabilityGrid};
pub use workflow::{estimate, EstimateOptions, PropensityKind};
