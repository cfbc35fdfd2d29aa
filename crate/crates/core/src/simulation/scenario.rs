//! Monte Carlo replication of a scenario and aggregation of the metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generator::{apply_missingness, generate_population, true_roc_on_grid, GeneratorSpec, MissingMechanism};
use crate::error::{Error, Result};
use crate::estimators::{binormal_auc, roc_conv, roc_ipw, roc_kernel_ipw, Method, RocEstimate};
use crate::metrics::{auc_summary, curve_ks, curve_mse, curve_sm, AucSummary, CurveSummary};
use crate::propensity::{fit_constant, fit_logistic, PropensityFit};
use crate::regression::RegressionSpec;
use crate::sample::{Label, PopulationData, ProbabilityGrid};

/// Estimators reported by a scenario, in output order.
pub const SCENARIO_METHODS: [Method; 3] = [Method::Ipw, Method::Kernel, Method::Conv];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropensityMode {
    /// The true mechanism.
    Known,
    /// Logistic regression on the mechanism's covariates.
    FitLogistic,
    /// Observed fraction.
    FitConstant,
}

impl PropensityMode {
    pub fn name(self) -> &'static str {
        match self {
            PropensityMode::Known => "known",
            PropensityMode::FitLogistic => "logistic",
            PropensityMode::FitConstant => "constant",
        }
    }
}

impl std::str::FromStr for PropensityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "known" => Ok(PropensityMode::Known),
            "logistic" => Ok(PropensityMode::FitLogistic),
            "constant" => Ok(PropensityMode::FitConstant),
            _ => Err(Error::Config(format!(
                "unknown propensity mode {s:?} (expected known, logistic or constant)"
            ))),
        }
    }
}

/// One value per population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerPopulation<T> {
    pub diseased: T,
    pub healthy: T,
}

impl<T> PerPopulation<T> {
    pub fn new(diseased: T, healthy: T) -> Self {
        Self { diseased, healthy }
    }

    pub fn get(&self, label: Label) -> &T {
        match label {
            Label::Diseased => &self.diseased,
            Label::Healthy => &self.healthy,
        }
    }
}

impl<T: Clone> PerPopulation<T> {
    pub fn both(value: T) -> Self {
        Self {
            diseased: value.clone(),
            healthy: value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub generator: GeneratorSpec,
    pub missing: PerPopulation<MissingMechanism>,
    pub propensity: PerPopulation<PropensityMode>,
    pub regression: PerPopulation<RegressionSpec>,
    pub n_rep: usize,
    pub base_seed: u64,
    pub grid: ProbabilityGrid,
    pub retain_curves: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl ScenarioConfig {
    pub const DEFAULT_REPLICATIONS: usize = 1000;
    pub const DEFAULT_SEED: u64 = 1;

    /// Complete data, known (unit) propensities and the correct regression.
    pub fn complete(generator: GeneratorSpec) -> Self {
        let dim = generator.model.dim();
        Self {
            generator,
            missing: PerPopulation::both(MissingMechanism::None),
            propensity: PerPopulation::both(PropensityMode::Known),
            regression: PerPopulation::both(RegressionSpec::full(dim)),
            n_rep: Self::DEFAULT_REPLICATIONS,
            base_seed: Self::DEFAULT_SEED,
            grid: ProbabilityGrid::default(),
            retain_curves: false,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.n_rep == 0 {
            return Err(Error::Config("number of replications must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        let model = self.generator.model;
        for label in [Label::Diseased, Label::Healthy] {
            let mech = *self.missing.get(label);
            if !mech.is_compatible(model) {
                return Err(Error::Config(format!(
                    "mechanism {mech} is incompatible with model {model} ({label} population)"
                )));
            }
            if mech == MissingMechanism::None && *self.propensity.get(label) == PropensityMode::FitLogistic {
                return Err(Error::Config(format!(
                    "a logistic propensity cannot be fitted without missingness ({label} population)"
                )));
            }
            self.regression.get(label).validate(model.dim())?;
        }
        Ok(())
    }
}

/// Per-estimator averages over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub method: Method,
    pub curve: CurveSummary,
    pub auc: AucSummary,
    /// Mean AUC estimate.
    pub auc_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationCurves {
    pub rep: usize,
    pub method: Method,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub n_rep: usize,
    pub estimators: Vec<EstimatorSummary>,
    /// True curve on the grid.
    pub truth: Vec<f64>,
    /// Grid average of the true curve; the AUC estimates are compared with this.
    pub auc_true: f64,
    /// Exact area under the true curve.
    pub auc_exact: f64,
    /// Smoothness of the true curve on the grid.
    pub sm_true: f64,
    /// Propensity evaluations raised to the floor, summed over replications
    /// (counted once per replication, not once per estimator).
    pub clamped: usize,
    pub replications_clamped: usize,
    pub curves: Option<Vec<ReplicationCurves>>,
}

impl ScenarioReport {
    pub fn estimator(&self, method: Method) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.method == method)
    }
}

/// Generator seeded from `base_seed`; each (replication, population) pair
/// reads its own ChaCha stream so results do not depend on scheduling.
pub fn replication_rng(base_seed: u64, rep: usize, label: Label) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    let offset = match label {
        Label::Diseased => 0,
        Label::Healthy => 1,
    };
    rng.set_stream(2 * rep as u64 + offset);
    rng
}

/// Generated data of one replication.
pub fn replication_data(config: &ScenarioConfig, rep: usize) -> Result<PerPopulation<PopulationData>> {
    let draw = |label| {
        let mut rng = replication_rng(config.base_seed, rep, label);
        let pop = generate_population(&config.generator, label, &mut rng)?;
        apply_missingness(pop, *config.missing.get(label), &mut rng)
    };
    Ok(PerPopulation::new(draw(Label::Diseased)?, draw(Label::Healthy)?))
}

fn propensity_fit(mode: PropensityMode, mech: MissingMechanism, pop: &PopulationData) -> Result<PropensityFit> {
    match mode {
        PropensityMode::Known => Ok(mech.known_propensity()),
        PropensityMode::FitLogistic => fit_logistic(pop, mech.covariates()),
        PropensityMode::FitConstant => fit_constant(pop),
    }
}

struct RepOutcome {
    estimates: [RocEstimate; 3],
}

fn run_replication(config: &ScenarioConfig, rep: usize) -> Result<RepOutcome> {
    let data = replication_data(config, rep)?;
    let fit = |label| {
        propensity_fit(
            *config.propensity.get(label),
            *config.missing.get(label),
            data.get(label),
        )
    };
    let fit_d = fit(Label::Diseased)?;
    let fit_h = fit(Label::Healthy)?;
    let (d, h) = (&data.diseased, &data.healthy);
    let grid = &config.grid;
    let ipw = roc_ipw(d, h, &fit_d, &fit_h, grid)?;
    let kernel = roc_kernel_ipw(d, h, &fit_d, &fit_h, grid)?;
    let conv = roc_conv(d, h, &config.regression.diseased, &config.regression.healthy, grid)?;
    Ok(RepOutcome {
        estimates: [ipw, kernel, conv],
    })
}

fn run_all(config: &ScenarioConfig) -> Vec<Result<RepOutcome>> {
    (0..config.n_rep)
        .into_par_iter()
        .map(|rep| {
            run_replication(config, rep).map_err(|e| Error::Replication {
                index: rep,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Runs every replication and averages the metrics in replication order, so
/// the report is identical for any thread count.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    config.validate()?;
    let outcomes = match config.threads {
        None => run_all(config),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?
            .install(|| run_all(config)),
    };

    let truth = true_roc_on_grid(&config.generator, &config.grid);
    let spacing = config.grid.spacing();
    let auc_true = truth.iter().sum::<f64>() / truth.len() as f64;

    let n_rep = config.n_rep;
    let mut sums = [CurveSummary::default(); 3];
    let mut aucs: [Vec<f64>; 3] = Default::default();
    let mut clamped = 0;
    let mut replications_clamped = 0;
    let mut curves = config.retain_curves.then(Vec::new);
    for outcome in outcomes {
        let outcome = outcome?;
        // The kernel estimator reuses the IPW fits, so count those once.
        let c = outcome.estimates[0].clamped;
        clamped += c;
        replications_clamped += usize::from(c > 0);
        for (k, est) in outcome.estimates.iter().enumerate() {
            sums[k].mse += curve_mse(&est.values, &truth)?;
            sums[k].ks += curve_ks(&est.values, &truth)?;
            sums[k].sm += curve_sm(&est.values, spacing)?;
            aucs[k].push(est.auc);
        }
        if let Some(curves) = curves.as_mut() {
            let rep = curves.len() / SCENARIO_METHODS.len();
            for est in outcome.estimates {
                curves.push(ReplicationCurves {
                    rep,
                    method: est.method,
                    values: est.values,
                });
            }
        }
    }

    let estimators = SCENARIO_METHODS
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let n = n_rep as f64;
            Ok(EstimatorSummary {
                method,
                curve: CurveSummary {
                    mse: sums[k].mse / n,
                    ks: sums[k].ks / n,
                    sm: sums[k].sm / n,
                },
                auc: auc_summary(&aucs[k], auc_true)?,
                auc_mean: aucs[k].iter().sum::<f64>() / n,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScenarioReport {
        n_rep,
        estimators,
        sm_true: curve_sm(&truth, spacing)?,
        auc_true,
        auc_exact: binormal_auc(&config.generator.model.binormal()),
        truth,
        clamped,
        replications_clamped,
        curves,
    })
}
