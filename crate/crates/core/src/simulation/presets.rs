//! Named scenarios matching the reference simulation tables.
//!
//! Missing-data names list the healthy mechanism first: `m2m1` means
//! `M2` for the healthy and `M1` for the diseased population.

use super::generator::{GeneratorSpec, MissingMechanism, Model};
use super::scenario::{PerPopulation, PropensityMode, ScenarioConfig};
use crate::regression::RegressionSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    /// Human-readable cell description.
    pub description: String,
    pub config: ScenarioConfig,
}

const SIZES: [usize; 3] = [20, 50, 100];

fn generator(model: Model, n: usize) -> GeneratorSpec {
    GeneratorSpec::new(model, n).expect("preset sizes are valid")
}

fn misspecified(table: usize) -> (RegressionSpec, &'static str) {
    match table {
        2 => (RegressionSpec::without_intercept(2), "no intercept"),
        3 => (RegressionSpec::first_only(), "x1 only"),
        _ => (RegressionSpec::first_squared(), "x1 squared"),
    }
}

fn dim1_missing(h: MissingMechanism, d: MissingMechanism, mode: PerPopulation<PropensityMode>) -> ScenarioConfig {
    let mut c = ScenarioConfig::complete(generator(Model::Dim1, 100));
    c.missing = PerPopulation::new(d, h);
    c.propensity = mode;
    c
}

fn dim2_missing(mode: PerPopulation<PropensityMode>) -> ScenarioConfig {
    let mut c = ScenarioConfig::complete(generator(Model::Dim2, 100));
    c.missing = PerPopulation::both(MissingMechanism::Logistic2D);
    c.propensity = mode;
    c
}

fn modes() -> [(&'static str, &'static str, PerPopulation<PropensityMode>); 4] {
    use PropensityMode::*;
    [
        ("known", "true propensity", PerPopulation::both(Known)),
        ("logistic", "logistic propensity", PerPopulation::both(FitLogistic)),
        ("const", "constant propensity", PerPopulation::both(FitConstant)),
        (
            "logconst",
            "logistic propensity (D), constant (H)",
            PerPopulation::new(FitLogistic, FitConstant),
        ),
    ]
}

/// Every registered scenario, in a stable order. Seeds and replication
/// counts take the [`ScenarioConfig`] defaults.
pub fn presets() -> Vec<Preset> {
    use MissingMechanism::{M1, M2};
    let mut out = Vec::new();
    let mut push = |name: String, description: String, config: ScenarioConfig| {
        out.push(Preset {
            name,
            description,
            config,
        })
    };

    for n in SIZES {
        push(
            format!("table1-n{n}"),
            format!("dim2, complete data, n={n}"),
            ScenarioConfig::complete(generator(Model::Dim2, n)),
        );
    }

    for table in [2, 3, 4] {
        let (spec, what) = misspecified(table);
        for (cell, target) in [('a', "both"), ('b', "D"), ('c', "H")] {
            for n in SIZES {
                let mut c = ScenarioConfig::complete(generator(Model::Dim2, n));
                let full = RegressionSpec::full(2);
                c.regression = match cell {
                    'a' => PerPopulation::both(spec.clone()),
                    'b' => PerPopulation::new(spec.clone(), full),
                    _ => PerPopulation::new(full, spec.clone()),
                };
                push(
                    format!("table{table}{cell}-n{n}"),
                    format!("dim2, complete data, regression {what} ({target}), n={n}"),
                    c,
                );
            }
        }
    }

    let cells = [(M1, M1), (M2, M2), (M2, M1), (M1, M2)];
    let tag = |m: MissingMechanism| if m == M1 { "m1" } else { "m2" };
    let all_modes = modes();
    for (table, mode_range, no_intercept) in [(5, 0..2, false), (6, 2..4, false), (7, 0..2, true)] {
        for &(h, d) in &cells {
            for (mode, mode_desc, propensity) in &all_modes[mode_range.clone()] {
                let mut c = dim1_missing(h, d, propensity.clone());
                let mut desc = format!("dim1, H={h}, D={d}, {mode_desc}");
                if no_intercept {
                    c.regression = PerPopulation::both(RegressionSpec::without_intercept(1));
                    desc.push_str(", regression without intercept");
                }
                push(format!("table{table}-{}{}-{mode}", tag(h), tag(d)), desc, c);
            }
        }
    }

    for (mode, mode_desc, propensity) in &all_modes {
        push(
            format!("table8-{mode}"),
            format!("dim2, missing on x1, {mode_desc}"),
            dim2_missing(propensity.clone()),
        );
    }
    for (variant, spec, what) in [
        ("nointercept", RegressionSpec::without_intercept(2), "no intercept"),
        ("x1only", RegressionSpec::first_only(), "x1 only"),
    ] {
        for (mode, mode_desc, propensity) in &all_modes[..2] {
            let mut c = dim2_missing(propensity.clone());
            c.regression = PerPopulation::both(spec.clone());
            push(
                format!("table8-{variant}-{mode}"),
                format!("dim2, missing on x1, {mode_desc}, regression {what}"),
                c,
            );
        }
    }
    out
}

pub fn find_preset(name: &str) -> Option<Preset> {
    presets().into_iter().find(|p| p.name == name)
}
