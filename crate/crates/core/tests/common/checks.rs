//! Check routines shared by the unit-style tests and the acceptance runner.
//! Each panics on the first violation.

use super::{gauss_solve, normal, population, rng};
use rand::Rng;
use rocmar::regression::SumCdf;
use rocmar::{
    conv_distribution, fit_logistic, fit_ols, roc_empirical, roc_ipw, roc_kernel, roc_plugin, Bandwidth,
    KnownPropensity, Label, Method, PopulationData, ProbabilityGrid, PropensityFit, RegressionFit, RegressionSpec,
    StepCdf, Term, WeightedEcdf,
};

fn complete(label: Label, seed: u64, n: usize) -> PopulationData {
    let mut r = rng(seed);
    let rows = (0..n)
        .map(|_| {
            let x = normal(&mut r);
            (Some((3.0 * normal(&mut r) + x).round() / 4.0), vec![x])
        })
        .collect();
    population(label, rows)
}

pub fn ipw_with_unit_propensity_is_empirical_bitwise() {
    let grid = ProbabilityGrid::default();
    let unit_known = PropensityFit::known(KnownPropensity::new("one", |_| 1.0));
    let unit_const = PropensityFit::constant(1.0).unwrap();
    for seed in 0..50u64 {
        let d = complete(Label::Diseased, 2 * seed, 10 + seed as usize);
        let h = complete(Label::Healthy, 2 * seed + 1, 60 - seed as usize);
        let emp = roc_empirical(&d, &h, &grid).unwrap();
        for fit in [&unit_known, &unit_const] {
            let ipw = roc_ipw(&d, &h, fit, fit, &grid).unwrap();
            assert_eq!(ipw.values, emp.values);
            assert_eq!(ipw.auc.to_bits(), emp.auc.to_bits());
        }
    }
}

pub fn conv_with_zero_residuals_is_fitted_value_plugin() {
    let grid = ProbabilityGrid::default();
    for seed in 0..30u64 {
        let mut r = rng(500 + seed);
        let build = |r: &mut rand_chacha::ChaCha8Rng, label, n: usize| {
            let rows: Vec<_> = (0..n).map(|_| (Some(0.0), vec![normal(r)])).collect();
            let pop = population(label, rows);
            let fitted: Vec<f64> = pop.samples().iter().map(|s| 1.0 + 2.0 * s.x[0]).collect();
            let fit = RegressionFit {
                spec: RegressionSpec::full(1),
                beta: vec![1.0, 2.0],
                fitted: fitted.clone(),
                residuals: vec![0.0; n],
            };
            (conv_distribution(&pop, &fit).unwrap(), WeightedEcdf::uniform(&fitted).unwrap())
        };
        let (conv_d, plain_d) = build(&mut r, Label::Diseased, 20 + seed as usize);
        let (conv_h, plain_h) = build(&mut r, Label::Healthy, 25);
        let a = roc_plugin(&conv_d, &conv_h, &grid, Method::Conv).unwrap();
        let b = roc_plugin(&plain_d, &plain_h, &grid, Method::Conv).unwrap();
        assert_eq!(a.values, b.values);
    }
}

pub fn kernel_with_tiny_bandwidth_is_pseudo_observation_step() {
    let grid = ProbabilityGrid::default();
    let unit = PropensityFit::constant(1.0).unwrap();
    let h = 1e-6;
    for seed in 0..30u64 {
        let d = complete(Label::Diseased, 900 + seed, 40);
        let pop_h = complete(Label::Healthy, 1900 + seed, 35);
        let f_h = WeightedEcdf::uniform(&pop_h.observed_values()).unwrap();
        let z: Vec<f64> = d.observed_values().iter().map(|&y| 1.0 - f_h.cdf(y)).collect();
        let est = roc_kernel(&d, &unit, &f_h, Bandwidth::Fixed(h), &grid).unwrap();
        for (&p, &v) in grid.values().iter().zip(&est.values) {
            if z.iter().any(|&zj| (p - zj).abs() <= h) {
                continue;
            }
            let step = z.iter().filter(|&&zj| zj < p).count() as f64 / z.len() as f64;
            assert!((v - step).abs() < 1e-6, "seed {seed}, p = {p}: {v} vs {step}");
        }
    }
}

pub fn plugin_curves_are_monotone_in_unit_interval() {
    let grid = ProbabilityGrid::default();
    let mut r = rng(4242);
    let draw = |r: &mut rand_chacha::ChaCha8Rng| {
        let n = r.random_range(1..=20);
        let values: Vec<f64> = (0..n).map(|_| (normal(r) * 4.0).round() / 4.0).collect();
        let weights: Vec<f64> = (0..n).map(|_| r.random_range(0.01..1.0)).collect();
        WeightedEcdf::new(&values, &weights).unwrap()
    };
    for _ in 0..10_000 {
        let f_d = draw(&mut r);
        let f_h = draw(&mut r);
        let est = roc_plugin(&f_d, &f_h, &grid, Method::Ipw).unwrap();
        assert!(est.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(est.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

/// Iteratively reweighted least squares with the normal equations solved by
/// Gaussian elimination.
fn irls(rows: &[Vec<f64>], delta: &[f64]) -> Vec<f64> {
    let p = rows[0].len();
    let mut beta = vec![0.0; p];
    for _ in 0..200 {
        let mut a = vec![vec![0.0; p]; p];
        let mut b = vec![0.0; p];
        for (x, &d) in rows.iter().zip(delta) {
            let eta: f64 = x.iter().zip(&beta).map(|(u, v)| u * v).sum();
            let mu = 1.0 / (1.0 + (-eta).exp());
            let w = mu * (1.0 - mu);
            let z = eta + (d - mu) / w;
            for i in 0..p {
                b[i] += w * x[i] * z;
                for k in 0..p {
                    a[i][k] += w * x[i] * x[k];
                }
            }
        }
        let next = gauss_solve(a, b);
        let change = next.iter().zip(&beta).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        beta = next;
        if change < 1e-13 {
            break;
        }
    }
    beta
}

pub fn logistic_matches_irls_on_seeded_datasets() {
    for seed in 0..20u64 {
        let mut r = rng(1000 + seed);
        let n = 150 + 10 * seed as usize;
        let dim = 1 + (seed % 2) as usize;
        let theta = [0.4, -1.1, 0.7];
        let mut rows = Vec::new();
        let mut samples = Vec::new();
        let mut delta = Vec::new();
        for _ in 0..n {
            let x: Vec<f64> = (0..dim).map(|_| normal(&mut r)).collect();
            let eta = theta[0] + x.iter().zip(&theta[1..]).map(|(a, b)| a * b).sum::<f64>();
            let d = r.random::<f64>() < 1.0 / (1.0 + (-eta).exp());
            let mut row = vec![1.0];
            row.extend(&x);
            rows.push(row);
            delta.push(if d { 1.0 } else { 0.0 });
            samples.push((d.then_some(0.0), x));
        }
        let pop = population(Label::Healthy, samples);
        let columns: Vec<usize> = (0..dim).collect();
        let fit = fit_logistic(&pop, &columns).unwrap();
        let oracle = irls(&rows, &delta);
        for (a, b) in fit.coefficients().unwrap().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        }
    }
}

pub fn logistic_recovers_m1_parameters_at_large_n() {
    let mut r = rng(77);
    let samples = (0..100_000)
        .map(|_| {
            let x = normal(&mut r) / 3.0;
            let pi = 1.0 / (1.0 + (2.0 * (x - 0.5)).exp());
            let y = (r.random::<f64>() < pi).then_some(1.0);
            (y, vec![x])
        })
        .collect();
    let fit = fit_logistic(&population(Label::Diseased, samples), &[0]).unwrap();
    let c = fit.coefficients().unwrap();
    assert!((c[0] - 1.0).abs() < 0.05, "intercept {}", c[0]);
    assert!((c[1] + 2.0).abs() < 0.05, "slope {}", c[1]);
}

fn ols_oracle(pop: &PopulationData, spec: &RegressionSpec) -> Vec<f64> {
    let row = |x: &[f64]| {
        let mut r = Vec::new();
        if spec.include_intercept {
            r.push(1.0);
        }
        for t in &spec.terms {
            let v = x[t.column];
            r.push(match t.transform {
                rocmar::Transform::Identity => v,
                rocmar::Transform::Square => v * v,
            });
        }
        r
    };
    let p = spec.n_params();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for s in pop.samples() {
        if let Some(y) = s.y {
            let r = row(&s.x);
            for i in 0..p {
                b[i] += r[i] * y;
                for k in 0..p {
                    a[i][k] += r[i] * r[k];
                }
            }
        }
    }
    gauss_solve(a, b)
}

pub fn ols_matches_normal_equations() {
    let specs = [
        RegressionSpec::full(2),
        RegressionSpec::without_intercept(2),
        RegressionSpec::first_only(),
        RegressionSpec::first_squared(),
        RegressionSpec::new(true, vec![Term::linear(1), Term::squared(0), Term::linear(0)]).unwrap(),
    ];
    for seed in 0..40u64 {
        let mut r = rng(2000 + seed);
        let n = 12 + seed as usize;
        let samples = (0..n)
            .map(|_| {
                let x = vec![normal(&mut r), 2.0 * normal(&mut r)];
                let y = 1.5 - 0.7 * x[0] + 0.3 * x[1] + 0.5 * normal(&mut r);
                (r.random_bool(0.8).then_some(y), x)
            })
            .collect();
        let pop = population(Label::Diseased, samples);
        for spec in &specs {
            if pop.n_observed() < spec.n_params() + 1 {
                continue;
            }
            let fit = fit_ols(&pop, spec).unwrap();
            let oracle = ols_oracle(&pop, spec);
            for (a, b) in fit.beta.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "seed {seed}: {a} vs {b}");
            }
        }
    }
}

/// `#{(l, j) : fitted_l + residual_j <= y} / (n m)` by direct enumeration.
fn brute_cdf(fitted: &[f64], residuals: &[f64], y: f64) -> f64 {
    let count = fitted
        .iter()
        .flat_map(|a| residuals.iter().map(move |b| a + b))
        .filter(|&s| s <= y)
        .count();
    count as f64 / (fitted.len() * residuals.len()) as f64
}

pub fn convolution_equals_double_sum() {
    let grid = ProbabilityGrid::default();
    for instance in 0..100u64 {
        let mut r = rng(3000 + instance);
        let n = r.random_range(5..=30);
        let lattice = instance % 3 == 0;
        let samples = (0..n)
            .map(|i| {
                let mut x = normal(&mut r);
                if lattice {
                    x = (x * 2.0).round() / 2.0;
                }
                let mut y = 1.0 + 2.0 * x + normal(&mut r);
                if lattice {
                    y = y.round();
                }
                // keep at least three observed
                let observed = i < 3 || r.random_bool(0.7);
                (observed.then_some(y), vec![x])
            })
            .collect();
        let pop = population(Label::Healthy, samples);
        if fit_ols(&pop, &RegressionSpec::full(1)).is_err() {
            continue;
        }
        let fit = fit_ols(&pop, &RegressionSpec::full(1)).unwrap();
        let conv = conv_distribution(&pop, &fit).unwrap();
        let merged = SumCdf::new(fit.fitted.clone(), fit.residuals.clone()).unwrap();

        let mut support: Vec<f64> = fit
            .fitted
            .iter()
            .flat_map(|a| fit.residuals.iter().map(move |b| a + b))
            .collect();
        support.sort_by(f64::total_cmp);
        let mut probes = support.clone();
        probes.extend(support.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        probes.push(support[0] - 1.0);
        probes.push(support[support.len() - 1] + 1.0);
        for &y in &probes {
            let expected = brute_cdf(&fit.fitted, &fit.residuals, y);
            assert_eq!(conv.cdf(y), expected, "instance {instance}, y = {y}");
            assert_eq!(merged.cdf(y), expected, "instance {instance}, y = {y}");
        }
        for &p in grid.values() {
            let level = 1.0 - p;
            let expected = *support
                .iter()
                .find(|&&s| brute_cdf(&fit.fitted, &fit.residuals, s) >= level - 1e-12)
                .unwrap();
            assert_eq!(conv.quantile(level).unwrap(), expected, "instance {instance}, level {level}");
            assert_eq!(merged.quantile(level).unwrap(), expected, "instance {instance}, level {level}");
        }
    }
}
