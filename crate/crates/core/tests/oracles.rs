//! Library routines checked against independent reimplementations.

mod common;

use common::checks;

#[test]
fn logistic_matches_irls_on_seeded_datasets() {
    checks::logistic_matches_irls_on_seeded_datasets();
}

#[test]
fn logistic_recovers_m1_parameters_at_large_n() {
    checks::logistic_recovers_m1_parameters_at_large_n();
}

#[test]
fn ols_matches_normal_equations() {
    checks::ols_matches_normal_equations();
}

#[test]
fn convolution_equals_double_sum() {
    checks::convolution_equals_double_sum();
}
