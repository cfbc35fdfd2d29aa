//! Special cases where the estimators collapse to simpler ones.

mod common;

use common::checks;

#[test]
fn ipw_with_unit_propensity_is_empirical_bitwise() {
    checks::ipw_with_unit_propensity_is_empirical_bitwise();
}

#[test]
fn conv_with_zero_residuals_is_fitted_value_plugin() {
    checks::conv_with_zero_residuals_is_fitted_value_plugin();
}

#[test]
fn kernel_with_tiny_bandwidth_is_pseudo_observation_step() {
    checks::kernel_with_tiny_bandwidth_is_pseudo_observation_step();
}

#[test]
fn plugin_curves_are_monotone_in_unit_interval() {
    checks::plugin_curves_are_monotone_in_unit_interval();
}
