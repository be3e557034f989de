//! Predictor and bound formulas: small-norm probabilities, the `xi`
//! calibration, probability-ratio bounds, moments of the counting variable,
//! binomial bounds and the smoothed exponent `phi_n`.

pub mod aux;
pub mod moments;
pub mod small_norm;

pub use aux::{aux_functions, binomial_log_approx, phi_exponent, AuxParams, AuxValues, DEFAULT_EPS_SMOOTH};
pub use moments::{
    binomial_tail_bound, first_moment_log, first_moment_log_asymptotic, log_binomial, log_remainder, ratio_bound,
    ratio_bound_tight_point, rho_k, second_moment_terms, second_moment_terms_with, Maximizer, MomentReport,
};
pub use small_norm::{
    calibrate_xi, calibrate_xi_self_consistent, delta_for_probability, log_small_norm_prob_exact,
    predicted_delta, predicted_discrepancy, small_norm_prob_asymptotic, small_norm_prob_mc, xi_boundary,
    McEstimate, XiCalibration,
};
