//! Exact evaluation of the quantitative rates.
//!
//! Every value is an arbitrary-precision natural. When a value would be too
//! large to materialize it degrades to a certified lower bound (see
//! [`Natural`]); since every rate is antitone in ε and monotone in its
//! natural arguments, lower bounds propagate soundly, and `n ≤ bound`
//! still certifies `n ≤ rate`.

pub mod asymptotic;
pub mod closed_form;
pub mod fns;
pub mod meta;
pub mod moduli;
pub mod num;
pub mod projection;
pub mod xu;

pub use asymptotic::{ar_rates, ar_rates_rho, ar_rates_rho_with, ar_rates_with, ArRates, RhoRates, Theta1Variant};
pub use fns::{CounterFn, DivRateFn, MetaRateFn, RateFn};
pub use meta::{
    compose_tau, error_rates, halpern_rates, meta_mu, meta_mu_with, splitting_rates, ErrorRate, HalpernRates,
    HalpernSigma, SigmaVariant, SplitRate,
};
pub use moduli::{harmonic_divergence, Moduli};
pub use num::{ceil_conv, ceil_conv_rat, ceil_ln, floor_exp, floor_exp_rat, Natural, Real};
pub use projection::{proj_big_phi, proj_phi, proj_psi, Phi};
pub use xu::{
    xu_theta, xu_theta_check, xu_theta_check_prime, xu_theta_hat, xu_theta_hat_prime, xu_theta_prime, xu_window_sigma,
    xu_window_sigma_prime,
};
