//! Closed forms displayed for the harmonic example (`α_n = 1/(n+1)`,
//! `β_n ≡ β`), as exact integers for regression against the generic
//! recipes.

use rug::Rational;

use super::num::{floor_exp_rat, Natural};
use crate::error::Result;

fn exp_plus(x: Rational, shift: i64, plus: u64) -> Result<Natural> {
    Ok(floor_exp_rat(&(x + shift))?.add_u64(plus))
}

fn linear(c: u64, n: u64, eps: &Rational) -> Rational {
    Rational::from(c * n) / eps
}

fn squared(c: u64, n: u64, gamma: &Rational, eps: &Rational) -> Rational {
    let t = Rational::from(c * n) / Rational::from(gamma * eps);
    Rational::from(&t * &t)
}

/// `⌊exp(12N/ε + 2)⌋ + 1`, for `d(x_{2n+2}, x_{2n})`.
pub fn theta1(n: u64, eps: &Rational) -> Result<Natural> {
    exp_plus(linear(12, n, eps), 2, 1)
}

/// `⌊exp(24N/ε + 2)⌋ + 1`, for `d(x_{2n+3}, x_{2n+1})`.
pub fn theta2(n: u64, eps: &Rational) -> Result<Natural> {
    exp_plus(linear(24, n, eps), 2, 1)
}

/// `⌊exp((14N/γε)² + 2)⌋ + 1`, for `d(U(x_{2n+1}), x_{2n+1})`.
pub fn theta3(n: u64, gamma: &Rational, eps: &Rational) -> Result<Natural> {
    exp_plus(squared(14, n, gamma, eps), 2, 1)
}

/// `⌊exp((20N/γε)² + 2)⌋ + 1`, for `d(x_{2n+1}, x_{2n})`.
pub fn theta4(n: u64, gamma: &Rational, eps: &Rational) -> Result<Natural> {
    exp_plus(squared(20, n, gamma, eps), 2, 1)
}

/// `⌊exp((20N/γε)² + 3)⌋ + 2`, for `d(x_{n+1}, x_n)`.
pub fn rho1(n: u64, gamma: &Rational, eps: &Rational) -> Result<Natural> {
    exp_plus(squared(20, n, gamma, eps), 3, 2)
}

/// `⌊exp((14N/γε)² + 3)⌋ + 3`, for `d(U(x_n), x_n)`.
pub fn rho2(n: u64, gamma: &Rational, eps: &Rational) -> Result<Natural> {
    exp_plus(squared(14, n, gamma, eps), 3, 3)
}

/// `⌊exp((20N/γε)² + 3)⌋ + 3`, for `d(T(x_n), x_n)`.
pub fn rho3(n: u64, gamma: &Rational, eps: &Rational) -> Result<Natural> {
    exp_plus(squared(20, n, gamma, eps), 3, 3)
}
