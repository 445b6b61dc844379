//! The moduli Γ₁–Γ₄ and γ attached to a pair of parameter sequences.

use rug::Rational;

use super::fns::{DivRateFn, RateFn};
use super::num::{floor_exp, Natural};
use crate::error::{Error, Result};

/// Quantitative data for `(α_n)` and `(β_n)`:
///
/// * `gamma1` — rate of convergence of `α_n → 0`;
/// * `gamma2` — rate of divergence of `Σ α_n` (optionally with a (Q*) companion);
/// * `gamma3` — Cauchy rate of `Σ |α_{n+1} − α_n|`;
/// * `gamma4` — Cauchy rate of `Σ |β_{n+1} − β_n|`;
/// * `gamma` — `γ ≤ β_n ≤ 1 − γ`.
#[derive(Clone, Debug)]
pub struct Moduli {
    pub gamma1: RateFn,
    pub gamma2: DivRateFn,
    pub gamma3: RateFn,
    pub gamma4: RateFn,
    pub gamma: Rational,
}

impl Moduli {
    pub fn new(gamma1: RateFn, gamma2: DivRateFn, gamma3: RateFn, gamma4: RateFn, gamma: Rational) -> Result<Self> {
        let m = Moduli { gamma1, gamma2, gamma3, gamma4, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma <= 0 || self.gamma > (1, 2) {
            return Err(Error::usage(format!("gamma must lie in (0, 1/2], got {}", self.gamma)));
        }
        Ok(())
    }

    /// `α_n = 1/(n+1)`, `β_n ≡ β ∈ (0,1)`.
    pub fn harmonic(beta: Rational) -> Result<Self> {
        if beta <= 0 || beta >= 1 {
            return Err(Error::usage(format!("constant beta must lie in (0,1), got {beta}")));
        }
        let gamma = Rational::from(1 - &beta).min(beta);
        Moduli::new(
            RateFn::reciprocal(Rational::from(1)),
            harmonic_divergence(),
            RateFn::reciprocal(Rational::from(1)),
            RateFn::zero(),
            gamma,
        )
    }

    /// All of Γ₁–Γ₄ identically zero; only useful for exercising the formulas.
    pub fn toy(gamma: Rational) -> Result<Self> {
        Moduli::new(
            RateFn::zero(),
            DivRateFn::new("const 0", |_| Ok(Natural::zero())).with_q_star(|_, _| Ok(Natural::zero())),
            RateFn::zero(),
            RateFn::zero(),
            gamma,
        )
    }

    /// The same moduli with a different `γ` (γ is not re-validated against
    /// ½ because the splitting corollaries feed in `σγ` and `γ/2`).
    pub fn with_gamma(&self, gamma: Rational) -> Result<Self> {
        if gamma <= 0 {
            return Err(Error::usage(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Moduli { gamma, ..self.clone() })
    }
}

/// `k ↦ ⌊e^k⌋`, the divergence rate of the harmonic series, with the
/// (Q*) companion `(m, ε) ↦ ⌈m/ε⌉` coming from `∏_{i=m}^{n} i/(i+1) = m/(n+1)`.
pub fn harmonic_divergence() -> DivRateFn {
    DivRateFn::new("floor(e^k)", floor_exp).with_q_star(|m, eps| Ok(eps.ceil_div(m)))
}
