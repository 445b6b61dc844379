//! Rates of asymptotic regularity for the alternating Halpern–Mann iteration.
//!
//! `θ₁`–`θ₄` are rates on the half-index `n` (they control `x_{2n+·}`);
//! `ρ₁`–`ρ₃` and `ρ` are rates on the full index.

use rug::Rational;

use super::fns::{DivRateFn, RateFn};
use super::moduli::Moduli;
use super::xu::{theta_hat_fn, theta_hat_prime_fn};
use crate::error::{Error, Result};

/// Which quantitative Xu lemma feeds `θ₁`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Theta1Variant {
    /// Divergence rate `Γ₂`.
    #[default]
    Divergence,
    /// The (Q*) product rate `Γ₂′`.
    QStar,
}

#[derive(Clone, Debug)]
pub struct ArRates {
    /// `d(x_{2n+2}, x_{2n}) → 0`.
    pub theta1: RateFn,
    /// `d(x_{2n+3}, x_{2n+1}) → 0`.
    pub theta2: RateFn,
    /// `d(U(x_{2n+1}), x_{2n+1}) → 0` and `d(x_{2n+2}, x_{2n+1}) → 0`.
    pub theta3: RateFn,
    /// `d(x_{2n+1}, x_{2n}) → 0`.
    pub theta4: RateFn,
}

#[derive(Clone, Debug)]
pub struct RhoRates {
    /// `d(x_{n+1}, x_n) → 0`.
    pub rho1: RateFn,
    /// `d(U(x_n), x_n) → 0`.
    pub rho2: RateFn,
    /// `d(T(x_n), x_n) → 0`.
    pub rho3: RateFn,
    /// `max{ρ₂, ρ₃}`, for both maps at once.
    pub rho: RateFn,
}

pub(crate) fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("N must be a positive natural"));
    }
    Ok(())
}

fn max_rate(label: String, a: RateFn, b: RateFn) -> RateFn {
    RateFn::new(label, move |e| Ok(a.eval(e)?.max(&b.eval(e)?)))
}

pub fn ar_rates(m: &Moduli, n: u64) -> Result<ArRates> {
    ar_rates_with(m, n, Theta1Variant::Divergence)
}

pub fn ar_rates_with(m: &Moduli, n: u64, variant: Theta1Variant) -> Result<ArRates> {
    check_n(n)?;
    m.validate_positive()?;
    let four_n = Rational::from((1, 4 * n));
    let (g3, g4) = (m.gamma3.scaled(four_n.clone()), m.gamma4.scaled(four_n.clone()));
    let v = max_rate(format!("max{{G3, G4}}(eps/{})", 4 * n), g3.clone(), g4);
    let a: DivRateFn = m.gamma2.shifted();
    let theta1 = match variant {
        Theta1Variant::Divergence => theta_hat_fn(a, v, 2 * n),
        Theta1Variant::QStar => {
            if !a.has_q_star() {
                return Err(Error::usage("the (Q*) variant needs a Gamma2' companion"));
            }
            theta_hat_prime_fn(a, v, 2 * n)
        }
    };

    let theta2 = {
        let (t1, g3) = (theta1.clone(), g3);
        RateFn::new("theta2", move |e| Ok(t1.eval(&e.div_u64(2))?.max(&g3.eval(e)?.add_u64(1))))
    };

    let gamma = m.gamma.clone();
    let theta3 = {
        let (t1, g1) = (theta1.clone(), m.gamma1.clone());
        RateFn::new("theta3", move |e| {
            let ge2 = e.mul_rat(&gamma).square();
            Ok(t1.eval(&ge2.div_u64(8 * n))?.max(&g1.eval(&ge2.div_u64(2 * n * n))?))
        })
    };

    let theta4 = {
        let (t1, t3) = (theta1.clone(), theta3.clone());
        RateFn::new("theta4", move |e| {
            let e2 = e.div_u64(2);
            Ok(t1.eval(&e2)?.max(&t3.eval(&e2)?))
        })
    };
    Ok(ArRates { theta1, theta2, theta3, theta4 })
}

pub fn ar_rates_rho(m: &Moduli, n: u64) -> Result<RhoRates> {
    rho_from(&ar_rates(m, n)?, m, n)
}

pub fn ar_rates_rho_with(m: &Moduli, n: u64, variant: Theta1Variant) -> Result<RhoRates> {
    rho_from(&ar_rates_with(m, n, variant)?, m, n)
}

fn rho_from(t: &ArRates, m: &Moduli, n: u64) -> Result<RhoRates> {
    let rho1 = {
        let (t3, t4) = (t.theta3.clone(), t.theta4.clone());
        RateFn::new("rho1", move |e| Ok(t3.eval(e)?.double_plus(1).max(&t4.eval(e)?.double_plus(0))))
    };
    let rho2 = {
        let t3 = t.theta3.clone();
        RateFn::new("rho2", move |e| Ok(t3.eval(&e.div_u64(3))?.double_plus(2)))
    };
    let rho3 = {
        let (t4, g1) = (t.theta4.clone(), m.gamma1.clone());
        RateFn::new("rho3", move |e| {
            Ok(t4.eval(&e.div_u64(6))?.max(&g1.eval(&e.div_u64(4 * n))?).double_plus(1))
        })
    };
    let rho = max_rate("rho".into(), rho2.clone(), rho3.clone());
    Ok(RhoRates { rho1, rho2, rho3, rho })
}

impl Moduli {
    fn validate_positive(&self) -> Result<()> {
        if self.gamma <= 0 {
            return Err(Error::usage("gamma must be positive"));
        }
        Ok(())
    }
}
