//! Quantitative forms of Xu's lemma on sequences of reals
//! `s_{n+1} ≤ (1 − a_n) s_n + a_n b_n + c_n`.
//!
//! `A` is a divergence rate for `Σ a_n` (or a (Q*) rate `A′`), `R` a Cauchy
//! rate for `Σ c_n`, `V` a rate for `limsup b_n ≤ 0`, `D` a bound on `s_n`.

use rug::Rational;

use super::fns::{DivRateFn, RateFn};
use super::num::{Natural, Real};
use crate::error::{Error, Result};

fn check_d(d: u64) -> Result<()> {
    if d == 0 {
        return Err(Error::usage("the bound D must be at least 1"));
    }
    Ok(())
}

fn ln_term(eps: &Real, c: u64) -> Result<Natural> {
    eps.ceil_ln_recip(&Rational::from(c))
}

/// `θ(ε) = A(K + ⌈ln(3D/ε)⌉) + 1`, `K = max{R(ε/3), V(ε/3) + 1}`.
pub fn xu_theta(a: &DivRateFn, r: &RateFn, v: &RateFn, d: u64, eps: &Real) -> Result<Natural> {
    check_d(d)?;
    let e3 = eps.div_u64(3);
    let k = r.eval(&e3)?.max(&v.eval(&e3)?.add_u64(1));
    Ok(a.eval(&k.add(&ln_term(eps, 3 * d)?))?.add_u64(1))
}

/// The `R ≡ 0` case: `A(V(ε/2) + ⌈ln(2D/ε)⌉ + 1) + 1`.
pub fn xu_theta_hat(a: &DivRateFn, v: &RateFn, d: u64, eps: &Real) -> Result<Natural> {
    check_d(d)?;
    let k = v.eval(&eps.div_u64(2))?.add(&ln_term(eps, 2 * d)?).add_u64(1);
    Ok(a.eval(&k)?.add_u64(1))
}

/// The `V ≡ 0` case: `A(R(ε/2) + ⌈ln(2D/ε)⌉) + 1`.
pub fn xu_theta_check(a: &DivRateFn, r: &RateFn, d: u64, eps: &Real) -> Result<Natural> {
    check_d(d)?;
    let k = r.eval(&eps.div_u64(2))?.add(&ln_term(eps, 2 * d)?);
    Ok(a.eval(&k)?.add_u64(1))
}

/// `θ′(ε) = A′(K, ε/3D) + 1`.
pub fn xu_theta_prime(a: &DivRateFn, r: &RateFn, v: &RateFn, d: u64, eps: &Real) -> Result<Natural> {
    check_d(d)?;
    let e3 = eps.div_u64(3);
    let k = r.eval(&e3)?.max(&v.eval(&e3)?.add_u64(1));
    Ok(a.q_star(&k, &eps.div_u64(3 * d))?.add_u64(1))
}

/// `θ̂′(ε) = A′(V(ε/2) + 1, ε/2D) + 1`.
pub fn xu_theta_hat_prime(a: &DivRateFn, v: &RateFn, d: u64, eps: &Real) -> Result<Natural> {
    check_d(d)?;
    let k = v.eval(&eps.div_u64(2))?.add_u64(1);
    Ok(a.q_star(&k, &eps.div_u64(2 * d))?.add_u64(1))
}

/// `θ̌′(ε) = A′(R(ε/2), ε/3D) + 1`.
pub fn xu_theta_check_prime(a: &DivRateFn, r: &RateFn, d: u64, eps: &Real) -> Result<Natural> {
    check_d(d)?;
    let k = r.eval(&eps.div_u64(2))?;
    Ok(a.q_star(&k, &eps.div_u64(3 * d))?.add_u64(1))
}

/// Window variant with error term: `σ(ε, K) = A(K + ⌈ln(3D/ε)⌉) + 1`.
pub fn xu_window_sigma(a: &DivRateFn, d: u64, eps: &Real, k: &Natural) -> Result<Natural> {
    check_d(d)?;
    Ok(a.eval(&k.add(&ln_term(eps, 3 * d)?))?.add_u64(1))
}

/// `σ′(ε, K) = A′(K, ε/3D) + 1`.
pub fn xu_window_sigma_prime(a: &DivRateFn, d: u64, eps: &Real, k: &Natural) -> Result<Natural> {
    check_d(d)?;
    Ok(a.q_star(k, &eps.div_u64(3 * d))?.add_u64(1))
}

/// `θ̂[A, V, D]` as a first-class rate.
pub fn theta_hat_fn(a: DivRateFn, v: RateFn, d: u64) -> RateFn {
    RateFn::new(format!("theta_hat[{}, {}, {d}]", a.label(), v.label()), move |e| xu_theta_hat(&a, &v, d, e))
}

/// `θ̂′[A′, V, D]` as a first-class rate.
pub fn theta_hat_prime_fn(a: DivRateFn, v: RateFn, d: u64) -> RateFn {
    RateFn::new(format!("theta_hat'[{}, {}, {d}]", a.label(), v.label()), move |e| {
        xu_theta_hat_prime(&a, &v, d, e)
    })
}

/// `θ̌[A, R, D]` as a first-class rate.
pub fn theta_check_fn(a: DivRateFn, r: RateFn, d: u64) -> RateFn {
    RateFn::new(format!("theta_check[{}, {}, {d}]", a.label(), r.label()), move |e| xu_theta_check(&a, &r, d, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::moduli::harmonic_divergence;

    fn q(p: i64, d: i64) -> Real {
        Real::positive(Rational::from((p, d))).unwrap()
    }

    #[test]
    fn hat_example() {
        // ⌈ln 2⌉ = 1, so A(0 + 1 + 1) + 1 with A(k) = ⌊e^{k+1}⌋.
        let a = harmonic_divergence().shifted();
        assert_eq!(xu_theta_hat(&a, &RateFn::zero(), 2, &q(2, 1)).unwrap(), Natural::from_u64(21));
    }

    #[test]
    fn log_term_vanishes() {
        let a = harmonic_divergence();
        let z = RateFn::zero();
        assert_eq!(xu_theta(&a, &z, &z, 1, &q(3, 1)).unwrap(), a.at(1).unwrap().add_u64(1));
        assert_eq!(xu_window_sigma(&a, 1, &q(3, 1), &Natural::zero()).unwrap(), Natural::from_u64(2));
    }

    #[test]
    fn sigma_examples() {
        let a = harmonic_divergence();
        // ⌈ln 12⌉ = 3.
        let s = xu_window_sigma(&a, 4, &q(1, 1), &Natural::from_u64(5)).unwrap();
        assert_eq!(s, Natural::from_u64(2981));
        let s = xu_window_sigma_prime(&a, 1, &q(1, 1), &Natural::from_u64(2)).unwrap();
        assert_eq!(s, Natural::from_u64(7));
        assert_eq!(xu_theta_hat_prime(&a, &RateFn::zero(), 1, &q(2, 1)).unwrap(), a.q_star(&1.into(), &q(1, 1)).unwrap().add_u64(1));
    }

    #[test]
    fn errors() {
        let a = harmonic_divergence();
        assert!(xu_theta_hat(&a, &RateFn::zero(), 0, &q(1, 1)).is_err());
        assert!(xu_theta_prime(&DivRateFn::new("no q*", |k| Ok(k.clone())), &RateFn::zero(), &RateFn::zero(), 1, &q(1, 1)).is_err());
    }
}
