//! Moduli for the quantitative metric-projection argument: `φ`, `Φ`, `Ψ`.

use rug::Integer;

use super::asymptotic::check_n;
use super::fns::RateFn;
use super::num::{Natural, Real};
use crate::error::{Error, Result};

/// Hard cap on the number of compositions `δ^{(i)}(1)` evaluated. Stopping
/// early only shrinks the set the minimum ranges over, so the result stays
/// an upper bound on `φ`.
pub const PHI_MAX_ITERATIONS: u64 = 1 << 16;

#[derive(Clone, Debug)]
pub struct Phi {
    pub value: Real,
    /// `r = ⌈N²/4ε⌉`.
    pub r: Natural,
    /// Compositions actually evaluated.
    pub evaluated: u64,
    /// Whether the cap cut the minimum short.
    pub truncated: bool,
}

fn check_unit(v: &Real, what: &str) -> Result<()> {
    let positive = v.exact().is_none_or(|q| *q > 0);
    if !positive || !v.le_one() {
        return Err(Error::usage(format!("{what} must map into (0,1], got {v}")));
    }
    Ok(())
}

fn loosen(v: Real) -> Real {
    match v {
        Real::Exact(q) => Real::AtMost(q),
        v => v,
    }
}

/// `φ[N](ε, δ) = min{δ^{(i)}(1) : i ≤ r}` with `r = ⌈N²/4ε⌉`.
pub fn proj_phi(n: u64, eps: &Real, delta: &dyn Fn(&Real) -> Result<Real>) -> Result<Phi> {
    check_n(n)?;
    let r = eps.mul_u64(4).ceil_div(&Natural::from_u64(n * n));
    let limit = r.lower_int().and_then(Integer::to_u64);
    let (mut cur, mut best) = (Real::one(), Real::one());
    let mut evaluated = 0;
    let mut fixed = false;
    let target = limit.unwrap_or(u64::MAX);
    while evaluated < target && evaluated < PHI_MAX_ITERATIONS {
        let next = delta(&cur)?;
        check_unit(&next, "delta")?;
        evaluated += 1;
        best = best.min(&next);
        if next == cur {
            fixed = true;
            break;
        }
        cur = next;
    }
    let truncated = !fixed && evaluated < target;
    let value = if truncated || !r.is_exact() && !fixed { loosen(best) } else { best };
    Ok(Phi { value, r, evaluated, truncated })
}

/// `Φ[N](ε, δ) = φ(ε̃, δ̃)²/24N` with `ε̃ = ε²/4N²` and
/// `δ̃(ξ) = min{δ(ξ²/24N), ξ²/24N}`.
pub fn proj_big_phi(n: u64, eps: &Real, delta: &dyn Fn(&Real) -> Result<Real>) -> Result<Real> {
    check_n(n)?;
    let eps_t = eps.square().div_u64(4 * n * n);
    let delta_t = |xi: &Real| -> Result<Real> {
        let s = xi.square().div_u64(24 * n);
        let d = delta(&s)?;
        check_unit(&d, "delta")?;
        Ok(d.min(&s))
    };
    let phi = proj_phi(n, &eps_t, &delta_t)?;
    Ok(phi.value.square().div_u64(24 * n))
}

/// `Ψ[N, ρ](ε, Δ) = ρ(Φ(ε, Δ̄))` with `Δ̄(η) = Δ(ρ(η))`.
pub fn proj_psi(n: u64, rho: &RateFn, eps: &Real, big_delta: &dyn Fn(&Natural) -> Result<Real>) -> Result<Natural> {
    let delta_bar = |eta: &Real| -> Result<Real> {
        let d = big_delta(&rho.eval(eta)?)?;
        check_unit(&d, "Delta")?;
        Ok(d)
    };
    rho.eval(&proj_big_phi(n, eps, &delta_bar)?)
}
