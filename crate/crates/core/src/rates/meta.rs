//! Rates of metastability and the rates derived from them.

use rug::{Integer, Rational};

use super::asymptotic::{ar_rates, ar_rates_rho, check_n};
use super::fns::{CounterFn, DivRateFn, MetaRateFn, RateFn};
use super::moduli::Moduli;
use super::num::{ceil_conv_rat, Natural, Real};
use super::projection::proj_psi;
use super::xu::{theta_check_fn, theta_hat_fn, xu_window_sigma, xu_window_sigma_prime};
use crate::error::{Error, Result};

/// Which Xu window lemma defines `Σ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SigmaVariant {
    /// `σ[Γ₂, 4N²]`.
    #[default]
    Divergence,
    /// `σ′[Γ₂′, 4N²]`.
    QStar,
}

fn sigma(a: &DivRateFn, variant: SigmaVariant, d: u64, eps: &Real, k: &Natural) -> Result<Natural> {
    match variant {
        SigmaVariant::Divergence => xu_window_sigma(a, d, eps, k),
        SigmaVariant::QStar => xu_window_sigma_prime(a, d, eps, k),
    }
}

/// `min{ε̃ / (30N(P + 1)), 1}`.
fn window_delta(eps_t: &Real, n: u64, p: &Natural) -> Result<Real> {
    Ok(eps_t.div_nat(&p.add_u64(1).mul_u64(30 * n))?.min(&Real::one()))
}

/// The rate of metastability `μ[N, γ, Γ₁, Γ₂, Γ₃, Γ₄]` for the alternating
/// Halpern–Mann iteration.
pub fn meta_mu(m: &Moduli, n: u64) -> Result<MetaRateFn> {
    meta_mu_with(m, n, SigmaVariant::Divergence)
}

pub fn meta_mu_with(m: &Moduli, n: u64, variant: SigmaVariant) -> Result<MetaRateFn> {
    check_n(n)?;
    if variant == SigmaVariant::QStar && !m.gamma2.has_q_star() {
        return Err(Error::usage("the (Q*) variant needs a Gamma2' companion"));
    }
    let theta4 = ar_rates(m, n)?.theta4;
    let rho = ar_rates_rho(m, n)?;
    let a = m.gamma2.clone();
    let d = 4 * n * n;
    Ok(MetaRateFn::new(format!("mu[N={n}, gamma={}]", m.gamma), move |eps, f| {
        let eps_t = eps.square().div_u64(16);
        let t4 = theta4.eval(&eps.div_u64(4))?;
        let k0 = rho.rho3.eval(&eps_t.div_u64(36 * n))?;
        let big_sigma = |k: &Natural| sigma(&a, variant, d, &eps_t, &k.max(&k0));
        let delta = |k: &Natural| -> Result<Real> {
            let p = f.max_eval(&big_sigma(k)?.max(&t4).double_plus(1));
            window_delta(&eps_t, n, &p)
        };
        let psi = proj_psi(n, &rho.rho, &eps_t.div_u64(24), &delta)?;
        Ok(big_sigma(&psi)?.max(&t4).double_plus(1))
    }))
}

/// How `Σ̃` in the Halpern rate of metastability reads its first argument.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum HalpernSigma {
    /// `σ[Γ₂, 4N²]`, the window lemma applied as in the main theorem.
    #[default]
    Gamma2,
    /// `σ[Γ₃, 4N²]` with `Γ₃` evaluated at the natural argument, as literally
    /// typeset. Kept for comparison only; `Γ₃` is not a divergence rate.
    Gamma3AsDisplayed,
}

#[derive(Clone, Debug)]
pub struct HalpernRates {
    /// `d(y_{n+1}, y_n) → 0`.
    pub ar: RateFn,
    /// `d(T(y_n), y_n) → 0`.
    pub t_res: RateFn,
    pub zeta: MetaRateFn,
}

/// Rates for the plain Halpern iteration `y_{n+1} = (1−α_n)T(y_n) ⊕ α_n u`.
pub fn halpern_rates(gamma1: &RateFn, gamma2: &DivRateFn, gamma3: &RateFn, n: u64, reading: HalpernSigma) -> Result<HalpernRates> {
    check_n(n)?;
    let v = gamma3.scaled(Rational::from((2, 3 * n)));
    let ar = theta_hat_fn(gamma2.shifted(), v, 2 * n);
    let t_res = {
        let (ar, g1) = (ar.clone(), gamma1.scaled(Rational::from((1, 3 * n))));
        RateFn::new("rho_tilde", move |e| Ok(ar.eval(&e.div_u64(2))?.max(&g1.eval(e)?)))
    };
    let a = match reading {
        HalpernSigma::Gamma2 => gamma2.clone(),
        HalpernSigma::Gamma3AsDisplayed => {
            let g3 = gamma3.clone();
            DivRateFn::new(format!("{}(k) as displayed", g3.label()), move |k| {
                let k = k.exact().filter(|k| **k > 0).ok_or_else(|| {
                    Error::numeric("the as-displayed reading needs an exact positive argument")
                })?;
                g3.eval(&Real::Exact(Rational::from(k)))
            })
        }
    };
    let rho = t_res.clone();
    let d = 4 * n * n;
    let zeta = MetaRateFn::new(format!("zeta[N={n}]"), move |eps, f| {
        let eps_t = eps.square().div_u64(4);
        let k0 = rho.eval(&eps_t.div_u64(36 * n))?;
        let big_sigma = |k: &Natural| xu_window_sigma(&a, d, &eps_t, &k.max(&k0));
        let delta = |k: &Natural| -> Result<Real> { window_delta(&eps_t, n, &f.max_eval(&big_sigma(k)?)) };
        let psi = proj_psi(n, &rho, &eps_t.div_u64(24), &delta)?;
        big_sigma(&psi)
    });
    Ok(HalpernRates { ar, t_res, zeta })
}

/// Upper bound on how many error terms may be summed exactly.
const MAX_ERROR_TERMS: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct ErrorRate {
    /// `ν̂` (summable errors) or `ν̌` (errors small relative to `α_n`).
    pub nu: RateFn,
    /// The bound `D` fed to the Xu lemma.
    pub d: Integer,
}

fn small_index(chi: &RateFn) -> Result<u64> {
    chi.at(1)?
        .to_u64()
        .filter(|k| *k < MAX_ERROR_TERMS)
        .ok_or_else(|| Error::usage("chi(1) is too large to enumerate the error terms"))
}

fn exact_term(x: f64, what: &str) -> Result<Rational> {
    match Rational::from_f64(x) {
        Some(q) if q >= 0 => Ok(q),
        _ => Err(Error::usage(format!("{what} must be a finite nonnegative real, got {x}"))),
    }
}

/// Rate of convergence for `d(x′_n, x_n) → 0` under error terms `δ_n`.
///
/// Exactly one of `chi1` (Cauchy rate for `Σ δ_n`) or `chi2` (rate for
/// `(δ_{2n} + δ_{2n+1})/α_n → 0`) must be given; `alpha` is only read in
/// the second case.
pub fn error_rates(
    gamma2: &DivRateFn,
    chi1: Option<&RateFn>,
    chi2: Option<&RateFn>,
    delta: &dyn Fn(u64) -> f64,
    alpha: &dyn Fn(u64) -> f64,
) -> Result<ErrorRate> {
    match (chi1, chi2) {
        (Some(chi1), None) => {
            let k = small_index(chi1)?;
            let mut sum = Rational::new();
            for i in 0..=k {
                sum += exact_term(delta(i), "delta_n")?;
            }
            let d = ceil_conv_rat(&sum) + 1u32;
            let du = d.to_u64().ok_or_else(|| Error::usage("error bound D too large"))?;
            let theta = theta_hat_fn(gamma2.clone(), chi1.clone(), du);
            let chi = chi1.clone();
            let nu = RateFn::new("nu_hat", move |e| {
                let e2 = e.div_u64(2);
                Ok(theta.eval(&e2)?.max(&chi.eval(&e2)?).double_plus(3))
            });
            Ok(ErrorRate { nu, d })
        }
        (None, Some(chi2)) => {
            let k = small_index(chi2)?;
            let mut best = Rational::from(1);
            for i in 0..=k {
                let a = exact_term(alpha(i), "alpha_n")?;
                if a == 0 {
                    return Err(Error::usage("the relative-error rate needs alpha_n > 0"));
                }
                let r = (exact_term(delta(2 * i), "delta_n")? + exact_term(delta(2 * i + 1), "delta_n")?) / a;
                best = best.max(r);
            }
            let d = ceil_conv_rat(&best);
            let du = d.to_u64().ok_or_else(|| Error::usage("error bound D too large"))?;
            let theta = theta_check_fn(gamma2.clone(), chi2.clone(), du);
            let chi = chi2.clone();
            let nu = RateFn::new("nu_check", move |e| {
                let e2 = e.div_u64(2);
                Ok(theta.eval(&e2)?.max(&chi.eval(&e2)?).double_plus(1))
            });
            Ok(ErrorRate { nu, d })
        }
        _ => Err(Error::usage("supply exactly one of chi1 and chi2")),
    }
}

/// `f_{ε,ν}(n) = f(max{n, v})` where `v` bounds `ν(ε/3)` from below.
fn floor_counter(f: &CounterFn, v: &Natural) -> CounterFn {
    let v = match v.lower_int() {
        Some(i) => i.clone(),
        None => Integer::from(1) << (v.log2_lower().min(64.0) as u32),
    };
    let (g, monotone) = (f.clone(), matches!(f, CounterFn::Affine { .. }));
    CounterFn::custom(format!("({})(max{{n, {v}}})", f.label()), monotone, move |n| g.eval(&Integer::from(n.max(&v))))
}

/// `τ_ν(ε, f) = max{τ(ε/3, f_{ε,ν}), ν(ε/3)}`: metastability transfers
/// along `d(w_n, z_n) → 0`.
pub fn compose_tau(tau: &MetaRateFn, nu: &RateFn) -> MetaRateFn {
    let (tau, nu) = (tau.clone(), nu.clone());
    MetaRateFn::new(format!("{}_{}", tau.label(), nu.label()), move |eps, f| {
        let e3 = eps.div_u64(3);
        let v = nu.eval(&e3)?;
        Ok(tau.eval(&e3, &floor_counter(f, &v))?.max(&v))
    })
}

/// `n ↦ 2f(n) + 1`.
fn odd_counter(f: &CounterFn) -> CounterFn {
    match f {
        CounterFn::Affine { a, b } => CounterFn::Affine { a: Integer::from(a * 2u32), b: Integer::from(b * 2u32) + 1u32 },
        CounterFn::Custom { monotone, .. } => {
            let g = f.clone();
            CounterFn::custom(format!("2({})+1", f.label()), *monotone, move |n| g.eval(n) * 2u32 + 1u32)
        }
    }
}

/// The splitting algorithms and the stream each rate speaks about.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitRate {
    /// `μ₁`: `U` is α-averaged with `α ≥ σ`.
    Averaged { sigma: Rational },
    /// `μ₂`: forward-backward.
    ForwardBackward,
    /// `μ₃`: Douglas–Rachford, the `x` stream.
    DouglasRachford,
    /// `μ₄`: Douglas–Rachford, the `y` stream.
    DouglasRachfordY,
    /// `μ₅`: Douglas–Rachford, the `z` stream.
    DouglasRachfordZ,
}

/// `μ₁`–`μ₅`. `gamma` is the band parameter of the respective statement;
/// the `γ` stored in `m` is ignored.
pub fn splitting_rates(m: &Moduli, n: u64, gamma: &Rational, which: &SplitRate) -> Result<MetaRateFn> {
    let band = |hi: Rational| -> Result<()> {
        if *gamma <= 0 || *gamma > hi {
            return Err(Error::usage(format!("band parameter gamma = {gamma} outside (0, {hi}]")));
        }
        Ok(())
    };
    let half = Rational::from((1, 2));
    let mu = |g: Rational| meta_mu(&m.with_gamma(g)?, n);
    match which {
        SplitRate::Averaged { sigma } => {
            if *sigma <= 0 || *sigma >= 1 {
                return Err(Error::usage(format!("sigma must lie in (0,1), got {sigma}")));
            }
            band(Rational::from(sigma * 2u32).recip())?;
            mu(Rational::from(sigma * gamma))
        }
        SplitRate::ForwardBackward | SplitRate::DouglasRachford => {
            band(Rational::from(1))?;
            mu(Rational::from(gamma * &half))
        }
        SplitRate::DouglasRachfordY | SplitRate::DouglasRachfordZ => {
            band(Rational::from(1))?;
            let mu3 = mu(Rational::from(gamma * &half))?;
            let thirds = matches!(which, SplitRate::DouglasRachfordZ);
            Ok(MetaRateFn::new(if thirds { "mu5" } else { "mu4" }, move |eps, f| {
                let e = if thirds { eps.div_u64(3) } else { eps.clone() };
                mu3.eval(&e, &odd_counter(f))
            }))
        }
    }
}
