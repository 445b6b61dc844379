//! `hm rates`: evaluate one rate exactly.

use hm_core::rates::{
    ar_rates_rho, ar_rates_with, closed_form, halpern_rates, meta_mu, splitting_rates, CounterFn, HalpernSigma, Moduli,
    Natural, Real, SplitRate, Theta1Variant,
};
use rug::Rational;
use serde::Serialize;

use crate::{usage, CliResult};

/// Names accepted by [`cmd_rates`].
pub const RATE_NAMES: [&str; 27] = [
    "gamma1", "gamma2", "gamma3", "gamma4", "theta1", "theta2", "theta3", "theta4", "rho1", "rho2", "rho3", "rho",
    "theta1_closed", "theta2_closed", "theta3_closed", "theta4_closed", "rho1_closed", "rho2_closed", "rho3_closed",
    "mu", "mu1", "mu2", "mu3", "mu4", "mu5", "halpern_ar", "halpern_t_res",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuliKind {
    /// `α_n = 1/(n+1)`, `β_n ≡ β`.
    #[default]
    Harmonic,
    /// Γ₁–Γ₄ ≡ 0.
    Toy,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatesArgs {
    pub name: String,
    pub n: u64,
    /// Constant `β` (harmonic moduli).
    pub beta: String,
    /// `γ` (toy moduli, or the splitting band parameter).
    pub gamma: Option<String>,
    pub eps: String,
    /// Natural argument for `gamma2`.
    pub k: u64,
    /// Counter-function `n ↦ a·n + b` for the metastability rates.
    pub a: u64,
    pub b: u64,
    /// `σ` for `mu1`.
    pub sigma: Option<String>,
    pub moduli: ModuliKind,
    /// Use the (Q*) variant of `θ₁`.
    pub q_star: bool,
}

impl Default for RatesArgs {
    fn default() -> Self {
        RatesArgs {
            name: "rho".into(),
            n: 1,
            beta: "1/2".into(),
            gamma: None,
            eps: "1".into(),
            k: 1,
            a: 1,
            b: 0,
            sigma: None,
            moduli: ModuliKind::Harmonic,
            q_star: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RateValue {
    pub name: String,
    pub formula: String,
    #[serde(serialize_with = "as_display")]
    pub value: Natural,
    pub exact: bool,
}

fn as_display<S: serde::Serializer>(v: &Natural, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl RateValue {
    pub fn line(&self) -> String {
        format!("{} = {}    [{}]", self.name, self.value, self.formula)
    }
}

fn rational(s: &str, what: &str) -> CliResult<Rational> {
    match Real::parse(s)? {
        Real::Exact(q) => Ok(q),
        _ => Err(usage(format!("{what} must be an exact rational, got {s:?}"))),
    }
}

pub fn cmd_rates(args: &RatesArgs) -> CliResult<RateValue> {
    let name = args.name.as_str();
    if !RATE_NAMES.contains(&name) {
        return Err(usage(format!("unknown rate {name:?}; known: {}", RATE_NAMES.join(", "))));
    }
    let eps = Real::parse(&args.eps)?;
    let moduli = match args.moduli {
        ModuliKind::Harmonic => Moduli::harmonic(rational(&args.beta, "beta")?)?,
        ModuliKind::Toy => {
            let g = args.gamma.as_deref().ok_or_else(|| usage("toy moduli need --gamma"))?;
            Moduli::toy(rational(g, "gamma")?)?
        }
    };
    let n = args.n;
    let variant = if args.q_star { Theta1Variant::QStar } else { Theta1Variant::Divergence };
    let counter = CounterFn::affine(args.a, args.b);

    let (formula, value) = match name {
        "gamma1" => (moduli.gamma1.label().to_string(), moduli.gamma1.eval(&eps)?),
        "gamma2" => (moduli.gamma2.label().to_string(), moduli.gamma2.at(args.k)?),
        "gamma3" => (moduli.gamma3.label().to_string(), moduli.gamma3.eval(&eps)?),
        "gamma4" => (moduli.gamma4.label().to_string(), moduli.gamma4.eval(&eps)?),
        "theta1" | "theta2" | "theta3" | "theta4" => {
            let t = ar_rates_with(&moduli, n, variant)?;
            let f = match name {
                "theta1" => t.theta1,
                "theta2" => t.theta2,
                "theta3" => t.theta3,
                _ => t.theta4,
            };
            (f.label().to_string(), f.eval(&eps)?)
        }
        "rho1" | "rho2" | "rho3" | "rho" => {
            let r = ar_rates_rho(&moduli, n)?;
            let f = match name {
                "rho1" => r.rho1,
                "rho2" => r.rho2,
                "rho3" => r.rho3,
                _ => r.rho,
            };
            (f.label().to_string(), f.eval(&eps)?)
        }
        closed if closed.ends_with("_closed") => {
            if args.moduli != ModuliKind::Harmonic {
                return Err(usage("closed forms exist for harmonic moduli only"));
            }
            let e = eps.exact().ok_or_else(|| usage("closed forms need an exact eps"))?.clone();
            let g = moduli.gamma.clone();
            let (formula, v) = match closed {
                "theta1_closed" => ("floor(exp(12N/eps + 2)) + 1", closed_form::theta1(n, &e)?),
                "theta2_closed" => ("floor(exp(24N/eps + 2)) + 1", closed_form::theta2(n, &e)?),
                "theta3_closed" => ("floor(exp((14N/(gamma eps))^2 + 2)) + 1", closed_form::theta3(n, &g, &e)?),
                "theta4_closed" => ("floor(exp((20N/(gamma eps))^2 + 2)) + 1", closed_form::theta4(n, &g, &e)?),
                "rho1_closed" => ("floor(exp((20N/(gamma eps))^2 + 3)) + 2", closed_form::rho1(n, &g, &e)?),
                "rho2_closed" => ("floor(exp((14N/(gamma eps))^2 + 3)) + 3", closed_form::rho2(n, &g, &e)?),
                _ => ("floor(exp((20N/(gamma eps))^2 + 3)) + 3", closed_form::rho3(n, &g, &e)?),
            };
            (formula.to_string(), v)
        }
        "mu" => {
            let mu = meta_mu(&moduli, n)?;
            (format!("{} with f = {}", mu.label(), counter.label()), mu.eval(&eps, &counter)?)
        }
        "mu1" | "mu2" | "mu3" | "mu4" | "mu5" => {
            let which = match name {
                "mu1" => {
                    let s = args.sigma.as_deref().ok_or_else(|| usage("mu1 needs --sigma"))?;
                    SplitRate::Averaged { sigma: rational(s, "sigma")? }
                }
                "mu2" => SplitRate::ForwardBackward,
                "mu3" => SplitRate::DouglasRachford,
                "mu4" => SplitRate::DouglasRachfordY,
                _ => SplitRate::DouglasRachfordZ,
            };
            let gamma = match &args.gamma {
                Some(g) => rational(g, "gamma")?,
                None => moduli.gamma.clone(),
            };
            let mu = splitting_rates(&moduli, n, &gamma, &which)?;
            (format!("{} with f = {}", mu.label(), counter.label()), mu.eval(&eps, &counter)?)
        }
        _ => {
            let h = halpern_rates(&moduli.gamma1, &moduli.gamma2, &moduli.gamma3, n, HalpernSigma::default())?;
            let f = if name == "halpern_ar" { h.ar } else { h.t_res };
            (f.label().to_string(), f.eval(&eps)?)
        }
    };
    Ok(RateValue { name: name.to_string(), formula, exact: value.is_exact(), value })
}
