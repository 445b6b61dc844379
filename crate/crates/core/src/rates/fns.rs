//! First-class rate functions.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rug::{Integer, Rational};

use super::num::{Natural, Real};
use crate::error::{Error, Result};

type RateEval = dyn Fn(&Real) -> Result<Natural> + Send + Sync;
type DivEval = dyn Fn(&Natural) -> Result<Natural> + Send + Sync;
type QStarEval = dyn Fn(&Natural, &Real) -> Result<Natural> + Send + Sync;
type MetaEval = dyn Fn(&Real, &CounterFn) -> Result<Natural> + Send + Sync;

/// `ε ↦ n`, antitone in ε when `monotone` is set.
#[derive(Clone)]
pub struct RateFn {
    label: String,
    monotone: bool,
    f: Arc<RateEval>,
}

impl RateFn {
    pub fn new(label: impl Into<String>, f: impl Fn(&Real) -> Result<Natural> + Send + Sync + 'static) -> Self {
        RateFn { label: label.into(), monotone: true, f: Arc::new(f) }
    }

    /// A rate that makes no monotonicity promise.
    pub fn non_monotone(
        label: impl Into<String>,
        f: impl Fn(&Real) -> Result<Natural> + Send + Sync + 'static,
    ) -> Self {
        RateFn { label: label.into(), monotone: false, f: Arc::new(f) }
    }

    pub fn constant(n: u64) -> Self {
        RateFn::new(format!("const {n}"), move |_| Ok(Natural::from_u64(n)))
    }

    pub fn zero() -> Self {
        RateFn::constant(0)
    }

    /// `ε ↦ ⌊c/ε⌋`.
    pub fn reciprocal(c: Rational) -> Self {
        RateFn::new(format!("floor({c}/eps)"), move |e| Ok(e.recip_floor(&c)))
    }

    /// `ε ↦ ⌈log₂(1/ε)⌉`, a Cauchy rate for `Σ 2⁻ⁿ`.
    pub fn ceil_log2_recip() -> Self {
        RateFn::new("ceil(log2(1/eps))", |e| Ok(e.ceil_log2_recip()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn eval(&self, eps: &Real) -> Result<Natural> {
        (self.f)(eps)
    }

    /// Convenience for exact rational arguments.
    pub fn at(&self, eps: impl Into<Rational>) -> Result<Natural> {
        self.eval(&Real::positive(eps.into())?)
    }

    /// `ε ↦ self(c·ε)`.
    pub fn scaled(&self, c: Rational) -> RateFn {
        let inner = self.clone();
        RateFn { label: format!("{}({c}·eps)", self.label), monotone: self.monotone, f: Arc::new(move |e| inner.eval(&e.mul_rat(&c))) }
    }

    /// The ε-monotonization `g(ε) := g′(⌈1/ε⌉)` with `g′(k) := max{self(1/j) : 1 ≤ j ≤ k}`.
    ///
    /// Not applied anywhere implicitly; the raw formulas stay auditable.
    pub fn monotonized(&self) -> RateFn {
        let inner = self.clone();
        RateFn::new(format!("mono({})", self.label), move |e| {
            let k = match e.exact() {
                Some(q) => super::num::ceil_conv_rat(&Rational::from(q.recip_ref())),
                None => return Err(Error::usage("monotonization needs an exact epsilon")),
            };
            let k = k.to_u64().filter(|k| *k <= 1 << 20).ok_or_else(|| {
                Error::usage("monotonization enumerates 1/j for j <= ceil(1/eps); eps too small")
            })?;
            let mut best = inner.at(1)?;
            for j in 2..=k.max(1) {
                best = best.max(&inner.at(Rational::from((1, j)))?);
            }
            Ok(best)
        })
    }
}

impl fmt::Debug for RateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RateFn({})", self.label)
    }
}

/// `k ↦ n`, monotone in k, with an optional (Q*) companion `(m, ε) ↦ n`.
#[derive(Clone)]
pub struct DivRateFn {
    label: String,
    f: Arc<DivEval>,
    q_star: Option<Arc<QStarEval>>,
}

impl DivRateFn {
    pub fn new(label: impl Into<String>, f: impl Fn(&Natural) -> Result<Natural> + Send + Sync + 'static) -> Self {
        DivRateFn { label: label.into(), f: Arc::new(f), q_star: None }
    }

    pub fn with_q_star(mut self, g: impl Fn(&Natural, &Real) -> Result<Natural> + Send + Sync + 'static) -> Self {
        self.q_star = Some(Arc::new(g));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, k: &Natural) -> Result<Natural> {
        (self.f)(k)
    }

    pub fn at(&self, k: u64) -> Result<Natural> {
        self.eval(&Natural::from_u64(k))
    }

    pub fn has_q_star(&self) -> bool {
        self.q_star.is_some()
    }

    pub fn q_star(&self, m: &Natural, eps: &Real) -> Result<Natural> {
        match &self.q_star {
            Some(g) => g(m, eps),
            None => Err(Error::usage(format!("{} has no (Q*) variant", self.label))),
        }
    }

    /// `k ↦ self(k + 1)`, and `(m, ε) ↦ self′(m + 1, ε)`.
    pub fn shifted(&self) -> DivRateFn {
        let (f, g) = (self.f.clone(), self.q_star.clone());
        DivRateFn {
            label: format!("{}(k+1)", self.label),
            f: Arc::new(move |k| f(&k.add_u64(1))),
            q_star: g.map(|g| Arc::new(move |m: &Natural, e: &Real| g(&m.add_u64(1), e)) as Arc<QStarEval>),
        }
    }
}

impl fmt::Debug for DivRateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DivRateFn({})", self.label)
    }
}

/// `(ε, f) ↦ n`.
#[derive(Clone)]
pub struct MetaRateFn {
    label: String,
    f: Arc<MetaEval>,
}

impl MetaRateFn {
    pub fn new(label: impl Into<String>, f: impl Fn(&Real, &CounterFn) -> Result<Natural> + Send + Sync + 'static) -> Self {
        MetaRateFn { label: label.into(), f: Arc::new(f) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, eps: &Real, f: &CounterFn) -> Result<Natural> {
        (self.f)(eps, f)
    }

    pub fn at(&self, eps: impl Into<Rational>, f: &CounterFn) -> Result<Natural> {
        self.eval(&Real::positive(eps.into())?, f)
    }
}

impl fmt::Debug for MetaRateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetaRateFn({})", self.label)
    }
}

type CounterEval = dyn Fn(&Integer) -> Integer + Send + Sync;

/// How far the prefix maximum of a non-monotone counter is enumerated.
/// Beyond it `f^max` is bounded below by the enumerated prefix.
const MAX_ENUMERATION: u64 = 1 << 20;

/// A counter-function `f: ℕ → ℕ`, used through its monotonization
/// `f^max(k) = max{f(k′) : k′ ≤ k}`.
#[derive(Clone)]
pub enum CounterFn {
    /// `n ↦ a·n + b`.
    Affine { a: Integer, b: Integer },
    Custom {
        label: String,
        monotone: bool,
        f: Arc<CounterEval>,
        prefix_max: Arc<Mutex<HashMap<u64, Integer>>>,
    },
}

impl CounterFn {
    pub fn affine(a: u64, b: u64) -> Self {
        CounterFn::Affine { a: Integer::from(a), b: Integer::from(b) }
    }

    pub fn constant(b: u64) -> Self {
        CounterFn::affine(0, b)
    }

    pub fn identity() -> Self {
        CounterFn::affine(1, 0)
    }

    /// An arbitrary function. Declaring it monotone skips the prefix-maximum
    /// enumeration.
    pub fn custom(label: impl Into<String>, monotone: bool, f: impl Fn(&Integer) -> Integer + Send + Sync + 'static) -> Self {
        CounterFn::Custom { label: label.into(), monotone, f: Arc::new(f), prefix_max: Arc::default() }
    }

    pub fn label(&self) -> String {
        match self {
            CounterFn::Affine { a, b } => format!("n -> {a}n + {b}"),
            CounterFn::Custom { label, .. } => label.clone(),
        }
    }

    /// Raw value `f(n)`, clamped at 0.
    pub fn eval(&self, n: &Integer) -> Integer {
        match self {
            CounterFn::Affine { a, b } => Integer::from(a * n) + b,
            CounterFn::Custom { f, .. } => f(n),
        }
        .max(Integer::new())
    }

    /// `f^max(n)`, exact for exact inputs within reach and a lower bound
    /// otherwise.
    pub fn max_eval(&self, n: &Natural) -> Natural {
        match self {
            CounterFn::Affine { a, b } => match n {
                Natural::AtLeastPow2(l) if *a > 0 => {
                    let la = a.to_f64().log2();
                    Natural::AtLeastPow2((l + la - 1e-9).next_down().max(0.0))
                }
                Natural::AtLeastPow2(_) => Natural::Exact(b.clone().max(Integer::new())),
                Natural::Exact(i) => Natural::from_int(self.eval(i), true),
                Natural::AtLeast(i) => Natural::from_int(self.eval(i), *a == 0),
            },
            CounterFn::Custom { f, monotone, prefix_max, .. } => {
                let (k, exact) = match n {
                    Natural::Exact(i) => (i.clone(), true),
                    Natural::AtLeast(i) => (i.clone(), false),
                    // f^max(n) ≥ f^max(2^min(L, 64)).
                    Natural::AtLeastPow2(l) => (Integer::from(1) << (l.min(64.0) as u32), false),
                };
                if *monotone {
                    return Natural::from_int(f(&k).max(Integer::new()), exact);
                }
                let limit = k.to_u64().filter(|k| *k <= MAX_ENUMERATION);
                let upto = limit.unwrap_or(MAX_ENUMERATION);
                let v = prefix_max_upto(f.as_ref(), prefix_max, upto);
                Natural::from_int(v, exact && limit.is_some())
            }
        }
    }
}

fn prefix_max_upto(f: &CounterEval, cache: &Mutex<HashMap<u64, Integer>>, upto: u64) -> Integer {
    if let Some(v) = cache.lock().expect("cache").get(&upto) {
        return v.clone();
    }
    let mut best = Integer::new();
    for k in 0..=upto {
        let v = f(&Integer::from(k));
        if v > best {
            best = v;
        }
    }
    cache.lock().expect("cache").insert(upto, best.clone());
    best
}

impl fmt::Debug for CounterFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CounterFn({})", self.label())
    }
}

impl Natural {
    pub(crate) fn from_int(v: Integer, exact: bool) -> Natural {
        if exact {
            Natural::Exact(v)
        } else {
            Natural::AtLeast(v)
        }
        .max(&Natural::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_monotonization() {
        let zigzag = CounterFn::custom("zigzag", false, |n| if n.is_even() { Integer::from(10) } else { Integer::from(1) });
        assert_eq!(zigzag.max_eval(&Natural::from_u64(3)), Natural::from_u64(10));
        let f = CounterFn::affine(2, 1);
        assert_eq!(f.max_eval(&Natural::from_u64(5)), Natural::from_u64(11));
        assert!(matches!(f.max_eval(&Natural::AtLeastPow2(100.0)), Natural::AtLeastPow2(l) if l > 100.9 && l <= 101.0));
        assert_eq!(CounterFn::constant(3).max_eval(&Natural::AtLeastPow2(1e10)), Natural::from_u64(3));
    }

    #[test]
    fn monotonized_rate() {
        // Non-monotone on purpose: peaks at ε = 1/2.
        let g = RateFn::non_monotone("bump", |e| {
            Ok(if e.exact() == Some(&Rational::from((1, 2))) { Natural::from_u64(9) } else { Natural::from_u64(1) })
        });
        let m = g.monotonized();
        assert_eq!(m.at(1).unwrap(), Natural::from_u64(1));
        assert_eq!(m.at(Rational::from((1, 3))).unwrap(), Natural::from_u64(9));
        assert!(m.is_monotone());
    }

    #[test]
    fn scaling_and_shift() {
        let r = RateFn::reciprocal(Rational::from(1));
        assert_eq!(r.scaled(Rational::from((1, 2))).at(1).unwrap(), Natural::from_u64(2));
        let a = DivRateFn::new("id", |k| Ok(k.clone()));
        assert_eq!(a.shifted().at(4).unwrap(), Natural::from_u64(5));
        assert!(a.q_star(&Natural::zero(), &Real::one()).is_err());
    }
}
