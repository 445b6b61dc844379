//! Certified number representations for rate evaluation.
//!
//! Rates are built from `⌊e^k⌋`, `⌈ln x⌉` and rational arithmetic, and for
//! realistic inputs quickly leave every fixed-width range. Naturals are kept
//! as exact GMP integers while they stay below [`NAT_EXACT_BITS`]; beyond
//! that only a certified lower bound `2^L` is carried. Positive reals (the ε
//! arguments) are exact rationals, or certified *upper* bounds once they
//! become too small to carry.
//!
//! The directions are chosen so that every rate in this crate stays sound:
//! rates are antitone in ε and monotone in their natural-number inputs, so an
//! upper bound on ε and lower bounds on naturals propagate to a lower bound on
//! the final value. "n ≤ lower bound" then certifies "n ≤ rate".

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Largest integer (in bits) carried exactly.
pub const NAT_EXACT_BITS: u64 = 1 << 22;

/// Largest rational (numerator plus denominator bits) carried exactly.
pub const RAT_EXACT_BITS: u64 = 1 << 16;

const LOG2_E: f64 = std::f64::consts::LOG2_E;
const LN_2: f64 = std::f64::consts::LN_2;

/// Rounds a non-negative log-scale bound down, clamping overflow.
fn down(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else if x >= f64::MAX {
        f64::MAX
    } else {
        x.next_down().max(0.0)
    }
}

fn bits(i: &Integer) -> u64 {
    u64::from(i.significant_bits())
}

/// A natural number, or a certified lower bound on one.
#[derive(Clone, Debug, PartialEq)]
pub enum Natural {
    Exact(Integer),
    /// The true value is at least this integer.
    AtLeast(Integer),
    /// The true value is at least `2^L`.
    AtLeastPow2(f64),
}

impl Natural {
    pub fn zero() -> Self {
        Natural::Exact(Integer::new())
    }

    pub fn from_u64(n: u64) -> Self {
        Natural::Exact(Integer::from(n))
    }

    fn int(value: Integer, exact: bool) -> Self {
        debug_assert!(value >= 0);
        let n = if exact { Natural::Exact(value) } else { Natural::AtLeast(value) };
        n.normalized()
    }

    fn normalized(self) -> Self {
        match self {
            Natural::Exact(i) | Natural::AtLeast(i) if bits(&i) > NAT_EXACT_BITS => {
                Natural::AtLeastPow2((bits(&i) - 1) as f64)
            }
            other => other,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Natural::Exact(_))
    }

    /// The exact value, if known.
    pub fn exact(&self) -> Option<&Integer> {
        match self {
            Natural::Exact(i) => Some(i),
            _ => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.exact().and_then(|i| i.to_u64())
    }

    /// A materialized lower bound, when one fits.
    pub fn lower_int(&self) -> Option<&Integer> {
        match self {
            Natural::Exact(i) | Natural::AtLeast(i) => Some(i),
            Natural::AtLeastPow2(_) => None,
        }
    }

    /// `L` with value ≥ 2^L (−∞ for zero).
    pub fn log2_lower(&self) -> f64 {
        match self {
            Natural::Exact(i) | Natural::AtLeast(i) => {
                if *i == 0 {
                    f64::NEG_INFINITY
                } else {
                    (bits(i) - 1) as f64
                }
            }
            Natural::AtLeastPow2(l) => *l,
        }
    }

    /// Whether the value is certainly ≥ `n`.
    pub fn certainly_ge(&self, n: &Integer) -> bool {
        match self {
            Natural::Exact(i) | Natural::AtLeast(i) => i >= n,
            Natural::AtLeastPow2(l) => *n <= 0 || (bits(n) as f64) <= *l,
        }
    }

    fn cmp_lower(&self, other: &Natural) -> Ordering {
        match (self.lower_int(), other.lower_int()) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => self.log2_lower().partial_cmp(&other.log2_lower()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn max(&self, other: &Natural) -> Natural {
        let exact = self.is_exact() && other.is_exact();
        let top = if self.cmp_lower(other) == Ordering::Less { other } else { self };
        match top {
            Natural::Exact(i) if !exact => Natural::AtLeast(i.clone()),
            t => t.clone(),
        }
    }

    pub fn add(&self, other: &Natural) -> Natural {
        match (self, other) {
            (Natural::Exact(a), Natural::Exact(b)) => Natural::int(Integer::from(a + b), true),
            (a, b) => match (a.lower_int(), b.lower_int()) {
                (Some(x), Some(y)) => Natural::int(Integer::from(x + y), false),
                _ => Natural::AtLeastPow2(a.log2_lower().max(b.log2_lower())),
            },
        }
    }

    pub fn add_u64(&self, k: u64) -> Natural {
        self.add(&Natural::from_u64(k))
    }

    pub fn mul_u64(&self, k: u64) -> Natural {
        match self {
            Natural::Exact(a) => Natural::int(Integer::from(a * k), true),
            Natural::AtLeast(a) => Natural::int(Integer::from(a * k), false),
            Natural::AtLeastPow2(l) if k == 0 => {
                let _ = l;
                Natural::zero()
            }
            Natural::AtLeastPow2(l) => Natural::AtLeastPow2(down(l + (k as f64).log2())),
        }
    }

    /// `2n + c`, the ubiquitous half-index to full-index conversion.
    pub fn double_plus(&self, c: u64) -> Natural {
        self.mul_u64(2).add_u64(c)
    }
}

impl Natural {
    /// Decides `self ≤ other` when the bounds allow it.
    pub fn le_certified(&self, other: &Natural) -> Option<bool> {
        match (self, other) {
            (Natural::Exact(a), Natural::Exact(b)) => Some(a <= b),
            (Natural::Exact(a), b) => b.certainly_ge(a).then_some(true),
            (a, Natural::Exact(b)) => a.certainly_ge(&Integer::from(b + 1)).then_some(false),
            _ => None,
        }
    }
}

impl From<u64> for Natural {
    fn from(n: u64) -> Self {
        Natural::from_u64(n)
    }
}

impl fmt::Display for Natural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Natural::Exact(i) => write!(f, "{i}"),
            Natural::AtLeast(i) => write!(f, ">= {i}"),
            Natural::AtLeastPow2(l) => write!(f, ">= 2^{l:e}"),
        }
    }
}

/// A positive real, or a certified upper bound on one.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    /// The true value is positive and at most this rational.
    AtMost(Rational),
    /// The true value is positive and at most `2^-L`.
    AtMostPow2(f64),
}

impl Real {
    pub fn one() -> Self {
        Real::Exact(Rational::from(1))
    }

    /// Exact positive rational; rejects ε ≤ 0.
    pub fn positive(q: Rational) -> Result<Self> {
        if q > 0 {
            Ok(Real::Exact(q))
        } else {
            Err(Error::usage(format!("expected a positive real, got {q}")))
        }
    }

    /// Exact conversion of a positive `f64`.
    pub fn from_f64(x: f64) -> Result<Self> {
        let q = Rational::from_f64(x).ok_or_else(|| Error::usage(format!("non-finite real {x}")))?;
        Real::positive(q)
    }

    /// Parses `"1/4"`, `"0.25"` or `"1e-3"` exactly.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let q = if let Ok(q) = s.parse::<Rational>() {
            q
        } else {
            parse_decimal(s).ok_or_else(|| Error::usage(format!("cannot parse real {s:?}")))?
        };
        Real::positive(q)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) => Some(q),
            _ => None,
        }
    }

    fn rat(q: Rational, exact: bool) -> Self {
        let (nb, db) = (bits(q.numer()), bits(q.denom()));
        if nb + db <= RAT_EXACT_BITS {
            return if exact { Real::Exact(q) } else { Real::AtMost(q) };
        }
        // −log2 q ≥ (bits(den) − 1) − bits(num).
        let neg_log2 = db as f64 - 1.0 - nb as f64;
        if neg_log2 > (RAT_EXACT_BITS / 2) as f64 {
            return Real::AtMostPow2(down(neg_log2));
        }
        // Round up to a short binary fraction.
        let (f, _) = Float::with_val_round(128, &q, Round::Up);
        Real::AtMost(f.to_rational().expect("finite"))
    }

    /// An upper bound on the value as a rational, when it fits.
    fn upper_rat(&self) -> Option<&Rational> {
        match self {
            Real::Exact(q) | Real::AtMost(q) => Some(q),
            Real::AtMostPow2(_) => None,
        }
    }

    /// `L` with value ≤ 2^-L (a lower bound on −log2).
    pub fn neg_log2_lower(&self) -> f64 {
        match self.upper_rat() {
            Some(q) => -log2_upper(q),
            None => match self {
                Real::AtMostPow2(l) => *l,
                _ => unreachable!(),
            },
        }
    }

    /// Upper bound on the value as an `f64` (0 only on underflow).
    pub fn to_f64_upper(&self) -> f64 {
        match self {
            Real::Exact(q) | Real::AtMost(q) => Float::with_val_round(64, q, Round::Up).0.to_f64_round(Round::Up),
            Real::AtMostPow2(l) => (-l).exp2(),
        }
    }

    /// `self · q` for a positive rational `q`.
    pub fn mul_rat(&self, q: &Rational) -> Real {
        debug_assert!(*q > 0);
        match self {
            Real::Exact(r) => Real::rat(Rational::from(r * q), true),
            Real::AtMost(r) => Real::rat(Rational::from(r * q), false),
            Real::AtMostPow2(l) => Real::AtMostPow2(down(l - log2_upper(q))),
        }
    }

    pub fn div_u64(&self, k: u64) -> Real {
        self.mul_rat(&Rational::from((1, k)))
    }

    pub fn mul_u64(&self, k: u64) -> Real {
        self.mul_rat(&Rational::from(k))
    }

    pub fn square(&self) -> Real {
        match self {
            Real::Exact(r) => Real::rat(Rational::from(r * r), true),
            Real::AtMost(r) => Real::rat(Rational::from(r * r), false),
            Real::AtMostPow2(l) => Real::AtMostPow2(down(2.0 * l)),
        }
    }

    /// `num / den` for a positive rational numerator and a natural
    /// denominator (which must be nonzero if exact).
    pub fn ratio(num: &Rational, den: &Natural) -> Result<Real> {
        match den {
            Natural::Exact(i) | Natural::AtLeast(i) => {
                if *i == 0 {
                    return Err(Error::numeric("division by zero"));
                }
                Ok(Real::rat(num / Rational::from(i), den.is_exact()))
            }
            Natural::AtLeastPow2(l) => Ok(Real::AtMostPow2(down(l - log2_upper(num)))),
        }
    }

    fn cmp_upper(&self, other: &Real) -> Ordering {
        match (self.upper_rat(), other.upper_rat()) {
            (Some(a), Some(b)) => a.cmp(b),
            // Larger −log2 means smaller value.
            _ => other.neg_log2_lower().partial_cmp(&self.neg_log2_lower()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        let exact = self.is_exact() && other.is_exact();
        let low = if other.cmp_upper(self) == Ordering::Less { other } else { self };
        match low {
            Real::Exact(q) if !exact => Real::AtMost(q.clone()),
            l => l.clone(),
        }
    }

    /// Whether the value is certainly ≤ 1 (exact inputs) or has an upper
    /// bound ≤ 1.
    pub fn le_one(&self) -> bool {
        match self.upper_rat() {
            Some(q) => *q <= 1,
            None => true,
        }
    }

    /// `⌊c / self⌋` as a natural (exact or lower bound).
    pub fn recip_floor(&self, c: &Rational) -> Natural {
        match self {
            Real::Exact(q) | Real::AtMost(q) => {
                let v = Rational::from(c / q).floor().into_numer_denom().0;
                Natural::int(v.max(Integer::new()), self.is_exact())
            }
            Real::AtMostPow2(l) => {
                let lg = down(l + log2_lower(c));
                if lg < (NAT_EXACT_BITS - 1) as f64 {
                    Natural::AtLeast(Integer::from(1) << (lg.floor() as u32))
                } else {
                    Natural::AtLeastPow2(lg)
                }
            }
        }
    }

    /// `⌈ln(c / self)⌉` clamped at 0.
    pub fn ceil_ln_recip(&self, c: &Rational) -> Result<Natural> {
        match self {
            Real::Exact(q) => ceil_ln(&Rational::from(c / q)),
            Real::AtMost(q) => Ok(match ceil_ln(&Rational::from(c / q))? {
                Natural::Exact(i) => Natural::AtLeast(i),
                n => n,
            }),
            Real::AtMostPow2(l) => {
                // ln(c/ε) ≥ ln c + L ln 2.
                let v = down((log2_lower(c) + l) * LN_2);
                let v = down(v * (1.0 - 1e-15)).ceil();
                Ok(Natural::AtLeast(Integer::from_f64(v.max(0.0)).unwrap_or_default()))
            }
        }
    }
}

impl Real {
    /// `self / den` for a natural `den ≥ 1`.
    pub fn div_nat(&self, den: &Natural) -> Result<Real> {
        match self.upper_rat() {
            Some(q) => Ok(match Real::ratio(q, den)? {
                Real::Exact(r) if !self.is_exact() => Real::AtMost(r),
                r => r,
            }),
            None => {
                if !den.certainly_ge(&Integer::from(1)) {
                    return Err(Error::numeric("division by zero"));
                }
                Ok(Real::AtMostPow2(down(self.neg_log2_lower() + den.log2_lower())))
            }
        }
    }

    /// `⌈m / self⌉`.
    pub fn ceil_div(&self, m: &Natural) -> Natural {
        if m.exact().is_some_and(|i| *i == 0) {
            return Natural::zero();
        }
        match (m.lower_int(), self.upper_rat()) {
            (Some(a), Some(q)) => {
                let v = ceil_conv_rat(&(Rational::from(a) / q));
                Natural::int(v, m.is_exact() && self.is_exact())
            }
            _ => {
                let l = down(m.log2_lower() + self.neg_log2_lower());
                if l < 0.0 {
                    Natural::AtLeast(Integer::new())
                } else {
                    Natural::AtLeastPow2(l).normalized_pow2()
                }
            }
        }
    }
}

impl Real {
    /// `⌈log₂(1/self)⌉` clamped at 0.
    pub fn ceil_log2_recip(&self) -> Natural {
        match self.upper_rat() {
            Some(q) => {
                if *q >= 1 {
                    return Natural::int(Integer::new(), self.is_exact());
                }
                // Smallest k with numer·2^k ≥ denom.
                let (a, b) = (q.numer(), q.denom());
                let mut k = bits(b).saturating_sub(bits(a)).saturating_sub(1);
                while Integer::from(a << k as u32) < *b {
                    k += 1;
                }
                Natural::int(Integer::from(k), self.is_exact())
            }
            None => Natural::AtLeast(Integer::from_f64(self.neg_log2_lower().ceil()).unwrap_or_default()),
        }
    }
}

impl Natural {
    fn normalized_pow2(self) -> Natural {
        match self {
            Natural::AtLeastPow2(l) if l < (NAT_EXACT_BITS - 1) as f64 => {
                Natural::AtLeast(Integer::from(1) << (l.floor() as u32))
            }
            n => n,
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{q}"),
            Real::AtMost(q) => write!(f, "<= {q}"),
            Real::AtMostPow2(l) => write!(f, "<= 2^-{l:e}"),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let mut q = Rational::from(digits.parse::<Integer>().ok()?);
    let scale = exp - frac.len() as i32;
    let ten = Rational::from(10);
    if scale >= 0 {
        q *= ten.pow(scale);
    } else {
        q /= ten.pow(-scale);
    }
    if neg {
        q = -q;
    }
    Some(q)
}

fn log2_nearest(q: &Rational) -> f64 {
    let mut f = Float::with_val(64, q);
    f.log2_mut();
    f.to_f64()
}

// Widened by more than the conversion error of a 64-bit float.
fn log2_upper(q: &Rational) -> f64 {
    (log2_nearest(q) + 1e-12).next_up()
}

fn log2_lower(q: &Rational) -> f64 {
    (log2_nearest(q) - 1e-12).next_down()
}

/// `max{0, ⌈x⌉}` for a real `x`.
pub fn ceil_conv(x: f64) -> Result<Integer> {
    if x.is_nan() {
        return Err(Error::usage("ceiling of NaN"));
    }
    if x.is_infinite() {
        return Err(Error::usage("ceiling of an infinite value"));
    }
    Ok(Integer::from_f64(x.ceil()).unwrap_or_default().max(Integer::new()))
}

/// `max{0, ⌈q⌉}` for a rational `q`.
pub fn ceil_conv_rat(q: &Rational) -> Integer {
    Rational::from(q.ceil_ref()).into_numer_denom().0.max(Integer::new())
}

/// `max{0, ⌈ln x⌉}`, certified exact.
pub fn ceil_ln(x: &Rational) -> Result<Natural> {
    if *x <= 0 {
        return Err(Error::usage(format!("logarithm of non-positive {x}")));
    }
    if *x <= 1 {
        return Ok(Natural::zero());
    }
    // ln x is irrational for rational x ≠ 1, so the enclosure eventually
    // separates from every integer.
    let mut prec = 128u32;
    for _ in 0..12 {
        let (mut lo, _) = Float::with_val_round(prec, x, Round::Down);
        lo.ln_round(Round::Down);
        let (mut hi, _) = Float::with_val_round(prec, x, Round::Up);
        hi.ln_round(Round::Up);
        let a = lo.to_integer_round(Round::Up).map(|p| p.0);
        let b = hi.to_integer_round(Round::Up).map(|p| p.0);
        if let (Some(a), Some(b)) = (a, b) {
            if a == b {
                return Ok(Natural::Exact(a.max(Integer::new())));
            }
        }
        prec *= 2;
    }
    Err(Error::numeric(format!("could not separate ln({x}) from an integer")))
}

fn exp_cache() -> &'static Mutex<HashMap<Rational, Arc<Integer>>> {
    static CACHE: OnceLock<Mutex<HashMap<Rational, Arc<Integer>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn floor_exp_cached(x: &Rational) -> Result<Arc<Integer>> {
    if let Some(v) = exp_cache().lock().expect("cache").get(x) {
        return Ok(v.clone());
    }
    let v = Arc::new(floor_exp_exact(x)?);
    exp_cache().lock().expect("cache").insert(x.clone(), v.clone());
    Ok(v)
}

/// Certified `⌊e^x⌋` for a rational `x` whose result fits the exact range.
fn floor_exp_exact(x: &Rational) -> Result<Integer> {
    if *x == 0 {
        return Ok(Integer::from(1));
    }
    let est = x.to_f64() * LOG2_E;
    let mut guard = 64u32;
    for _ in 0..8 {
        let prec = (est.max(1.0).ceil() as u32).saturating_add(guard).saturating_add(bits(x.numer()) as u32);
        let (xd, od) = Float::with_val_round(prec, x, Round::Down);
        let (lo, hi) = if od == Ordering::Equal {
            // Correctly rounded: e^x ∈ (r − ulp, r].
            let mut r = xd;
            r.exp_round(Round::Up);
            let ulp = Float::with_val(prec, 1) << (r.get_exp().unwrap_or(0) - prec as i32);
            let (lo, _) = Float::with_val_round(prec, &r - &ulp, Round::Down);
            (lo, r)
        } else {
            let (mut xu, _) = Float::with_val_round(prec, x, Round::Up);
            let mut lo = xd;
            lo.exp_round(Round::Down);
            xu.exp_round(Round::Up);
            (lo, xu)
        };
        let a = lo.to_integer_round(Round::Down).map(|p| p.0);
        let b = hi.to_integer_round(Round::Down).map(|p| p.0);
        if let (Some(a), Some(b)) = (a, b) {
            if a == b {
                return Ok(a.max(Integer::new()));
            }
        }
        guard *= 4;
    }
    Err(Error::numeric(format!("could not certify floor(exp({x}))")))
}

/// `⌊e^x⌋` for a rational exponent (closed-form expressions), memoized.
pub fn floor_exp_rat(x: &Rational) -> Result<Natural> {
    let log2 = x.to_f64() * LOG2_E;
    if log2 > (NAT_EXACT_BITS - 2) as f64 {
        return Ok(Natural::AtLeastPow2(down(log2 * (1.0 - 1e-15))));
    }
    Ok(Natural::Exact((*floor_exp_cached(x)?).clone()))
}

/// `⌊e^k⌋` for a natural `k`, memoized on exact arguments.
pub fn floor_exp(k: &Natural) -> Result<Natural> {
    match k {
        Natural::Exact(i) | Natural::AtLeast(i) => {
            let log2 = i.to_f64() * LOG2_E;
            if !log2.is_finite() || log2 > (NAT_EXACT_BITS - 2) as f64 {
                return Ok(Natural::AtLeastPow2(down(log2 * (1.0 - 1e-15))));
            }
            let v = floor_exp_cached(&Rational::from(i))?;
            Ok(Natural::int((*v).clone(), k.is_exact()))
        }
        Natural::AtLeastPow2(l) => {
            // e^(2^L) = 2^(2^L · log2 e).
            let e = l.exp2() * LOG2_E;
            Ok(Natural::AtLeastPow2(down(e * (1.0 - 1e-15))))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from((a, b))
    }

    #[test]
    fn ceilings() {
        assert_eq!(ceil_conv(-2.3).unwrap(), 0);
        assert_eq!(ceil_conv(2.0).unwrap(), 2);
        assert!(ceil_conv(f64::NAN).is_err());
        assert_eq!(ceil_ln(&q(6, 1)).unwrap(), Natural::from_u64(2));
        assert_eq!(ceil_ln(&q(1, 3)).unwrap(), Natural::zero());
        assert_eq!(ceil_ln(&q(1, 1)).unwrap(), Natural::zero());
        assert_eq!(ceil_conv_rat(&q(-7, 2)), 0);
        assert_eq!(ceil_conv_rat(&q(7, 2)), 4);
    }

    #[test]
    fn small_exponentials_match_f64() {
        // f64 exp is exact enough to floor correctly while e^k < 2^53.
        for k in 0..36u64 {
            let exact = floor_exp(&Natural::from_u64(k)).unwrap();
            let f = (k as f64).exp().floor();
            assert_eq!(exact.exact().unwrap().to_f64(), f, "k={k}");
        }
        assert_eq!(floor_exp(&Natural::from_u64(2)).unwrap(), Natural::from_u64(7));
        assert_eq!(floor_exp_rat(&q(7, 2)).unwrap(), Natural::from_u64(33));
    }

    #[test]
    fn upward_value_dominates_double_precision() {
        for k in [10u64, 50, 300, 700] {
            let v = floor_exp(&Natural::from_u64(k)).unwrap();
            let f = (k as f64).exp();
            let big = v.exact().unwrap().to_f64();
            assert!(big + 1.0 >= f * (1.0 - 1e-15), "k={k}");
        }
    }

    #[test]
    fn saturation_is_a_lower_bound() {
        let huge = floor_exp(&Natural::from_u64(10_000_000)).unwrap();
        match huge {
            Natural::AtLeastPow2(l) => assert!(l <= 10_000_000.0 * LOG2_E && l > 1.44e7),
            other => panic!("{other:?}"),
        }
        let tower = floor_exp(&huge).unwrap();
        assert_eq!(tower, Natural::AtLeastPow2(f64::MAX));
    }

    #[test]
    fn natural_arithmetic_tracks_exactness() {
        let a = Natural::from_u64(5);
        let b = Natural::AtLeast(Integer::from(7));
        assert_eq!(a.max(&b), Natural::AtLeast(Integer::from(7)));
        assert_eq!(a.add(&a), Natural::from_u64(10));
        assert!(!a.add(&b).is_exact());
        assert_eq!(a.double_plus(1), Natural::from_u64(11));
        let p = Natural::AtLeastPow2(1e9);
        assert!(p.certainly_ge(&Integer::from(u64::MAX)));
        assert_eq!(p.max(&a), p);
    }

    #[test]
    fn reals() {
        let e = Real::parse("0.25").unwrap();
        assert_eq!(e, Real::Exact(q(1, 4)));
        assert_eq!(Real::parse("1/3").unwrap(), Real::Exact(q(1, 3)));
        assert_eq!(Real::parse("1e-3").unwrap(), Real::Exact(q(1, 1000)));
        assert!(Real::parse("0").is_err());
        assert!(Real::parse("-1").is_err());
        assert_eq!(e.recip_floor(&q(1, 1)), Natural::from_u64(4));
        assert_eq!(e.square(), Real::Exact(q(1, 16)));
        let tiny = Real::Exact(Rational::from((Integer::from(1), Integer::from(1) << 100_000u32)));
        let t = tiny.div_u64(1);
        assert!(matches!(t, Real::AtMostPow2(l) if l <= 100_000.0 && l > 99_000.0));
        assert!(matches!(t.recip_floor(&q(1, 1)), Natural::AtLeast(_)));
        assert_eq!(Real::one().min(&e), e);
    }
}
