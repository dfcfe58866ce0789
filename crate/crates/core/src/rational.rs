//! Exact rational helpers on top of `num-rational`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type ExactRational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> ExactRational {
    ExactRational::from_integer(n.into())
}

pub fn pow(base: &ExactRational, exp: u64) -> ExactRational {
    let e = exp as usize;
    if exp > usize::MAX as u64 {
        panic!("exponent too large");
    }
    ExactRational::new_raw(
        num_traits::pow(base.numer().clone(), e),
        num_traits::pow(base.denom().clone(), e),
    )
}

/// Product of factors, grouping identical values and raising them with `pow`.
pub fn product<'a, I>(factors: I) -> ExactRational
where
    I: IntoIterator<Item = &'a ExactRational>,
{
    let mut counts: HashMap<&ExactRational, u64> = HashMap::new();
    for f in factors {
        if f.is_zero() {
            return ExactRational::zero();
        }
        *counts.entry(f).or_default() += 1;
    }
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort();
    let mut acc = ExactRational::one();
    for (f, k) in keys {
        acc *= pow(f, k);
    }
    acc
}

/// Parses `a/b`, `a`, or `-a/b`.
pub fn parse_rational(text: &str) -> Result<ExactRational> {
    let t = text.trim();
    let bad = || Error::parse(format!("`{t}`"), "expected rational num/den");
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::parse(format!("`{t}`"), "zero denominator"));
    }
    Ok(ExactRational::new(n, d))
}

/// Canonical `num/den` text (denominator always written).
pub fn format_rational(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Smallest integer t >= 0 with base^t >= target, for base > 1.
pub fn ceil_log(base: &ExactRational, target: &ExactRational) -> u64 {
    assert!(base > &ExactRational::one());
    if target <= &ExactRational::one() {
        return 0;
    }
    // estimate via bit lengths, then fix up exactly
    let bits = |r: &ExactRational| r.numer().bits() as f64 - r.denom().bits() as f64;
    let est = (bits(target) / bits(base).max(1e-9)).floor().max(0.0) as u64;
    let mut t = est.saturating_sub(2);
    let mut acc = pow(base, t);
    while &acc < target {
        acc *= base;
        t += 1;
    }
    t
}

/// Approximation factor: an explicit rational or the symbolic `2^(ℓ^c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApproxFactor {
    Value(ExactRational),
    PowerOfTwo { c: ExactRational },
}

/// Largest exponent (in bits) a symbolic factor may resolve to.
pub const MAX_FACTOR_EXPONENT: u64 = 1 << 24;

impl ApproxFactor {
    /// Integer exponent `floor(ℓ^c)` for the symbolic form.
    pub fn exponent(c: &ExactRational, ell: u64) -> Result<u64> {
        if c.is_negative() {
            return Err(Error::InvalidParameter("exponent c must be nonnegative".into()));
        }
        let a = c.numer().to_u32().ok_or_else(|| Error::InvalidParameter("c too large".into()))?;
        let b = c.denom().to_u32().ok_or_else(|| Error::InvalidParameter("c too large".into()))?;
        let base = num_traits::pow(BigUint::from(ell), a as usize);
        let root = base.nth_root(b);
        let e = root.to_u64().unwrap_or(u64::MAX);
        if e > MAX_FACTOR_EXPONENT {
            return Err(Error::cap("approximation exponent", MAX_FACTOR_EXPONENT as usize, e as usize));
        }
        Ok(e)
    }

    pub fn resolve(&self, ell: u64) -> Result<ExactRational> {
        let m = match self {
            ApproxFactor::Value(v) => v.clone(),
            ApproxFactor::PowerOfTwo { c } => {
                let e = Self::exponent(c, ell)?;
                ExactRational::from_integer(BigInt::one() << e)
            }
        };
        if m < ExactRational::one() {
            return Err(Error::InvalidParameter("approximation factor must be >= 1".into()));
        }
        Ok(m)
    }

    /// Accepts `num/den`, `2^l`, or `2^(l^c)` with rational c.
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "2^l" || t == "2^(l)" {
            return Ok(ApproxFactor::PowerOfTwo { c: ExactRational::one() });
        }
        if let Some(rest) = t.strip_prefix("2^(l^").and_then(|s| s.strip_suffix(')')) {
            let c = parse_rational(rest)?;
            return Ok(ApproxFactor::PowerOfTwo { c });
        }
        let v = parse_rational(&t)?;
        if v < ExactRational::one() {
            return Err(Error::InvalidParameter(format!("approximation factor {t} is below 1")));
        }
        Ok(ApproxFactor::Value(v))
    }
}

impl fmt::Display for ApproxFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApproxFactor::Value(v) => write!(f, "{}", format_rational(v)),
            ApproxFactor::PowerOfTwo { c } => write!(f, "2^(l^{})", format_rational(c)),
        }
    }
}
