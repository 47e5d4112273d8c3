//! Exact integer helpers and truncated decimals for irrational quantities
//! such as `Σ N(x)^{1/2}`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Default number of fractional digits in reported decimals.
pub const REPORT_SCALE: u32 = 60;

/// Guaranteed-correct digits of values produced at [`REPORT_SCALE`].
pub const GUARANTEED_DIGITS: u32 = 50;

pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    binomial(BigUint::from(n), BigUint::from(k))
}

/// `C(n, k)` if it fits in a `u128`.
pub fn binom_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for j in 0..k as u128 {
        // r·(n-j) is divisible by (j+1) after the multiplication
        r = r.checked_mul(n as u128 - j)? / (j + 1);
    }
    Some(r)
}

/// Largest `k` with `k^n ≤ x`.
pub fn integer_nth_root(x: &BigUint, n: u32) -> BigUint {
    x.nth_root(n)
}

/// A nonnegative real known through its truncation `⌊v·10^scale⌋`.
///
/// Values built by [`Decimal::pow_ratio`] are exact floors. Sums of floors
/// are computed at a higher scale and truncated, so they may sit below the
/// true value by at most one unit in the last place; [`Decimal::bracket`]
/// exposes the resulting enclosing interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decimal {
    scaled: BigInt,
    scale: u32,
    /// Upper bound on the truncation error in units of `10^-scale`.
    err_ulps: u32,
}

impl Decimal {
    pub fn zero(scale: u32) -> Self {
        Decimal {
            scaled: BigInt::zero(),
            scale,
            err_ulps: 0,
        }
    }

    pub fn from_integer(v: &BigInt, scale: u32) -> Self {
        Decimal {
            scaled: v * pow10(scale),
            scale,
            err_ulps: 0,
        }
    }

    /// `⌊r·10^scale⌋` (floor toward −∞).
    pub fn from_ratio(r: &BigRational, scale: u32) -> Self {
        let num = r.numer() * pow10(scale);
        let q = num_integer::Integer::div_floor(&num, r.denom());
        let exact = &q * r.denom() == num;
        Decimal {
            scaled: q,
            scale,
            err_ulps: u32::from(!exact),
        }
    }

    /// `⌊(num/den)^{a/b} · 10^scale⌋`, exactly.
    pub fn pow_ratio(num: &BigUint, den: &BigUint, a: u32, b: u32, scale: u32) -> Self {
        assert!(b > 0 && !den.is_zero());
        // ⌊Y^{1/b}⌋ = ⌊(⌊Y⌋)^{1/b}⌋ for Y = num^a·10^{scale·b} / den^a
        let y = (num.pow(a) * pow10u(scale * b)) / den.pow(a);
        let root = y.nth_root(b);
        let exact = (&root).pow(b) * den.pow(a) == num.pow(a) * pow10u(scale * b);
        Decimal {
            scaled: BigInt::from(root),
            scale,
            err_ulps: u32::from(!exact),
        }
    }

    /// Sum of `values^{a/b}` over integers, truncated to `scale` digits.
    pub fn sum_int_powers<'a, I>(values: I, a: u32, b: u32, scale: u32) -> Self
    where
        I: IntoIterator<Item = &'a BigUint>,
    {
        Self::sum_ratio_powers(values.into_iter().map(|v| (v.clone(), BigUint::one())), a, b, scale)
    }

    /// Sum of `(num_i/den_i)^{a/b}`, truncated to `scale` digits.
    pub fn sum_ratio_powers<I>(terms: I, a: u32, b: u32, scale: u32) -> Self
    where
        I: IntoIterator<Item = (BigUint, BigUint)>,
    {
        let terms: Vec<(BigUint, BigUint)> = terms.into_iter().collect();
        let guard = digits_of(terms.len() as u64) + 1;
        let mut acc = BigInt::zero();
        let mut inexact = false;
        for (n, d) in &terms {
            let t = Self::pow_ratio(n, d, a, b, scale + guard);
            inexact |= t.err_ulps > 0;
            acc += t.scaled;
        }
        // each term is low by < 1 guard ulp, so the sum is low by < 10^guard
        // guard ulps = 1 ulp at `scale`; truncation adds < 1 more ulp
        let p = pow10(guard);
        let q = num_integer::Integer::div_floor(&acc, &p);
        let exact = !inexact && &q * &p == acc;
        Decimal {
            scaled: q,
            scale,
            err_ulps: if exact { 0 } else { 2 },
        }
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_exact(&self) -> bool {
        self.err_ulps == 0
    }

    /// Rational interval `[lo, hi]` containing the true value.
    pub fn bracket(&self) -> (BigRational, BigRational) {
        let den = pow10(self.scale);
        let lo = BigRational::new(self.scaled.clone(), den.clone());
        let hi = BigRational::new(&self.scaled + BigInt::from(self.err_ulps), den);
        (lo, hi)
    }

    /// Whether the true value is certainly `≤ r`.
    pub fn certainly_le(&self, r: &BigRational) -> bool {
        self.bracket().1 <= *r
    }

    /// Whether the true value is certainly `> r`.
    pub fn certainly_gt(&self, r: &BigRational) -> bool {
        self.bracket().0 > *r
    }

    /// Truncates to fewer digits.
    pub fn truncate(&self, scale: u32) -> Decimal {
        if scale >= self.scale {
            return self.clone();
        }
        let p = pow10(self.scale - scale);
        let q = num_integer::Integer::div_floor(&self.scaled, &p);
        let exact = self.err_ulps == 0 && &q * &p == self.scaled;
        Decimal {
            scaled: q,
            scale,
            err_ulps: if exact { 0 } else { 1 + u32::from(self.err_ulps > 0) },
        }
    }

    /// Whether the true value is certainly below that of `other`.
    pub fn certainly_lt(&self, other: &Decimal) -> bool {
        self.bracket().1 < other.bracket().0
    }

    /// `self + v` for an integer `v`.
    pub fn add_integer(&self, v: &BigInt) -> Decimal {
        Decimal {
            scaled: &self.scaled + v * pow10(self.scale),
            scale: self.scale,
            err_ulps: self.err_ulps,
        }
    }

    /// `num / self` at `scale` digits, for a positive `self`; the error
    /// bound widens with the bracket of `self`.
    pub fn divide_into(&self, num: &BigInt, scale: u32) -> Decimal {
        let (lo, hi) = self.bracket();
        assert!(lo.is_positive(), "divisor must be positive");
        let num = BigRational::from_integer(num.clone());
        let low = Decimal::from_ratio(&(&num / hi), scale);
        let up = (&num / lo) * BigRational::from_integer(pow10(scale));
        let err = up.ceil().to_integer() - &low.scaled;
        Decimal {
            err_ulps: err.to_u32().unwrap_or(u32::MAX),
            ..low
        }
    }

    pub fn to_f64(&self) -> f64 {
        crate::algebra::field::ratio_to_f64(&self.bracket().0)
    }

    /// Three-way comparison of the truncations at a common scale.
    pub fn cmp_truncated(&self, other: &Decimal) -> Ordering {
        let s = self.scale.max(other.scale);
        let a = &self.scaled * pow10(s - self.scale);
        let b = &other.scaled * pow10(s - other.scale);
        a.cmp(&b)
    }
}

impl std::str::FromStr for Decimal {
    type Err = crate::error::Error;

    /// Reads a plain decimal such as `-12.0350`; the scale is the number of
    /// fractional digits written and the value is taken as exact.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || crate::error::Error::Parse(format!("bad decimal `{s}`"));
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut scaled: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        if neg {
            scaled = -scaled;
        }
        Ok(Decimal {
            scaled,
            scale: frac.len() as u32,
            err_ulps: 0,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = self.scaled.sign() == Sign::Minus;
        let digits = self.scaled.magnitude().to_string();
        let s = self.scale as usize;
        let padded = if digits.len() <= s {
            format!("{}{}", "0".repeat(s + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - s);
        if neg {
            f.write_str("-")?;
        }
        if s == 0 {
            f.write_str(int)
        } else {
            write!(f, "{int}.{frac}")
        }
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

fn pow10u(k: u32) -> BigUint {
    BigUint::from(10u32).pow(k)
}

fn digits_of(mut v: u64) -> u32 {
    let mut d = 1;
    while v >= 10 {
        v /= 10;
        d += 1;
    }
    d
}

/// Lossy conversion used only for display and heuristics.
pub fn biguint_to_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(100, 3), BigUint::from(161_700u32));
        assert_eq!(binom_u128(100, 3), Some(161_700));
        assert_eq!(binom_u128(3, 5), Some(0));
        assert_eq!(binom_u128(5000, 3), Some(20_820_835_000));
        assert_eq!(binom_u128(200, 100), None);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0.00100000000000000000", "-3.25", "12", "402.1193"] {
            assert_eq!(s.parse::<Decimal>().unwrap().to_string(), s);
        }
        assert!("1.2.3".parse::<Decimal>().is_err());
        assert!(".5".parse::<Decimal>().is_err());
    }

    #[test]
    fn square_roots() {
        let two = Decimal::pow_ratio(&BigUint::from(2u32), &BigUint::one(), 1, 2, 20);
        assert_eq!(two.to_string(), "1.41421356237309504880");
        assert!(!two.is_exact());
        let four = Decimal::pow_ratio(&BigUint::from(4u32), &BigUint::one(), 1, 2, 5);
        assert_eq!(four.to_string(), "2.00000");
        assert!(four.is_exact());
        // (1/3)^{3/2}
        let r = Decimal::pow_ratio(&BigUint::one(), &BigUint::from(3u32), 3, 2, 12);
        assert_eq!(r.to_string(), "0.192450089729");
    }

    #[test]
    fn sums_bracket_the_truth() {
        let vals: Vec<BigUint> = (1u32..=100).map(BigUint::from).collect();
        let s = Decimal::sum_int_powers(&vals, 1, 2, 30);
        let (lo, hi) = s.bracket();
        // Σ_{k≤100} √k ≈ 671.4629
        assert!(lo < hi);
        assert!(s.to_string().starts_with("671.4629"));
        let ones = vec![BigUint::one(); 1000];
        let s = Decimal::sum_int_powers(&ones, 1, 2, 10);
        assert!(s.is_exact());
        assert_eq!(s.to_string(), "1000.0000000000");
    }

    #[test]
    fn display_pads_small_values() {
        let d = Decimal::from_ratio(&BigRational::new(1.into(), 1000.into()), 5);
        assert_eq!(d.to_string(), "0.00100");
    }
}
