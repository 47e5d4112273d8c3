//! Exact scalar fields: prime fields F_p with p < 2^61 and the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive).
pub const MAX_PRIME: u64 = 1 << 61;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Prime(u64),
    Rational,
}

/// Descriptor of the field all scalars of a computation live in.
///
/// Prime moduli are validated with a deterministic Miller-Rabin test on
/// construction, so a `Field` value always describes an actual field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    kind: FieldKind,
}

/// An element of a [`Field`] in canonical form.
///
/// Residues are kept in `[0, p)`, and rationals are always reduced with a
/// positive denominator (guaranteed by [`BigRational`]), so structural
/// equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Mod(u64),
    Rat(BigRational),
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    // a, b < p < 2^61 so the sum cannot overflow
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    Some(pow_mod(a, p - 2, p))
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field {
            kind: FieldKind::Prime(p),
        })
    }

    pub fn rational() -> Self {
        Field {
            kind: FieldKind::Rational,
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Prime(p) => Some(p),
            FieldKind::Rational => None,
        }
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        self.modulus().unwrap_or(0)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, FieldKind::Rational)
    }

    /// Short tag used by the text formats: `fp:101` or `rat`.
    pub fn tag(&self) -> String {
        match self.kind {
            FieldKind::Prime(p) => format!("fp:{p}"),
            FieldKind::Rational => "rat".to_string(),
        }
    }

    pub fn parse_tag(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rat" || s == "q" || s == "Q" {
            return Ok(Field::rational());
        }
        let digits = s
            .strip_prefix("fp:")
            .or_else(|| s.strip_prefix("fp"))
            .ok_or_else(|| Error::Parse(format!("unknown field tag `{s}`")))?;
        let p = digits
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("bad modulus in `{s}`: {e}")))?;
        Field::prime(p)
    }

    pub fn zero(&self) -> Scalar {
        match self.kind {
            FieldKind::Prime(_) => Scalar::Mod(0),
            FieldKind::Rational => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.kind {
            FieldKind::Prime(p) => Scalar::Mod(1 % p),
            FieldKind::Rational => Scalar::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self.kind {
            FieldKind::Prime(p) => Scalar::Mod(v.rem_euclid(p as i64) as u64),
            FieldKind::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match self.kind {
            FieldKind::Prime(p) => Scalar::Mod(v % p),
            FieldKind::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self.kind {
            FieldKind::Prime(p) => {
                let r = v.mod_floor(&BigInt::from(p));
                Scalar::Mod(r.to_u64().expect("residue fits in u64"))
            }
            FieldKind::Rational => Scalar::Rat(BigRational::from_integer(v.clone())),
        }
    }

    pub fn from_biguint(&self, v: &BigUint) -> Scalar {
        self.from_bigint(&BigInt::from(v.clone()))
    }

    /// Maps a rational into the field; fails over F_p when p divides the
    /// denominator.
    pub fn from_ratio(&self, v: &BigRational) -> Result<Scalar> {
        match self.kind {
            FieldKind::Prime(p) => {
                let num = self.from_bigint(v.numer());
                let den = self.from_bigint(v.denom());
                self.div(&num, &den).ok_or_else(|| {
                    Error::Parse(format!("denominator of {v} vanishes modulo {p}"))
                })
            }
            FieldKind::Rational => Ok(Scalar::Rat(v.clone())),
        }
    }

    /// Whether `s` is a canonical element of this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self.kind, s) {
            (FieldKind::Prime(p), Scalar::Mod(v)) => *v < p,
            (FieldKind::Rational, Scalar::Rat(_)) => true,
            _ => false,
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        a.is_zero()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self.kind, a, b) {
            (FieldKind::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(add_mod(*x, *y, p)),
            (FieldKind::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar does not belong to {}", self.tag()),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self.kind, a, b) {
            (FieldKind::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(sub_mod(*x, *y, p)),
            (FieldKind::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x - y),
            _ => panic!("scalar does not belong to {}", self.tag()),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self.kind, a) {
            (FieldKind::Prime(p), Scalar::Mod(x)) => Scalar::Mod(sub_mod(0, *x, p)),
            (FieldKind::Rational, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => panic!("scalar does not belong to {}", self.tag()),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self.kind, a, b) {
            (FieldKind::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(mul_mod(*x, *y, p)),
            (FieldKind::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar does not belong to {}", self.tag()),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self.kind, a) {
            (FieldKind::Prime(p), Scalar::Mod(x)) => inv_mod(*x, p).map(Scalar::Mod),
            (FieldKind::Rational, Scalar::Rat(x)) => {
                if x.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(x.recip()))
                }
            }
            _ => panic!("scalar does not belong to {}", self.tag()),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    pub fn pow(&self, a: &Scalar, exp: u64) -> Scalar {
        match (self.kind, a) {
            (FieldKind::Prime(p), Scalar::Mod(x)) => Scalar::Mod(pow_mod(*x, exp, p)),
            (FieldKind::Rational, Scalar::Rat(x)) => {
                let e = i32::try_from(exp).expect("rational exponent too large");
                Scalar::Rat(num_traits::Pow::pow(x, e))
            }
            _ => panic!("scalar does not belong to {}", self.tag()),
        }
    }

    /// The integer `k` as a field element (k·1).
    pub fn from_count(&self, k: u64) -> Scalar {
        self.from_u64(k)
    }

    /// Parses a decimal string: an integer or `num/den`. Over F_p the value
    /// is reduced, so `-1` and `p-1` denote the same residue.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let r = parse_ratio(s)?;
        self.from_ratio(&r)
    }

    pub fn format_scalar(&self, s: &Scalar) -> String {
        s.to_string()
    }

    /// Approximate value as f64 (residues are returned as their integer
    /// representative).
    pub fn to_f64(&self, s: &Scalar) -> f64 {
        s.to_f64()
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Field::parse_tag(s)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

pub(crate) fn parse_ratio(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |e: &dyn fmt::Display| Error::Parse(format!("bad scalar `{s}`: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|e| bad(&e))?;
            let d = BigInt::from_str(d.trim()).map_err(|e| bad(&e))?;
            if d.is_zero() {
                return Err(bad(&"zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(s).map_err(|e| bad(&e))?;
            Ok(BigRational::from_integer(n))
        }
    }
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod(v) => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn as_mod(&self) -> Option<u64> {
        match self {
            Scalar::Mod(v) => Some(*v),
            Scalar::Rat(_) => None,
        }
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self {
            Scalar::Mod(_) => None,
            Scalar::Rat(r) => Some(r),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Mod(v) => *v as f64,
            Scalar::Rat(r) => ratio_to_f64(r),
        }
    }

    /// Sign of a rational scalar (-1, 0, 1). Residues report 0 or 1.
    pub fn signum(&self) -> i8 {
        match self {
            Scalar::Mod(v) => (*v != 0) as i8,
            Scalar::Rat(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale down very large numerators/denominators before dividing
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod(v) => write!(f, "{v}"),
            Scalar::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes = [2u64, 3, 5, 101, 1_000_003, 2_305_843_009_213_693_951];
        for p in primes {
            assert!(is_prime_u64(p), "{p}");
        }
        for c in [0u64, 1, 4, 561, 1_000_001, 3_215_031_751] {
            assert!(!is_prime_u64(c), "{c}");
        }
        assert!(Field::prime(4).is_err());
        assert!(Field::prime((1 << 61) - 1).is_ok());
        // prime, but above the cap
        let big = 18_446_744_073_709_551_557u64;
        assert!(is_prime_u64(big));
        assert_eq!(Field::prime(big), Err(Error::NotPrime(big)));
    }

    #[test]
    fn residues_are_canonical() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.from_i64(-1), Scalar::Mod(6));
        assert_eq!(f.parse_scalar("-3").unwrap(), Scalar::Mod(4));
        assert_eq!(f.parse_scalar("1/2").unwrap(), Scalar::Mod(4));
        assert!(f.parse_scalar("1/7").is_err());
        let a = Scalar::Mod(5);
        assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
    }

    #[test]
    fn rationals_reduce() {
        let q = Field::rational();
        let a = q.parse_scalar("6/-4").unwrap();
        assert_eq!(a.to_string(), "-3/2");
        assert_eq!(q.parse_scalar(&a.to_string()).unwrap(), a);
        assert!(q.inv(&q.zero()).is_none());
    }

    #[test]
    fn tags_round_trip() {
        for t in ["fp:101", "rat"] {
            assert_eq!(Field::parse_tag(t).unwrap().tag(), t);
        }
        assert!(Field::parse_tag("fp:100").is_err());
    }
}
