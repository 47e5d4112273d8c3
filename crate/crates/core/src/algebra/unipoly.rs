use std::fmt;

use num_bigint::BigUint;
use num_integer::binomial;

use super::field::{Field, Scalar};

/// Dense univariate polynomial, lowest degree first, with no trailing zero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UniPoly { field, coeffs }
    }

    pub fn from_i64(field: Field, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: Field) -> Self {
        UniPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: Field, c: Scalar) -> Self {
        Self::new(field, vec![c])
    }

    /// `a + b·t`.
    pub fn linear(field: Field, a: Scalar, b: Scalar) -> Self {
        Self::new(field, vec![a, b])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, t), c))
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|k| f.add(&self.coeff(k), &other.coeff(k))).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|k| f.sub(&self.coeff(k), &other.coeff(k))).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Self::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn scale(&self, c: &Scalar) -> UniPoly {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = Self::constant(self.field, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Hasse derivative of order `k`: coefficient of `s^k` in `f(t+s)`.
    pub fn hasse(&self, k: usize) -> UniPoly {
        let f = self.field;
        if self.coeffs.len() <= k {
            return Self::zero(f);
        }
        let out = (k..self.coeffs.len())
            .map(|a| {
                let b = binomial(BigUint::from(a), BigUint::from(k));
                f.mul(&self.coeffs[a], &f.from_biguint(&b))
            })
            .collect();
        Self::new(f, out)
    }

    /// Formal first derivative (equals the first Hasse derivative).
    pub fn derivative(&self) -> UniPoly {
        self.hasse(1)
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(c) => self.scale(&self.field.inv(c).expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    /// Euclidean division; panics on division by zero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let f = self.field;
        let dd = d.degree().expect("division by the zero polynomial");
        let lc_inv = f.inv(d.leading().unwrap()).unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let mut q = vec![f.zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = f.mul(&rem[k], &lc_inv);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = f.sub(&rem[idx], &f.mul(&c, dc));
            }
            q[k - dd] = c;
        }
        rem.truncate(dd);
        (Self::new(f, q), Self::new(f, rem))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `f / gcd(f, f')` over characteristic 0. Over F_p this only removes
    /// repeated factors not of the form `g(t^p)`.
    pub fn squarefree(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, abs) = match c {
                Scalar::Rat(r) if r < &num_rational::BigRational::from_integer(0.into()) => (true, Scalar::Rat(-r)),
                _ => (false, c.clone()),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let is_one = abs == self.field.one();
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !is_one {
                        write!(f, "{abs}*")?;
                    }
                    f.write_str("t")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
