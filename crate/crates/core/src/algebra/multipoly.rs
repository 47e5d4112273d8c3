use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{Field, Scalar};
use super::monomial::Monomial;
use crate::error::{Error, Result};

/// Sparse multivariate polynomial over a [`Field`].
///
/// Zero coefficients are never stored, so the zero polynomial has an empty
/// term map and equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(field: Field, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(field, nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(field: Field, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    /// The coordinate polynomial `x_{i+1}` (0-based index).
    pub fn var(field: Field, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        Self::monomial(field, Monomial::unit(nvars, i), field.one())
    }

    pub fn monomial(field: Field, m: Monomial, c: Scalar) -> Self {
        let mut p = Self::zero(field, m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(field: Field, nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut p = Self::zero(field, nvars);
        for (m, c) in terms {
            if m.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: m.nvars(),
                });
            }
            if !field.contains(&c) {
                return Err(Error::FieldMismatch(format!("coefficient {c} is not in {field}")));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Convenience constructor from small integer coefficients.
    pub fn from_int_terms(field: Field, nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e.to_vec()), field.from_i64(*c));
        }
        p
    }

    /// Adds `c·m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Total degree; 0 for the zero polynomial (check [`Self::is_zero`]).
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, |m| m.degree())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn check_compat(&self, other: &MultiPoly) {
        assert!(
            self.field == other.field && self.nvars == other.nvars,
            "incompatible polynomials: {}[{}] vs {}[{}]",
            self.field,
            self.nvars,
            other.field,
            other.nvars
        );
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.field, self.nvars);
        }
        let f = self.field;
        MultiPoly {
            field: f,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), f.mul(a, c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return Self::zero(self.field, self.nvars);
        }
        let f = self.field;
        MultiPoly {
            field: f,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), f.mul(a, c))).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> MultiPoly {
        let mut acc = Self::one(self.field, self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        assert_eq!(x.len(), self.nvars);
        let f = self.field;
        // cache powers per variable
        let mut pows: Vec<Vec<Scalar>> = Vec::with_capacity(self.nvars);
        for (j, xj) in x.iter().enumerate() {
            let maxe = self.degree_in(j) as usize;
            let mut v = Vec::with_capacity(maxe + 1);
            v.push(f.one());
            for k in 1..=maxe {
                v.push(f.mul(&v[k - 1], xj));
            }
            pows.push(v);
        }
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = f.mul(&t, &pows[j][e as usize]);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Substitutes `x_var := value`, keeping the variable count.
    pub fn substitute(&self, var: usize, value: &Scalar) -> MultiPoly {
        let f = self.field;
        let mut out = Self::zero(f, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out.add_term(m2, f.mul(c, &f.pow(value, e as u64)));
        }
        out
    }

    /// Coefficients of `self` viewed as a polynomial in `x_var`:
    /// `self = Σ_k out[k] · x_var^k`, each `out[k]` free of `x_var`.
    pub fn coeffs_in(&self, var: usize) -> Vec<MultiPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(self.field, self.nvars); d + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut m2 = m.clone();
            m2.0[var] = 0;
            out[k].terms.insert(m2, c.clone());
        }
        out
    }

    /// Makes the leading coefficient 1 (no-op on zero).
    pub fn monic(&self) -> MultiPoly {
        match self.leading_term() {
            Some((_, c)) => {
                let inv = self.field.inv(c).expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Exact quotient `self / d`; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        self.check_compat(d);
        let (dm, dc) = d.leading_term()?;
        let f = self.field;
        let dinv = f.inv(dc)?;
        let mut rem = self.clone();
        let mut q = Self::zero(f, self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            // in a monomial order, d | rem forces lt(d) | lt(rem)
            let m = rm.div(dm)?;
            let c = f.mul(rc, &dinv);
            rem = &rem - &d.mul_monomial(&m, &c);
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Re-embeds into a ring with `nvars` variables, mapping variable `j` to
    /// `map[j]`.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> MultiPoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(self.field, nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (j, &a) in m.0.iter().enumerate() {
                e[map[j]] += a;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_compat(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_compat(rhs);
        let f = self.field;
        let mut out = MultiPoly::zero(f, self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), f.mul(ca, cb));
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&self.field.neg(&self.field.one()))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_poly(self))
    }
}
