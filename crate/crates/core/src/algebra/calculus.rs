//! Hasse derivatives, gradients, line restrictions, p-th power structure and
//! square-free parts.

use num_bigint::BigUint;
use num_integer::binomial;

use super::field::{FieldKind, Scalar};
use super::monomial::Monomial;
use super::multipoly::MultiPoly;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// `f^{(i)}`: the coefficient of `z^i` in the expansion of `f(x+z)`.
///
/// Term-wise, `c·x^a` contributes `c·∏_j C(a_j, i_j)·x^{a-i}`, with the
/// binomials reduced in the field.
pub fn hasse_derivative(f: &MultiPoly, i: &Monomial) -> Result<MultiPoly> {
    if i.nvars() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: i.nvars(),
        });
    }
    let field = f.field();
    let mut out = MultiPoly::zero(field, f.nvars());
    for (m, c) in f.terms() {
        let Some(rest) = m.div(i) else { continue };
        let mut coef = c.clone();
        for (&a, &k) in m.exps().iter().zip(i.exps()) {
            if k == 0 {
                continue;
            }
            let b = small_binomial(a, k);
            coef = field.mul(&coef, &field.from_biguint(&b));
            if coef.is_zero() {
                break;
            }
        }
        out.add_term(rest, coef);
    }
    Ok(out)
}

fn small_binomial(a: u32, k: u32) -> BigUint {
    if a < 64 {
        // C(a, k) < 2^63 here, so the running product fits in u128
        let mut r: u128 = 1;
        for j in 0..k as u128 {
            r = r * (a as u128 - j) / (j + 1);
        }
        BigUint::from(r)
    } else {
        binomial(BigUint::from(a), BigUint::from(k))
    }
}

/// `(f^{(e_1)}, ..., f^{(e_n)})`.
pub fn gradient(f: &MultiPoly) -> Vec<MultiPoly> {
    (0..f.nvars())
        .map(|j| hasse_derivative(f, &Monomial::unit(f.nvars(), j)).expect("dimensions agree"))
        .collect()
}

/// `f(v + t·b)` as a univariate polynomial in `t`.
pub fn restrict_to_line(f: &MultiPoly, v: &[Scalar], b: &[Scalar]) -> Result<UniPoly> {
    let n = f.nvars();
    for len in [v.len(), b.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    if b.iter().all(Scalar::is_zero) {
        return Err(Error::ZeroDirection);
    }
    let field = f.field();
    if v.iter().chain(b).any(|s| !field.contains(s)) {
        return Err(Error::FieldMismatch(format!("line coordinates are not in {field}")));
    }
    // powers (v_j + b_j t)^e for every exponent in use
    let mut pows: Vec<Vec<UniPoly>> = Vec::with_capacity(n);
    for j in 0..n {
        let lin = UniPoly::linear(field, v[j].clone(), b[j].clone());
        let maxe = f.degree_in(j) as usize;
        let mut ps = vec![UniPoly::constant(field, field.one())];
        for k in 1..=maxe {
            let next = ps[k - 1].mul(&lin);
            ps.push(next);
        }
        pows.push(ps);
    }
    let mut acc = UniPoly::zero(field);
    for (m, c) in f.terms() {
        let mut t = UniPoly::constant(field, c.clone());
        for (j, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                t = t.mul(&pows[j][e as usize]);
            }
        }
        acc = acc.add(&t);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PthPower {
    Constant,
    /// `f = g^p`.
    PowerRoot(MultiPoly),
    NonzeroGradient,
}

/// Classifies `f` over F_p: nonzero gradient, constant, or a p-th power.
///
/// When the gradient vanishes every exponent is divisible by p, and since
/// Frobenius fixes the prime field, `g = Σ c·x^{a/p}` satisfies `g^p = f`.
pub fn pth_power_structure(f: &MultiPoly) -> Result<PthPower> {
    let FieldKind::Prime(p) = f.field().kind() else {
        return Err(Error::FieldMismatch("p-th power structure needs a prime field".into()));
    };
    if gradient(f).iter().any(|g| !g.is_zero()) {
        return Ok(PthPower::NonzeroGradient);
    }
    if f.is_constant() {
        return Ok(PthPower::Constant);
    }
    let mut g = MultiPoly::zero(f.field(), f.nvars());
    for (m, c) in f.terms() {
        let mut e = Vec::with_capacity(m.nvars());
        for &a in m.exps() {
            if !(a as u64).is_multiple_of(p) {
                return Err(Error::InvariantViolation(format!(
                    "gradient vanishes but exponent {a} is not divisible by {p}"
                )));
            }
            e.push((a as u64 / p) as u32);
        }
        g.add_term(Monomial(e), c.clone());
    }
    Ok(PthPower::PowerRoot(g))
}

/// Product of the distinct factors of a factored polynomial, each once.
///
/// Factors are compared up to scalar multiples; constant factors are units
/// and are dropped.
pub fn square_free_part(factors: &[(MultiPoly, u32)]) -> Result<MultiPoly> {
    let Some((first, _)) = factors.first() else {
        return Err(Error::InvalidParameter("empty factor list".into()));
    };
    let (field, n) = (first.field(), first.nvars());
    let mut seen: Vec<MultiPoly> = Vec::new();
    for (g, mult) in factors {
        if g.field() != field || g.nvars() != n {
            return Err(Error::FieldMismatch("factors live in different rings".into()));
        }
        if g.is_zero() {
            return Err(Error::InvalidParameter("zero factor".into()));
        }
        if *mult == 0 || g.is_constant() {
            continue;
        }
        let m = g.monic();
        if !seen.contains(&m) {
            seen.push(m);
        }
    }
    Ok(seen
        .iter()
        .fold(MultiPoly::one(field, n), |acc, g| &acc * g))
}

/// `Π g_i^{m_i}`.
pub fn expand_factors(factors: &[(MultiPoly, u32)]) -> Result<MultiPoly> {
    let Some((first, _)) = factors.first() else {
        return Err(Error::InvalidParameter("empty factor list".into()));
    };
    let mut acc = MultiPoly::one(first.field(), first.nvars());
    for (g, m) in factors {
        if g.field() != first.field() || g.nvars() != first.nvars() {
            return Err(Error::FieldMismatch("factors live in different rings".into()));
        }
        acc = &acc * &g.pow(*m);
    }
    Ok(acc)
}
