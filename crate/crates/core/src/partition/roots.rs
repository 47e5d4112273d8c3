//! Real root isolation for univariate polynomials over Q via Sturm
//! sequences, with exact rational endpoints.
//!
//! Everything runs on primitive integer coefficient vectors: remainders
//! are pseudo-remainders scaled by positive constants, so signs are kept
//! while coefficients stay small.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::UniPoly;

/// Integer polynomial, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
struct IntPoly(Vec<BigInt>);

impl IntPoly {
    fn from_uni(p: &UniPoly) -> Self {
        let rats: Vec<&BigRational> = p.coeffs().iter().map(|c| c.as_rat().expect("rational polynomial")).collect();
        let l = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        IntPoly(rats.iter().map(|r| r.numer() * (&l / r.denom())).collect()).primitive()
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    /// Divide by the positive content.
    fn primitive(self) -> Self {
        let mut s = self.trim();
        let g = s.0.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in &mut s.0 {
                *c /= &g;
            }
        }
        s
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.0.last().expect("nonzero")
    }

    fn derivative(&self) -> Self {
        IntPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect()).trim()
    }

    /// A positive multiple of `self mod d`.
    fn prem(&self, d: &IntPoly) -> Self {
        let mut r = self.0.clone();
        let dl = d.lead().abs();
        let neg = d.lead().is_negative();
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let mut c = r.last().unwrap().clone();
            if neg {
                c = -c;
            }
            for x in r.iter_mut() {
                *x *= &dl;
            }
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly(r).primitive()
    }

    fn neg(mut self) -> Self {
        for c in &mut self.0 {
            *c = -&*c;
        }
        self
    }

    fn gcd(&self, other: &IntPoly) -> Self {
        let (mut a, mut b) = (self.clone().primitive(), other.clone().primitive());
        while !b.is_zero() {
            let r = a.prem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// Exact quotient by a divisor, made primitive.
    fn div_exact(&self, d: &IntPoly) -> Self {
        let dd = d.degree();
        if self.degree() < dd {
            return IntPoly(vec![BigInt::one()]);
        }
        let mut r: Vec<BigRational> = self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let lead = BigRational::from_integer(d.lead().clone());
        let mut q = vec![BigRational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &c * BigRational::from_integer(dc.clone());
            }
            q[k] = c;
        }
        let l = q.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        IntPoly(q.iter().map(|r| r.numer() * (&l / r.denom())).collect()).primitive()
    }

    fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.clone()
        } else {
            self.div_exact(&g)
        }
    }

    /// Sign of the value at `t`, via the homogenized integer sum.
    fn sign(&self, t: &BigRational) -> i8 {
        let (n, d) = (t.numer(), t.denom());
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.0.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        // acc = d^deg · p(t), and d > 0
        match acc.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}

/// Sign of `p(t)`: -1, 0 or 1.
pub fn sign_at(p: &UniPoly, t: &BigRational) -> i8 {
    IntPoly::from_uni(p).sign(t)
}

struct Sturm {
    seq: Vec<IntPoly>,
}

impl Sturm {
    /// Sequence of a square-free nonconstant polynomial.
    fn new(p: &IntPoly) -> Self {
        let mut seq = vec![p.clone(), p.derivative().primitive()];
        loop {
            let n = seq.len();
            let r = seq[n - 2].prem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        Sturm { seq }
    }

    /// Sign changes of the sequence at `t`, skipping zeros.
    fn variations(&self, t: &BigRational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for q in &self.seq {
            let s = q.sign(t);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// A power of two strictly above every real root's absolute value
/// (Cauchy bound, rounded up so bisection midpoints stay dyadic).
fn root_bound(p: &IntPoly) -> BigRational {
    let lead = p.lead().abs();
    let max = p.0.iter().map(|c| c.abs()).max().unwrap_or_default();
    // 1 + max/lead ≤ 2^k
    let ratio = (&max + &lead - BigInt::one()) / &lead + BigInt::one();
    BigRational::from_integer(BigInt::one() << ratio.bits())
}

/// Disjoint open intervals `(a_i, b_i)`, sorted, each holding exactly one
/// real root of `p`, with endpoints that are not roots. Degenerate
/// intervals `a = b` denote an exact rational root.
pub fn isolate_real_roots(p: &UniPoly) -> Vec<(BigRational, BigRational)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    isolate(&IntPoly::from_uni(p).squarefree())
}

fn isolate(sf: &IntPoly) -> Vec<(BigRational, BigRational)> {
    let sturm = Sturm::new(sf);
    let r = root_bound(sf);
    let mut out = Vec::new();
    let mut stack = vec![(-r.clone(), r)];
    // interval (a, b] with a, b not roots, except exact roots found by
    // hitting a midpoint
    while let Some((a, b)) = stack.pop() {
        let k = sturm.count(&a, &b);
        if k == 0 {
            continue;
        }
        if k == 1 {
            out.push((a, b));
            continue;
        }
        let mid = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        if sf.sign(&mid) == 0 {
            // shrink around the exact root until it is alone
            let mut w = (&b - &a) / BigRational::from_integer(BigInt::from(4));
            loop {
                let (lo, hi) = (&mid - &w, &mid + &w);
                if sf.sign(&lo) != 0 && sf.sign(&hi) != 0 && sturm.count(&lo, &hi) == 1 {
                    out.push((mid.clone(), mid.clone()));
                    stack.push((a.clone(), lo));
                    stack.push((hi, b.clone()));
                    break;
                }
                w /= BigRational::from_integer(BigInt::from(2));
            }
            continue;
        }
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// One rational sample in each open interval between consecutive distinct
/// real roots of `p` (and beyond the extreme ones).
pub fn sample_points(p: &UniPoly) -> Vec<BigRational> {
    if p.degree().unwrap_or(0) == 0 {
        return vec![BigRational::zero()];
    }
    let sf = IntPoly::from_uni(p).squarefree();
    let roots = isolate(&sf);
    if roots.is_empty() {
        return vec![BigRational::zero()];
    }
    let one = BigRational::one();
    let mut out = vec![&roots[0].0 - &one];
    for w in roots.windows(2) {
        // b_i < a_{i+1} or they coincide at a non-root endpoint
        let (b, a) = (&w[0].1, &w[1].0);
        let t = if b < a {
            (b + a) / BigRational::from_integer(BigInt::from(2))
        } else {
            b.clone()
        };
        debug_assert!(sf.sign(&t) != 0);
        out.push(t);
    }
    out.push(&roots[roots.len() - 1].1 + &one);
    out
}
