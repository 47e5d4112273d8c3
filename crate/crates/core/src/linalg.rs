//! Exact dense linear algebra: incremental row echelon forms, rank and
//! nullspaces over F_p and Q.
//!
//! Prime-field rows use delayed reduction: accumulators are `u64` and absorb
//! as many unreduced products as fit before overflow, so the inner loop is a
//! plain multiply-add.

use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::field::{mul_mod, Field, FieldKind, Scalar};

pub(crate) trait Kernel {
    type Vector: Clone;
    fn load(&self, row: &[Scalar]) -> Self::Vector;
    /// Clears `r[piv]` using the stored row `b` (pivot at `piv`).
    fn eliminate(&self, r: &mut Self::Vector, b: &Self::Vector, piv: usize);
    /// Fully reduces `r` and brings it to the kernel's stored form; returns
    /// the index of its first nonzero entry, or `None` for the zero vector.
    fn normalize(&self, r: &mut Self::Vector) -> Option<usize>;
    fn get(&self, r: &Self::Vector, j: usize) -> Scalar;
}

/// F_p kernel with delayed reduction.
#[derive(Clone, Debug)]
pub(crate) struct ModP {
    p: u64,
    /// Products that may be added to a reduced entry before overflow; 0
    /// means every product must be reduced immediately (p ≥ 2^32).
    budget: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct ModVec {
    v: Vec<u64>,
    pending: u64,
}

impl ModP {
    pub(crate) fn new(p: u64) -> Self {
        let sq = (p as u128 - 1) * (p as u128 - 1);
        let budget = if sq == 0 {
            u64::MAX
        } else {
            ((u64::MAX - p) as u128 / sq).min(u64::MAX as u128) as u64
        };
        ModP { p, budget }
    }

    fn reduce(&self, r: &mut ModVec) {
        if r.pending > 0 {
            for x in &mut r.v {
                *x %= self.p;
            }
            r.pending = 0;
        }
    }
}

impl Kernel for ModP {
    type Vector = ModVec;

    fn load(&self, row: &[Scalar]) -> ModVec {
        ModVec {
            v: row.iter().map(|s| s.as_mod().expect("prime-field scalar")).collect(),
            pending: 0,
        }
    }

    fn eliminate(&self, r: &mut ModVec, b: &ModVec, piv: usize) {
        let p = self.p;
        let c = r.v[piv] % p;
        if c == 0 {
            return;
        }
        let m = p - c;
        if self.budget == 0 {
            for (x, &y) in r.v.iter_mut().zip(&b.v) {
                *x = (*x + mul_mod(m, y, p)) % p;
            }
            return;
        }
        if r.pending >= self.budget {
            self.reduce(r);
        }
        for (x, &y) in r.v.iter_mut().zip(&b.v) {
            *x += m * y;
        }
        r.pending += 1;
        // the pivot entry is now ≡ 0; store it canonically
        r.v[piv] %= p;
    }

    fn normalize(&self, r: &mut ModVec) -> Option<usize> {
        self.reduce(r);
        let piv = r.v.iter().position(|&x| x != 0)?;
        let inv = crate::algebra::field::inv_mod(r.v[piv], self.p).expect("nonzero");
        if inv != 1 {
            for x in &mut r.v {
                *x = mul_mod(*x, inv, self.p);
            }
        }
        Some(piv)
    }

    fn get(&self, r: &ModVec, j: usize) -> Scalar {
        Scalar::Mod(r.v[j] % self.p)
    }
}

/// Q kernel on integer rows: each row is scaled to coprime integers, and
/// elimination is fraction-free (`r ← b_piv·r − r_piv·b`, then divided by
/// its content), which avoids a gcd per entry operation.
#[derive(Clone, Debug)]
pub(crate) struct Rat;

fn remove_content(r: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in r.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() {
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x /= &g;
            }
        }
    }
}

impl Kernel for Rat {
    type Vector = Vec<BigInt>;

    fn load(&self, row: &[Scalar]) -> Vec<BigInt> {
        let rats: Vec<&BigRational> = row.iter().map(|s| s.as_rat().expect("rational scalar")).collect();
        let l = rats.iter().fold(BigInt::one(), |l, r| if r.denom().is_one() { l } else { l.lcm(r.denom()) });
        let mut v: Vec<BigInt> = rats.iter().map(|r| r.numer() * (&l / r.denom())).collect();
        remove_content(&mut v);
        v
    }

    fn eliminate(&self, r: &mut Vec<BigInt>, b: &Vec<BigInt>, piv: usize) {
        if r[piv].is_zero() {
            return;
        }
        let g = r[piv].gcd(&b[piv]);
        let (mr, mb) = (&b[piv] / &g, &r[piv] / &g);
        for (x, y) in r.iter_mut().zip(b) {
            if y.is_zero() {
                if !x.is_zero() {
                    *x *= &mr;
                }
            } else {
                *x = &*x * &mr - &mb * y;
            }
        }
        remove_content(r);
    }

    fn normalize(&self, r: &mut Vec<BigInt>) -> Option<usize> {
        let piv = r.iter().position(|x| !x.is_zero())?;
        if r[piv].is_negative() {
            for x in r.iter_mut() {
                *x = -&*x;
            }
        }
        Some(piv)
    }

    fn get(&self, r: &Vec<BigInt>, j: usize) -> Scalar {
        Scalar::Rat(BigRational::from_integer(r[j].clone()))
    }
}

/// Row echelon form built one row at a time.
#[derive(Clone, Debug)]
pub(crate) struct Ech<K: Kernel> {
    k: K,
    ncols: usize,
    rows: Vec<K::Vector>,
    pivots: Vec<usize>,
}

impl<K: Kernel> Ech<K> {
    fn new(k: K, ncols: usize) -> Self {
        Ech {
            k,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn push(&mut self, row: &[Scalar]) -> bool {
        assert_eq!(row.len(), self.ncols, "row length does not match column count");
        let mut r = self.k.load(row);
        // every stored row vanishes at the pivots of the rows before it, so
        // a single pass in insertion order clears all pivot columns
        for (b, &piv) in self.rows.iter().zip(&self.pivots) {
            self.k.eliminate(&mut r, b, piv);
        }
        match self.k.normalize(&mut r) {
            Some(piv) => {
                self.rows.push(r);
                self.pivots.push(piv);
                true
            }
            None => false,
        }
    }

    /// The nullspace vector with `x_free = 1` and all other free
    /// coordinates 0, by back-substitution.
    fn null_vector(&self, free: usize, field: Field) -> Vec<Scalar> {
        let mut x = vec![field.zero(); self.ncols];
        x[free] = field.one();
        for (b, &piv) in self.rows.iter().zip(&self.pivots).rev() {
            // row · x = 0; later pivots are already solved and earlier
            // pivots have zero coefficients in this row
            let mut s = field.zero();
            for (j, xj) in x.iter().enumerate() {
                if j != piv && !xj.is_zero() {
                    let c = self.k.get(b, j);
                    if !c.is_zero() {
                        s = field.add(&s, &field.mul(&c, xj));
                    }
                }
            }
            let lead = self.k.get(b, piv);
            x[piv] = field.neg(&field.div(&s, &lead).expect("nonzero pivot"));
        }
        x
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Mod(Ech<ModP>),
    Rat(Ech<Rat>),
}

/// Incremental exact row echelon form over a [`Field`].
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    inner: Inner,
}

impl Echelon {
    pub fn new(field: Field, ncols: usize) -> Self {
        let inner = match field.kind() {
            FieldKind::Prime(p) => Inner::Mod(Ech::new(ModP::new(p), ncols)),
            FieldKind::Rational => Inner::Rat(Ech::new(Rat, ncols)),
        };
        Echelon { field, inner }
    }

    pub fn ncols(&self) -> usize {
        match &self.inner {
            Inner::Mod(e) => e.ncols,
            Inner::Rat(e) => e.ncols,
        }
    }

    /// Adds a row; returns whether the rank increased.
    pub fn push_row(&mut self, row: &[Scalar]) -> bool {
        match &mut self.inner {
            Inner::Mod(e) => e.push(row),
            Inner::Rat(e) => e.push(row),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots().len()
    }

    pub fn is_full_column_rank(&self) -> bool {
        self.rank() == self.ncols()
    }

    /// Pivot columns in insertion order.
    pub fn pivots(&self) -> &[usize] {
        match &self.inner {
            Inner::Mod(e) => &e.pivots,
            Inner::Rat(e) => &e.pivots,
        }
    }

    /// Non-pivot columns in ascending order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ncols()];
        for &p in self.pivots() {
            is_piv[p] = true;
        }
        (0..self.ncols()).filter(|&j| !is_piv[j]).collect()
    }

    /// Nullspace vector attached to the given free column.
    pub fn null_vector(&self, free: usize) -> Vec<Scalar> {
        assert!(!self.pivots().contains(&free), "column {free} is a pivot column");
        match &self.inner {
            Inner::Mod(e) => e.null_vector(free, self.field),
            Inner::Rat(e) => e.null_vector(free, self.field),
        }
    }

    /// Basis of the right nullspace, one vector per free column in
    /// ascending order.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        self.free_columns().into_iter().map(|f| self.null_vector(f)).collect()
    }
}

pub fn rank(field: Field, rows: &[Vec<Scalar>], ncols: usize) -> usize {
    let mut e = Echelon::new(field, ncols);
    for r in rows {
        e.push_row(r);
        if e.is_full_column_rank() {
            break;
        }
    }
    e.rank()
}

/// Basis of `{x : A x = 0}` for the matrix with the given rows.
pub fn nullspace(field: Field, rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut e = Echelon::new(field, ncols);
    for r in rows {
        e.push_row(r);
    }
    e.nullspace()
}

/// `A·x`.
pub fn mat_vec(field: Field, rows: &[Vec<Scalar>], x: &[Scalar]) -> Vec<Scalar> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(x)
                .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
        })
        .collect()
}

/// Prime used to certify full rank of rational matrices: the rank of a
/// reduction mod p never exceeds the rank over Q.
pub const CHECK_PRIME: u64 = (1 << 61) - 1;

/// `r mod p`, or `None` if `p` divides the denominator.
pub fn rational_mod(r: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = r.denom().mod_floor(&pb).to_u64().unwrap();
    let n = r.numer().mod_floor(&pb).to_u64().unwrap();
    Some(mul_mod(n, crate::algebra::field::inv_mod(d, p)?, p))
}

/// The fraction `a/b` with `|a|, b ≤ √(p/2)` and `a ≡ b·v (mod p)`, if any.
pub fn rational_reconstruct(v: u64, p: u64) -> Option<BigRational> {
    rational_reconstruct_big(&BigInt::from(v), &BigInt::from(p))
}

/// [`rational_reconstruct`] for an arbitrary modulus `m`.
pub fn rational_reconstruct_big(v: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), v.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let (q, r) = r0.div_rem(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Largest prime below `p`.
pub fn prime_below(mut p: u64) -> u64 {
    loop {
        p -= 1;
        if crate::algebra::is_prime_u64(p) {
            return p;
        }
    }
}
