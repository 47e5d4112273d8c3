//! Low-degree polynomials vanishing on finite point sets: the
//! dimension-count construction and the minimal-degree search.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;

use crate::algebra::{Field, Monomial, MultiPoly, Scalar};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::algebra::field::inv_mod;
use crate::linalg::{prime_below, rational_mod, rational_reconstruct_big, Echelon, CHECK_PRIME};
use crate::numeric::binom_u128;
use crate::rng::rng_from_seed;

/// Largest point set accepted by the dense constructions.
pub const MAX_POINTS: usize = 4096;

/// Fixed seed for the row order used in rank checks (any order gives the
/// same rank; a shuffled one reaches full rank sooner on structured sets).
const ROW_ORDER_SEED: u64 = 0x6a6f_696e_7473;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingResult {
    pub poly: MultiPoly,
    pub degree_bound_used: usize,
    pub nullspace_dim: usize,
}

/// `⌊(n!·m)^{1/n}⌋ + 1`, computed with an exact integer root.
pub fn dvir_degree(m: u64, n: usize) -> usize {
    let fact: BigUint = (1..=n as u64).map(BigUint::from).product();
    let root = (fact * BigUint::from(m)).nth_root(n as u32);
    usize::try_from(root).expect("degree fits in usize") + 1
}

/// Number of monomials of degree at most `d` in `n` variables.
pub fn monomial_count(n: usize, d: usize) -> u128 {
    binom_u128((d + n) as u64, n as u64).unwrap_or(u128::MAX)
}

/// Values of the given monomials at `x`.
pub fn evaluation_row(field: Field, x: &Point, monos: &[Monomial]) -> Vec<Scalar> {
    let d = monos.iter().map(Monomial::degree).max().unwrap_or(0) as usize;
    let powers: Vec<Vec<Scalar>> = x
        .coords()
        .iter()
        .map(|c| {
            let mut v = Vec::with_capacity(d + 1);
            v.push(field.one());
            for k in 0..d {
                v.push(field.mul(&v[k], c));
            }
            v
        })
        .collect();
    monos
        .iter()
        .map(|m| {
            m.exps()
                .iter()
                .enumerate()
                .fold(field.one(), |acc, (i, &e)| field.mul(&acc, &powers[i][e as usize]))
        })
        .collect()
}

fn check_points(field: Field, n: usize, points: &[Point]) -> Result<()> {
    if points.len() > MAX_POINTS {
        return Err(Error::CapExceeded(format!(
            "{} points exceed the dense elimination cap of {MAX_POINTS}",
            points.len()
        )));
    }
    for x in points {
        if x.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.dim(),
            });
        }
        if !x.coords().iter().all(|c| field.contains(c)) {
            return Err(Error::FieldMismatch("point coordinates are not in the field".into()));
        }
    }
    Ok(())
}

fn shuffled(points: &[Point]) -> Vec<&Point> {
    let mut order: Vec<&Point> = points.iter().collect();
    order.shuffle(&mut rng_from_seed(ROW_ORDER_SEED));
    order
}

fn eliminate(field: Field, points: &[&Point], monos: &[Monomial], stop_when_full: bool) -> Echelon {
    let mut e = Echelon::new(field, monos.len());
    for x in points {
        e.push_row(&evaluation_row(field, x, monos));
        if stop_when_full && e.is_full_column_rank() {
            break;
        }
    }
    e
}

/// Outcome of one evaluation-matrix analysis at a fixed degree.
enum Analysis {
    Full,
    Deficient {
        /// A nonzero null vector, unless only deficiency was asked for and
        /// dimension counting already proves it.
        vector: Option<Vec<Scalar>>,
        /// Exact nullspace dimension, when known.
        nullity: Option<usize>,
    },
}

fn vanishes_on(field: Field, monos: &[Monomial], v: &[Scalar], points: &[&Point]) -> bool {
    if field.is_rational() {
        return vanishes_on_rational(monos, v, points);
    }
    points.iter().all(|x| {
        let row = evaluation_row(field, x, monos);
        row.iter()
            .zip(v)
            .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
            .is_zero()
    })
}

/// Exact check over Q in integers: coefficients are scaled to a common
/// denominator, and at `x = (a_i/b_i)` each monomial is homogenized as
/// `∏ a_i^{e_i} b_i^{d-e_i}`.
fn vanishes_on_rational(monos: &[Monomial], v: &[Scalar], points: &[&Point]) -> bool {
    let rats: Vec<&BigRational> = v.iter().map(|c| c.as_rat().expect("rational scalar")).collect();
    let l = rats.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let coeffs: Vec<(usize, BigInt)> = rats
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(j, r)| (j, r.numer() * (&l / r.denom())))
        .collect();
    let d = monos.iter().map(Monomial::degree).max().unwrap_or(0) as usize;
    points.iter().all(|x| {
        let powers: Vec<(Vec<BigInt>, Vec<BigInt>)> = x
            .coords()
            .iter()
            .map(|c| {
                let r = c.as_rat().expect("rational scalar");
                let mut a = vec![BigInt::one()];
                let mut b = vec![BigInt::one()];
                for k in 0..d {
                    a.push(&a[k] * r.numer());
                    b.push(&b[k] * r.denom());
                }
                (a, b)
            })
            .collect();
        let mut sum = BigInt::zero();
        for (j, c) in &coeffs {
            let mut t = c.clone();
            for (i, &e) in monos[*j].exps().iter().enumerate() {
                let e = e as usize;
                t *= &powers[i].0[e];
                t *= &powers[i].1[d - e];
            }
            sum += t;
        }
        sum.is_zero()
    })
}

/// Prime small enough for delayed reduction, used for a quick full-rank
/// pass before the reconstruction prime.
const FAST_PRIME: u64 = 134_217_689;

/// Rational points reduced mod `p`, if no denominator vanishes there.
fn reduce_points(points: &[&Point], p: u64) -> Option<(Field, Vec<Point>)> {
    let fp = Field::prime(p).expect("prime");
    let pts = points
        .iter()
        .map(|x| {
            x.coords()
                .iter()
                .map(|c| rational_mod(c.as_rat()?, p).map(Scalar::Mod))
                .collect::<Option<Vec<_>>>()
                .map(Point)
        })
        .collect::<Option<Vec<_>>>()?;
    Some((fp, pts))
}

/// Upper limit on the primes combined by [`lift_null_vector`].
const MAX_LIFT_PRIMES: usize = 2048;

/// A rational null vector of the evaluation matrix, found by computing the
/// free-column null vector modulo a sequence of primes, combining them by
/// CRT, and lifting by rational reconstruction once the result vanishes
/// exactly. Returns the vector and the rank seen mod p.
fn lift_null_vector(points: &[&Point], monos: &[Monomial]) -> Option<(Vec<Scalar>, usize)> {
    let q = Field::rational();
    let mut p = CHECK_PRIME + 1;
    // reference pivot structure: the largest rank seen so far
    let mut reference: Option<(usize, usize)> = None;
    let mut residues: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut used = 0usize;
    let mut next_attempt = 1usize;
    for _ in 0..MAX_LIFT_PRIMES {
        p = prime_below(p);
        let Some((fp, reduced)) = reduce_points(points, p) else {
            continue;
        };
        let refs: Vec<&Point> = reduced.iter().collect();
        let e = eliminate(fp, &refs, monos, false);
        if e.is_full_column_rank() {
            return None;
        }
        let free = e.free_columns()[0];
        match reference {
            Some((rank, f)) if rank == e.rank() && f == free => {}
            Some((rank, _)) if rank > e.rank() => continue,
            _ => {
                // first prime, or the earlier ones were unlucky
                reference = Some((e.rank(), free));
                residues = vec![BigInt::zero(); monos.len()];
                modulus = BigInt::one();
                used = 0;
                next_attempt = 1;
            }
        }
        let v = e.null_vector(free);
        let pb = BigInt::from(p);
        // x ≡ r (mod M), x ≡ v (mod p): x = r + M·((v − r)·M⁻¹ mod p)
        let m_inv = BigInt::from(inv_mod((&modulus % &pb).to_u64().unwrap(), p).expect("coprime moduli"));
        for (r, vj) in residues.iter_mut().zip(&v) {
            let vj = BigInt::from(vj.as_mod().unwrap());
            let t = ((vj - &*r) * &m_inv).mod_floor(&pb);
            *r += &modulus * t;
        }
        modulus *= &pb;
        used += 1;
        if used == next_attempt {
            next_attempt *= 2;
            let lifted = residues
                .iter()
                .map(|r| rational_reconstruct_big(r, &modulus).map(Scalar::Rat))
                .collect::<Option<Vec<_>>>();
            if let Some(v) = lifted.filter(|v| vanishes_on(q, monos, v, points)) {
                return Some((v, reference.unwrap().0));
            }
        }
    }
    None
}

/// Over Q the matrix is first reduced mod primes: full rank there proves
/// full rank over Q, and a null vector lifted by rational
/// reconstruction proves deficiency once it checks out exactly. Exact
/// fraction-free elimination covers the remaining (unlucky) cases.
fn analyze(field: Field, points: &[&Point], monos: &[Monomial], want_vector: bool) -> Analysis {
    let m = points.len();
    let c = monos.len();
    let counting = m < c;
    if counting && !want_vector {
        return Analysis::Deficient {
            vector: None,
            nullity: None,
        };
    }
    if field.is_rational() {
        if !counting {
            if let Some((fp, reduced)) = reduce_points(points, FAST_PRIME) {
                let refs: Vec<&Point> = reduced.iter().collect();
                if eliminate(fp, &refs, monos, true).is_full_column_rank() {
                    return Analysis::Full;
                }
            }
        }
        if let Some((v, rank)) = lift_null_vector(points, monos) {
            return Analysis::Deficient {
                vector: Some(v),
                // rank over Q is at least the rank mod p and at most m
                nullity: (rank == m).then(|| c - m),
            };
        }
    }
    let e = eliminate(field, points, monos, !counting);
    if e.is_full_column_rank() {
        return Analysis::Full;
    }
    let free = e.free_columns();
    Analysis::Deficient {
        vector: Some(e.null_vector(free[0])),
        nullity: Some(free.len()),
    }
}

/// Whether no nonzero polynomial of degree `≤ d` vanishes on `points`.
pub fn full_rank_at(field: Field, n: usize, points: &[Point], d: usize) -> bool {
    if (points.len() as u128) < monomial_count(n, d) {
        return false;
    }
    let monos = Monomial::all_up_to(n, d as u32);
    matches!(analyze(field, &shuffled(points), &monos, false), Analysis::Full)
}

fn poly_from_vector(field: Field, n: usize, monos: &[Monomial], v: &[Scalar]) -> Result<MultiPoly> {
    MultiPoly::from_terms(
        field,
        n,
        monos.iter().cloned().zip(v.iter().cloned()).filter(|(_, c)| !c.is_zero()),
    )
}

fn check_vanishes(f: &MultiPoly, points: &[Point]) -> Result<()> {
    if f.is_zero() {
        return Err(Error::InvariantViolation("vanishing polynomial is zero".into()));
    }
    let (monos, coeffs): (Vec<Monomial>, Vec<Scalar>) = f.terms().map(|(m, c)| (m.clone(), c.clone())).unzip();
    let refs: Vec<&Point> = points.iter().collect();
    if !vanishes_on(f.field(), &monos, &coeffs, &refs) {
        return Err(Error::InvariantViolation("constructed polynomial does not vanish".into()));
    }
    Ok(())
}

/// A nonzero polynomial of degree at most `⌊(n!m)^{1/n}⌋+1` vanishing on
/// `points` in `F^n`; the empty set gives the constant 1.
pub fn dvir_polynomial(field: Field, n: usize, points: &[Point]) -> Result<VanishingResult> {
    check_points(field, n, points)?;
    if points.is_empty() {
        return Ok(VanishingResult {
            poly: MultiPoly::one(field, n),
            degree_bound_used: 0,
            nullspace_dim: 1,
        });
    }
    let d = dvir_degree(points.len() as u64, n);
    let monos = Monomial::all_up_to(n, d as u32);
    debug_assert!(monos.len() > points.len());
    let rows: Vec<&Point> = points.iter().collect();
    let Analysis::Deficient { vector, nullity } = analyze(field, &rows, &monos, true) else {
        unreachable!("more monomials than points");
    };
    let poly = poly_from_vector(field, n, &monos, &vector.expect("vector requested"))?;
    check_vanishes(&poly, points)?;
    let nullspace_dim = match nullity {
        Some(k) => k,
        None => eliminate(field, &rows, &monos, false).free_columns().len(),
    };
    Ok(VanishingResult {
        poly,
        degree_bound_used: d,
        nullspace_dim,
    })
}

/// Smallest `d` admitting a nonzero vanishing polynomial of degree `≤ d`,
/// with such a polynomial (of degree exactly `d`).
pub fn minimal_vanishing_degree(field: Field, n: usize, points: &[Point]) -> Result<(usize, MultiPoly)> {
    check_points(field, n, points)?;
    if points.is_empty() {
        return Ok((0, MultiPoly::one(field, n)));
    }
    let order = shuffled(points);
    for d in 0.. {
        let monos = Monomial::all_up_to(n, d as u32);
        if let Analysis::Deficient { vector, .. } = analyze(field, &order, &monos, true) {
            let poly = poly_from_vector(field, n, &monos, &vector.expect("vector requested"))?;
            check_vanishes(&poly, points)?;
            if poly.degree() as usize != d {
                return Err(Error::InvariantViolation("minimal polynomial has the wrong degree".into()));
            }
            return Ok((d, poly));
        }
    }
    unreachable!("a nonzero vanishing polynomial exists in degree dvir_degree(m, n)")
}

/// The minimal vanishing degree alone. `upper` is a degree known to admit a
/// vanishing polynomial (for instance the value for a superset), which
/// lets the search walk downward from it.
pub fn minimal_degree_below(field: Field, n: usize, points: &[Point], upper: Option<usize>) -> Result<usize> {
    check_points(field, n, points)?;
    if points.is_empty() {
        return Ok(0);
    }
    match upper {
        None => {
            let mut d = 0;
            while full_rank_at(field, n, points, d) {
                d += 1;
            }
            Ok(d)
        }
        Some(mut d) => {
            while d > 0 && !full_rank_at(field, n, points, d - 1) {
                d -= 1;
            }
            Ok(d)
        }
    }
}
