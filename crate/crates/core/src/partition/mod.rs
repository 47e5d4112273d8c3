//! Polynomial partitioning: iterated polynomial bisection into sign cells,
//! verified exactly.

pub mod bisect;
pub mod roots;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use bisect::{ham_sandwich_bisect, side_counts, BisectMode, BisectOptions, SideCounts};
pub use roots::{isolate_real_roots, sample_points};

use crate::algebra::{restrict_to_line, Field, MultiPoly, UniPoly};
use crate::error::{Error, Result};
use crate::geometry::{Line, Point};
use crate::numeric::binom_u128;

/// A rational point as integer numerators over one positive denominator.
#[derive(Clone, Debug)]
pub(crate) struct IntPoint {
    nums: Vec<BigInt>,
    den: BigInt,
}

impl IntPoint {
    pub(crate) fn new(x: &Point) -> Self {
        let rats: Vec<&BigRational> = x.coords().iter().map(|c| c.as_rat().expect("rational point")).collect();
        let den = rats.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
        IntPoint {
            nums: rats.iter().map(|r| r.numer() * (&den / r.denom())).collect(),
            den,
        }
    }

    pub(crate) fn coord(&self, i: usize) -> BigRational {
        BigRational::new(self.nums[i].clone(), self.den.clone())
    }

    pub(crate) fn dot(&self, v: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (i, c) in v.iter().enumerate() {
            s += c * &self.coord(i);
        }
        s
    }

    pub(crate) fn to_f64(&self) -> Vec<f64> {
        (0..self.nums.len())
            .map(|i| crate::algebra::field::ratio_to_f64(&self.coord(i)))
            .collect()
    }
}

/// Exact sign of a rational polynomial in integer arithmetic: with integer
/// coefficients `c_m` and `x = a/b`, `b^D·p(x) = Σ c_m a^m b^{D-|m|}`.
pub(crate) struct SignEvaluator {
    terms: Vec<(Vec<u32>, BigInt)>,
    degree: u32,
}

impl SignEvaluator {
    pub(crate) fn new(p: &MultiPoly) -> Self {
        let l = p
            .terms()
            .fold(BigInt::one(), |l, (_, c)| l.lcm(c.as_rat().expect("rational polynomial").denom()));
        SignEvaluator {
            terms: p
                .terms()
                .map(|(m, c)| {
                    let r = c.as_rat().unwrap();
                    (m.exps().to_vec(), r.numer() * (&l / r.denom()))
                })
                .collect(),
            degree: p.degree(),
        }
    }

    pub(crate) fn sign(&self, x: &IntPoint) -> i8 {
        let d = self.degree as usize;
        let pow = |b: &BigInt| {
            let mut v = vec![BigInt::one()];
            for k in 0..d {
                v.push(&v[k] * b);
            }
            v
        };
        let a: Vec<Vec<BigInt>> = x.nums.iter().map(pow).collect();
        let b = pow(&x.den);
        let mut s = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &a[i][k as usize];
                }
            }
            t *= &b[d - e.iter().sum::<u32>() as usize];
            s += t;
        }
        match s.sign() {
            num_bigint::Sign::Plus => 1,
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionPolynomial {
    pub factors: Vec<MultiPoly>,
    pub total_degree: u32,
}

impl PartitionPolynomial {
    pub fn steps(&self) -> usize {
        self.factors.len()
    }
}

/// Sign vector of a cell: `true` for `p_j > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub Vec<bool>);

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.0 {
            f.write_str(if s { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for CellId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct PartitionOptions {
    /// Use exact lines for the first two steps (in the plane).
    pub exact_linear_steps: bool,
    /// `C` in the cell bound `max cell ≤ C·S/2^J`.
    pub cell_constant: u64,
    pub bisect: BisectOptions,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            exact_linear_steps: true,
            cell_constant: 4,
            bisect: BisectOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PartitionResult {
    pub poly: PartitionPolynomial,
    pub cells: BTreeMap<CellId, Vec<Point>>,
    pub on_zero_set: Vec<Point>,
    pub max_cell: usize,
    /// `max cell ≤ C·S/2^J`.
    pub cell_bound_holds: bool,
    /// `2^J ≥ d^n / 2^n`.
    pub degree_budget_met: bool,
    /// `2^J ≥ d^n`, the full cell count targeted by the construction;
    /// generally out of reach with `Σ deg p_j ≤ d` when every step must
    /// bisect all cells.
    pub cell_target_met: bool,
}

/// Smallest degree whose polynomials can bisect `sets` point sets in `F^n`.
pub fn bisection_degree(sets: usize, n: usize) -> u32 {
    let mut d = 1u32;
    while binom_u128(d as u64 + n as u64, n as u64).unwrap_or(u128::MAX) - 1 < sets as u128 {
        d += 1;
    }
    d
}

fn pow2_ge(j: usize, num: u128) -> bool {
    j >= 127 || (1u128 << j) >= num
}

/// Iterated bisection: step `j` splits every nonempty cell with one
/// polynomial, while the degree sum stays within `d`.
pub fn gk_partition(points: &[Point], d: u32, opts: &PartitionOptions) -> Result<PartitionResult> {
    if d <= 1 {
        return Err(Error::InvalidParameter(format!("partition degree must exceed 1, got {d}")));
    }
    let n = points.first().map(Point::dim).unwrap_or(2);
    for x in points {
        if x.dim() != n || x.coords().iter().any(|c| c.as_rat().is_none()) {
            return Err(Error::InvalidParameter("partitioning needs rational points of one dimension".into()));
        }
    }
    let ints: Vec<IntPoint> = points.iter().map(IntPoint::new).collect();
    let mut cells: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    cells.insert(Vec::new(), (0..points.len()).collect());
    let mut zero: Vec<usize> = Vec::new();
    let mut factors: Vec<MultiPoly> = Vec::new();
    let mut total = 0u32;
    let target = (d as u128).pow(n as u32);
    loop {
        let j = factors.len() + 1;
        if pow2_ge(factors.len(), target) {
            break;
        }
        let live: Vec<(&Vec<bool>, &Vec<usize>)> = cells.iter().filter(|(_, v)| !v.is_empty()).collect();
        if live.is_empty() {
            break;
        }
        let linear = opts.exact_linear_steps && j <= 2;
        let deg = if linear { 1 } else { bisection_degree(live.len(), n) };
        if total + deg > d {
            break;
        }
        let sets: Vec<Vec<IntPoint>> = live.iter().map(|(_, v)| v.iter().map(|&i| ints[i].clone()).collect()).collect();
        let mut bo = opts.bisect.clone();
        bo.seed = crate::rng::substream_seed(opts.bisect.seed, j as u64);
        if linear && n == 2 {
            bo.mode = BisectMode::ExactD1;
        }
        let p = bisect::bisect_int(&sets, n, deg, &bo)?;
        let ev = SignEvaluator::new(&p);
        let mut next: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
        for (id, members) in cells {
            for i in members {
                match ev.sign(&ints[i]) {
                    0 => zero.push(i),
                    s => {
                        let mut key = id.clone();
                        key.push(s > 0);
                        next.entry(key).or_default().push(i);
                    }
                }
            }
        }
        cells = next;
        total += p.degree();
        factors.push(p);
    }
    let jn = factors.len();
    let max_cell = cells.values().map(Vec::len).max().unwrap_or(0);
    let s = points.len() as u128;
    let cell_bound_holds = jn >= 127 || (max_cell as u128) << jn <= opts.cell_constant as u128 * s;
    zero.sort_unstable();
    Ok(PartitionResult {
        poly: PartitionPolynomial {
            factors,
            total_degree: total,
        },
        cells: cells
            .into_iter()
            .map(|(k, v)| (CellId(k), v.into_iter().map(|i| points[i].clone()).collect()))
            .collect(),
        on_zero_set: zero.into_iter().map(|i| points[i].clone()).collect(),
        max_cell,
        cell_bound_holds,
        degree_budget_met: pow2_ge(jn, target >> n),
        cell_target_met: pow2_ge(jn, target),
    })
}

/// Number of distinct sign cells `line` passes through.
pub fn line_cell_crossings(line: &Line, poly: &PartitionPolynomial) -> Result<usize> {
    let q = Field::rational();
    if line.base().coords().iter().any(|c| c.as_rat().is_none()) {
        return Err(Error::FieldMismatch("crossings need a rational line".into()));
    }
    let restricted: Vec<UniPoly> = poly
        .factors
        .iter()
        .map(|f| restrict_to_line(f, line.base().coords(), line.dir().coords()))
        .collect::<Result<_>>()?;
    if restricted.iter().any(UniPoly::is_zero) {
        return Err(Error::LineInZeroSet);
    }
    let product = restricted.iter().fold(UniPoly::constant(q, q.one()), |acc, r| acc.mul(r));
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    for t in sample_points(&product) {
        let v: Vec<bool> = restricted.iter().map(|r| roots::sign_at(r, &t) > 0).collect();
        seen.insert(v);
    }
    Ok(seen.len())
}

/// Every point appears exactly once across cells and the zero set, and
/// cell signs match.
pub fn verify_partition(points: &[Point], result: &PartitionResult) -> bool {
    let placed: usize = result.cells.values().map(Vec::len).sum::<usize>() + result.on_zero_set.len();
    if placed != points.len() {
        return false;
    }
    let evs: Vec<SignEvaluator> = result.poly.factors.iter().map(SignEvaluator::new).collect();
    let mut seen: BTreeSet<&Point> = BTreeSet::new();
    for (id, members) in &result.cells {
        for x in members {
            let ip = IntPoint::new(x);
            if !seen.insert(x) || evs.iter().zip(&id.0).any(|(e, &s)| e.sign(&ip) != if s { 1 } else { -1 }) {
                return false;
            }
        }
    }
    for x in &result.on_zero_set {
        let ip = IntPoint::new(x);
        if !seen.insert(x) || evs.iter().all(|e| e.sign(&ip) != 0) {
            return false;
        }
    }
    let all: BTreeSet<&Point> = points.iter().collect();
    all == seen
}

/// `p` as a product of its factors (for display and export).
pub fn expand_partition(poly: &PartitionPolynomial, n: usize) -> MultiPoly {
    let q = Field::rational();
    poly.factors
        .iter()
        .fold(MultiPoly::constant(q, n, q.one()), |acc, f| &acc * f)
}
