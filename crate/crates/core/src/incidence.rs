//! Point-line incidences: exact counts, Szemerédi–Trotter ratios, rich
//! points and the full finite-field census.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Field, FieldKind, Scalar};
use crate::configs::enumerate_lines;
use crate::error::{Error, Result};
use crate::geometry::{canonicalize_line, concurrency_map, Arrangement, Direction, Line, Point};
use crate::numeric::Decimal;

/// Digits carried by [`IncidenceReport::st_rhs`] and [`IncidenceReport::ratio`].
pub const ST_SCALE: u32 = 30;

/// Largest `p^n` accepted by [`ff_full_census`].
pub const CENSUS_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IncidenceReport {
    #[serde(rename = "P")]
    pub points: u64,
    #[serde(rename = "L")]
    pub lines: u64,
    #[serde(rename = "I")]
    pub incidences: u64,
    /// `P^{2/3}L^{2/3} + P + L`.
    pub st_rhs: Decimal,
    /// `I / st_rhs`.
    pub ratio: Decimal,
}

impl IncidenceReport {
    pub fn new(points: u64, lines: u64, incidences: u64) -> Self {
        let pl = BigUint::from(points) * BigUint::from(lines);
        let st_rhs = Decimal::pow_ratio(&pl, &BigUint::from(1u32), 2, 3, ST_SCALE + 4)
            .add_integer(&BigInt::from(points + lines));
        let ratio = if points + lines == 0 {
            Decimal::zero(ST_SCALE)
        } else {
            st_rhs.divide_into(&BigInt::from(incidences), ST_SCALE)
        };
        IncidenceReport {
            points,
            lines,
            incidences,
            st_rhs: st_rhs.truncate(ST_SCALE),
            ratio,
        }
    }
}

fn check_inputs(points: &[Point], arr: &Arrangement) -> Result<()> {
    for x in points {
        if x.dim() != arr.n() {
            return Err(Error::DimensionMismatch {
                expected: arr.n(),
                found: x.dim(),
            });
        }
        if x.coords().iter().any(|c| !arr.field().contains(c)) {
            return Err(Error::FieldMismatch(format!("point coordinates are not in {}", arr.field())));
        }
    }
    Ok(())
}

/// `Σ_lines |points on line|`, each line counted with its weight.
fn count_by_lines(field: Field, points: &[Point], arr: &Arrangement) -> u64 {
    let set: HashSet<&Point> = points.iter().collect();
    let walk = match field.kind() {
        FieldKind::Prime(p) => p <= points.len() as u64,
        FieldKind::Rational => false,
    };
    (0..arr.len())
        .into_par_iter()
        .map(|i| {
            let l = &arr.lines()[i];
            let on = if walk {
                let p = field.modulus().unwrap();
                (0..p).filter(|&t| set.contains(&l.point_at(field, &Scalar::Mod(t)))).count()
            } else {
                points.iter().filter(|x| l.contains(field, x)).count()
            };
            on as u64 * arr.weight(i)
        })
        .sum()
}

/// `Σ_points |lines through point|`, via one lookup per direction class.
fn count_by_points(field: Field, points: &[Point], arr: &Arrangement) -> u64 {
    let mut weight: HashMap<&Line, u64> = HashMap::new();
    for (i, l) in arr.lines().iter().enumerate() {
        *weight.entry(l).or_default() += arr.weight(i);
    }
    let dirs: Vec<&Direction> = arr.lines().iter().map(Line::dir).collect::<BTreeSet<_>>().into_iter().collect();
    points
        .par_iter()
        .map(|x| {
            dirs.iter()
                .map(|d| {
                    let l = canonicalize_line(field, x.coords(), d.coords()).expect("validated inputs");
                    weight.get(&l).copied().unwrap_or(0)
                })
                .sum::<u64>()
        })
        .sum()
}

/// Points and lines over Q in machine integers. A line with primitive
/// integer direction `d` (pivot `k`) is determined by the values
/// `d_k·x_i − d_i·x_k`, which are constant along it.
mod small {
    use num_integer::Integer;
    use num_traits::ToPrimitive;

    use crate::geometry::{Line, Point};

    /// `x = nums / den` with `i64` entries.
    pub struct SmallPoint {
        nums: Vec<i64>,
        pub den: i64,
    }

    /// Reduced fractions `(num, den)`, `den > 0`, one per coordinate.
    pub type Key = Vec<(i64, i64)>;

    pub fn point(x: &Point) -> Option<SmallPoint> {
        let rats: Vec<_> = x.coords().iter().map(|c| c.as_rat()).collect::<Option<_>>()?;
        let mut den = 1i64;
        for r in &rats {
            let d = r.denom().to_i64()?;
            den = den.checked_mul(d / den.gcd(&d))?;
        }
        let nums = rats
            .iter()
            .map(|r| r.numer().to_i64()?.checked_mul(den / r.denom().to_i64()?))
            .collect::<Option<_>>()?;
        Some(SmallPoint { nums, den })
    }

    /// `d_k·x_i − d_i·x_k`; cannot overflow for `i64` inputs.
    fn cross(x: &SmallPoint, d: &[i64], k: usize, i: usize) -> i128 {
        d[k] as i128 * x.nums[i] as i128 - d[i] as i128 * x.nums[k] as i128
    }

    pub fn line_key(l: &Line) -> Option<(Vec<i64>, usize, Key)> {
        let dp = point(&Point(l.dir().coords().to_vec()))?;
        let g = dp.nums.iter().fold(0i64, |g, v| g.gcd(v));
        let d: Vec<i64> = dp.nums.iter().map(|v| v / g).collect();
        let k = l.dir().pivot();
        let b = point(l.base())?;
        let key = (0..d.len())
            .map(|i| {
                let num = cross(&b, &d, k, i);
                let g = num.gcd(&(b.den as i128));
                Some(((num / g).to_i64()?, (b.den as i128 / g).to_i64()?))
            })
            .collect::<Option<_>>()?;
        Some((d, k, key))
    }

    /// Whether `x` lies on the line with direction `d` and key `key`, by
    /// cross-multiplication.
    pub fn on_line(x: &SmallPoint, d: &[i64], k: usize, key: &Key) -> Option<bool> {
        for (i, &(kn, kd)) in key.iter().enumerate() {
            if i == k {
                continue;
            }
            let num = cross(x, d, k, i);
            let lhs = match i64::try_from(num) {
                Ok(n) => n as i128 * kd as i128,
                Err(_) => num.checked_mul(kd as i128)?,
            };
            if lhs != kn as i128 * x.den as i128 {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Residues modulo the Mersenne prime `2^61 − 1` serve as hash keys;
    /// matches are confirmed exactly.
    const M: u64 = (1 << 61) - 1;

    /// Folds coordinate residues into one value.
    const FOLD: u64 = 0x0123_4567_89ab_cdef;

    fn residue(v: i128) -> u64 {
        match i64::try_from(v) {
            Ok(small) => small.rem_euclid(M as i64) as u64,
            Err(_) => v.rem_euclid(M as i128) as u64,
        }
    }

    fn mulm(a: u64, b: u64) -> u64 {
        let p = a as u128 * b as u128;
        let r = (p as u64 & M) + (p >> 61) as u64;
        if r >= M {
            r - M
        } else {
            r
        }
    }

    fn addm(a: u64, b: u64) -> u64 {
        let r = a + b;
        if r >= M {
            r - M
        } else {
            r
        }
    }

    /// Inverse by Fermat. A denominator divisible by `M` only degrades
    /// hashing: matches are still confirmed exactly.
    pub fn inv_residue(v: i64) -> u64 {
        let (mut base, mut e, mut acc) = (residue(v as i128), M - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn key_hash(key: &Key) -> u64 {
        key.iter()
            .fold(0, |h, &(n, d)| addm(mulm(h, FOLD), mulm(residue(n as i128), inv_residue(d))))
    }

    pub fn point_hash(x: &SmallPoint, d: &[i64], k: usize, inv_den: u64) -> u64 {
        (0..d.len()).fold(0, |h, i| addm(mulm(h, FOLD), mulm(residue(cross(x, d, k, i)), inv_den)))
    }
}

/// Both incidence sums over Q in machine integers, or `None` on overflow.
fn count_small(points: &[Point], arr: &Arrangement) -> Option<(u64, u64)> {
    let pts: Vec<small::SmallPoint> = points.iter().map(small::point).collect::<Option<_>>()?;
    let lines: Vec<(Vec<i64>, usize, small::Key)> = arr.lines().iter().map(small::line_key).collect::<Option<_>>()?;
    let by_lines: Option<u64> = lines
        .par_iter()
        .enumerate()
        .map(|(i, (d, k, key))| {
            let mut on = 0u64;
            for x in &pts {
                if small::on_line(x, d, *k, key)? {
                    on += 1;
                }
            }
            Some(on * arr.weight(i))
        })
        .sum();
    // per direction class: key residues -> (exact key, weight) candidates
    type Bucket<'a> = HashMap<u64, Vec<(&'a small::Key, u64)>>;
    let mut classes: HashMap<(&[i64], usize), Bucket> = HashMap::new();
    for (i, (d, k, key)) in lines.iter().enumerate() {
        let h = small::key_hash(key);
        let bucket = classes.entry((d.as_slice(), *k)).or_default().entry(h).or_default();
        match bucket.iter_mut().find(|(other, _)| *other == key) {
            Some((_, w)) => *w += arr.weight(i),
            None => bucket.push((key, arr.weight(i))),
        }
    }
    let classes: Vec<_> = classes.into_iter().collect();
    let by_points: Option<u64> = pts
        .par_iter()
        .map(|x| {
            let inv_den = small::inv_residue(x.den);
            let mut s = 0u64;
            for ((d, k), buckets) in &classes {
                let h = small::point_hash(x, d, *k, inv_den);
                if let Some(cands) = buckets.get(&h) {
                    for (key, w) in cands {
                        if small::on_line(x, d, *k, key)? {
                            s += w;
                        }
                    }
                }
            }
            Some(s)
        })
        .sum();
    Some((by_lines?, by_points?))
}

/// Number of pairs `(x, l)` with `x ∈ l`. Duplicate points count once.
pub fn count_incidences(points: &[Point], arr: &Arrangement) -> Result<u64> {
    check_inputs(points, arr)?;
    let pts: Vec<Point> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let small = if arr.field().is_rational() { count_small(&pts, arr) } else { None };
    let (by_lines, by_points) = small
        .unwrap_or_else(|| (count_by_lines(arr.field(), &pts, arr), count_by_points(arr.field(), &pts, arr)));
    if by_lines != by_points {
        return Err(Error::InvariantViolation(format!(
            "incidences by lines ({by_lines}) and by points ({by_points}) disagree"
        )));
    }
    Ok(by_lines)
}

pub fn incidence_report(points: &[Point], arr: &Arrangement) -> Result<IncidenceReport> {
    let i = count_incidences(points, arr)?;
    let distinct = points.iter().collect::<HashSet<_>>().len();
    Ok(IncidenceReport::new(distinct as u64, arr.total_weight(), i))
}

/// Points on at least `k` lines of the arrangement (weights ignored), sorted.
pub fn rich_points(arr: &Arrangement, k: usize) -> Result<Vec<Point>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("richness must be at least 2, got {k}")));
    }
    Ok(concurrency_map(arr)
        .into_iter()
        .filter(|(_, ids)| ids.len() >= k)
        .map(|(x, _)| x)
        .collect())
}

/// All points of F_p^n, lexicographically.
pub fn all_points(field: Field, n: usize) -> Result<Vec<Point>> {
    let FieldKind::Prime(p) = field.kind() else {
        return Err(Error::FieldMismatch("needs a prime field".into()));
    };
    let total = (p as u128).checked_pow(n as u32).filter(|&t| t <= CENSUS_CAP).ok_or_else(|| {
        Error::CapExceeded(format!("F_{p}^{n} has more than {CENSUS_CAP} points"))
    })?;
    Ok((0..total as u64)
        .map(|mut idx| {
            let mut v = vec![Scalar::Mod(0); n];
            for k in (0..n).rev() {
                v[k] = Scalar::Mod(idx % p);
                idx /= p;
            }
            Point(v)
        })
        .collect())
}

/// Every point against every line of F_p^n.
pub fn ff_full_census(p: u64, n: usize) -> Result<IncidenceReport> {
    let field = Field::prime(p)?;
    if n < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    let points = all_points(field, n)?;
    let arr = Arrangement::new(field, n, enumerate_lines(field, n)?)?;
    let by_lines = count_by_lines(field, &points, &arr);
    let by_points = count_by_points(field, &points, &arr);
    if by_lines != by_points {
        return Err(Error::InvariantViolation(format!(
            "census sums disagree: {by_lines} by lines, {by_points} by points"
        )));
    }
    Ok(IncidenceReport::new(points.len() as u64, arr.len() as u64, by_lines))
}
