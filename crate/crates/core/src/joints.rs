//! Joints and multijoints with exact multiplicities, dyadic buckets and
//! weighted sums.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::field::{inv_mod, mul_mod};
use crate::algebra::{Field, FieldKind, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{concurrency_map, line_intersection, Arrangement, Direction, Intersection, Point};
use crate::numeric::{binom_u128, Decimal, REPORT_SCALE};

/// Largest `C(K, n)` for which spanning subsets are enumerated directly.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Largest `|S_1|·|S_2|·|S_3|` enumerated for one multijoint candidate.
pub const CROSS_TRIPLE_CAP: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointRecord {
    pub point: Point,
    /// Ids of all lines through the point, ascending.
    pub line_ids: Vec<usize>,
    /// Number of lines through the point.
    pub k: usize,
    /// Multiplicity: unordered spanning n-subsets of those lines.
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultijointRecord {
    pub point: Point,
    pub line_ids: [Vec<usize>; 3],
    /// Weighted line counts per collection.
    pub counts: [u64; 3],
    /// Weighted count of spanning cross-triples.
    pub n_prime: u64,
}

/// Dyadic bucket: `N_floor ≤ N < 2·N_floor`, `k_floor ≤ K < 2·k_floor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BucketKey {
    pub n_floor: u64,
    pub k_floor: u64,
}

pub fn floor_pow2(v: u64) -> u64 {
    assert!(v >= 1);
    1u64 << (63 - v.leading_zeros())
}

impl BucketKey {
    pub fn of(multiplicity: u64, k: usize) -> BucketKey {
        BucketKey {
            n_floor: floor_pow2(multiplicity),
            k_floor: floor_pow2(k as u64),
        }
    }
}

/// Directions prepared for many small determinant evaluations: residues
/// over F_p, primitive integer vectors over Q.
#[derive(Clone, Debug)]
pub(crate) enum RankOracle {
    Mod { p: u64, rows: Vec<Vec<u64>> },
    Int { rows: Vec<Vec<BigInt>>, small: Option<Vec<Vec<i64>>> },
}

/// Smallest integer multiple of a rational direction with coprime entries
/// and positive first nonzero entry.
pub(crate) fn primitive_integer(v: &[Scalar]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for s in v {
        let r = s.as_rat().expect("rational scalar");
        l = l.lcm(r.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|s| {
            let r = s.as_rat().unwrap();
            r.numer() * (&l / r.denom())
        })
        .collect();
    normalize_int(ints)
}

fn normalize_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    let neg = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    for x in &mut v {
        *x /= &g;
        if neg {
            *x = -&*x;
        }
    }
    v
}

fn normalize_mod(mut v: Vec<u64>, p: u64) -> Vec<u64> {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = inv_mod(lead, p).unwrap();
        for x in &mut v {
            *x = mul_mod(*x, inv, p);
        }
    }
    v
}

const SMALL_LIMIT: i64 = 1 << 40;

impl RankOracle {
    pub(crate) fn new(field: Field, dirs: &[&Direction]) -> Self {
        match field.kind() {
            FieldKind::Prime(p) => RankOracle::Mod {
                p,
                rows: dirs
                    .iter()
                    .map(|d| d.coords().iter().map(|s| s.as_mod().unwrap()).collect())
                    .collect(),
            },
            FieldKind::Rational => {
                let rows: Vec<Vec<BigInt>> = dirs.iter().map(|d| primitive_integer(d.coords())).collect();
                let small = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|x| x.to_i64().filter(|v| v.abs() < SMALL_LIMIT))
                            .collect::<Option<Vec<i64>>>()
                    })
                    .collect::<Option<Vec<_>>>();
                RankOracle::Int { rows, small }
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            RankOracle::Mod { rows, .. } => rows.len(),
            RankOracle::Int { rows, .. } => rows.len(),
        }
    }

    /// Whether the square matrix of the selected rows is nonsingular.
    pub(crate) fn spans(&self, idx: &[usize]) -> bool {
        match self {
            RankOracle::Mod { p, rows } => {
                let m: Vec<&[u64]> = idx.iter().map(|&i| rows[i].as_slice()).collect();
                det_mod_nonzero(&m, *p)
            }
            RankOracle::Int { rows, small } => {
                if idx.len() == 3 {
                    if let Some(s) = small {
                        let (a, b, c) = (&s[idx[0]], &s[idx[1]], &s[idx[2]]);
                        return det3_i128(a, b, c) != 0;
                    }
                }
                let m: Vec<&[BigInt]> = idx.iter().map(|&i| rows[i].as_slice()).collect();
                !det_bigint(&m).is_zero()
            }
        }
    }

    /// Projective class key of row `i` (rows are already normalized).
    fn class_key(&self, i: usize) -> Key {
        match self {
            RankOracle::Mod { rows, .. } => Key::Mod(rows[i].clone()),
            RankOracle::Int { rows, .. } => Key::Int(rows[i].clone()),
        }
    }

    /// Canonical normal of the plane spanned by rows `i`, `j` (n = 3).
    fn plane_key(&self, i: usize, j: usize) -> Key {
        match self {
            RankOracle::Mod { p, rows } => {
                let (a, b) = (&rows[i], &rows[j]);
                let p = *p;
                let c = |x: usize, y: usize| {
                    let l = mul_mod(a[x], b[y], p);
                    let r = mul_mod(a[y], b[x], p);
                    (l + p - r) % p
                };
                Key::Mod(normalize_mod(vec![c(1, 2), c(2, 0), c(0, 1)], p))
            }
            RankOracle::Int { rows, .. } => {
                let (a, b) = (&rows[i], &rows[j]);
                let c = |x: usize, y: usize| &a[x] * &b[y] - &a[y] * &b[x];
                Key::Int(normalize_int(vec![c(1, 2), c(2, 0), c(0, 1)]))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Mod(Vec<u64>),
    Int(Vec<BigInt>),
}

fn det3_i128(a: &[i64], b: &[i64], c: &[i64]) -> i128 {
    let m = |x: i64, y: i64, z: i64| x as i128 * y as i128 * z as i128;
    m(a[0], b[1], c[2]) + m(a[1], b[2], c[0]) + m(a[2], b[0], c[1])
        - m(a[2], b[1], c[0])
        - m(a[1], b[0], c[2])
        - m(a[0], b[2], c[1])
}

fn det_mod_nonzero(rows: &[&[u64]], p: u64) -> bool {
    let n = rows.len();
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
            return false;
        };
        m.swap(col, piv);
        let inv = inv_mod(m[col][col], p).unwrap();
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let f = mul_mod(m[r][col], inv, p);
            for c in col..n {
                let t = mul_mod(f, m[col][c], p);
                m[r][c] = (m[r][c] + p - t) % p;
            }
        }
    }
    true
}

/// Bareiss determinant over the integers.
fn det_bigint(rows: &[&[BigInt]]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Calls `f` on every `n`-subset of `0..k` in lexicographic order.
fn for_each_subset(k: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if n > k {
        return;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        f(&idx);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + k - n {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Spanning `n`-subsets by direct enumeration.
pub fn multiplicity_enumerate(field: Field, dirs: &[&Direction], n: usize) -> u64 {
    let oracle = RankOracle::new(field, dirs);
    let mut count = 0u64;
    for_each_subset(oracle.len(), n, |s| {
        if oracle.spans(s) {
            count += 1;
        }
    });
    count
}

/// Spanning triples in F^3 counted by inclusion–exclusion over projective
/// classes and the planes they span:
/// `C(K,3) − Σ_c C(s_c,3) − Σ_P [C(m_P,3) − Σ_{c⊂P} C(s_c,3)]`.
pub fn multiplicity_bucketed3(field: Field, dirs: &[&Direction]) -> u64 {
    assert!(dirs.iter().all(|d| d.dim() == 3), "bucketed count is for n = 3");
    let oracle = RankOracle::new(field, dirs);
    let k = oracle.len() as u64;
    let mut classes: HashMap<Key, (usize, u64)> = HashMap::new();
    for i in 0..oracle.len() {
        classes.entry(oracle.class_key(i)).or_insert((i, 0)).1 += 1;
    }
    let reps: Vec<(usize, u64)> = {
        let mut v: Vec<(usize, u64)> = classes.values().copied().collect();
        v.sort_unstable();
        v
    };
    let c3 = |m: u64| binom_u128(m, 3).unwrap();
    let rank1: u128 = reps.iter().map(|&(_, s)| c3(s)).sum();
    // plane -> (set of class indices it contains)
    let mut planes: HashMap<Key, BTreeSet<usize>> = HashMap::new();
    for a in 0..reps.len() {
        for b in a + 1..reps.len() {
            let e = planes.entry(oracle.plane_key(reps[a].0, reps[b].0)).or_default();
            e.insert(a);
            e.insert(b);
        }
    }
    let mut rank2: u128 = 0;
    for members in planes.values() {
        let m: u64 = members.iter().map(|&c| reps[c].1).sum();
        let inner: u128 = members.iter().map(|&c| c3(reps[c].1)).sum();
        rank2 += c3(m) - inner;
    }
    (c3(k) - rank1 - rank2) as u64
}

/// Number of unordered spanning `n`-subsets of `dirs`.
pub fn multiplicity(field: Field, dirs: &[&Direction], n: usize) -> Result<u64> {
    if dirs.len() < n {
        return Ok(0);
    }
    let total = binom_u128(dirs.len() as u64, n as u64).unwrap_or(u128::MAX);
    if total <= ENUMERATION_CAP {
        Ok(multiplicity_enumerate(field, dirs, n))
    } else if n == 3 {
        Ok(multiplicity_bucketed3(field, dirs))
    } else {
        Err(Error::CapExceeded(format!(
            "C({}, {n}) subsets exceed the enumeration cap and no bucketed counter exists for n = {n}",
            dirs.len()
        )))
    }
}

/// All joints of the arrangement, sorted by point.
pub fn find_joints(arr: &Arrangement) -> Result<Vec<JointRecord>> {
    let n = arr.n();
    let cmap = concurrency_map(arr);
    let candidates: Vec<(Point, Vec<usize>)> = cmap
        .into_iter()
        .filter(|(_, ids)| ids.len() >= n)
        .map(|(x, ids)| (x, ids.into_iter().collect()))
        .collect();
    let records: Vec<Option<JointRecord>> = candidates
        .into_par_iter()
        .map(|(point, line_ids)| {
            let dirs: Vec<&Direction> = line_ids.iter().map(|&i| arr.lines()[i].dir()).collect();
            let m = multiplicity(arr.field(), &dirs, n)?;
            Ok((m > 0).then(|| JointRecord {
                k: line_ids.len(),
                point,
                line_ids,
                multiplicity: m,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(records.into_iter().flatten().collect())
}

pub fn bucket(joints: &[JointRecord]) -> BTreeMap<BucketKey, Vec<JointRecord>> {
    let mut out: BTreeMap<BucketKey, Vec<JointRecord>> = BTreeMap::new();
    for j in joints {
        out.entry(BucketKey::of(j.multiplicity, j.k)).or_default().push(j.clone());
    }
    out
}

/// A positive rational exponent `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Exponent {
    pub num: u32,
    pub den: u32,
}

impl Exponent {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidParameter(format!("exponent {num}/{den} must be positive")));
        }
        let g = num.gcd(&den);
        Ok(Exponent {
            num: num / g,
            den: den / g,
        })
    }

    pub fn half() -> Self {
        Exponent { num: 1, den: 2 }
    }

    /// `1/(n-1)`.
    pub fn critical(n: usize) -> Self {
        Exponent {
            num: 1,
            den: n as u32 - 1,
        }
    }
}

/// `Σ_x N(x)^e`, truncated to [`REPORT_SCALE`] digits.
pub fn weighted_sum(joints: &[JointRecord], e: Exponent) -> Decimal {
    let vals: Vec<BigUint> = joints.iter().map(|j| BigUint::from(j.multiplicity)).collect();
    Decimal::sum_int_powers(&vals, e.num, e.den, REPORT_SCALE)
}

fn check_triple(a: &[Arrangement; 3]) -> Result<Field> {
    let field = a[0].field();
    for c in a {
        if c.n() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: c.n(),
            });
        }
        if c.field() != field {
            return Err(Error::FieldMismatch("collections live over different fields".into()));
        }
    }
    Ok(field)
}

/// Points met by a line of every collection, with the incident line ids of
/// each collection.
fn triple_incidences(a: &[Arrangement; 3]) -> Result<BTreeMap<Point, [BTreeSet<usize>; 3]>> {
    let field = check_triple(a)?;
    let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
    let found: Vec<Vec<(Point, usize, usize, usize, usize)>> = pairs
        .par_iter()
        .map(|&(ca, cb)| {
            let mut v = Vec::new();
            for (i, li) in a[ca].lines().iter().enumerate() {
                for (j, lj) in a[cb].lines().iter().enumerate() {
                    if let Intersection::Point(x) = line_intersection(field, li, lj) {
                        v.push((x, ca, i, cb, j));
                    }
                }
            }
            v
        })
        .collect();
    let mut map: BTreeMap<Point, [BTreeSet<usize>; 3]> = BTreeMap::new();
    for v in found {
        for (x, ca, i, cb, j) in v {
            let e = map.entry(x).or_default();
            e[ca].insert(i);
            e[cb].insert(j);
        }
    }
    // coincident cross-collection lines never produce an intersection point,
    // so complete the incidence sets of the surviving candidates directly
    for (x, sets) in map.iter_mut() {
        for c in 0..3 {
            for (i, l) in a[c].lines().iter().enumerate() {
                if !sets[c].contains(&i) && l.contains(field, x) {
                    sets[c].insert(i);
                }
            }
        }
    }
    map.retain(|_, s| s.iter().all(|c| !c.is_empty()));
    Ok(map)
}

/// A line shared by all three collections would make every one of its
/// points a coincidence point. Multijoints are unaffected: they need three
/// independent directions, hence two distinct meeting lines.
fn check_no_common_line(a: &[Arrangement; 3]) -> Result<()> {
    let s0: BTreeSet<_> = a[0].lines().iter().collect();
    let s1: BTreeSet<_> = a[1].lines().iter().collect();
    if a[2].lines().iter().any(|l| s0.contains(l) && s1.contains(l)) {
        return Err(Error::InvalidParameter(
            "a line common to all three collections has infinitely many coincidence points".into(),
        ));
    }
    Ok(())
}

/// Multijoints of three collections in F^3 with weighted counts.
pub fn find_multijoints(a: &[Arrangement; 3]) -> Result<Vec<MultijointRecord>> {
    let field = check_triple(a)?;
    let inc = triple_incidences(a)?;
    let entries: Vec<(Point, [BTreeSet<usize>; 3])> = inc.into_iter().collect();
    let records: Vec<Option<MultijointRecord>> = entries
        .into_par_iter()
        .map(|(point, sets)| {
            let ids: [Vec<usize>; 3] = sets.map(|s| s.into_iter().collect());
            let product: u128 = ids.iter().map(|v| v.len() as u128).product();
            if product > CROSS_TRIPLE_CAP {
                return Err(Error::CapExceeded(format!("{product} cross triples at one point")));
            }
            let dirs: Vec<&Direction> = ids
                .iter()
                .enumerate()
                .flat_map(|(c, v)| v.iter().map(move |&i| a[c].lines()[i].dir()))
                .collect();
            let oracle = RankOracle::new(field, &dirs);
            let (n0, n1) = (ids[0].len(), ids[1].len());
            let mut n_prime = 0u64;
            for (x, &i0) in ids[0].iter().enumerate() {
                for (y, &i1) in ids[1].iter().enumerate() {
                    for (z, &i2) in ids[2].iter().enumerate() {
                        if oracle.spans(&[x, n0 + y, n0 + n1 + z]) {
                            n_prime += a[0].weight(i0) * a[1].weight(i1) * a[2].weight(i2);
                        }
                    }
                }
            }
            if n_prime == 0 {
                return Ok(None);
            }
            let counts = [0, 1, 2].map(|c| ids[c].iter().map(|&i| a[c].weight(i)).sum());
            Ok(Some(MultijointRecord {
                point,
                line_ids: ids,
                counts,
                n_prime,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(records.into_iter().flatten().collect())
}

/// `Σ (N_1 N_2 N_3)^{1/2}` over every point met by all three collections,
/// spanning or not.
pub fn coincidence_sum(a: &[Arrangement; 3]) -> Result<Decimal> {
    check_no_common_line(a)?;
    let inc = triple_incidences(a)?;
    let vals: Vec<BigUint> = inc
        .values()
        .map(|sets| {
            (0..3)
                .map(|c| BigUint::from(sets[c].iter().map(|&i| a[c].weight(i)).sum::<u64>()))
                .product()
        })
        .collect();
    Ok(Decimal::sum_int_powers(&vals, 1, 2, REPORT_SCALE))
}

/// Number of points met by all three collections.
pub fn coincidence_points(a: &[Arrangement; 3]) -> Result<usize> {
    check_no_common_line(a)?;
    Ok(triple_incidences(a)?.len())
}

/// `Σ_x N′(x)^e` over multijoints.
pub fn multijoint_sum(records: &[MultijointRecord], e: Exponent) -> Decimal {
    let vals: Vec<BigUint> = records.iter().map(|r| BigUint::from(r.n_prime)).collect();
    Decimal::sum_int_powers(&vals, e.num, e.den, REPORT_SCALE)
}

/// `Σ_x N_1(x) N_2(x)` over all points, for two collections sharing no line
/// (each meeting pair of lines contributes its weight product once).
pub fn pair_product_sum(a1: &Arrangement, a2: &Arrangement) -> Result<u128> {
    if a1.field() != a2.field() || a1.n() != a2.n() {
        return Err(Error::FieldMismatch("collections live in different spaces".into()));
    }
    let field = a1.field();
    let shared: BTreeSet<_> = a1.lines().iter().collect();
    if a2.lines().iter().any(|l| shared.contains(l)) {
        return Err(Error::InvalidParameter("the collections share a line".into()));
    }
    Ok((0..a1.len())
        .into_par_iter()
        .map(|i| {
            let li = &a1.lines()[i];
            a2.lines()
                .iter()
                .enumerate()
                .filter(|(_, lj)| matches!(line_intersection(field, li, lj), Intersection::Point(_)))
                .map(|(j, _)| a1.weight(i) as u128 * a2.weight(j) as u128)
                .sum::<u128>()
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::{gen_coplanar_lattice, gen_grid, gen_grid_multijoint, gen_star};
    use crate::geometry::line_from_i64;

    fn dirs(field: Field, v: &[&[i64]]) -> Vec<Direction> {
        v.iter().map(|d| Direction::from_i64(field, d).unwrap()).collect()
    }

    #[test]
    fn multiplicities() {
        let q = Field::rational();
        let d = dirs(q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let r: Vec<&Direction> = d.iter().collect();
        assert_eq!(multiplicity(q, &r, 3).unwrap(), 1);
        let d = dirs(q, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 0]]);
        let r: Vec<&Direction> = d.iter().collect();
        assert_eq!(multiplicity(q, &r, 3).unwrap(), 3);
        assert_eq!(multiplicity_bucketed3(q, &r), 3);
        let d = dirs(q, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, 2, 0], &[1, 3, 0], &[1, 4, 0]]);
        let r: Vec<&Direction> = d.iter().collect();
        assert_eq!(multiplicity(q, &r, 3).unwrap(), 0);
        assert_eq!(multiplicity_bucketed3(q, &r), 0);
    }

    #[test]
    fn small_joint_sets() {
        let q = Field::rational();
        let j = find_joints(&gen_grid(2, 3, q).unwrap()).unwrap();
        assert_eq!(j.len(), 8);
        assert!(j.iter().all(|r| r.multiplicity == 1 && r.k == 3));

        let two = Arrangement::new(
            q,
            3,
            vec![
                line_from_i64(q, &[0, 0, 0], &[1, 0, 0]).unwrap(),
                line_from_i64(q, &[0, 0, 0], &[0, 1, 0]).unwrap(),
            ],
        )
        .unwrap();
        assert!(find_joints(&two).unwrap().is_empty());

        let j = find_joints(&gen_star(4, 3, q).unwrap()).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!((j[0].k, j[0].multiplicity), (4, 4));
    }

    #[test]
    fn buckets_and_sums() {
        assert_eq!(BucketKey::of(5, 4), BucketKey { n_floor: 4, k_floor: 4 });
        let q = Field::rational();
        let j = find_joints(&gen_grid(3, 3, q).unwrap()).unwrap();
        let b = bucket(&j);
        assert_eq!(b.len(), 1);
        assert_eq!(b[&BucketKey { n_floor: 1, k_floor: 2 }].len(), 27);
        assert_eq!(weighted_sum(&[], Exponent::half()).to_string(), Decimal::zero(REPORT_SCALE).to_string());
        let j = find_joints(&gen_star(100, 3, q).unwrap()).unwrap();
        assert_eq!(j[0].multiplicity, 161_700);
        assert!(weighted_sum(&j, Exponent::half()).to_string().starts_with("402.1193"));
    }

    #[test]
    fn multijoint_examples() {
        let m = find_multijoints(&gen_grid_multijoint(2).unwrap()).unwrap();
        assert_eq!(m.len(), 8);
        assert!(m.iter().all(|r| r.counts == [1, 1, 1] && r.n_prime == 1));
        assert!(find_multijoints(&gen_coplanar_lattice(5).unwrap()).unwrap().is_empty());
        assert_eq!(find_multijoints(&gen_grid_multijoint(3).unwrap()).unwrap().len(), 27);
    }

    #[test]
    fn coincidence_sums() {
        let s = coincidence_sum(&gen_coplanar_lattice(10).unwrap()).unwrap();
        assert!(s.is_exact());
        assert!(s.to_string().starts_with("100.000"));
        assert_eq!(coincidence_points(&gen_coplanar_lattice(3).unwrap()).unwrap(), 9);
        let s = coincidence_sum(&gen_grid_multijoint(2).unwrap()).unwrap();
        assert!(s.to_string().starts_with("8.000"));
        let q = Field::rational();
        let l = |b: &[i64], d: &[i64]| line_from_i64(q, b, d).unwrap();
        let disjoint = [
            Arrangement::new(q, 3, vec![l(&[0, 0, 0], &[1, 0, 0])]).unwrap(),
            Arrangement::new(q, 3, vec![l(&[0, 0, 1], &[1, 0, 0])]).unwrap(),
            Arrangement::new(q, 3, vec![l(&[0, 0, 2], &[1, 0, 0])]).unwrap(),
        ];
        assert_eq!(coincidence_points(&disjoint).unwrap(), 0);
        let shared = [disjoint[0].clone(), disjoint[0].clone(), disjoint[0].clone()];
        assert!(coincidence_sum(&shared).is_err());
    }

    #[test]
    fn subset_enumeration_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        for_each_subset(2, 3, |_| count += 1);
        assert_eq!(count, 0);
    }
}
