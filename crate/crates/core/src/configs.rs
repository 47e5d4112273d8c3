//! Deterministic generators for extremal and counterexample configurations,
//! plus seeded random arrangements and point sets.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Field, FieldKind, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{canonicalize_line, line_from_i64, Arrangement, Line, Point};
use crate::rng::rng_from_seed;

fn require_elements(field: Field, count: u64, what: &str) -> Result<()> {
    if let FieldKind::Prime(p) = field.kind() {
        if count > p {
            return Err(Error::FieldTooSmall(format!("{what} needs {count} distinct elements, F_{p} has {p}")));
        }
    }
    Ok(())
}

/// `L` lines through the origin with moment-curve directions
/// `(1, t, ..., t^{n-1})`, `t = 0, ..., L-1`. Any `n` of them span, by the
/// Vandermonde determinant, provided the parameters are distinct in the
/// field.
pub fn gen_star(l: usize, n: usize, field: Field) -> Result<Arrangement> {
    if n < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    if l < n {
        return Err(Error::InvalidParameter(format!("a star needs L >= n, got L={l}, n={n}")));
    }
    require_elements(field, l as u64, "moment-curve star")?;
    let origin = vec![field.zero(); n];
    let lines = (0..l)
        .map(|t| {
            let t = field.from_u64(t as u64);
            let dir: Vec<Scalar> = (0..n).map(|k| field.pow(&t, k as u64)).collect();
            canonicalize_line(field, &origin, &dir)
        })
        .collect::<Result<Vec<_>>>()?;
    Arrangement::new(field, n, lines)
}

/// All axis-parallel lines through the grid `{0..N-1}^n`: for each axis (in
/// order), one line per point of the complementary coordinate grid.
pub fn gen_grid(side: usize, n: usize, field: Field) -> Result<Arrangement> {
    if side == 0 {
        return Err(Error::InvalidParameter("grid side must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    require_elements(field, side as u64, "grid")?;
    let per_axis = side.checked_pow(n as u32 - 1).ok_or_else(|| Error::CapExceeded("grid too large".into()))?;
    let mut lines = Vec::with_capacity(n * per_axis);
    for axis in 0..n {
        for idx in 0..per_axis {
            let mut base = vec![0i64; n];
            let mut rest = idx;
            for k in (0..n).rev() {
                if k == axis {
                    continue;
                }
                base[k] = (rest % side) as i64;
                rest /= side;
            }
            let mut dir = vec![0i64; n];
            dir[axis] = 1;
            lines.push(line_from_i64(field, &base, &dir)?);
        }
    }
    Arrangement::new(field, n, lines)
}

/// Grid points `{0..N-1}^n` in lexicographic order.
pub fn grid_points(side: usize, n: usize, field: Field) -> Vec<Point> {
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = vec![0i64; n];
            for k in (0..n).rev() {
                c[k] = (idx % side) as i64;
                idx /= side;
            }
            Point::from_i64(field, &c)
        })
        .collect()
}

/// Three coplanar collections in the plane `z = 0` over the rationals:
/// `L` lines `x = i` and `L` lines `y = j` (`i, j = 1..L`), and the `2L-1`
/// lines `x - y = c` parallel to the diagonal that cover the `L²` lattice
/// points `(i, j, 0)`.
pub fn gen_coplanar_lattice(l: usize) -> Result<[Arrangement; 3]> {
    if l == 0 {
        return Err(Error::InvalidParameter("L must be at least 1".into()));
    }
    let q = Field::rational();
    let li = l as i64;
    let a1 = (1..=li).map(|i| line_from_i64(q, &[i, 0, 0], &[0, 1, 0])).collect::<Result<Vec<_>>>()?;
    let a2 = (1..=li).map(|j| line_from_i64(q, &[0, j, 0], &[1, 0, 0])).collect::<Result<Vec<_>>>()?;
    let a3 = (-(li - 1)..=li - 1)
        .map(|c| line_from_i64(q, &[c, 0, 0], &[1, 1, 0]))
        .collect::<Result<Vec<_>>>()?;
    Ok([
        Arrangement::new(q, 3, a1)?,
        Arrangement::new(q, 3, a2)?,
        Arrangement::new(q, 3, a3)?,
    ])
}

/// The multiset variant of the coplanar lattice: every line of
/// [`gen_coplanar_lattice`] carries weight `k`, and the third collection
/// additionally holds one vertical line through each lattice point.
pub fn gen_coplanar_lattice_copies(l: usize, k: u64) -> Result<[Arrangement; 3]> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let [a1, a2, a3] = gen_coplanar_lattice(l)?;
    let q = Field::rational();
    let weighted = |a: &Arrangement| {
        Arrangement::with_weights(q, 3, a.lines().to_vec(), vec![k; a.len()])
    };
    let mut lines3 = a3.lines().to_vec();
    let mut w3 = vec![k; a3.len()];
    for i in 1..=l as i64 {
        for j in 1..=l as i64 {
            lines3.push(line_from_i64(q, &[i, j, 0], &[0, 0, 1])?);
            w3.push(1);
        }
    }
    Ok([weighted(&a1)?, weighted(&a2)?, Arrangement::with_weights(q, 3, lines3, w3)?])
}

/// The lines of `gen_grid(N, 3)` over the rationals, split by direction.
pub fn gen_grid_multijoint(side: usize) -> Result<[Arrangement; 3]> {
    let q = Field::rational();
    let g = gen_grid(side, 3, q)?;
    let per = side * side;
    let part = |k: usize| Arrangement::new(q, 3, g.lines()[k * per..(k + 1) * per].to_vec());
    Ok([part(0)?, part(1)?, part(2)?])
}

/// Number of lines in F_p^n: `p^{n-1}·(p^n - 1)/(p - 1)`.
pub fn line_count(p: u64, n: usize) -> Option<u128> {
    let p = p as u128;
    let pn = p.checked_pow(n as u32)?;
    let dirs = (pn - 1) / (p - 1);
    dirs.checked_mul(p.checked_pow(n as u32 - 1)?)
}

/// Every line of F_p^n in canonical order: directions by pivot position
/// then lexicographically, and for each direction the bases with a zero at
/// the pivot, lexicographically.
pub fn enumerate_lines(field: Field, n: usize) -> Result<Vec<Line>> {
    let FieldKind::Prime(p) = field.kind() else {
        return Err(Error::FieldMismatch("line enumeration needs a prime field".into()));
    };
    let total = line_count(p, n).filter(|&t| t <= 50_000_000).ok_or_else(|| {
        Error::CapExceeded(format!("F_{p}^{n} has too many lines to enumerate"))
    })?;
    let mut out = Vec::with_capacity(total as usize);
    let tuples = |len: usize| -> Vec<Vec<u64>> {
        let count = (p as usize).pow(len as u32);
        (0..count)
            .map(|mut idx| {
                let mut v = vec![0u64; len];
                for k in (0..len).rev() {
                    v[k] = (idx % p as usize) as u64;
                    idx /= p as usize;
                }
                v
            })
            .collect()
    };
    let bases = tuples(n - 1);
    for piv in 0..n {
        for tail in tuples(n - 1 - piv) {
            let mut dir = vec![Scalar::Mod(0); n];
            dir[piv] = Scalar::Mod(1);
            for (k, &t) in tail.iter().enumerate() {
                dir[piv + 1 + k] = Scalar::Mod(t);
            }
            for b in &bases {
                let mut base = Vec::with_capacity(n);
                base.extend(b[..piv].iter().map(|&v| Scalar::Mod(v)));
                base.push(Scalar::Mod(0));
                base.extend(b[piv..].iter().map(|&v| Scalar::Mod(v)));
                out.push(canonicalize_line(field, &base, &dir)?);
            }
        }
    }
    debug_assert_eq!(out.len() as u128, total);
    Ok(out)
}

fn random_line<R: Rng>(field: Field, n: usize, p: u64, rng: &mut R) -> Line {
    loop {
        let dir: Vec<Scalar> = (0..n).map(|_| Scalar::Mod(rng.random_range(0..p))).collect();
        if dir.iter().all(Scalar::is_zero) {
            continue;
        }
        let base: Vec<Scalar> = (0..n).map(|_| Scalar::Mod(rng.random_range(0..p))).collect();
        // each line has p points and each direction class p-1 representatives,
        // so canonicalizing a uniform (point, nonzero vector) is uniform on lines
        return canonicalize_line(field, &base, &dir).expect("valid random line");
    }
}

/// `L` distinct uniformly random lines of F_p^n.
pub fn gen_random(l: usize, n: usize, field: Field, seed: u64) -> Result<Arrangement> {
    let FieldKind::Prime(p) = field.kind() else {
        return Err(Error::FieldMismatch("random arrangements need a prime field; see gen_random_integer".into()));
    };
    if n < 2 {
        return Err(Error::InvalidParameter("dimension must be at least 2".into()));
    }
    let total = line_count(p, n).unwrap_or(u128::MAX);
    if l as u128 > total {
        return Err(Error::InvalidParameter(format!("F_{p}^{n} has only {total} lines, asked for {l}")));
    }
    let mut rng = rng_from_seed(seed);
    let lines = if 2 * l as u128 > total {
        let mut all = enumerate_lines(field, n)?;
        let (chosen, _) = all.partial_shuffle(&mut rng, l);
        chosen.to_vec()
    } else {
        let mut seen = HashSet::with_capacity(l);
        let mut lines = Vec::with_capacity(l);
        while lines.len() < l {
            let line = random_line(field, n, p, &mut rng);
            if seen.insert(line.clone()) {
                lines.push(line);
            }
        }
        lines
    };
    Arrangement::new(field, n, lines)
}

/// `L` distinct random lines over the rationals with integer base and
/// direction coordinates in `[-range, range]`.
pub fn gen_random_integer(l: usize, n: usize, range: i64, seed: u64) -> Result<Arrangement> {
    if range < 1 {
        return Err(Error::InvalidParameter("range must be at least 1".into()));
    }
    let q = Field::rational();
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(l);
    let mut lines = Vec::with_capacity(l);
    let mut attempts = 0usize;
    while lines.len() < l {
        attempts += 1;
        if attempts > 100 * l + 1000 {
            return Err(Error::InvalidParameter(format!("could not draw {l} distinct lines with range {range}")));
        }
        let dir: Vec<i64> = (0..n).map(|_| rng.random_range(-range..=range)).collect();
        if dir.iter().all(|&d| d == 0) {
            continue;
        }
        let base: Vec<i64> = (0..n).map(|_| rng.random_range(-range..=range)).collect();
        let line = line_from_i64(q, &base, &dir)?;
        if seen.insert(line.clone()) {
            lines.push(line);
        }
    }
    Arrangement::new(q, n, lines)
}

/// `count` distinct uniformly random points of F_p^n.
pub fn random_points_fp(count: usize, n: usize, field: Field, seed: u64) -> Result<Vec<Point>> {
    let FieldKind::Prime(p) = field.kind() else {
        return Err(Error::FieldMismatch("needs a prime field".into()));
    };
    let space = (p as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count as u128 > space {
        return Err(Error::InvalidParameter(format!("F_{p}^{n} has fewer than {count} points")));
    }
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = Point((0..n).map(|_| Scalar::Mod(rng.random_range(0..p))).collect());
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    Ok(out)
}

/// `count` random rational points with coordinates `k/den`, `k` uniform in
/// `[-range·den, range·den]` (duplicates removed, so fewer may be returned
/// for tiny ranges).
pub fn random_points_rational(count: usize, n: usize, range: i64, den: i64, seed: u64) -> Vec<Point> {
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < 100 * count + 100 {
        attempts += 1;
        let x = Point(
            (0..n)
                .map(|_| {
                    let k = rng.random_range(-range * den..=range * den);
                    Scalar::Rat(BigRational::new(BigInt::from(k), BigInt::from(den)))
                })
                .collect(),
        );
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    out
}

/// `count` random points with coordinates `k/den`, `k` uniform in `[0, den]`
/// (the unit cube), distinct.
pub fn uniform_unit_points(count: usize, n: usize, den: i64, seed: u64) -> Vec<Point> {
    let mut rng = rng_from_seed(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = Point(
            (0..n)
                .map(|_| Scalar::Rat(BigRational::new(BigInt::from(rng.random_range(0..=den)), BigInt::from(den))))
                .collect(),
        );
        if seen.insert(x.clone()) {
            out.push(x);
        }
    }
    out
}

/// Declarative description of a generator run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Star { l: usize, n: usize, field: Field },
    Grid { side: usize, n: usize, field: Field },
    CoplanarLattice { l: usize },
    GridMultijoint { side: usize },
    Random { l: usize, n: usize, field: Field, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generated {
    Single(Arrangement),
    Triple([Arrangement; 3]),
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Generated> {
        Ok(match *self {
            GeneratorSpec::Star { l, n, field } => Generated::Single(gen_star(l, n, field)?),
            GeneratorSpec::Grid { side, n, field } => Generated::Single(gen_grid(side, n, field)?),
            GeneratorSpec::CoplanarLattice { l } => Generated::Triple(gen_coplanar_lattice(l)?),
            GeneratorSpec::GridMultijoint { side } => Generated::Triple(gen_grid_multijoint(side)?),
            GeneratorSpec::Random { l, n, field, seed } => Generated::Single(gen_random(l, n, field, seed)?),
        })
    }
}
