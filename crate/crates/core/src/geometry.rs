//! Points, canonical lines and arrangements in F^n.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::algebra::{Field, Scalar};
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<Scalar>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn from_i64(field: Field, coords: &[i64]) -> Point {
        Point(coords.iter().map(|&c| field.from_i64(c)).collect())
    }
}

/// Projective direction with first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction(Vec<Scalar>);

impl Direction {
    pub fn new(field: Field, v: &[Scalar]) -> Result<Direction> {
        let piv = v.iter().position(|s| !s.is_zero()).ok_or(Error::ZeroDirection)?;
        let inv = field.inv(&v[piv]).expect("nonzero pivot");
        Ok(Direction(v.iter().map(|s| field.mul(s, &inv)).collect()))
    }

    pub fn from_i64(field: Field, v: &[i64]) -> Result<Direction> {
        Self::new(field, &v.iter().map(|&c| field.from_i64(c)).collect::<Vec<_>>())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Index of the first nonzero coordinate (which equals 1).
    pub fn pivot(&self) -> usize {
        self.0.iter().position(|s| !s.is_zero()).expect("directions are nonzero")
    }
}

/// The line `{base + t·dir}`, with `base[dir.pivot()] = 0`, so equal point
/// sets have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    base: Point,
    dir: Direction,
}

impl Line {
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn dir(&self) -> &Direction {
        &self.dir
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn point_at(&self, field: Field, t: &Scalar) -> Point {
        Point(
            self.base
                .0
                .iter()
                .zip(&self.dir.0)
                .map(|(b, d)| field.add(b, &field.mul(t, d)))
                .collect(),
        )
    }

    /// Canonical base of the line through `x` parallel to this one.
    pub fn base_through(&self, field: Field, x: &Point) -> Point {
        let piv = self.dir.pivot();
        let t = x.0[piv].clone();
        Point(
            x.0.iter()
                .zip(&self.dir.0)
                .map(|(a, d)| field.sub(a, &field.mul(&t, d)))
                .collect(),
        )
    }

    pub fn contains(&self, field: Field, x: &Point) -> bool {
        x.dim() == self.dim() && self.base_through(field, x) == self.base
    }

    /// Parameter `t` with `point_at(t) = x`, if `x` is on the line.
    pub fn parameter_of(&self, field: Field, x: &Point) -> Option<Scalar> {
        self.contains(field, x).then(|| x.0[self.dir.pivot()].clone())
    }
}

pub fn canonicalize_line(field: Field, base: &[Scalar], dir: &[Scalar]) -> Result<Line> {
    if base.len() != dir.len() {
        return Err(Error::DimensionMismatch {
            expected: base.len(),
            found: dir.len(),
        });
    }
    if base.iter().chain(dir).any(|s| !field.contains(s)) {
        return Err(Error::FieldMismatch(format!("coordinates are not in {field}")));
    }
    let dir = Direction::new(field, dir)?;
    let piv = dir.pivot();
    let t = base[piv].clone();
    let base = Point(
        base.iter()
            .zip(&dir.0)
            .map(|(b, d)| field.sub(b, &field.mul(&t, d)))
            .collect(),
    );
    Ok(Line { base, dir })
}

/// Convenience constructor from integer coordinates.
pub fn line_from_i64(field: Field, base: &[i64], dir: &[i64]) -> Result<Line> {
    let b: Vec<Scalar> = base.iter().map(|&c| field.from_i64(c)).collect();
    let d: Vec<Scalar> = dir.iter().map(|&c| field.from_i64(c)).collect();
    canonicalize_line(field, &b, &d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Point(Point),
    Disjoint,
    Coincident,
}

pub fn line_intersection(field: Field, l1: &Line, l2: &Line) -> Intersection {
    if l1 == l2 {
        return Intersection::Coincident;
    }
    if l1.dir == l2.dir {
        return Intersection::Disjoint;
    }
    let (d1, d2) = (&l1.dir.0, &l2.dir.0);
    let (b1, b2) = (&l1.base.0, &l2.base.0);
    let n = d1.len();
    // solve s·d1 - t·d2 = b2 - b1 on a pair of rows with a nonzero minor
    for i in 0..n {
        for j in i + 1..n {
            let det = field.sub(&field.mul(&d1[j], &d2[i]), &field.mul(&d1[i], &d2[j]));
            if det.is_zero() {
                continue;
            }
            let inv = field.inv(&det).expect("nonzero");
            let ri = field.sub(&b2[i], &b1[i]);
            let rj = field.sub(&b2[j], &b1[j]);
            // [d1_i  -d2_i; d1_j  -d2_j] (s, t)^T = (ri, rj)^T
            let s = field.mul(&field.sub(&field.mul(&rj, &d2[i]), &field.mul(&ri, &d2[j])), &inv);
            let x = l1.point_at(field, &s);
            return if l2.contains(field, &x) {
                Intersection::Point(x)
            } else {
                Intersection::Disjoint
            };
        }
    }
    unreachable!("distinct canonical directions are linearly independent")
}

/// Rank of the span of the given vectors.
pub fn rank_of_directions(field: Field, dirs: &[Direction]) -> usize {
    let Some(first) = dirs.first() else { return 0 };
    let rows: Vec<Vec<Scalar>> = dirs.iter().map(|d| d.0.clone()).collect();
    linalg::rank(field, &rows, first.dim())
}

/// A collection of lines in F^n with optional positive integer weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    field: Field,
    n: usize,
    lines: Vec<Line>,
    weights: Option<Vec<u64>>,
}

impl Arrangement {
    /// Distinct lines, unit weights.
    pub fn new(field: Field, n: usize, lines: Vec<Line>) -> Result<Self> {
        Self::build(field, n, lines, None)
    }

    /// Weighted lines; duplicates are allowed.
    pub fn with_weights(field: Field, n: usize, lines: Vec<Line>, weights: Vec<u64>) -> Result<Self> {
        Self::build(field, n, lines, Some(weights))
    }

    fn build(field: Field, n: usize, lines: Vec<Line>, weights: Option<Vec<u64>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
        }
        for l in &lines {
            if l.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: l.dim(),
                });
            }
            if l.base.0.iter().chain(&l.dir.0).any(|s| !field.contains(s)) {
                return Err(Error::FieldMismatch(format!("line coordinates are not in {field}")));
            }
        }
        match &weights {
            Some(w) => {
                if w.len() != lines.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lines.len(),
                        found: w.len(),
                    });
                }
                if w.contains(&0) {
                    return Err(Error::InvalidParameter("weights must be positive".into()));
                }
            }
            None => {
                let mut seen = BTreeSet::new();
                for (i, l) in lines.iter().enumerate() {
                    if !seen.insert(l) {
                        return Err(Error::InvalidParameter(format!(
                            "line {i} duplicates an earlier line; duplicates need weights"
                        )));
                    }
                }
            }
        }
        Ok(Arrangement {
            field,
            n,
            lines,
            weights,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.weights.as_ref().map_or(1, |w| w[i])
    }

    /// Total weight (the multiset size).
    pub fn total_weight(&self) -> u64 {
        (0..self.len()).map(|i| self.weight(i)).sum()
    }

    /// The sub-arrangement of the given line ids (weights carried along).
    pub fn subset(&self, ids: &[usize]) -> Arrangement {
        Arrangement {
            field: self.field,
            n: self.n,
            lines: ids.iter().map(|&i| self.lines[i].clone()).collect(),
            weights: self.weights.as_ref().map(|w| ids.iter().map(|&i| w[i]).collect()),
        }
    }
}

pub type ConcurrencyMap = BTreeMap<Point, BTreeSet<usize>>;

/// Every point on at least two lines, with the ids of all lines through it.
///
/// The `O(L²)` pair loop runs in parallel over fixed row chunks; chunk
/// results are merged in chunk order, so the output is deterministic.
pub fn concurrency_map(arr: &Arrangement) -> ConcurrencyMap {
    let field = arr.field;
    let lines = &arr.lines;
    let l = lines.len();
    const CHUNK: usize = 32;
    let chunks: Vec<HashMap<Point, Vec<usize>>> = (0..l.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<Point, Vec<usize>> = HashMap::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(l) {
                for j in i + 1..l {
                    if let Intersection::Point(x) = line_intersection(field, &lines[i], &lines[j]) {
                        let e = local.entry(x).or_default();
                        e.push(i);
                        e.push(j);
                    }
                }
            }
            local
        })
        .collect();
    let mut out = ConcurrencyMap::new();
    for local in chunks {
        for (x, ids) in local {
            out.entry(x).or_default().extend(ids);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let q = Field::rational();
        let l = line_from_i64(q, &[3, 3, 3], &[2, 2, 2]).unwrap();
        assert_eq!(l.dir(), &Direction::from_i64(q, &[1, 1, 1]).unwrap());
        assert_eq!(l.base(), &Point::from_i64(q, &[0, 0, 0]));

        let f11 = Field::prime(11).unwrap();
        let l = line_from_i64(f11, &[0, 5], &[0, 7]).unwrap();
        assert_eq!(l.dir(), &Direction::from_i64(f11, &[0, 1]).unwrap());
        assert_eq!(l.base(), &Point::from_i64(f11, &[0, 0]));

        let f5 = Field::prime(5).unwrap();
        let l = line_from_i64(f5, &[1, 2, 3], &[0, 4, 2]).unwrap();
        assert_eq!(l.dir(), &Direction::from_i64(f5, &[0, 1, 3]).unwrap());
        assert_eq!(l.base(), &Point::from_i64(f5, &[1, 0, 2]));

        assert_eq!(line_from_i64(q, &[1, 2], &[0, 0]), Err(Error::ZeroDirection));
    }

    #[test]
    fn intersections() {
        let q = Field::rational();
        let xa = line_from_i64(q, &[0, 0], &[1, 0]).unwrap();
        let ya = line_from_i64(q, &[0, 0], &[0, 1]).unwrap();
        assert_eq!(line_intersection(q, &xa, &ya), Intersection::Point(Point::from_i64(q, &[0, 0])));
        let par = line_from_i64(q, &[0, 1], &[1, 0]).unwrap();
        assert_eq!(line_intersection(q, &xa, &par), Intersection::Disjoint);
        assert_eq!(line_intersection(q, &xa, &xa.clone()), Intersection::Coincident);

        let f7 = Field::prime(7).unwrap();
        let l1 = line_from_i64(f7, &[0, 0, 0], &[1, 1, 0]).unwrap();
        let l2 = line_from_i64(f7, &[2, 0, 0], &[0, 1, 1]).unwrap();
        assert_eq!(line_intersection(f7, &l1, &l2), Intersection::Disjoint);
    }

    #[test]
    fn ranks() {
        let q = Field::rational();
        let d = |v: &[i64]| Direction::from_i64(q, v).unwrap();
        assert_eq!(rank_of_directions(q, &[d(&[1, 0, 0]), d(&[0, 1, 0]), d(&[0, 0, 1])]), 3);
        assert_eq!(rank_of_directions(q, &[d(&[1, 1, 0]), d(&[2, 2, 0])]), 1);
        let f2 = Field::prime(2).unwrap();
        let d2 = |v: &[i64]| Direction::from_i64(f2, v).unwrap();
        assert_eq!(rank_of_directions(f2, &[d2(&[1, 0, 1]), d2(&[1, 1, 0]), d2(&[0, 1, 1])]), 2);
    }

    #[test]
    fn duplicates_need_weights() {
        let q = Field::rational();
        let l = line_from_i64(q, &[0, 0], &[1, 0]).unwrap();
        assert!(Arrangement::new(q, 2, vec![l.clone(), l.clone()]).is_err());
        let a = Arrangement::with_weights(q, 2, vec![l.clone(), l], vec![2, 3]).unwrap();
        assert_eq!(a.total_weight(), 5);
    }
}
