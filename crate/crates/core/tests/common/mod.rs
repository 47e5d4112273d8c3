#![allow(dead_code)]

use joints_core::geometry::{canonicalize_line, Intersection, line_intersection};
use joints_core::rng::rng_from_seed;
use joints_core::{Arrangement, Field, Line, Point, Scalar};
use rand::Rng;
use std::collections::BTreeSet;

/// Distinct lines through points of a small box with short directions, so
/// joints are plentiful.
pub fn clustered_arrangement(field: Field, n: usize, lines: usize, seed: u64) -> Arrangement {
    let mut rng = rng_from_seed(seed);
    let mut set = BTreeSet::new();
    let mut guard = 0;
    while set.len() < lines && guard < 100 * lines {
        guard += 1;
        let base: Vec<Scalar> = (0..n).map(|_| field.from_i64(rng.random_range(0..3))).collect();
        let dir: Vec<i64> = (0..n).map(|_| rng.random_range(-1..=1)).collect();
        if dir.iter().all(|&d| d == 0) {
            continue;
        }
        let dir: Vec<Scalar> = dir.iter().map(|&d| field.from_i64(d)).collect();
        set.insert(canonicalize_line(field, &base, &dir).unwrap());
    }
    Arrangement::new(field, n, set.into_iter().collect()).unwrap()
}

/// Every point where two or more lines meet, by brute force over pairs and
/// a full membership scan.
pub fn brute_concurrency(field: Field, lines: &[Line]) -> Vec<(Point, Vec<usize>)> {
    let mut pts = BTreeSet::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Intersection::Point(x) = line_intersection(field, &lines[i], &lines[j]) {
                pts.insert(x);
            }
        }
    }
    pts.into_iter()
        .map(|x| {
            let ids = (0..lines.len()).filter(|&i| lines[i].contains(field, &x)).collect();
            (x, ids)
        })
        .collect()
}

/// Rank of integer-or-residue vectors by plain Gaussian elimination over
/// the field's own arithmetic.
pub fn rank(field: Field, rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = field.inv(&m[r][c]).unwrap();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = field.mul(&m[i][c], &inv);
                for k in 0..cols {
                    let t = field.mul(&f, &m[r][k]);
                    m[i][k] = field.sub(&m[i][k], &t);
                }
            }
        }
        r += 1;
    }
    r
}
