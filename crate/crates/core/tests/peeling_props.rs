mod common;

use std::collections::BTreeSet;

use joints_core::configs::random_points_fp;
use joints_core::joints::find_joints;
use joints_core::peeling::{peel, verify_certificate};
use joints_core::vanishing::{dvir_degree, minimal_vanishing_degree, monomial_count};
use joints_core::{Field, Monomial, Point, Scalar};

/// `⌊(n!·m)^{1/n}⌋ + 1` by walking k upward.
fn dvir_oracle(m: u64, n: u32) -> usize {
    let target: u128 = (1..=n as u128).product::<u128>() * m as u128;
    let mut k = 0u128;
    while (k + 1).pow(n) <= target {
        k += 1;
    }
    k as usize + 1
}

/// Smallest d for which the evaluation matrix on monomials of degree ≤ d
/// has a nontrivial kernel.
fn min_degree_oracle(field: Field, n: usize, points: &[Point]) -> usize {
    (0..)
        .find(|&d| {
            let monos = Monomial::all_up_to(n, d as u32);
            let rows: Vec<Vec<Scalar>> = points
                .iter()
                .map(|x| {
                    monos
                        .iter()
                        .map(|m| {
                            m.exps().iter().zip(x.coords()).fold(field.one(), |acc, (&e, c)| {
                                field.mul(&acc, &field.pow(c, e as u64))
                            })
                        })
                        .collect()
                })
                .collect();
            common::rank(field, &rows) < monos.len()
        })
        .unwrap()
}

#[test]
fn peel_round_trip_on_random_arrangements() {
    let fields = [Field::prime(101).unwrap(), Field::rational()];
    let mut nonempty = 0;
    for seed in 0..100u64 {
        let field = fields[(seed % 2) as usize];
        let arr = common::clustered_arrangement(field, 3, 6 + (seed % 15) as usize, 1000 + seed);
        let joints = find_joints(&arr).unwrap();
        let cert = peel(&arr).unwrap();
        assert!(verify_certificate(&arr, &cert).unwrap().is_valid(), "seed {seed}");
        assert_eq!(cert.total_removed, joints.len());
        if joints.is_empty() {
            assert!(cert.steps.is_empty());
            continue;
        }
        nonempty += 1;

        let all: BTreeSet<Point> = joints.iter().map(|j| j.point.clone()).collect();
        let first: Vec<Point> = all.iter().cloned().collect();
        assert_eq!(cert.steps[0].degree_d, min_degree_oracle(field, 3, &first), "seed {seed}");

        let mut remaining = all.clone();
        let mut used = BTreeSet::new();
        for step in &cert.steps {
            assert!(used.insert(step.line_id), "line deleted twice");
            assert!(step.degree_d <= dvir_oracle(remaining.len() as u64, 3), "seed {seed}: d above Dvir bound");
            assert!(step.removed_points.len() <= step.degree_d);
            let line = &arr.lines()[step.line_id];
            let before = remaining.len();
            for x in &step.removed_points {
                assert!(line.contains(field, x));
                assert!(remaining.remove(x), "seed {seed}: point removed twice or not a joint");
            }
            if !step.removed_points.is_empty() {
                assert!(remaining.len() < before);
            }
        }
        assert!(remaining.is_empty());

        // a tampered certificate is rejected
        let mut bad = cert.clone();
        bad.steps.pop();
        assert!(!verify_certificate(&arr, &bad).unwrap().is_valid(), "seed {seed}: truncated accepted");
        let mut bad = cert.clone();
        if let Some(s) = bad.steps.iter_mut().find(|s| !s.removed_points.is_empty()) {
            s.degree_d = s.removed_points.len() - 1;
            assert!(!verify_certificate(&arr, &bad).unwrap().is_valid(), "seed {seed}: low degree accepted");
        }
    }
    assert!(nonempty >= 50, "only {nonempty} arrangements had joints");
}

#[test]
fn dimension_count_guarantee() {
    for n in 2..=4usize {
        for m in 0..=5000u64 {
            let d = dvir_degree(m, n);
            assert_eq!(d, dvir_oracle(m, n as u32), "m={m}, n={n}");
            assert!(monomial_count(n, d) > m as u128, "m={m}, n={n}");
        }
    }
}

#[test]
fn minimal_degree_is_monotone() {
    let f = Field::prime(101).unwrap();
    for n in 2..=3usize {
        let pts = random_points_fp(40, n, f, 77 + n as u64).unwrap();
        let mut last = 0;
        for k in 1..=pts.len() {
            let (d, poly) = minimal_vanishing_degree(f, n, &pts[..k]).unwrap();
            assert!(d >= last, "n={n}: d_min dropped at {k} points");
            assert!(pts[..k].iter().all(|x| poly.eval(x.coords()).is_zero()));
            if k <= 12 {
                assert_eq!(d, min_degree_oracle(f, n, &pts[..k]));
            }
            last = d;
        }
    }
}
