use joints_core::algebra::parse_poly;
use joints_core::configs::gen_random_integer;
use joints_core::geometry::{canonicalize_line, concurrency_map, line_from_i64};
use joints_core::incidence::{incidence_report, rich_points};
use joints_core::probability::{capture_probability, exact_tail, witness_size, TailQuery};
use joints_core::rng::rng_from_seed;
use joints_core::surfaces::{analyze_lines, pi_polynomials, second_form_vanishes_at, SecondForm, Surface};
use joints_core::{Field, Line, MultiPoly, Point, Scalar};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

#[test]
fn rich_point_counts_do_not_increase() {
    for seed in 0..20u64 {
        let arr = gen_random_integer(60, 2, 4, seed).unwrap();
        let sizes: Vec<usize> = (2..=8).map(|k| rich_points(&arr, k).unwrap().len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] >= w[1]), "seed {seed}: {sizes:?}");
        assert_eq!(sizes[0], concurrency_map(&arr).len());
    }
}

#[test]
fn planar_incidences_have_szemeredi_trotter_shape() {
    for (seed, l) in [(1u64, 40usize), (2, 150), (3, 400), (4, 1000)] {
        let arr = gen_random_integer(l, 2, 12, seed).unwrap();
        let points: Vec<Point> = concurrency_map(&arr).into_keys().collect();
        let r = incidence_report(&points, &arr).unwrap();
        assert!(r.incidences <= r.points * r.lines);
        let (p, ll, i) = (r.points as f64, r.lines as f64, r.incidences as f64);
        let rhs = (p * ll).powf(2.0 / 3.0) + p + ll;
        assert!(i <= 5.0 * rhs, "L={l}: I={i} vs 5·{rhs}");
        assert!((r.ratio.to_f64() - i / rhs).abs() < 1e-9);
    }
}

fn q() -> Field {
    Field::rational()
}

/// Lines inside the plane `a·x = c` through integer points.
fn lines_in_plane(normal: [i64; 3], c: i64, count: usize, seed: u64) -> Vec<Line> {
    let mut rng = rng_from_seed(seed);
    let cross = |u: [i64; 3], v: [i64; 3]| [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    // a particular point with a·x0 = c when c = 0 or some coordinate of a is ±1
    let k = normal.iter().position(|&a| a.abs() == 1).unwrap_or(0);
    let mut x0 = [0i64; 3];
    x0[k] = c * normal[k];
    let mut out = Vec::new();
    while out.len() < count {
        let r1 = [rng.random_range(-4..=4), rng.random_range(-4..=4), rng.random_range(-4..=4)];
        let r2 = [rng.random_range(-4..=4), rng.random_range(-4..=4), rng.random_range(-4..=4)];
        let d = cross(normal, r1);
        let b = cross(normal, r2);
        if d == [0, 0, 0] {
            continue;
        }
        let base = [x0[0] + b[0], x0[1] + b[1], x0[2] + b[2]];
        out.push(line_from_i64(q(), &base, &d).unwrap());
    }
    out
}

fn rat_line(b: &[(i64, i64)], d: &[(i64, i64)]) -> Line {
    let s = |v: &[(i64, i64)]| -> Vec<Scalar> {
        v.iter().map(|&(n, m)| q().from_ratio(&BigRational::new(n.into(), m.into())).unwrap()).collect()
    };
    canonicalize_line(q(), &s(b), &s(d)).unwrap()
}

#[test]
fn surfaces_respect_degree_and_exclusivity() {
    let p = |s: &str| parse_poly(q(), 3, s).unwrap();
    let planes = [([1, 0, 0], 0, "x"), ([0, 1, 0], 0, "y"), ([1, 1, 1], 0, "x+y+z"), ([0, 0, 1], 2, "z-2"), ([1, -1, 0], 0, "x-y")];
    let hyperboloid = "x^2+y^2-z^2-1";
    let rulings = [rat_line(&[(1, 1), (0, 1), (0, 1)], &[(0, 1), (1, 1), (1, 1)]),
        rat_line(&[(0, 1), (1, 1), (0, 1)], &[(-1, 1), (0, 1), (1, 1)]),
        rat_line(&[(3, 5), (4, 5), (0, 1)], &[(-4, 5), (3, 5), (1, 1)])];
    let mut rng = rng_from_seed(404);
    for trial in 0..40u64 {
        let mut factors: Vec<(MultiPoly, u32)> = Vec::new();
        let mut lines = Vec::new();
        let mut chosen: Vec<usize> = (0..planes.len()).filter(|_| rng.random_bool(0.4)).collect();
        if chosen.is_empty() {
            chosen.push((trial % 5) as usize);
        }
        for &i in &chosen {
            let (nrm, c, text) = planes[i];
            factors.push((p(text), rng.random_range(1..=2)));
            lines.extend(lines_in_plane(nrm, c, 4, trial * 10 + i as u64));
        }
        if trial % 2 == 0 {
            factors.push((p(hyperboloid), 1));
            lines.extend(rulings.iter().cloned());
        }
        let s = Surface::from_factors(factors).unwrap();
        let pis = pi_polynomials(&s).unwrap();
        let bound = (3 * s.sf().degree()).saturating_sub(4);
        for pi in &pis {
            assert!(pi.is_zero() || pi.degree() <= bound, "trial {trial}: deg Π = {} > {bound}", pi.degree());
        }
        let rep = analyze_lines(&s, &lines).unwrap();
        assert!(rep.exclusive, "trial {trial}");
        let d = s.degree() as usize;
        assert!(rep.critical_count <= d * d);
        for a in &rep.lines {
            assert!(!(a.critical && a.flat == Some(true)), "trial {trial}: line {} critical and flat", a.line_id);
        }
        // a vanishing form forces every Π_j to vanish at that point
        for l in &lines {
            for t in 0..4 {
                let x = l.point_at(q(), &q().from_i64(t));
                if !s.poly().eval(x.coords()).is_zero() {
                    continue;
                }
                if second_form_vanishes_at(&s, &x).unwrap() == SecondForm::Vanishes {
                    assert!(pis.iter().all(|pi| pi.eval(x.coords()).is_zero()), "trial {trial}");
                }
            }
        }
    }
}

#[test]
fn capture_probability_is_positive_for_n3() {
    for l in 3..=200u64 {
        for k in 3..=l {
            let a = witness_size(l, k, 3, 1).min(l);
            let tq = TailQuery::new(l, k, a, 3).unwrap();
            let pc = capture_probability(&tq);
            assert!(pc > BigRational::zero(), "L={l}, K={k}");
            if k % 37 == 0 {
                assert_eq!(pc + exact_tail(&tq), BigRational::one());
            }
        }
    }
}
