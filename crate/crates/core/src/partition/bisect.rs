//! Polynomial bisection of several finite point sets at once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use super::{IntPoint, SignEvaluator};
use crate::algebra::{Field, Monomial, MultiPoly, Scalar};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::numeric::binom_u128;
use crate::rng::{rng_from_seed, substream_seed};

/// Denominator used when rounding search output to rationals.
const ROUND_DEN: u64 = 1 << 32;

/// Sets up to this total size are handled by exhaustive pair search.
const EXHAUSTIVE_LIMIT: usize = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BisectMode {
    /// Exact line search in the plane (`d = 1`), falling back to the
    /// heuristic when no candidate line bisects.
    ExactD1,
    Heuristic,
}

#[derive(Clone, Debug)]
pub struct BisectOptions {
    pub mode: BisectMode,
    /// Allowed excess over `⌈|S|/2⌉` per side; `None` means 0 for exact
    /// lines and `⌈|S|/20⌉` for the heuristic.
    pub slack: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for BisectOptions {
    fn default() -> Self {
        BisectOptions {
            mode: BisectMode::Heuristic,
            slack: None,
            restarts: 64,
            seed: 0,
        }
    }
}

/// Points strictly on each side of the zero set, and on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideCounts {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl SideCounts {
    pub fn within(&self, slack: usize) -> bool {
        let total = self.pos + self.neg + self.zero;
        let cap = total.div_ceil(2) + slack;
        self.pos <= cap && self.neg <= cap
    }
}

pub fn side_counts(p: &MultiPoly, set: &[Point]) -> SideCounts {
    let ev = SignEvaluator::new(p);
    let pts: Vec<IntPoint> = set.iter().map(IntPoint::new).collect();
    counts_int(&ev, &pts)
}

pub(crate) fn counts_int(ev: &SignEvaluator, set: &[IntPoint]) -> SideCounts {
    let mut c = SideCounts { pos: 0, neg: 0, zero: 0 };
    for x in set {
        match ev.sign(x) {
            1 => c.pos += 1,
            -1 => c.neg += 1,
            _ => c.zero += 1,
        }
    }
    c
}

fn default_slack(opts: &BisectOptions, exact: bool, size: usize) -> usize {
    opts.slack.unwrap_or(if exact { 0 } else { size.div_ceil(20) })
}

fn all_within(p: &MultiPoly, sets: &[Vec<IntPoint>], slack: &[usize]) -> bool {
    let ev = SignEvaluator::new(p);
    sets.iter().zip(slack).all(|(s, &k)| counts_int(&ev, s).within(k))
}

/// A nonzero polynomial of degree `≤ d` whose zero set bisects every set,
/// verified by exact sign counts.
pub fn ham_sandwich_bisect(sets: &[Vec<Point>], d: u32, opts: &BisectOptions) -> Result<MultiPoly> {
    let n = sets
        .iter()
        .flatten()
        .map(Point::dim)
        .next()
        .ok_or_else(|| Error::InvalidParameter("no points to bisect".into()))?;
    if d == 0 {
        return Err(Error::InvalidParameter("bisection needs degree at least 1".into()));
    }
    let cap = binom_u128(d as u64 + n as u64, n as u64).unwrap_or(u128::MAX) - 1;
    if sets.len() as u128 > cap {
        return Err(Error::InvalidParameter(format!(
            "{} sets exceed the C(d+n, n) - 1 = {cap} a degree-{d} polynomial can bisect",
            sets.len()
        )));
    }
    for x in sets.iter().flatten() {
        if x.dim() != n || x.coords().iter().any(|c| c.as_rat().is_none()) {
            return Err(Error::InvalidParameter("bisection needs rational points of one dimension".into()));
        }
    }
    let int_sets: Vec<Vec<IntPoint>> = sets.iter().map(|s| s.iter().map(IntPoint::new).collect()).collect();
    bisect_int(&int_sets, n, d, opts)
}

pub(crate) fn bisect_int(sets: &[Vec<IntPoint>], n: usize, d: u32, opts: &BisectOptions) -> Result<MultiPoly> {
    let nonempty: Vec<Vec<IntPoint>> = sets.iter().filter(|s| !s.is_empty()).cloned().collect();
    if nonempty.is_empty() {
        return Ok(MultiPoly::var(Field::rational(), n, 0));
    }
    if opts.mode == BisectMode::ExactD1 && d == 1 && n == 2 && nonempty.len() <= 2 {
        let slack: Vec<usize> = nonempty.iter().map(|s| default_slack(opts, true, s.len())).collect();
        if let Some(p) = exact_line(&nonempty, &slack) {
            return Ok(p);
        }
    }
    if nonempty.len() == 1 && d >= 1 {
        // a median hyperplane bisects a single set exactly in any dimension
        return Ok(median_hyperplane(&nonempty[0], n));
    }
    heuristic(&nonempty, n, d, opts)
}

fn rat(v: &BigRational) -> Scalar {
    Scalar::Rat(v.clone())
}

/// `a·x + b·y - c` for the plane.
fn line_poly(a: &BigRational, b: &BigRational, c: &BigRational) -> MultiPoly {
    let q = Field::rational();
    let mut p = MultiPoly::zero(q, 2);
    p.add_term(Monomial::unit(2, 0), rat(a));
    p.add_term(Monomial::unit(2, 1), rat(b));
    p.add_term(Monomial::one(2), rat(&-c));
    p
}

/// Hyperplane `u·x = median` with a fixed generic integer normal.
fn median_hyperplane(set: &[IntPoint], n: usize) -> MultiPoly {
    let q = Field::rational();
    let normal: Vec<BigRational> = (0..n).map(|i| BigRational::from_integer(BigInt::from([1009i64, 1, 17, 3][i % 4] + i as i64 / 4))).collect();
    let mut vals: Vec<BigRational> = set.iter().map(|x| x.dot(&normal)).collect();
    let k = (vals.len() - 1) / 2;
    vals.select_nth_unstable(k);
    let c = vals[k].clone();
    let mut p = MultiPoly::zero(q, n);
    for (i, a) in normal.iter().enumerate() {
        p.add_term(Monomial::unit(n, i), rat(a));
    }
    p.add_term(Monomial::one(n), rat(&-c));
    p
}

/// Line through two distinct points of the plane.
fn line_through(x: &IntPoint, y: &IntPoint) -> Option<MultiPoly> {
    let (x0, x1) = (x.coord(0), x.coord(1));
    let (y0, y1) = (y.coord(0), y.coord(1));
    let a = &y1 - &x1;
    let b = &x0 - &y0;
    if a.is_zero() && b.is_zero() {
        return None;
    }
    let c = &a * &x0 + &b * &x1;
    Some(line_poly(&a, &b, &c))
}

fn exact_line(sets: &[Vec<IntPoint>], slack: &[usize]) -> Option<MultiPoly> {
    let total: usize = sets.iter().map(Vec::len).sum();
    if sets.len() == 1 {
        return Some(median_hyperplane(&sets[0], 2));
    }
    if total <= EXHAUSTIVE_LIMIT {
        let all: Vec<&IntPoint> = sets.iter().flatten().collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if let Some(p) = line_through(all[i], all[j]) {
                    if all_within(&p, sets, slack) {
                        return Some(p);
                    }
                }
            }
        }
        return None;
    }
    angular_search(&sets[0], &sets[1], slack)
}

struct Float2 {
    x: f64,
    y: f64,
}

fn to_f(set: &[IntPoint]) -> Vec<Float2> {
    set.iter()
        .map(|p| {
            let v = p.to_f64();
            Float2 { x: v[0], y: v[1] }
        })
        .collect()
}

/// For direction `(1, s)`: index of the median point of `a`, and the
/// imbalance `#{b above} - #{b below}` of `b` relative to the line through
/// it.
fn imbalance(a: &[Float2], b: &[Float2], s: f64) -> (usize, i64) {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    let k = (a.len() - 1) / 2;
    idx.select_nth_unstable_by(k, |&i, &j| (a[i].x + s * a[i].y).total_cmp(&(a[j].x + s * a[j].y)));
    let m = idx[k];
    let c = a[m].x + s * a[m].y;
    let g = b.iter().map(|p| (p.x + s * p.y - c).signum() as i64).sum();
    (m, g)
}

/// Rotates the median line of `a` until it also bisects `b`, then tries
/// exact lines through the median pivot and the points of `b` nearest to
/// the float solution.
fn angular_search(a: &[IntPoint], b: &[IntPoint], slack: &[usize]) -> Option<MultiPoly> {
    let sets = [a.to_vec(), b.to_vec()];
    let (af, bf) = (to_f(a), to_f(b));
    let (mut lo, mut hi) = (-1e6f64, 1e6f64);
    let (_, glo) = imbalance(&af, &bf, lo);
    let (_, ghi) = imbalance(&af, &bf, hi);
    if glo.signum() == ghi.signum() && glo != 0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (_, g) = imbalance(&af, &bf, mid);
        if g == 0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g.signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut pivots: Vec<usize> = Vec::new();
    for s in [lo, hi] {
        let (m, _) = imbalance(&af, &bf, s);
        if !pivots.contains(&m) {
            pivots.push(m);
        }
    }
    let s = 0.5 * (lo + hi);
    for &m in &pivots {
        let c = af[m].x + s * af[m].y;
        let mut near: Vec<(f64, &IntPoint)> = b
            .iter()
            .zip(&bf)
            .map(|(p, f)| ((f.x + s * f.y - c).abs(), p))
            .chain(a.iter().zip(&af).enumerate().filter(|(i, _)| *i != m).map(|(_, (p, f))| ((f.x + s * f.y - c).abs(), p)))
            .collect();
        near.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (_, q) in near.iter().take(24) {
            if let Some(p) = line_through(&a[m], q) {
                if all_within(&p, &sets, slack) {
                    return Some(p);
                }
            }
        }
    }
    None
}

/// Affine normalization `x' = (x - μ)/σ` with rational `μ`, `σ`.
struct Normalization {
    mu: Vec<BigRational>,
    sigma: Vec<BigRational>,
}

impl Normalization {
    fn new(sets: &[Vec<IntPoint>], n: usize) -> Self {
        let all: Vec<Vec<f64>> = sets.iter().flatten().map(IntPoint::to_f64).collect();
        let m = all.len() as f64;
        let mut mu = vec![0.0; n];
        let mut sd = vec![0.0; n];
        for x in &all {
            for i in 0..n {
                mu[i] += x[i] / m;
            }
        }
        for x in &all {
            for i in 0..n {
                sd[i] += (x[i] - mu[i]).powi(2) / m;
            }
        }
        let r = |v: f64| BigRational::from_float(v).map(|r| round_rational(&r)).unwrap_or_else(BigRational::zero);
        Normalization {
            mu: mu.iter().map(|&v| r(v)).collect(),
            sigma: sd
                .iter()
                .map(|&v| {
                    let s = r(v.sqrt());
                    if s.is_positive() {
                        s
                    } else {
                        BigRational::one()
                    }
                })
                .collect(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.mu[i].to_f64().unwrap()) / self.sigma[i].to_f64().unwrap())
            .collect()
    }

    /// Substitutes `x_i ↦ (x_i - μ_i)/σ_i` into `q`.
    fn pull_back(&self, q: &MultiPoly) -> MultiPoly {
        let f = Field::rational();
        let n = q.nvars();
        let lin: Vec<MultiPoly> = (0..n)
            .map(|i| {
                let inv = self.sigma[i].recip();
                let mut p = MultiPoly::zero(f, n);
                p.add_term(Monomial::unit(n, i), rat(&inv));
                p.add_term(Monomial::one(n), rat(&(-&self.mu[i] * &inv)));
                p
            })
            .collect();
        let mut out = MultiPoly::zero(f, n);
        for (m, c) in q.terms() {
            let mut t = MultiPoly::constant(f, n, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = &t * &lin[i].pow(e);
                }
            }
            out = &out + &t;
        }
        out
    }
}

fn round_rational(r: &BigRational) -> BigRational {
    let den = BigInt::from(ROUND_DEN);
    let scaled = r * BigRational::from_integer(den.clone());
    BigRational::new(scaled.round().to_integer(), den)
}

fn monomial_values(x: &[f64], monos: &[Monomial]) -> Vec<f64> {
    monos
        .iter()
        .map(|m| m.exps().iter().zip(x).map(|(&e, v)| v.powi(e as i32)).product())
        .collect()
}

/// Solves the small dense system `A x = b` by partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Float sign imbalance per set, relative to its size.
fn float_imbalance(lifted: &[Vec<Vec<f64>>], a: &[f64]) -> Vec<f64> {
    lifted
        .iter()
        .map(|set| {
            let s: f64 = set
                .iter()
                .map(|phi| phi.iter().zip(a).map(|(u, v)| u * v).sum::<f64>().signum())
                .sum();
            s / set.len() as f64
        })
        .collect()
}

/// Gauss–Newton on the smoothed imbalances `mean tanh(p(x)/τ)`, with τ
/// annealed towards 0.
fn refine(lifted: &[Vec<Vec<f64>>], mut a: Vec<f64>) -> Vec<f64> {
    let k = lifted.len();
    let c = a.len();
    for &tau_scale in &[1.0, 0.3, 0.1, 0.03, 0.01, 0.003] {
        for _ in 0..25 {
            let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            a.iter_mut().for_each(|v| *v /= norm);
            let rms = (lifted
                .iter()
                .flatten()
                .map(|phi| phi.iter().zip(&a).map(|(u, v)| u * v).sum::<f64>().powi(2))
                .sum::<f64>()
                / lifted.iter().map(Vec::len).sum::<usize>() as f64)
                .sqrt()
                .max(1e-12);
            let tau = tau_scale * rms;
            let mut f = vec![0.0; k];
            let mut jac = vec![vec![0.0; c]; k];
            for (i, set) in lifted.iter().enumerate() {
                let w = 1.0 / set.len() as f64;
                for phi in set {
                    let p: f64 = phi.iter().zip(&a).map(|(u, v)| u * v).sum();
                    let t = (p / tau).tanh();
                    f[i] += w * t;
                    let dt = w * (1.0 - t * t) / tau;
                    for (jk, u) in jac[i].iter_mut().zip(phi) {
                        *jk += dt * u;
                    }
                }
            }
            if f.iter().all(|v| v.abs() < 1e-9) {
                break;
            }
            // minimum-norm step: δ = -Jᵀ (J Jᵀ + λI)⁻¹ f
            let lambda = 1e-9;
            let jjt: Vec<Vec<f64>> = (0..k)
                .map(|r| {
                    (0..k)
                        .map(|s| jac[r].iter().zip(&jac[s]).map(|(x, y)| x * y).sum::<f64>() + if r == s { lambda } else { 0.0 })
                        .collect()
                })
                .collect();
            let Some(y) = solve(jjt, f.clone()) else {
                break;
            };
            for (j, aj) in a.iter_mut().enumerate() {
                *aj -= (0..k).map(|r| jac[r][j] * y[r]).sum::<f64>();
            }
        }
    }
    a
}

fn heuristic(sets: &[Vec<IntPoint>], n: usize, d: u32, opts: &BisectOptions) -> Result<MultiPoly> {
    let norm = Normalization::new(sets, n);
    let monos = Monomial::all_up_to(n, d);
    let lifted: Vec<Vec<Vec<f64>>> = sets
        .iter()
        .map(|s| s.iter().map(|x| monomial_values(&norm.apply(&x.to_f64()), &monos)).collect())
        .collect();
    let slack: Vec<usize> = sets.iter().map(|s| default_slack(opts, false, s.len())).collect();
    let float_ok = |a: &[f64]| {
        float_imbalance(&lifted, a)
            .iter()
            .zip(sets)
            .zip(&slack)
            .all(|((r, s), &k)| r.abs() * s.len() as f64 <= 2.0 * k as f64 + 1.0)
    };
    let to_exact = |a: &[f64]| -> Option<MultiPoly> {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let q = MultiPoly::from_terms(
            Field::rational(),
            n,
            monos.iter().cloned().zip(a.iter().map(|v| {
                Scalar::Rat(round_rational(&BigRational::from_float(v / scale).unwrap_or_else(BigRational::zero)))
            })),
        )
        .ok()?;
        if q.degree() == 0 {
            return None;
        }
        let p = norm.pull_back(&q);
        all_within(&p, sets, &slack).then_some(p)
    };
    let batch = rayon::current_num_threads().max(1);
    let mut start = 0;
    while start < opts.restarts {
        let end = (start + batch).min(opts.restarts);
        let found: Vec<Option<MultiPoly>> = (start..end)
            .into_par_iter()
            .map(|r| {
                let mut rng = rng_from_seed(substream_seed(opts.seed, r as u64));
                let a0: Vec<f64> = (0..monos.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let a = refine(&lifted, a0);
                if float_ok(&a) {
                    to_exact(&a)
                } else {
                    None
                }
            })
            .collect();
        if let Some(p) = found.into_iter().flatten().next() {
            return Ok(p);
        }
        start = end;
    }
    Err(Error::SearchFailed(format!(
        "no degree-{d} polynomial bisecting {} sets within slack after {} restarts",
        sets.len(),
        opts.restarts
    )))
}
