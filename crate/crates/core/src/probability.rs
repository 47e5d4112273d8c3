//! Hypergeometric capture probabilities for random subcollections of lines,
//! their Monte Carlo validation, and the witness-subcollection search.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{concurrency_map, rank_of_directions, Arrangement, Direction, Point};
use crate::joints::{find_joints, floor_pow2, multiplicity, JointRecord};
use crate::numeric::{binom, binom_u128, Decimal, REPORT_SCALE};
use crate::rng::{rng_from_seed, substream_seed};

/// Monte Carlo draws per independent sub-stream.
pub const MC_CHUNK: u64 = 1 << 14;

/// Concurrency points inspected by the genericity check.
pub const GENERICITY_CAP: usize = 1000;

/// Draw `a` of `l` lines, `k` of which pass through a fixed point; the point
/// is captured when at least `n` of its lines are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TailQuery {
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "K")]
    pub k: u64,
    #[serde(rename = "A")]
    pub a: u64,
    pub n: u64,
}

impl TailQuery {
    pub fn new(l: u64, k: u64, a: u64, n: u64) -> Result<Self> {
        if k > l {
            return Err(Error::InvalidParameter(format!("K = {k} exceeds L = {l}")));
        }
        if a > l {
            return Err(Error::InvalidParameter(format!("sample size A = {a} exceeds L = {l}")));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {n}")));
        }
        Ok(TailQuery { l, k, a, n })
    }
}

/// `C(a, b)`, zero outside `0 ≤ b ≤ a`.
fn c(a: u64, b: i64) -> BigUint {
    if b < 0 || b as u64 > a {
        BigUint::zero()
    } else {
        binom(a, b as u64)
    }
}

/// `P(exactly j marked) = C(K, j)·C(L−K, A−j) / C(L, A)`.
pub fn hypergeometric_term(q: &TailQuery, j: u64) -> BigRational {
    let num = c(q.k, j as i64) * c(q.l - q.k, q.a as i64 - j as i64);
    BigRational::new(BigInt::from(num), BigInt::from(binom(q.l, q.a)))
}

/// The same probability with the roles of the marked set and the sample
/// exchanged: `C(A, j)·C(L−A, K−j) / C(L, K)`.
pub fn hypergeometric_term_swapped(q: &TailQuery, j: u64) -> BigRational {
    let num = c(q.a, j as i64) * c(q.l - q.a, q.k as i64 - j as i64);
    BigRational::new(BigInt::from(num), BigInt::from(binom(q.l, q.k)))
}

/// `1 − P′`: probability that fewer than `n` marked lines are drawn.
pub fn exact_tail(q: &TailQuery) -> BigRational {
    (0..q.n).map(|j| hypergeometric_term(q, j)).fold(BigRational::zero(), |acc, t| acc + t)
}

/// `P′`, summed directly over `j ≥ n`.
pub fn capture_probability(q: &TailQuery) -> BigRational {
    (q.n..=q.k.min(q.a))
        .map(|j| hypergeometric_term(q, j))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub hits: u64,
    /// Estimate of `P′`.
    pub estimate: Decimal,
    /// `sqrt(p̂(1−p̂)/samples)`.
    pub stderr: Decimal,
}

impl McEstimate {
    /// `|p̂ − exact| ≤ sigmas·stderr`, decided exactly by squaring.
    pub fn within_sigmas(&self, exact: &BigRational, sigmas: u64) -> bool {
        let s = BigInt::from(self.samples);
        let h = BigInt::from(self.hits);
        let diff = BigRational::new(h.clone(), s.clone()) - exact;
        let var = BigRational::new(&h * (&s - &h), &s * &s * &s);
        &diff * &diff <= var * BigRational::from_integer(BigInt::from(sigmas * sigmas))
    }
}

/// Marked lines among `a` drawn without replacement from `l`, `k` marked.
fn draw<R: Rng>(rng: &mut R, l: u64, k: u64, a: u64) -> u64 {
    let (mut pool, mut marked, mut got) = (l, k, 0);
    for _ in 0..a {
        if rng.random_range(0..pool) < marked {
            marked -= 1;
            got += 1;
        }
        pool -= 1;
    }
    got
}

/// Seeded estimate of `P′` from `samples` uniform `A`-subsets, split into
/// fixed chunks with their own sub-streams so the result does not depend on
/// the thread count.
pub fn mc_estimate(q: &TailQuery, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = rng_from_seed(substream_seed(seed, ci));
            let todo = MC_CHUNK.min(samples - ci * MC_CHUNK);
            (0..todo).filter(|_| draw(&mut rng, q.l, q.k, q.a) >= q.n).count() as u64
        })
        .sum();
    let s = BigInt::from(samples);
    let estimate = Decimal::from_ratio(&BigRational::new(BigInt::from(hits), s.clone()), REPORT_SCALE);
    let var_num = BigUint::from(hits) * BigUint::from(samples - hits);
    let stderr = Decimal::pow_ratio(&var_num, &BigUint::from(samples).pow(3), 1, 2, REPORT_SCALE);
    Ok(McEstimate {
        samples,
        hits,
        estimate,
        stderr,
    })
}

/// Smallest integer `s` with `s ≥ a_n·L / N^{1/n}`.
pub fn witness_size(l: u64, level: u64, a_n: u64, n: u32) -> u64 {
    let target = BigUint::from(a_n * l).pow(n);
    let nn = BigUint::from(level);
    // s^n·N ≥ (a_n L)^n
    let mut s = crate::numeric::integer_nth_root(&(&target / &nn), n).to_u64().unwrap_or(u64::MAX);
    while BigUint::from(s).pow(n) * &nn < target {
        s += 1;
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub level: u64,
    pub size: u64,
    pub subset: Vec<usize>,
    pub captured: u64,
    pub bucket_size: u64,
    /// `captured / bucket_size`.
    pub ratio: Decimal,
    /// Expected capture count `Σ_x P′(L, K_x, size, n)` over the bucket.
    pub predicted: Decimal,
    pub tries: u64,
}

/// Joints of `arr` with `N_floor ≤ N < 2·N_floor` for `N_floor = floor_pow2(level)`.
pub fn joints_at_level(joints: &[JointRecord], level: u64) -> Vec<JointRecord> {
    let lv = floor_pow2(level.max(1));
    joints.iter().filter(|j| floor_pow2(j.multiplicity) == lv).cloned().collect()
}

fn is_joint_of_subset(arr: &Arrangement, j: &JointRecord, member: &[bool]) -> bool {
    let dirs: Vec<Direction> = j
        .line_ids
        .iter()
        .filter(|&&i| member[i])
        .map(|&i| arr.lines()[i].dir().clone())
        .collect();
    dirs.len() >= arr.n() && rank_of_directions(arr.field(), &dirs) == arr.n()
}

/// Best of `tries` random subcollections of size `⌈a_n·L/N^{1/n}⌉` by the
/// number of level-`N` joints that stay joints; the full collection when
/// that size reaches `L`.
pub fn witness_subcollection(arr: &Arrangement, level: u64, a_n: u64, seed: u64, tries: u64) -> Result<Witness> {
    let n = arr.n();
    if a_n < n as u64 {
        return Err(Error::InvalidParameter(format!("a_n must be at least n = {n}")));
    }
    if level == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    let bucket = joints_at_level(&find_joints(arr)?, level);
    if bucket.is_empty() {
        return Err(Error::InvalidParameter(format!("no joints at level {level}")));
    }
    let l = arr.len() as u64;
    let size = witness_size(l, level, a_n, n as u32).min(l);
    witness_with_size(arr, &bucket, level, size, seed, tries.max(1))
}

/// Witness search with an explicit subset size.
pub fn witness_with_size(
    arr: &Arrangement,
    bucket: &[JointRecord],
    level: u64,
    size: u64,
    seed: u64,
    tries: u64,
) -> Result<Witness> {
    let l = arr.len() as u64;
    if size > l {
        return Err(Error::InvalidParameter(format!("subset size {size} exceeds L = {l}")));
    }
    let tries = if size == l { 1 } else { tries };
    let best = (0..tries)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(substream_seed(seed, t));
            let mut subset: Vec<usize> = rand::seq::index::sample(&mut rng, l as usize, size as usize).into_vec();
            subset.sort_unstable();
            let mut member = vec![false; l as usize];
            for &i in &subset {
                member[i] = true;
            }
            let captured = bucket.iter().filter(|j| is_joint_of_subset(arr, j, &member)).count() as u64;
            (captured, std::cmp::Reverse(t), subset)
        })
        .max_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
        .expect("at least one try");
    let (captured, _, subset) = best;
    let mut predicted = BigRational::zero();
    for j in bucket {
        predicted += capture_probability(&TailQuery::new(l, j.k as u64, size, arr.n() as u64)?);
    }
    let total = bucket.len() as u64;
    Ok(Witness {
        level,
        size,
        subset,
        captured,
        bucket_size: total,
        ratio: Decimal::from_ratio(&BigRational::new(captured.into(), total.into()), REPORT_SCALE),
        predicted: Decimal::from_ratio(&predicted, REPORT_SCALE),
        tries,
    })
}

/// Refuses arrangements in which some `n` concurrent lines fail to span.
pub fn check_generic(arr: &Arrangement) -> Result<()> {
    let n = arr.n();
    let rich: Vec<(Point, Vec<usize>)> = concurrency_map(arr)
        .into_iter()
        .filter(|(_, ids)| ids.len() >= n)
        .map(|(x, ids)| (x, ids.into_iter().collect()))
        .collect();
    if rich.len() > GENERICITY_CAP {
        return Err(Error::CapExceeded(format!(
            "{} concurrency points exceed the genericity check cap of {GENERICITY_CAP}",
            rich.len()
        )));
    }
    for (x, ids) in rich {
        let dirs: Vec<&Direction> = ids.iter().map(|&i| arr.lines()[i].dir()).collect();
        let m = multiplicity(arr.field(), &dirs, n)? as u128;
        if Some(m) != binom_u128(ids.len() as u64, n as u64) {
            let coords: Vec<String> = x.coords().iter().map(|c| arr.field().format_scalar(c)).collect();
            return Err(Error::NotGeneric(format!(
                "{} lines meet at ({}) but only {m} of their {n}-subsets span",
                ids.len(),
                coords.join(", ")
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRatio {
    /// Dyadic level `N_floor`.
    pub level: u64,
    pub joints: u64,
    /// Smallest multiplicity present in the bucket.
    pub min_multiplicity: u64,
    /// `|J_N|·N^{1/(n−1)} / L^{n/(n−1)}` with `N` the smallest multiplicity.
    pub ratio: Decimal,
    /// The same with `N = N_floor`.
    pub ratio_level: Decimal,
}

/// `(|J|^{n−1}·N / L^n)^{1/(n−1)}`.
fn level_ratio(count: u64, nval: u64, l: u64, n: u32) -> Decimal {
    let num = BigUint::from(count).pow(n - 1) * BigUint::from(nval);
    Decimal::pow_ratio(&num, &BigUint::from(l).pow(n), 1, n - 1, REPORT_SCALE)
}

/// Per-level ratios for generic arrangements.
pub fn bound_check_last(arr: &Arrangement) -> Result<Vec<LevelRatio>> {
    check_generic(arr)?;
    let n = arr.n() as u32;
    let l = arr.len() as u64;
    let joints = find_joints(arr)?;
    let mut levels: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
    for j in &joints {
        levels.entry(floor_pow2(j.multiplicity)).or_default().push(j.multiplicity);
    }
    Ok(levels
        .into_iter()
        .map(|(level, ms)| {
            let count = ms.len() as u64;
            let min = *ms.iter().min().expect("nonempty level");
            LevelRatio {
                level,
                joints: count,
                min_multiplicity: min,
                ratio: level_ratio(count, min, l, n),
                ratio_level: level_ratio(count, level, l, n),
            }
        })
        .collect())
}
