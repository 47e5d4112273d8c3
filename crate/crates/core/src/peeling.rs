//! Peeling: repeatedly delete a line carrying at most `d_min` of the
//! remaining joints, where `d_min` is the minimal degree of a polynomial
//! vanishing on them. The run is recorded as a certificate that can be
//! replayed independently.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Arrangement, Point};
use crate::joints::{bucket, find_joints, BucketKey, JointRecord};
use crate::numeric::{Decimal, REPORT_SCALE};
use crate::vanishing::{full_rank_at, minimal_degree_below};

/// Digits carried by [`BoundReport`] ratios.
pub const RATIO_SCALE: u32 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelStep {
    pub line_id: usize,
    pub degree_d: usize,
    /// Remaining joints on the line when it was deleted, sorted.
    pub removed_points: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelingCertificate {
    pub steps: Vec<PeelStep>,
    pub total_removed: usize,
    /// `|J| / (L · max_step d)`.
    pub observed_constant: Decimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Violation { step: usize, reason: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Remaining joints and their incidences during a peel or a replay.
struct PeelState {
    points: Vec<Point>,
    alive: Vec<bool>,
    remaining: usize,
    /// Joint indices on each line.
    on_line: Vec<Vec<usize>>,
    /// Remaining joint count per line; `None` once the line is deleted.
    count: Vec<Option<usize>>,
    /// Joint indices through each line id, for incremental updates.
    lines_of: Vec<Vec<usize>>,
}

impl PeelState {
    fn new(num_lines: usize, joints: &[JointRecord]) -> Self {
        let mut on_line = vec![Vec::new(); num_lines];
        for (j, r) in joints.iter().enumerate() {
            for &l in &r.line_ids {
                on_line[l].push(j);
            }
        }
        PeelState {
            points: joints.iter().map(|r| r.point.clone()).collect(),
            alive: vec![true; joints.len()],
            remaining: joints.len(),
            count: on_line.iter().map(|v| Some(v.len())).collect(),
            on_line,
            lines_of: joints.iter().map(|r| r.line_ids.clone()).collect(),
        }
    }

    fn remaining_points(&self) -> Vec<Point> {
        self.points
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(|(p, _)| p.clone())
            .collect()
    }

    fn remaining_on(&self, line: usize) -> Vec<usize> {
        self.on_line[line].iter().copied().filter(|&j| self.alive[j]).collect()
    }

    /// Fewest remaining joints, ties by lowest id.
    fn select(&self) -> Option<(usize, usize)> {
        self.count
            .iter()
            .enumerate()
            .filter_map(|(l, c)| c.map(|c| (c, l)))
            .min()
            .map(|(c, l)| (l, c))
    }

    /// Deletes a line and its remaining joints. Joints off the line keep
    /// all their spanning lines, so the survivors are still joints.
    fn remove(&mut self, line: usize) -> Vec<usize> {
        let gone = self.remaining_on(line);
        for &j in &gone {
            self.alive[j] = false;
            for &l in &self.lines_of[j] {
                if let Some(c) = self.count[l].as_mut() {
                    *c -= 1;
                }
            }
        }
        self.count[line] = None;
        self.remaining -= gone.len();
        gone
    }
}

fn observed_constant(joints: usize, lines: usize, max_d: usize) -> Decimal {
    if joints == 0 || lines == 0 || max_d == 0 {
        return Decimal::zero(REPORT_SCALE);
    }
    let r = BigRational::new(BigInt::from(joints), BigInt::from(lines) * BigInt::from(max_d));
    Decimal::from_ratio(&r, REPORT_SCALE)
}

/// Runs the peeling algorithm on the arrangement's joints.
pub fn peel(arr: &Arrangement) -> Result<PeelingCertificate> {
    let joints = find_joints(arr)?;
    peel_joints(arr, &joints)
}

/// [`peel`] with precomputed joints.
pub fn peel_joints(arr: &Arrangement, joints: &[JointRecord]) -> Result<PeelingCertificate> {
    let (field, n) = (arr.field(), arr.n());
    let mut state = PeelState::new(arr.len(), joints);
    let mut steps = Vec::new();
    // d_min of the remaining set, valid while the set is unchanged
    let mut cached: Option<usize> = None;
    let mut last: Option<usize> = None;
    while state.remaining > 0 {
        let d = match cached {
            Some(d) => d,
            None => {
                let pts = state.remaining_points();
                let d = minimal_degree_below(field, n, &pts, last)?;
                cached = Some(d);
                last = Some(d);
                d
            }
        };
        let (line, c) = state.select().expect("remaining joints lie on live lines");
        if c > d {
            return Err(Error::InvariantViolation(format!(
                "every line carries more than d_min = {d} remaining joints"
            )));
        }
        let gone = state.remove(line);
        if !gone.is_empty() {
            cached = None;
        }
        let mut removed: Vec<Point> = gone.iter().map(|&j| state.points[j].clone()).collect();
        removed.sort();
        steps.push(PeelStep {
            line_id: line,
            degree_d: d,
            removed_points: removed,
        });
    }
    let max_d = steps.iter().map(|s| s.degree_d).max().unwrap_or(0);
    Ok(PeelingCertificate {
        total_removed: joints.len(),
        observed_constant: observed_constant(joints.len(), arr.len(), max_d),
        steps,
    })
}

/// Replays a certificate against freshly recomputed joints.
pub fn verify_certificate(arr: &Arrangement, cert: &PeelingCertificate) -> Result<Verdict> {
    let joints = find_joints(arr)?;
    let (field, n) = (arr.field(), arr.n());
    let index: BTreeMap<&Point, usize> = joints.iter().enumerate().map(|(i, r)| (&r.point, i)).collect();
    let mut state = PeelState::new(arr.len(), &joints);
    let violation = |step: usize, reason: String| Ok(Verdict::Violation { step, reason });
    // smallest degree shown to admit a vanishing polynomial on a superset of
    // the current remaining set
    let mut deficient_from: Option<usize> = None;
    // (remaining count, degree) whose minimality was last established
    let mut established: Option<(usize, usize)> = None;
    for (s, step) in cert.steps.iter().enumerate() {
        if state.remaining == 0 {
            return violation(s, "step after every joint was removed".into());
        }
        if step.line_id >= arr.len() || state.count[step.line_id].is_none() {
            return violation(s, format!("line {} is not a live line", step.line_id));
        }
        let expected: BTreeSet<&Point> = state.remaining_on(step.line_id).iter().map(|&j| &state.points[j]).collect();
        let claimed: BTreeSet<&Point> = step.removed_points.iter().collect();
        if claimed.len() != step.removed_points.len() {
            return violation(s, "removed points repeat".into());
        }
        if let Some(x) = claimed.iter().find(|x| !index.contains_key(*x)) {
            return violation(s, format!("removed point {x:?} is not a joint"));
        }
        if claimed != expected {
            return violation(
                s,
                format!(
                    "coverage: {} remaining joints on line {}, certificate removes {}",
                    expected.len(),
                    step.line_id,
                    claimed.len()
                ),
            );
        }
        let d = step.degree_d;
        if step.removed_points.len() > d {
            return violation(s, format!("{} removed points exceed d = {d}", step.removed_points.len()));
        }
        if established != Some((state.remaining, d)) {
            let pts = state.remaining_points();
            let deficient = deficient_from.is_some_and(|d0| d0 <= d) || !full_rank_at(field, n, &pts, d);
            if !deficient {
                return violation(s, format!("degree claim: no polynomial of degree {d} vanishes on the remaining joints"));
            }
            if d > 0 && !full_rank_at(field, n, &pts, d - 1) {
                return violation(s, format!("degree claim: a polynomial of degree {} already vanishes", d - 1));
            }
            deficient_from = Some(deficient_from.map_or(d, |d0| d0.min(d)));
            established = Some((state.remaining, d));
        }
        state.remove(step.line_id);
    }
    if state.remaining > 0 {
        return violation(cert.steps.len(), format!("coverage: {} joints never removed", state.remaining));
    }
    if cert.total_removed != joints.len() {
        return violation(cert.steps.len(), format!("total_removed {} ≠ |J| = {}", cert.total_removed, joints.len()));
    }
    let sum_d: usize = cert.steps.iter().map(|s| s.degree_d).sum();
    let max_d = cert.steps.iter().map(|s| s.degree_d).max().unwrap_or(0);
    if joints.len() > sum_d || sum_d > arr.len() * max_d {
        return violation(cert.steps.len(), "aggregate bound |J| ≤ Σd ≤ L·max d fails".into());
    }
    if cert.observed_constant.to_string() != observed_constant(joints.len(), arr.len(), max_d).to_string() {
        return violation(cert.steps.len(), "observed constant does not match".into());
    }
    Ok(Verdict::Valid)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BucketRatio {
    pub bucket: BucketKey,
    pub joints: usize,
    /// `|J_N|·N^{1/(n-1)} / L^{n/(n-1)}` with `N` the bucket's lower end.
    pub ratio_floor: Decimal,
    /// `Σ_{x∈J_N} N(x)^{1/(n-1)} / L^{n/(n-1)}`.
    pub ratio_exact: Decimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub joints: usize,
    pub lines: usize,
    /// `|J| / L^{n/(n-1)}`.
    pub ratio: Decimal,
    pub buckets: Vec<BucketRatio>,
    /// Whether the certified chain `|J| ≤ Σ_steps d ≤ L·max_step d` holds.
    pub bound_holds: bool,
}

fn pow_big(v: usize, e: usize) -> BigUint {
    BigUint::from(v).pow(e as u32)
}

/// `count·N^{1/(n-1)} / L^{n/(n-1)}`, computed as the exact root `(count^{n-1}·N / L^n)^{1/(n-1)}`.
fn scaled_ratio(count: usize, mult: u64, l: usize, n: usize) -> Decimal {
    let num = pow_big(count, n - 1) * BigUint::from(mult);
    Decimal::pow_ratio(&num, &pow_big(l, n), 1, n as u32 - 1, RATIO_SCALE)
}

pub fn bound_report(joints: &[JointRecord], cert: &PeelingCertificate, l: usize, n: usize) -> Result<BoundReport> {
    if n < 2 || l == 0 {
        return Err(Error::InvalidParameter(format!("bound report needs n ≥ 2 and L ≥ 1, got n={n}, L={l}")));
    }
    let buckets = bucket(joints)
        .into_iter()
        .map(|(key, members)| {
            let terms = members.iter().map(|r| (BigUint::from(r.multiplicity), pow_big(l, n)));
            BucketRatio {
                bucket: key,
                joints: members.len(),
                ratio_floor: scaled_ratio(members.len(), key.n_floor, l, n),
                ratio_exact: Decimal::sum_ratio_powers(terms, 1, n as u32 - 1, RATIO_SCALE),
            }
        })
        .collect();
    let sum_d: usize = cert.steps.iter().map(|s| s.degree_d).sum();
    let max_d = cert.steps.iter().map(|s| s.degree_d).max().unwrap_or(0);
    Ok(BoundReport {
        joints: joints.len(),
        lines: l,
        ratio: scaled_ratio(joints.len(), 1, l, n),
        buckets,
        bound_holds: joints.len() <= sum_d && sum_d <= l * max_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configs::{gen_grid, gen_star};
    use crate::Field;

    #[test]
    fn star_and_empty() {
        let q = Field::rational();
        let c = peel(&gen_star(5, 3, q).unwrap()).unwrap();
        assert_eq!(c.steps.len(), 1);
        assert_eq!((c.steps[0].degree_d, c.steps[0].removed_points.len()), (1, 1));
        let arr = gen_star(5, 3, q).unwrap().subset(&[0, 1]);
        let c = peel(&arr).unwrap();
        assert!(c.steps.is_empty());
        assert!(verify_certificate(&arr, &c).unwrap().is_valid());
    }

    #[test]
    fn grid_three() {
        let q = Field::rational();
        let arr = gen_grid(3, 3, q).unwrap();
        let c = peel(&arr).unwrap();
        assert_eq!(c.total_removed, 27);
        assert!(c.steps.iter().all(|s| s.removed_points.len() <= s.degree_d && s.degree_d <= 3));
        // fewest-remaining selection: the first line takes 3, then the lines
        // it crossed are cheaper, so joints leave in smaller groups
        assert_eq!(c.steps[0].removed_points.len(), 3);
        assert!(c.steps.len() <= arr.len());
        assert_eq!(c.steps.iter().map(|s| s.removed_points.len()).sum::<usize>(), 27);
        assert!(verify_certificate(&arr, &c).unwrap().is_valid());
    }

    #[test]
    fn tampering_is_detected() {
        let f = Field::prime(101).unwrap();
        let arr = gen_grid(2, 3, f).unwrap();
        let c = peel(&arr).unwrap();
        assert!(verify_certificate(&arr, &c).unwrap().is_valid());

        let mut t = c.clone();
        t.steps[0].removed_points.pop();
        assert!(matches!(verify_certificate(&arr, &t).unwrap(), Verdict::Violation { step: 0, .. }));

        let mut t = c.clone();
        t.steps[0].degree_d -= 1;
        assert!(!verify_certificate(&arr, &t).unwrap().is_valid());
    }

    #[test]
    fn grid_ratio() {
        let q = Field::rational();
        let arr = gen_grid(10, 3, q).unwrap();
        let joints = find_joints(&arr).unwrap();
        let cert = PeelingCertificate {
            steps: vec![],
            total_removed: 0,
            observed_constant: Decimal::zero(REPORT_SCALE),
        };
        let r = bound_report(&joints, &cert, arr.len(), 3).unwrap();
        assert!(r.ratio.to_string().starts_with("0.19245008972987525483"));
        assert_eq!(r.buckets.len(), 1);
        assert_eq!(r.buckets[0].ratio_floor, r.ratio);
        let star = gen_star(100, 3, q).unwrap();
        let j = find_joints(&star).unwrap();
        let r = bound_report(&j, &cert, 100, 3).unwrap();
        assert_eq!(r.ratio.to_string(), "0.00100000000000000000");
    }
}
