//! Shared fixtures for the criterion benchmarks.

use joints_core::algebra::parse_poly;
use joints_core::configs::{gen_grid, gen_random_integer, random_points_fp, uniform_unit_points};
use joints_core::{Arrangement, Field, MultiPoly, Point};

pub const SEED: u64 = 7;

/// The prime used for finite-field fixtures; large enough for every grid here.
pub fn fp() -> Field {
    Field::prime(32_003).expect("prime")
}

pub fn grid(side: usize) -> Arrangement {
    gen_grid(side, 3, fp()).expect("grid")
}

pub fn random_rational(lines: usize) -> Arrangement {
    gen_random_integer(lines, 3, 10, SEED).expect("random arrangement")
}

pub fn cloud_fp101(count: usize) -> (Field, Vec<Point>) {
    let f = Field::prime(101).expect("prime");
    (f, random_points_fp(count, 3, f, SEED).expect("points"))
}

pub fn plane_points(count: usize) -> Vec<Point> {
    uniform_unit_points(count, 2, 1_000_000, SEED)
}

/// A pair of dense trivariate polynomials of the given degree over Q.
pub fn resultant_pair(deg: u32) -> (MultiPoly, MultiPoly) {
    let q = Field::rational();
    let f = format!("x^{deg} + 2*y^{deg} - 3*z*x + y*z - 1");
    let g = format!("y^{deg} - x*z^2 + 5*x*y + z - 2");
    (parse_poly(q, 3, &f).expect("poly"), parse_poly(q, 3, &g).expect("poly"))
}
