use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use joints_core::algebra::{parse_factor_list, parse_poly};
use joints_core::configs::{
    gen_coplanar_lattice, gen_grid, gen_grid_multijoint, gen_random, gen_random_integer, gen_star, grid_points,
    uniform_unit_points,
};
use joints_core::geometry::canonicalize_line;
use joints_core::incidence::{ff_full_census, incidence_report, rich_points};
use joints_core::io::{
    self, arrangement_dto, certificate_dto, joint_dto, multijoint_dto, parse_arrangement_file, parse_certificate,
    parse_points, triple_dto, ArrangementFile,
};
use joints_core::joints::{bucket, coincidence_points, coincidence_sum, find_joints, find_multijoints, weighted_sum};
use joints_core::numeric::{Decimal, REPORT_SCALE};
use joints_core::partition::{gk_partition, line_cell_crossings, verify_partition, BisectMode, PartitionOptions};
use joints_core::peeling::{bound_report, peel_joints, verify_certificate};
use joints_core::probability::{
    bound_check_last, capture_probability, exact_tail, hypergeometric_term, mc_estimate, witness_subcollection,
    TailQuery,
};
use joints_core::rng::{rng_from_seed, substream_seed};
use joints_core::surfaces::{analyze_lines, Surface};
use joints_core::vanishing::{dvir_polynomial, minimal_vanishing_degree};
use joints_core::{Arrangement, Exponent, Field, MultiPoly, Point, Scalar, Verdict};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

use crate::report::{CliError, CliResult, Context, Inputs, Outcome, Table};

fn field_arg(s: &str) -> Result<Field, String> {
    Field::parse_tag(s).map_err(|e| e.to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Grid,
    Star,
    Random,
    CoplanarLattice,
    GridMultijoint,
    GridPoints,
    UnitPoints,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Grid side length.
    #[arg(long = "N")]
    pub side: Option<usize>,
    /// Number of lines (star, random, coplanar lattice).
    #[arg(long = "L")]
    pub lines: Option<usize>,
    /// Ambient dimension.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Field tag: `rat` or `fp:<p>`.
    #[arg(long, default_value = "rat", value_parser = field_arg)]
    pub field: Field,
    /// Coordinate range for random rational configurations.
    #[arg(long, default_value_t = 10)]
    pub range: i64,
    /// Number of points (`unit-points`).
    #[arg(long)]
    pub count: Option<usize>,
    /// Coordinate denominator (`unit-points`).
    #[arg(long, default_value_t = 1_000_000)]
    pub den: i64,
}

pub fn generate(a: &GenerateArgs, seed: u64) -> CliResult<Outcome> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("--kind {:?} needs --{flag}", a.kind)));
    let text = match a.kind {
        Kind::Grid => io::to_json(&arrangement_dto(&gen_grid(need(a.side, "N")?, a.n, a.field).context("generate")?)),
        Kind::Star => io::to_json(&arrangement_dto(&gen_star(need(a.lines, "L")?, a.n, a.field).context("generate")?)),
        Kind::Random => {
            let l = need(a.lines, "L")?;
            let arr = if a.field.is_rational() {
                gen_random_integer(l, a.n, a.range, seed)
            } else {
                gen_random(l, a.n, a.field, seed)
            };
            io::to_json(&arrangement_dto(&arr.context("generate")?))
        }
        Kind::CoplanarLattice => io::to_json(&triple_dto(&gen_coplanar_lattice(need(a.lines, "L")?).context("generate")?)),
        Kind::GridMultijoint => io::to_json(&triple_dto(&gen_grid_multijoint(need(a.side, "N")?).context("generate")?)),
        Kind::GridPoints => {
            let pts = grid_points(need(a.side, "N")?, a.n, a.field);
            io::to_json(&io::points_dto(a.field, a.n, &pts))
        }
        Kind::UnitPoints => {
            if !a.field.is_rational() {
                return Err(usage("unit-points are rational"));
            }
            let pts = uniform_unit_points(need(a.count, "count")?, a.n, a.den, seed);
            io::to_json(&io::points_dto(a.field, a.n, &pts))
        }
    };
    Ok(Outcome {
        artifact: Some(text + "\n"),
        ..Outcome::default()
    })
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Arrangement file; standard input when omitted.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Omit the per-joint list from the report.
    #[arg(long)]
    pub summary: bool,
}

fn read_arrangement_file(inputs: &mut Inputs, path: Option<&std::path::Path>) -> CliResult<ArrangementFile> {
    let text = inputs.read("in", path)?;
    parse_arrangement_file(&text).context("arrangement")
}

fn read_single(inputs: &mut Inputs, role: &str, path: Option<&std::path::Path>) -> CliResult<Arrangement> {
    let text = inputs.read(role, path)?;
    match parse_arrangement_file(&text).context(role)? {
        ArrangementFile::Single(a) => Ok(a),
        ArrangementFile::Triple(_) => Err(usage(format!("--{role} must hold a single arrangement, not three collections"))),
    }
}

pub fn detect(a: &DetectArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let arr = match read_arrangement_file(inputs, a.input.as_deref())? {
        ArrangementFile::Single(arr) => arr,
        ArrangementFile::Triple(t) => return multijoint_of(&t, a.summary),
    };
    let n = arr.n();
    let joints = find_joints(&arr).context("detect")?;
    let mut out = Outcome::default();
    out.put("field", arr.field().tag());
    out.put("n", n);
    out.put("lines", arr.len());
    out.put("joint_count", joints.len());
    let mut table = Table::new(&["N_floor", "K_floor", "joints", "sum_N"]);
    let mut hist = Vec::new();
    for (key, members) in bucket(&joints) {
        let sum: u64 = members.iter().map(|j| j.multiplicity).sum();
        table.push([key.n_floor, key.k_floor, members.len() as u64, sum]);
        hist.push(serde_json::json!({"N_floor": key.n_floor, "K_floor": key.k_floor, "joints": members.len(), "sum_N": sum}));
    }
    out.put("buckets", hist);
    if n >= 2 {
        out.put("sum_N_half", weighted_sum(&joints, Exponent::half()));
        if n > 2 {
            out.put("sum_N_critical", weighted_sum(&joints, Exponent::critical(n)));
        }
        // L^{n/(n-1)} for comparison with Σ N^{1/(n-1)}
        let l = BigUint::from(arr.total_weight());
        out.put(
            "L_pow_n_over_n_minus_1",
            Decimal::pow_ratio(&l.pow(n as u32), &BigUint::from(1u8), 1, n as u32 - 1, REPORT_SCALE),
        );
    }
    let bad: Vec<String> = joints
        .iter()
        .filter(|j| joints_core::numeric::binom_u128(j.k as u64, n as u64).is_some_and(|c| j.multiplicity as u128 > c))
        .map(|j| io::point_strings(&j.point).join(","))
        .collect();
    out.verdict("multiplicity_le_binomial", bad.is_empty(), bad.join("; "));
    if !a.summary {
        out.put("joints", joints.iter().map(joint_dto).collect::<Vec<_>>());
    }
    out.table = Some(table);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct MultijointArgs {
    /// File with three collections; standard input when omitted.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub summary: bool,
}

pub fn multijoint(a: &MultijointArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    match read_arrangement_file(inputs, a.input.as_deref())? {
        ArrangementFile::Triple(t) => multijoint_of(&t, a.summary),
        ArrangementFile::Single(_) => Err(usage("multijoint needs a file with three collections")),
    }
}

fn multijoint_of(t: &[Arrangement; 3], summary: bool) -> CliResult<Outcome> {
    let records = find_multijoints(t).context("multijoint")?;
    let mut out = Outcome::default();
    let sizes: Vec<u64> = t.iter().map(Arrangement::total_weight).collect();
    out.put("field", t[0].field().tag());
    out.put("collection_sizes", &sizes);
    out.put("multijoint_count", records.len());
    let products: Vec<BigUint> = records
        .iter()
        .map(|r| r.counts.iter().map(|&c| BigUint::from(c)).product())
        .collect();
    out.put("sum_sqrt_N1N2N3", Decimal::sum_int_powers(&products, 1, 2, REPORT_SCALE));
    let prod: BigUint = sizes.iter().map(|&s| BigUint::from(s)).product();
    out.put("sqrt_L1L2L3", Decimal::pow_ratio(&prod, &BigUint::from(1u8), 1, 2, REPORT_SCALE));
    match (coincidence_points(t), coincidence_sum(t)) {
        (Ok(c), Ok(s)) => {
            out.put("coincidence_points", c);
            out.put("coincidence_sum", s);
        }
        _ => out.put("coincidence_sum", "undefined: a line is common to all three collections"),
    }
    let mut table = Table::new(&["point", "N1", "N2", "N3", "Nprime"]);
    for r in &records {
        table.push([
            io::point_strings(&r.point).join(" "),
            r.counts[0].to_string(),
            r.counts[1].to_string(),
            r.counts[2].to_string(),
            r.n_prime.to_string(),
        ]);
    }
    if !summary {
        out.put("multijoints", records.iter().map(multijoint_dto).collect::<Vec<_>>());
    }
    out.table = Some(table);
    Ok(out)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VanishMode {
    Dvir,
    Minimal,
}

#[derive(Args, Debug)]
pub struct VanishArgs {
    /// Points file; standard input when omitted.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = VanishMode::Dvir)]
    pub mode: VanishMode,
}

pub fn vanish(a: &VanishArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let text = inputs.read("points", a.points.as_deref())?;
    let (field, n, points) = parse_points(&text).context("points")?;
    let mut out = Outcome::default();
    out.put("field", field.tag());
    out.put("n", n);
    out.put("points", points.len());
    let poly = match a.mode {
        VanishMode::Dvir => {
            let r = dvir_polynomial(field, n, &points).context("vanish")?;
            out.put("degree_bound", r.degree_bound_used);
            out.put("nullspace_dim", r.nullspace_dim);
            r.poly
        }
        VanishMode::Minimal => {
            let (d, poly) = minimal_vanishing_degree(field, n, &points).context("vanish")?;
            out.put("minimal_degree", d);
            poly
        }
    };
    out.put("degree", poly.degree());
    out.put("terms", poly.terms().count());
    out.put("poly", poly.to_string());
    let misses = points.iter().filter(|x| !poly.eval(x.coords()).is_zero()).count();
    out.verdict("nonzero", !poly.is_zero(), "");
    out.verdict("vanishes_on_points", misses == 0, if misses > 0 { format!("{misses} points missed") } else { String::new() });
    Ok(out)
}

#[derive(Args, Debug)]
pub struct PeelArgs {
    /// Arrangement file; standard input when omitted.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Where to write the certificate.
    #[arg(long)]
    pub cert: Option<PathBuf>,
}

pub fn peel(a: &PeelArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let arr = read_single(inputs, "in", a.input.as_deref())?;
    let joints = find_joints(&arr).context("detect")?;
    let cert = peel_joints(&arr, &joints).context("peel")?;
    let dto = certificate_dto(arr.field(), arr.n(), &cert);
    if let Some(path) = &a.cert {
        crate::report::write_output(Some(path), &io::to_json(&dto))?;
    }
    let mut out = Outcome::default();
    out.put("lines", arr.len());
    out.put("joints", joints.len());
    out.put("steps", cert.steps.len());
    out.put("max_degree", cert.steps.iter().map(|s| s.degree_d).max().unwrap_or(0));
    out.put("observed_constant", &cert.observed_constant);
    if arr.n() >= 2 && !arr.is_empty() {
        let rep = bound_report(&joints, &cert, arr.len(), arr.n()).context("bound report")?;
        out.put("bound", &rep);
        out.verdict("bound_chain", rep.bound_holds, "|J| ≤ Σ d ≤ L·max d");
    }
    let verdict = verify_certificate(&arr, &cert).context("verify")?;
    out.verdict("certificate_valid", verdict.is_valid(), verdict_detail(&verdict));
    out.put("certificate", dto);
    let mut table = Table::new(&["step", "line_id", "degree_d", "removed"]);
    for (i, s) in cert.steps.iter().enumerate() {
        table.push([i, s.line_id, s.degree_d, s.removed_points.len()]);
    }
    out.table = Some(table);
    Ok(out)
}

fn verdict_detail(v: &Verdict) -> String {
    match v {
        Verdict::Valid => String::new(),
        Verdict::Violation { step, reason } => format!("step {step}: {reason}"),
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub cert: PathBuf,
}

pub fn verify(a: &VerifyArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let arr = read_single(inputs, "in", a.input.as_deref())?;
    let text = inputs.read("cert", Some(&a.cert))?;
    let (field, n, cert) = parse_certificate(&text).context("certificate")?;
    if field != arr.field() || n != arr.n() {
        return Err(usage("certificate and arrangement live in different spaces"));
    }
    let verdict = verify_certificate(&arr, &cert).context("verify")?;
    let mut out = Outcome::default();
    out.put("steps", cert.steps.len());
    out.put("total_removed", cert.total_removed);
    out.put("verdict", &verdict);
    out.verdict("certificate_valid", verdict.is_valid(), verdict_detail(&verdict));
    Ok(out)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartitionMode {
    Heuristic,
    ExactD1,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    /// Points file (rational); standard input when omitted.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub d: u32,
    #[arg(long, value_enum, default_value_t = PartitionMode::ExactD1)]
    pub mode: PartitionMode,
    /// `C` in the cell bound `max cell ≤ C·S/2^J`.
    #[arg(long, default_value_t = 4)]
    pub cell_constant: u64,
    #[arg(long)]
    pub slack: Option<usize>,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Random lines checked against the crossing bound.
    #[arg(long, default_value_t = 100)]
    pub lines: usize,
    /// Also write the report here (same as --out).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn partition(a: &PartitionArgs, inputs: &mut Inputs, seed: u64) -> CliResult<Outcome> {
    let text = inputs.read("points", a.points.as_deref())?;
    let (field, n, points) = parse_points(&text).context("points")?;
    if !field.is_rational() {
        return Err(usage("partitioning needs rational points"));
    }
    let mut opts = PartitionOptions {
        cell_constant: a.cell_constant,
        ..PartitionOptions::default()
    };
    opts.bisect.slack = a.slack;
    opts.bisect.restarts = a.restarts;
    opts.bisect.seed = seed;
    match a.mode {
        PartitionMode::Heuristic => {
            opts.exact_linear_steps = false;
            opts.bisect.mode = BisectMode::Heuristic;
        }
        PartitionMode::ExactD1 => opts.bisect.mode = BisectMode::ExactD1,
    }
    let r = gk_partition(&points, a.d, &opts).context("partition")?;
    let mut out = Outcome::default();
    out.put("n", n);
    out.put("S", points.len());
    out.put("d", a.d);
    out.put("factors", r.poly.factors.iter().map(MultiPoly::to_string).collect::<Vec<_>>());
    out.put("factor_degrees", r.poly.factors.iter().map(MultiPoly::degree).collect::<Vec<_>>());
    out.put("total_degree", r.poly.total_degree);
    out.put("J", r.poly.factors.len());
    out.put("on_zero_set", r.on_zero_set.len());
    out.put("max_cell", r.max_cell);
    out.put("degree_budget_met", r.degree_budget_met);
    out.put("cell_target_met", r.cell_target_met);
    let mut table = Table::new(&["cell", "size"]);
    let mut sizes = BTreeMap::new();
    for (id, pts) in &r.cells {
        table.push([id.to_string(), pts.len().to_string()]);
        sizes.insert(id.to_string(), pts.len());
    }
    out.put("cell_sizes", sizes);
    out.verdict("coverage", verify_partition(&points, &r), "");
    out.verdict("cell_bound", r.cell_bound_holds, format!("max cell {} with C = {}", r.max_cell, a.cell_constant));
    if n == 2 && a.lines > 0 {
        let mut rng = rng_from_seed(substream_seed(seed, u64::MAX));
        let q = Field::rational();
        let mut worst = 0;
        let mut checked = 0;
        for _ in 0..a.lines {
            let base: Vec<Scalar> = (0..2)
                .map(|_| q.from_ratio(&BigRational::new(rng.random_range(-1000..=2000).into(), 1000.into())).unwrap())
                .collect();
            let dir: Vec<Scalar> = loop {
                let d = [rng.random_range(-100i64..=100), rng.random_range(-100i64..=100)];
                if d != [0, 0] {
                    break d.iter().map(|&v| q.from_i64(v)).collect();
                }
            };
            let line = canonicalize_line(q, &base, &dir).context("line")?;
            if let Ok(k) = line_cell_crossings(&line, &r.poly) {
                worst = worst.max(k);
                checked += 1;
            }
        }
        out.put("lines_checked", checked);
        out.put("max_crossings", worst);
        out.verdict(
            "crossing_bound",
            worst <= r.poly.total_degree as usize + 1,
            format!("max {worst} cells per line, bound {}", r.poly.total_degree + 1),
        );
    }
    out.table = Some(table);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct IncidenceArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub lines: PathBuf,
    /// Largest richness reported.
    #[arg(long, default_value_t = 8)]
    pub max_k: usize,
}

pub fn incidence(a: &IncidenceArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let text = inputs.read("points", Some(&a.points))?;
    let (field, n, points) = parse_points(&text).context("points")?;
    let arr = read_single(inputs, "lines", Some(&a.lines))?;
    if field != arr.field() || n != arr.n() {
        return Err(usage("points and lines live in different spaces"));
    }
    let rep = incidence_report(&points, &arr).context("incidence")?;
    let mut out = Outcome::default();
    out.put("report", &rep);
    let mut table = Table::new(&["k", "rich_points"]);
    let mut rich = BTreeMap::new();
    for k in 2..=a.max_k.max(2) {
        let c = rich_points(&arr, k).context("rich points")?.len();
        table.push([k, c]);
        rich.insert(k.to_string(), c);
    }
    out.put("rich_points", rich);
    out.verdict("I_le_PL", rep.incidences <= rep.points * rep.lines, "");
    out.table = Some(table);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    /// One or more primes, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}

pub fn census(a: &CensusArgs) -> CliResult<Outcome> {
    let mut ps = a.p.clone();
    ps.sort_unstable();
    ps.dedup();
    let mut out = Outcome::default();
    let mut table = Table::new(&["p", "P", "L", "I", "st_rhs", "ratio"]);
    let mut reports = Vec::new();
    for &p in &ps {
        let r = ff_full_census(p, a.n).context("census")?;
        table.push([
            p.to_string(),
            r.points.to_string(),
            r.lines.to_string(),
            r.incidences.to_string(),
            r.st_rhs.to_string(),
            r.ratio.to_string(),
        ]);
        reports.push(r);
    }
    if let [single] = reports.as_slice() {
        out.put("report", single);
    }
    out.put("census", reports.iter().zip(&ps).map(|(r, p)| serde_json::json!({"p": p, "report": r})).collect::<Vec<_>>());
    if reports.len() > 1 {
        let increasing = reports.windows(2).all(|w| w[0].ratio.certainly_lt(&w[1].ratio));
        out.verdict("st_ratio_increasing", increasing, "");
    }
    out.table = Some(table);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    /// Surface polynomial (taken square-free as given).
    #[arg(long, conflicts_with = "factors")]
    pub poly: Option<String>,
    /// Factor list such as `(x-y)^2*(x+y)*z`.
    #[arg(long)]
    pub factors: Option<String>,
    /// Rational lines in Q^3 to classify.
    #[arg(long)]
    pub lines: Option<PathBuf>,
    /// Also write the report here (same as --out).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn surface(a: &SurfaceArgs, inputs: &mut Inputs) -> CliResult<Outcome> {
    let q = Field::rational();
    let s = match (&a.poly, &a.factors) {
        (Some(p), None) => Surface::square_free(parse_poly(q, 3, p).context("--poly")?),
        (None, Some(f)) => Surface::from_factors(parse_factor_list(q, 3, f).context("--factors")?),
        _ => return Err(usage("give exactly one of --poly or --factors")),
    }
    .context("surface")?;
    let lines = match &a.lines {
        Some(path) => {
            let arr = read_single(inputs, "lines", Some(path))?;
            if !arr.field().is_rational() || arr.n() != 3 {
                return Err(usage("--lines must be a rational arrangement in dimension 3"));
            }
            arr.lines().to_vec()
        }
        None => Vec::new(),
    };
    let rep = analyze_lines(&s, &lines).context("surface")?;
    let mut out = Outcome::default();
    out.put("poly", s.poly().to_string());
    out.put("square_free", s.sf().to_string());
    out.put("report", &rep);
    out.verdict("critical_bound", rep.critical_bound_holds, format!("{} critical lines", rep.critical_count));
    out.verdict("critical_flat_exclusive", rep.exclusive, "");
    let mut table = Table::new(&["line_id", "in_surface", "critical", "flat", "pi_vanish", "in_plane"]);
    for l in &rep.lines {
        table.push([
            l.line_id.to_string(),
            l.in_surface.to_string(),
            l.critical.to_string(),
            l.flat.map_or("".into(), |f| f.to_string()),
            l.pi_vanish.to_string(),
            l.in_plane.to_string(),
        ]);
    }
    out.table = Some(table);
    Ok(out)
}

#[derive(Args, Debug)]
pub struct FurthArgs {
    #[arg(long = "L")]
    pub l: Option<u64>,
    #[arg(long = "K")]
    pub k: Option<u64>,
    #[arg(long = "A")]
    pub a: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub n: u64,
    /// Monte Carlo samples (0 = none).
    #[arg(long, default_value_t = 0)]
    pub mc: u64,
    /// Arrangement for the witness search and the generic bound check.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Dyadic level for the witness search.
    #[arg(long)]
    pub level: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub a_n: u64,
    #[arg(long, default_value_t = 16)]
    pub tries: u64,
}

pub fn furth(a: &FurthArgs, inputs: &mut Inputs, seed: u64) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    match (a.l, a.k, a.a) {
        (Some(l), Some(k), Some(aa)) => {
            let q = TailQuery::new(l, k, aa, a.n).context("query")?;
            let tail = exact_tail(&q);
            let capture = capture_probability(&q);
            out.put("query", q);
            out.put("exact_tail", tail.to_string());
            out.put("capture_probability", capture.to_string());
            out.put("capture_decimal", Decimal::from_ratio(&capture, 20));
            let mut table = Table::new(&["j", "probability"]);
            for j in 0..=k.min(aa) {
                table.push([j.to_string(), hypergeometric_term(&q, j).to_string()]);
            }
            out.table = Some(table);
            if a.mc > 0 {
                let est = mc_estimate(&q, a.mc, seed).context("monte carlo")?;
                out.verdict("mc_within_3_sigma", est.within_sigmas(&capture, 3), "");
                out.put("monte_carlo", est);
            }
        }
        (None, None, None) => {}
        _ => return Err(usage("--L, --K and --A go together")),
    }
    if let Some(path) = &a.input {
        let arr = read_single(inputs, "in", Some(path))?;
        match bound_check_last(&arr) {
            Ok(levels) => out.put("bound_check", levels),
            Err(e) => out.put("bound_check", format!("refused: {e}")),
        }
        if let Some(level) = a.level {
            let w = witness_subcollection(&arr, level, a.a_n, seed, a.tries).context("witness")?;
            out.put("witness", w);
        }
    } else if a.level.is_some() {
        return Err(usage("--level needs --in"));
    }
    if out.payload.is_empty() {
        return Err(usage("nothing to do: give --L/--K/--A or --in"));
    }
    Ok(out)
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Largest grid side for the detect+peel timing.
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    #[arg(long, default_value_t = 1)]
    pub repeat: u32,
}

/// Wall-clock timings of representative pipelines; not deterministic.
pub fn bench(a: &BenchArgs, seed: u64) -> CliResult<Outcome> {
    let mut table = Table::new(&["workload", "size", "ms"]);
    let time = |f: &mut dyn FnMut() -> CliResult<()>| -> CliResult<u128> {
        let start = Instant::now();
        for _ in 0..a.repeat.max(1) {
            f()?;
        }
        Ok(start.elapsed().as_millis() / a.repeat.max(1) as u128)
    };
    let fp = Field::prime(32_003).expect("prime");
    for side in (2..=a.max_n).step_by(2) {
        let arr = gen_grid(side, 3, fp).context("grid")?;
        let ms = time(&mut || {
            let joints = find_joints(&arr).context("detect")?;
            peel_joints(&arr, &joints).context("peel").map(|_| ())
        })?;
        table.push(["grid_detect_peel".to_string(), side.to_string(), ms.to_string()]);
    }
    for p in [3u64, 7, 13] {
        let ms = time(&mut || ff_full_census(p, 2).context("census").map(|_| ()))?;
        table.push(["census".to_string(), p.to_string(), ms.to_string()]);
    }
    let pts = uniform_unit_points(2000, 2, 1_000_000, seed);
    let ms = time(&mut || {
        gk_partition(&pts, 8, &PartitionOptions::default())
            .context("partition")
            .map(|_| ())
    })?;
    table.push(["partition_d8".to_string(), "2000".to_string(), ms.to_string()]);
    let f101 = Field::prime(101).expect("prime");
    let cloud: Vec<Point> = joints_core::configs::random_points_fp(500, 3, f101, seed).context("points")?;
    let ms = time(&mut || dvir_polynomial(f101, 3, &cloud).context("vanish").map(|_| ()))?;
    table.push(["dvir_fp101_n3".to_string(), "500".to_string(), ms.to_string()]);
    let mut out = Outcome::default();
    out.put(
        "timings",
        table
            .rows
            .iter()
            .map(|r| serde_json::json!({"workload": r[0], "size": r[1], "ms": r[2].parse::<u64>().unwrap_or(0)}))
            .collect::<Vec<_>>(),
    );
    out.put("threads", rayon::current_num_threads());
    out.table = Some(table);
    Ok(out)
}
