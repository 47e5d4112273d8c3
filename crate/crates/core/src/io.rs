//! JSON exchange formats. Scalars travel as decimal strings (`"3"`,
//! `"-7/2"`), so nothing is lost between stages.

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, FieldKind};
use crate::error::{Error, Result};
use crate::geometry::{canonicalize_line, Arrangement, Point};
use crate::joints::{JointRecord, MultijointRecord};
use crate::peeling::{PeelStep, PeelingCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FieldDto {
    Fp { p: u64 },
    Rat,
}

impl FieldDto {
    pub fn of(f: Field) -> Self {
        match f.kind() {
            FieldKind::Prime(p) => FieldDto::Fp { p },
            FieldKind::Rational => FieldDto::Rat,
        }
    }

    pub fn field(self) -> Result<Field> {
        match self {
            FieldDto::Fp { p } => Field::prime(p),
            FieldDto::Rat => Ok(Field::rational()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDto {
    pub base: Vec<String>,
    pub dir: Vec<String>,
    #[serde(default = "one")]
    pub weight: u64,
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementDto {
    pub field: FieldDto,
    pub n: usize,
    pub lines: Vec<LineDto>,
}

/// Three collections sharing a field, for multijoint experiments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDto {
    pub field: FieldDto,
    pub n: usize,
    pub collections: Vec<Vec<LineDto>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointsDto {
    pub field: FieldDto,
    pub n: usize,
    pub points: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepDto {
    pub line_id: usize,
    pub degree_d: usize,
    pub removed_points: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDto {
    pub field: FieldDto,
    pub n: usize,
    pub steps: Vec<StepDto>,
    pub total_removed: usize,
    pub observed_constant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JointDto {
    pub point: Vec<String>,
    pub line_ids: Vec<usize>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultijointDto {
    pub point: Vec<String>,
    pub line_ids: [Vec<usize>; 3],
    #[serde(rename = "N1")]
    pub n1: u64,
    #[serde(rename = "N2")]
    pub n2: u64,
    #[serde(rename = "N3")]
    pub n3: u64,
    #[serde(rename = "Nprime")]
    pub n_prime: u64,
}

/// Either file shape accepted where an arrangement is expected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrangementFile {
    Single(Arrangement),
    Triple([Arrangement; 3]),
}

/// Maps a serde error to a parse error carrying its line and column.
pub fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn from_json<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(json_error)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable value")
}

pub fn point_strings(p: &Point) -> Vec<String> {
    p.coords().iter().map(ToString::to_string).collect()
}

fn parse_point(field: Field, n: usize, v: &[String]) -> Result<Point> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Ok(Point(v.iter().map(|s| field.parse_scalar(s)).collect::<Result<_>>()?))
}

fn line_dtos(arr: &Arrangement) -> Vec<LineDto> {
    arr.lines()
        .iter()
        .enumerate()
        .map(|(i, l)| LineDto {
            base: point_strings(l.base()),
            dir: l.dir().coords().iter().map(ToString::to_string).collect(),
            weight: arr.weight(i),
        })
        .collect()
}

fn build(field: Field, n: usize, lines: &[LineDto]) -> Result<Arrangement> {
    let mut out = Vec::with_capacity(lines.len());
    let mut weights = Vec::with_capacity(lines.len());
    for l in lines {
        let base = parse_point(field, n, &l.base)?;
        let dir = parse_point(field, n, &l.dir)?;
        out.push(canonicalize_line(field, base.coords(), dir.coords())?);
        weights.push(l.weight);
    }
    if weights.iter().all(|&w| w == 1) {
        Arrangement::new(field, n, out)
    } else {
        Arrangement::with_weights(field, n, out, weights)
    }
}

pub fn arrangement_dto(arr: &Arrangement) -> ArrangementDto {
    ArrangementDto {
        field: FieldDto::of(arr.field()),
        n: arr.n(),
        lines: line_dtos(arr),
    }
}

pub fn triple_dto(t: &[Arrangement; 3]) -> TripleDto {
    TripleDto {
        field: FieldDto::of(t[0].field()),
        n: t[0].n(),
        collections: t.iter().map(line_dtos).collect(),
    }
}

pub fn arrangement_from_dto(d: &ArrangementDto) -> Result<Arrangement> {
    build(d.field.field()?, d.n, &d.lines)
}

pub fn triple_from_dto(d: &TripleDto) -> Result<[Arrangement; 3]> {
    if d.collections.len() != 3 {
        return Err(Error::InvalidParameter(format!("expected 3 collections, found {}", d.collections.len())));
    }
    let f = d.field.field()?;
    Ok([
        build(f, d.n, &d.collections[0])?,
        build(f, d.n, &d.collections[1])?,
        build(f, d.n, &d.collections[2])?,
    ])
}

pub fn parse_arrangement_file(s: &str) -> Result<ArrangementFile> {
    let v: serde_json::Value = from_json(s)?;
    if v.get("collections").is_some() {
        let d: TripleDto = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(ArrangementFile::Triple(triple_from_dto(&d)?))
    } else {
        let d: ArrangementDto = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(ArrangementFile::Single(arrangement_from_dto(&d)?))
    }
}

pub fn parse_arrangement(s: &str) -> Result<Arrangement> {
    arrangement_from_dto(&from_json(s)?)
}

pub fn parse_triple(s: &str) -> Result<[Arrangement; 3]> {
    triple_from_dto(&from_json(s)?)
}

pub fn points_dto(field: Field, n: usize, points: &[Point]) -> PointsDto {
    PointsDto {
        field: FieldDto::of(field),
        n,
        points: points.iter().map(point_strings).collect(),
    }
}

pub fn parse_points(s: &str) -> Result<(Field, usize, Vec<Point>)> {
    let d: PointsDto = from_json(s)?;
    let f = d.field.field()?;
    let pts = d.points.iter().map(|p| parse_point(f, d.n, p)).collect::<Result<_>>()?;
    Ok((f, d.n, pts))
}

pub fn certificate_dto(field: Field, n: usize, cert: &PeelingCertificate) -> CertificateDto {
    CertificateDto {
        field: FieldDto::of(field),
        n,
        steps: cert
            .steps
            .iter()
            .map(|s| StepDto {
                line_id: s.line_id,
                degree_d: s.degree_d,
                removed_points: s.removed_points.iter().map(point_strings).collect(),
            })
            .collect(),
        total_removed: cert.total_removed,
        observed_constant: cert.observed_constant.to_string(),
    }
}

pub fn certificate_from_dto(d: &CertificateDto) -> Result<PeelingCertificate> {
    let f = d.field.field()?;
    let steps = d
        .steps
        .iter()
        .map(|s| {
            Ok(PeelStep {
                line_id: s.line_id,
                degree_d: s.degree_d,
                removed_points: s.removed_points.iter().map(|p| parse_point(f, d.n, p)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PeelingCertificate {
        steps,
        total_removed: d.total_removed,
        observed_constant: d.observed_constant.parse()?,
    })
}

pub fn parse_certificate(s: &str) -> Result<(Field, usize, PeelingCertificate)> {
    let d: CertificateDto = from_json(s)?;
    Ok((d.field.field()?, d.n, certificate_from_dto(&d)?))
}

pub fn joint_dto(j: &JointRecord) -> JointDto {
    JointDto {
        point: point_strings(&j.point),
        line_ids: j.line_ids.clone(),
        k: j.k,
        multiplicity: j.multiplicity,
    }
}

pub fn multijoint_dto(m: &MultijointRecord) -> MultijointDto {
    MultijointDto {
        point: point_strings(&m.point),
        line_ids: m.line_ids.clone(),
        n1: m.counts[0],
        n2: m.counts[1],
        n3: m.counts[2],
        n_prime: m.n_prime,
    }
}
