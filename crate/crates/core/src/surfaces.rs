//! Critical and flat points and lines of surfaces `Z = {p = 0}` in Q^3.
//!
//! Everything is computed from the square-free part `p_sf`, which callers
//! supply through a factor list.

use serde::Serialize;

use crate::algebra::{expand_factors, gradient, hasse_derivative, restrict_to_line, square_free_part};
use crate::algebra::{Field, Monomial, MultiPoly, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{Line, Point};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface {
    poly: MultiPoly,
    factors: Vec<(MultiPoly, u32)>,
    sf: MultiPoly,
}

impl Surface {
    pub fn from_factors(factors: Vec<(MultiPoly, u32)>) -> Result<Self> {
        if let Some((f, _)) = factors.first() {
            if !f.field().is_rational() || f.nvars() != 3 {
                return Err(Error::InvalidParameter("surfaces are rational polynomials in 3 variables".into()));
            }
        }
        let poly = expand_factors(&factors)?;
        if poly.degree() < 1 {
            return Err(Error::InvalidParameter("surface polynomial must be nonconstant".into()));
        }
        let sf = square_free_part(&factors)?;
        Ok(Surface { poly, factors, sf })
    }

    /// A surface given by a polynomial the caller asserts is square-free.
    pub fn square_free(poly: MultiPoly) -> Result<Self> {
        Self::from_factors(vec![(poly, 1)])
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn factors(&self) -> &[(MultiPoly, u32)] {
        &self.factors
    }

    pub fn sf(&self) -> &MultiPoly {
        &self.sf
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree()
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        gradient(&self.sf)
    }

    pub fn hessian(&self) -> HessianMatrix {
        let g = self.gradient();
        let h = std::array::from_fn(|i| {
            std::array::from_fn(|j| hasse_derivative(&g[i], &Monomial::unit(3, j)).expect("3 variables"))
        });
        HessianMatrix(h)
    }
}

/// Symmetric matrix of second partial derivatives of `p_sf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HessianMatrix(pub [[MultiPoly; 3]; 3]);

impl HessianMatrix {
    pub fn eval(&self, x: &[Scalar]) -> [[Scalar; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].eval(x)))
    }
}

fn check_line(l: &Line) -> Result<()> {
    if l.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: l.dim(),
        });
    }
    if l.base().coords().iter().chain(l.dir().coords()).any(|c| c.as_rat().is_none()) {
        return Err(Error::FieldMismatch("surface lines must be rational".into()));
    }
    Ok(())
}

fn vanishes_on_line(f: &MultiPoly, l: &Line) -> Result<bool> {
    Ok(restrict_to_line(f, l.base().coords(), l.dir().coords())?.is_zero())
}

/// Whether `l ⊂ Z`.
pub fn line_in_surface(s: &Surface, l: &Line) -> Result<bool> {
    check_line(l)?;
    vanishes_on_line(&s.poly, l)
}

/// Every point of `l` is a critical point: `p_sf` and `∇p_sf` vanish along it.
pub fn is_critical_line(s: &Surface, l: &Line) -> Result<bool> {
    check_line(l)?;
    if !vanishes_on_line(&s.sf, l)? {
        return Ok(false);
    }
    for g in s.gradient() {
        if !vanishes_on_line(&g, l)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(∇p × e_j)^T H_p (∇p × e_j)` for `j = 1, 2, 3`, with `p = p_sf`.
pub fn pi_polynomials(s: &Surface) -> Result<[MultiPoly; 3]> {
    let g = s.gradient();
    let h = s.hessian();
    let q = Field::rational();
    let zero = MultiPoly::zero(q, 3);
    let cross = |j: usize| -> [MultiPoly; 3] {
        // v × e_1 = (0, v3, -v2), v × e_2 = (-v3, 0, v1), v × e_3 = (v2, -v1, 0)
        match j {
            0 => [zero.clone(), g[2].clone(), -&g[1]],
            1 => [-&g[2], zero.clone(), g[0].clone()],
            _ => [g[1].clone(), -&g[0], zero.clone()],
        }
    };
    let bound = (3 * s.sf.degree() as i64 - 4).max(0) as u32;
    let out: [MultiPoly; 3] = std::array::from_fn(|j| {
        let v = cross(j);
        let mut acc = MultiPoly::zero(q, 3);
        for a in 0..3 {
            for b in 0..3 {
                if v[a].is_zero() || v[b].is_zero() || h.0[a][b].is_zero() {
                    continue;
                }
                acc = &acc + &(&(&v[a] * &h.0[a][b]) * &v[b]);
            }
        }
        acc
    });
    for (j, pi) in out.iter().enumerate() {
        if !pi.is_zero() && pi.degree() > bound {
            return Err(Error::InvariantViolation(format!(
                "Π_{} has degree {} above 3·deg − 4 = {bound}",
                j + 1,
                pi.degree()
            )));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondForm {
    Vanishes,
    Nonzero,
    CriticalPoint,
}

/// The second fundamental form of `Z` at `x`, as the Hessian restricted to
/// the tangent plane `∇p_sf(x)^⊥` (both diagonal and polarized entries).
pub fn second_form_vanishes_at(s: &Surface, x: &Point) -> Result<SecondForm> {
    if x.dim() != 3 || x.coords().iter().any(|c| c.as_rat().is_none()) {
        return Err(Error::InvalidParameter("expected a rational point in Q^3".into()));
    }
    if !s.poly.eval(x.coords()).is_zero() {
        return Err(Error::NotOnSurface);
    }
    let q = Field::rational();
    let g: Vec<Scalar> = s.gradient().iter().map(|f| f.eval(x.coords())).collect();
    let Some(k) = g.iter().position(|c| !c.is_zero()) else {
        return Ok(SecondForm::CriticalPoint);
    };
    // e_i − (g_i/g_k)·e_k for the two indices i ≠ k span the tangent plane
    let basis: Vec<[Scalar; 3]> = (0..3)
        .filter(|&i| i != k)
        .map(|i| {
            let mut v: [Scalar; 3] = std::array::from_fn(|_| q.zero());
            v[i] = q.one();
            v[k] = q.neg(&q.div(&g[i], &g[k]).expect("nonzero pivot"));
            v
        })
        .collect();
    let h = s.hessian().eval(x.coords());
    let form = |u: &[Scalar; 3], w: &[Scalar; 3]| {
        let mut acc = q.zero();
        for a in 0..3 {
            for b in 0..3 {
                acc = q.add(&acc, &q.mul(&q.mul(&u[a], &h[a][b]), &w[b]));
            }
        }
        acc
    };
    let (u, w) = (&basis[0], &basis[1]);
    if [form(u, u), form(w, w), form(u, w)].iter().all(Scalar::is_zero) {
        Ok(SecondForm::Vanishes)
    } else {
        Ok(SecondForm::Nonzero)
    }
}

/// Whether all three `Π_j` vanish identically along `l`.
pub fn pi_vanish_along(s: &Surface, l: &Line) -> Result<bool> {
    check_line(l)?;
    for pi in pi_polynomials(s)? {
        if !vanishes_on_line(&pi, l)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Flatness by sampling: true iff at least `3d − 3` regular points of `l`
/// (with `d = deg p`) have vanishing second fundamental form.
///
/// Parameters `t = 0, 1, 2, …` are tried in order, skipping critical points,
/// until `samples` regular points have been examined. A critical line has
/// no regular points and is never flat.
pub fn is_flat_line(s: &Surface, l: &Line, samples: usize) -> Result<bool> {
    check_line(l)?;
    if !vanishes_on_line(&s.poly, l)? {
        return Err(Error::LineNotInSurface);
    }
    let need = (3 * s.degree() as usize).saturating_sub(3);
    if samples < need {
        return Err(Error::InvalidParameter(format!("flatness needs at least {need} samples, got {samples}")));
    }
    if is_critical_line(s, l)? {
        return Ok(false);
    }
    let q = Field::rational();
    let (mut regular, mut flat, mut t) = (0usize, 0usize, 0i64);
    while regular < samples {
        let x = l.point_at(q, &q.from_i64(t));
        t += 1;
        match second_form_vanishes_at(s, &x)? {
            SecondForm::CriticalPoint => continue,
            SecondForm::Vanishes => flat += 1,
            SecondForm::Nonzero => {}
        }
        regular += 1;
    }
    Ok(flat >= need)
}

/// Whether `l` lies in one of the planes (degree-1 factors) of `Z`.
pub fn in_plane_factor(s: &Surface, l: &Line) -> Result<bool> {
    check_line(l)?;
    for (f, _) in &s.factors {
        if f.degree() == 1 && vanishes_on_line(f, l)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineAnalysis {
    pub line_id: usize,
    pub in_surface: bool,
    pub critical: bool,
    /// `None` when the line is not contained in the surface.
    pub flat: Option<bool>,
    pub pi_vanish: bool,
    pub in_plane: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    pub degree: u32,
    pub sf_degree: u32,
    pub pi_degrees: [Option<u32>; 3],
    pub lines: Vec<LineAnalysis>,
    pub critical_count: usize,
    /// `critical_count ≤ deg²`.
    pub critical_bound_holds: bool,
    /// No line is both critical and flat.
    pub exclusive: bool,
}

/// Classifies each supplied line, sampling `3d − 3` regular points (at
/// least 3) for flatness.
pub fn analyze_lines(s: &Surface, lines: &[Line]) -> Result<SurfaceReport> {
    let pis = pi_polynomials(s)?;
    let samples = (3 * s.degree() as usize).saturating_sub(3).max(3);
    let mut out = Vec::with_capacity(lines.len());
    for (id, l) in lines.iter().enumerate() {
        let in_surface = line_in_surface(s, l)?;
        let critical = is_critical_line(s, l)?;
        let flat = if in_surface { Some(is_flat_line(s, l, samples)?) } else { None };
        let mut pi_vanish = true;
        for pi in &pis {
            pi_vanish &= vanishes_on_line(pi, l)?;
        }
        out.push(LineAnalysis {
            line_id: id,
            in_surface,
            critical,
            flat,
            pi_vanish,
            in_plane: in_plane_factor(s, l)?,
        });
    }
    let critical_count = out.iter().filter(|a| a.critical).count();
    let d = s.degree() as usize;
    Ok(SurfaceReport {
        degree: s.degree(),
        sf_degree: s.sf.degree(),
        pi_degrees: pis.each_ref().map(|p| (!p.is_zero()).then(|| p.degree())),
        critical_bound_holds: critical_count <= d * d,
        exclusive: out.iter().all(|a| !(a.critical && a.flat == Some(true))),
        critical_count,
        lines: out,
    })
}
