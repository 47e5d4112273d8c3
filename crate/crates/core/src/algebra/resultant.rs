//! Sylvester resultants via fraction-free elimination over the polynomial
//! ring.

use super::multipoly::MultiPoly;
use crate::error::{Error, Result};

/// The `(l+m) × (l+m)` Sylvester matrix of `f` and `g` in `x_var`, where
/// `l = deg_var f` and `m = deg_var g`. Rows `0..m` hold shifted
/// coefficients of `f`, rows `m..m+l` those of `g`, highest power first.
pub fn sylvester_matrix(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<Vec<Vec<MultiPoly>>> {
    if f.field() != g.field() || f.nvars() != g.nvars() {
        return Err(Error::FieldMismatch("resultant operands live in different rings".into()));
    }
    if var >= f.nvars() {
        return Err(Error::InvalidParameter(format!("variable index {var} out of range")));
    }
    let l = f.degree_in(var) as usize;
    let m = g.degree_in(var) as usize;
    if l == 0 || f.is_zero() {
        return Err(Error::ZeroDegreeInVariable(var + 1));
    }
    if m == 0 || g.is_zero() {
        return Err(Error::ZeroDegreeInVariable(var + 1));
    }
    let zero = MultiPoly::zero(f.field(), f.nvars());
    let size = l + m;
    let fc = f.coeffs_in(var);
    let gc = g.coeffs_in(var);
    let mut rows = Vec::with_capacity(size);
    for shift in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in fc.iter().enumerate() {
            row[shift + l - k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..l {
        let mut row = vec![zero.clone(); size];
        for (k, c) in gc.iter().enumerate() {
            row[shift + m - k] = c.clone();
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Determinant of a square matrix over the polynomial ring by Bareiss
/// elimination; every division is exact.
pub fn bareiss_determinant(mut a: Vec<Vec<MultiPoly>>) -> Result<MultiPoly> {
    let n = a.len();
    let Some(first) = a.first().and_then(|r| r.first()) else {
        return Err(Error::InvalidParameter("empty matrix".into()));
    };
    let (field, nvars) = (first.field(), first.nvars());
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    let mut negate = false;
    let mut prev = MultiPoly::one(field, nvars);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(MultiPoly::zero(field, nvars));
            };
            a.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).ok_or_else(|| {
                    Error::InvariantViolation("inexact division in fraction-free elimination".into())
                })?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// `Res(f, g; x_var)`, a polynomial free of `x_var` (the variable count is
/// kept) of total degree at most `deg f · deg g`.
pub fn resultant(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<MultiPoly> {
    bareiss_determinant(sylvester_matrix(f, g, var)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Field;
    use crate::algebra::text::parse_poly;

    // Laplace expansion along the first row.
    fn cofactor_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = MultiPoly::zero(m[0][0].field(), m[0][0].nvars());
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<MultiPoly>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let t = &m[0][j] * &cofactor_det(&minor);
            acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        acc
    }

    #[test]
    fn known_resultants() {
        let q = Field::rational();
        let p = |s| parse_poly(q, 2, s).unwrap();
        let r = resultant(&p("x^2-y"), &p("x-y"), 0).unwrap();
        assert_eq!(r, p("y^2-y"));
        assert_eq!(r, cofactor_det(&sylvester_matrix(&p("x^2-y"), &p("x-y"), 0).unwrap()));

        let a = p("x-3");
        assert!(resultant(&a, &a, 0).unwrap().is_zero());

        let f5 = Field::prime(5).unwrap();
        let p5 = |s| parse_poly(f5, 2, s).unwrap();
        assert_eq!(resultant(&p5("x+y"), &p5("x-y"), 0).unwrap(), p5("3*y"));
    }

    #[test]
    fn degree_zero_rejected() {
        let q = Field::rational();
        let p = |s| parse_poly(q, 2, s).unwrap();
        assert_eq!(resultant(&p("y"), &p("x"), 0), Err(Error::ZeroDegreeInVariable(1)));
    }

    #[test]
    fn bareiss_matches_cofactor_with_pivoting() {
        let q = Field::rational();
        let p = |s| parse_poly(q, 2, s).unwrap();
        // leading zero forces a row swap
        let m = vec![
            vec![p("0"), p("x"), p("1")],
            vec![p("y"), p("2"), p("x*y")],
            vec![p("1"), p("x+y"), p("3")],
        ];
        assert_eq!(bareiss_determinant(m.clone()).unwrap(), cofactor_det(&m));
    }
}
