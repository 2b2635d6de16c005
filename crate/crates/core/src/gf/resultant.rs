//! Resultants and discriminants with respect to `t`, computed exactly over `Z[z]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::poly::{BivariatePolynomial, IntPolynomial};
use crate::error::{Error, Result};

/// Sylvester matrix of `p` and `q` in `t`, coefficients in descending order.
pub fn sylvester_matrix(p: &BivariatePolynomial, q: &BivariatePolynomial) -> Result<Vec<Vec<IntPolynomial>>> {
    let n = p.degree_t().ok_or_else(|| Error::Analysis("zero polynomial".into()))?;
    let m = q.degree_t().ok_or_else(|| Error::Analysis("zero polynomial".into()))?;
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for (src, deg, copies) in [(p, n, m), (q, m, n)] {
        let desc: Vec<IntPolynomial> = (0..=deg).rev().map(|j| src.coeff_t(j)).collect();
        for shift in 0..copies {
            let mut row = vec![IntPolynomial::zero(); size];
            for (k, c) in desc.iter().enumerate() {
                row[shift + k] = c.clone();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Determinant by fraction-free (Bareiss) elimination; every division is exact.
pub fn determinant(mut m: Vec<Vec<IntPolynomial>>) -> Result<IntPolynomial> {
    let n = m.len();
    if n == 0 {
        return Ok(IntPolynomial::constant(1));
    }
    let mut sign = false;
    let mut prev = IntPolynomial::constant(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(IntPolynomial::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { -&det } else { det })
}

/// `Res_t(p, q)`.
pub fn resultant_wrt_t(p: &BivariatePolynomial, q: &BivariatePolynomial) -> Result<IntPolynomial> {
    determinant(sylvester_matrix(p, q)?)
}

/// `Disc_t(P) = (-1)^(n(n-1)/2) Res_t(P, P_t) / lc_t(P)`.
pub fn discriminant_wrt_t(p: &BivariatePolynomial) -> Result<IntPolynomial> {
    let n = p
        .degree_t()
        .ok_or_else(|| Error::Analysis("discriminant of the zero polynomial".into()))?;
    if n < 2 {
        return Err(Error::Analysis(format!("degree {n} in t is too small for a discriminant")));
    }
    let res = resultant_wrt_t(p, &p.derivative_t())?;
    let lead = p.coeff_t(n);
    let q = res.exact_div(&lead)?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 {
        q.scale(&BigInt::from(-1))
    } else {
        q
    })
}
