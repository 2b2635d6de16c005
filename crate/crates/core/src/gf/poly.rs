//! Exact integer polynomials in `z`, and polynomials in `t` over them.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Univariate polynomial with integer coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `c z^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c.into());
        Self::new(coeffs)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Exact quotient `self / d` in `Z[z]`; fails if `d` does not divide `self`.
    pub fn exact_div(&self, d: &IntPolynomial) -> Result<IntPolynomial> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::Analysis("division by the zero polynomial".into()))?;
        let lead = d.leading().expect("nonzero").clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return if self.is_zero() {
                Ok(Self::zero())
            } else {
                Err(Error::Analysis(format!("{d} does not divide {self}")))
            };
        }
        let mut q = vec![BigInt::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let top = &rem[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qk, r) = top.div_rem(&lead);
            if !r.is_zero() {
                return Err(Error::Analysis(format!("{d} does not divide {self}")));
            }
            for (i, c) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &qk * c;
            }
            q[k] = qk;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::Analysis(format!("{d} does not divide {self}")));
        }
        Ok(Self::new(q))
    }

    /// Splits off the largest power of `z` dividing the polynomial: `self = z^k * rest`.
    pub fn split_monomial(&self) -> (usize, IntPolynomial) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (k, Self::new(self.coeffs[k.min(self.coeffs.len())..].to_vec()))
    }

    /// The rational `c` with `self = c * other`, if one exists.
    pub fn scalar_ratio(&self, other: &IntPolynomial) -> Option<BigRational> {
        if self.coeffs.len() != other.coeffs.len() || other.is_zero() {
            return None;
        }
        let mut ratio: Option<BigRational> = None;
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            match (a.is_zero(), b.is_zero()) {
                (true, true) => continue,
                (false, false) => {
                    let r = BigRational::new(a.clone(), b.clone());
                    match &ratio {
                        Some(prev) if *prev != r => return None,
                        _ => ratio = Some(r),
                    }
                }
                _ => return None,
            }
        }
        ratio.filter(|r| !r.is_zero())
    }

    /// Ascending sparse text form in variable `var`, e.g. `-4 - 19 z + 32 z^2`.
    pub fn to_text(&self, var: &str) -> String {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (c.clone(), monomial_text(var, k)));
        join_terms(terms)
    }
}

fn monomial_text(var: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => String::from(var),
        _ => format!("{var}^{k}"),
    }
}

// Joins (coefficient, monomial) pairs as `a + b x - c x^2`.
pub(crate) fn join_terms(terms: impl Iterator<Item = (BigInt, String)>) -> String {
    let mut out = String::new();
    for (c, mono) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mono.is_empty() {
            out.push_str(&format!("{mag}"));
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag} {mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("z"))
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `P(z, t) = sum_j c_j(z) t^j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    // coefficient polynomials in z, indexed by the power of t
    by_t: Vec<IntPolynomial>,
}

impl BivariatePolynomial {
    pub fn new(by_t: Vec<IntPolynomial>) -> Self {
        let mut p = BivariatePolynomial { by_t };
        while p.by_t.last().is_some_and(|c| c.is_zero()) {
            p.by_t.pop();
        }
        p
    }

    /// From `(coefficient, power of z, power of t)` terms.
    pub fn from_terms(terms: &[(i64, usize, usize)]) -> Self {
        let deg_t = terms.iter().map(|t| t.2).max().map_or(0, |d| d + 1);
        let mut by_t = vec![IntPolynomial::zero(); deg_t];
        for &(c, zi, tj) in terms {
            by_t[tj] = &by_t[tj] + &IntPolynomial::monomial(c, zi);
        }
        Self::new(by_t)
    }

    /// A polynomial in `t` alone.
    pub fn in_t(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| IntPolynomial::constant(c)).collect())
    }

    /// A polynomial in `z` alone.
    pub fn in_z(p: IntPolynomial) -> Self {
        Self::new(vec![p])
    }

    pub fn t() -> Self {
        Self::in_t(&[0, 1])
    }

    pub fn z() -> Self {
        Self::in_z(IntPolynomial::monomial(1, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.by_t.is_empty()
    }

    pub fn degree_t(&self) -> Option<usize> {
        self.by_t.len().checked_sub(1)
    }

    /// Coefficient of `t^j` as a polynomial in `z`.
    pub fn coeff_t(&self, j: usize) -> IntPolynomial {
        self.by_t.get(j).cloned().unwrap_or_default()
    }

    pub fn coeffs_t(&self) -> &[IntPolynomial] {
        &self.by_t
    }

    pub fn derivative_t(&self) -> Self {
        Self::new(
            self.by_t
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(&BigInt::from(j)))
                .collect(),
        )
    }
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let n = self.by_t.len().max(rhs.by_t.len());
        BivariatePolynomial::new((0..n).map(|j| &self.coeff_t(j) + &rhs.coeff_t(j)).collect())
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let n = self.by_t.len().max(rhs.by_t.len());
        BivariatePolynomial::new((0..n).map(|j| &self.coeff_t(j) - &rhs.coeff_t(j)).collect())
    }
}

impl Mul for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn mul(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return BivariatePolynomial::default();
        }
        let mut out = vec![IntPolynomial::zero(); self.by_t.len() + rhs.by_t.len() - 1];
        for (i, a) in self.by_t.iter().enumerate() {
            for (j, b) in rhs.by_t.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        BivariatePolynomial::new(out)
    }
}

impl fmt::Display for BivariatePolynomial {
    /// Monomials ordered by power of `t`, then of `z`: `z - t - z t + t^2 + ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (j, cz) in self.by_t.iter().enumerate() {
            for (i, c) in cz.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mono = match (monomial_text("z", i), monomial_text("t", j)) {
                    (a, b) if a.is_empty() => b,
                    (a, b) if b.is_empty() => a,
                    (a, b) => format!("{a} {b}"),
                };
                terms.push((c.clone(), mono));
            }
        }
        f.write_str(&join_terms(terms.into_iter()))
    }
}
