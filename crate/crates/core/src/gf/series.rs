//! Truncated power series and the two walk-counting functional equations.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{join_terms, BivariatePolynomial, IntPolynomial};
use crate::error::{Error, Result};

/// Which generating function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    /// `t = z + z t^4 / (1 - t)` (game walks).
    Erase,
    /// `t = z + z t^2 + 4 z t^3 / (1 - t)` (typed search walks).
    Search,
}

impl Equation {
    pub const ALL: [Equation; 2] = [Equation::Erase, Equation::Search];

    pub fn name(self) -> &'static str {
        match self {
            Equation::Erase => "erase",
            Equation::Search => "search",
        }
    }

    /// `(A, B)` in `t = z + z A(t) + z B(t) / (1 - t)`, coefficients in `t`.
    pub fn parts(self) -> (Vec<i64>, Vec<i64>) {
        match self {
            Equation::Erase => (vec![], vec![0, 0, 0, 0, 1]),
            Equation::Search => (vec![0, 0, 1], vec![0, 0, 0, 4]),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Equation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erase" => Ok(Equation::Erase),
            "search" | "nonrep" => Ok(Equation::Search),
            _ => Err(Error::UnknownToken(s.into())),
        }
    }
}

/// Coefficients of `z^0..=z^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn from_integers(coeffs: &[BigInt], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (k, c) in coeffs.iter().enumerate().take(order + 1) {
            s.coeffs[k] = BigRational::from_integer(c.clone());
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &BigRational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The coefficients as integers; fails on the first non-integral one.
    pub fn integer_coefficients(&self) -> Result<Vec<BigInt>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::Analysis(format!("coefficient of z^{k} is {c}, not an integer")))
                }
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs: out }
    }

    /// Multiplication by `z`, dropping the overflowing top coefficient.
    pub fn shift(&self) -> Self {
        let mut coeffs = vec![BigRational::zero()];
        coeffs.extend(self.coeffs[..self.coeffs.len() - 1].iter().cloned());
        PowerSeries { coeffs }
    }

    /// `1 / (1 - self)`; requires a zero constant term.
    pub fn geometric(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Analysis("1/(1-t) needs t(0) = 0".into()));
        }
        let n = self.coeffs.len();
        let mut g = vec![BigRational::zero(); n];
        g[0] = BigRational::from_integer(1.into());
        for k in 1..n {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &g[k - i];
                }
            }
            g[k] = acc;
        }
        Ok(PowerSeries { coeffs: g })
    }

    /// `p(self)` for a polynomial `p` with integer coefficients.
    pub fn compose_poly(&self, p: &[i64]) -> Self {
        let order = self.order();
        let mut acc = Self::zero(order);
        for &c in p.iter().rev() {
            acc = acc.mul(self);
            acc.coeffs[0] += BigRational::from_integer(c.into());
        }
        acc
    }

    pub fn to_text(&self) -> String {
        let terms = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
            let mono = match k {
                0 => String::new(),
                1 => String::from("z"),
                _ => format!("z^{k}"),
            };
            (c.to_integer(), mono)
        });
        join_terms(terms)
    }
}

/// Solves `t = z + z A(t) + z B(t)/(1-t)` by fixed-point iteration up to `z^order`.
///
/// Round `k` fixes the coefficient of `z^k`, so `order` rounds suffice.
pub fn solve_series(eq: Equation, order: usize) -> Result<PowerSeries> {
    if order == 0 {
        return Err(Error::Analysis("series order must be at least 1".into()));
    }
    let (a, b) = eq.parts();
    let mut z = PowerSeries::zero(order);
    z.coeffs[1] = BigRational::from_integer(1.into());
    let mut t = PowerSeries::zero(order);
    for _ in 0..order {
        let rhs = t.compose_poly(&a).add(&t.compose_poly(&b).mul(&t.geometric()?));
        t = z.add(&rhs.shift());
    }
    t.integer_coefficients()?;
    Ok(t)
}

/// Clears the denominator of the functional equation:
/// `P(z, t) = (t - z - z A(t)) (t - 1) + z B(t)`.
pub fn defining_polynomial(eq: Equation) -> BivariatePolynomial {
    let (a, b) = eq.parts();
    let z = BivariatePolynomial::z();
    let t = BivariatePolynomial::t();
    let lhs = &(&t - &z) - &(&z * &BivariatePolynomial::in_t(&a));
    let t_minus_1 = &t - &BivariatePolynomial::in_t(&[1]);
    &(&lhs * &t_minus_1) + &(&z * &BivariatePolynomial::in_t(&b))
}

/// `P(z, s(z))` truncated at the order of `s`.
pub fn substitute(p: &BivariatePolynomial, s: &PowerSeries) -> PowerSeries {
    let order = s.order();
    let mut acc = PowerSeries::zero(order);
    for cz in p.coeffs_t().iter().rev() {
        acc = acc.mul(s);
        let c = PowerSeries::from_integers(cz.coeffs(), order);
        acc = acc.add(&c);
    }
    acc
}

/// Integer polynomial from the first `order + 1` series coefficients.
pub fn truncate_to_polynomial(s: &PowerSeries) -> Result<IntPolynomial> {
    Ok(IntPolynomial::new(s.integer_coefficients()?))
}
