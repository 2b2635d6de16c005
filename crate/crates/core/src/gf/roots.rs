//! Exact real-root isolation (Sturm sequences over the rationals), bound
//! certification, and growth-rate estimates from census tables.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::IntPolynomial;
use crate::census::{ln_biguint, CensusTable};
use crate::error::{Error, Result};

type RatPoly = Vec<BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn to_rat(q: &IntPolynomial) -> RatPoly {
    q.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn eval(p: &RatPoly, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative(p: &RatPoly) -> RatPoly {
    let mut d: RatPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
        .collect();
    trim(&mut d);
    d
}

fn div_rem(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = &b[db];
    let mut q = vec![BigRational::zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let f = &r[r.len() - 1] / lead;
        for (i, c) in b.iter().enumerate() {
            r[k + i] -= &f * c;
        }
        q[k] = f;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Sturm sequence of the square-free part of `q`, so counts stay exact even
/// when an endpoint hits a repeated root.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<RatPoly>,
    // gcd(q, q'), present when q has repeated roots
    repeated: Option<RatPoly>,
}

impl SturmChain {
    pub fn new(q: &IntPolynomial) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::Analysis("Sturm chain of the zero polynomial".into()));
        }
        let q = to_rat(q);
        let raw = Self::from_rat(q.clone());
        let g = raw.chain.last().expect("nonempty").clone();
        if g.len() <= 1 {
            return Ok(raw);
        }
        let (free, _) = div_rem(&q, &g);
        let mut chain = Self::from_rat(free);
        chain.repeated = Some(g);
        Ok(chain)
    }

    fn from_rat(p0: RatPoly) -> Self {
        let p1 = derivative(&p0);
        let mut chain = vec![p0];
        if !p1.is_empty() {
            chain.push(p1);
        }
        while chain.len() >= 2 {
            let n = chain.len();
            let (_, r) = div_rem(&chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        SturmChain { chain, repeated: None }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut prev: Option<bool> = None;
        for p in &self.chain {
            let v = eval(p, x);
            if v.is_zero() {
                continue;
            }
            let neg = v.is_negative();
            if prev.is_some_and(|s| s != neg) {
                count += 1;
            }
            prev = Some(neg);
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }

    fn gcd_part(&self) -> Option<SturmChain> {
        self.repeated.as_ref().map(|g| {
            let (free, _) = div_rem(g, &Self::from_rat(g.clone()).chain.last().expect("nonempty").clone());
            Self::from_rat(free)
        })
    }
}

/// A root isolated in the half-open interval `(lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    /// Midpoint, for reporting only.
    pub approx: f64,
    /// The root is not a root of `q'`.
    pub simple: bool,
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Every distinct root of `q` in `(lo, hi]`, each bracketed to width at most `eps`.
pub fn isolate_roots(q: &IntPolynomial, lo: &BigRational, hi: &BigRational, eps: f64) -> Result<Vec<RootInterval>> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::Analysis(format!("precision must be positive, got {eps}")));
    }
    if lo >= hi {
        return Err(Error::Analysis("empty interval".into()));
    }
    let eps = BigRational::from_float(eps).ok_or_else(|| Error::Analysis("bad precision".into()))?;
    let sturm = SturmChain::new(q)?;
    let repeated = sturm.gcd_part();
    let two = rat(2, 1);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = sturm.count(&a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 && &b - &a <= eps {
            let simple = repeated.as_ref().is_none_or(|g| g.count(&a, &b) == 0);
            let mid = (&a + &b) / &two;
            out.push(RootInterval {
                approx: to_f64(&mid),
                lo: a,
                hi: b,
                simple,
            });
            continue;
        }
        let mid = (&a + &b) / &two;
        // upper half first so the stack pops lower intervals first
        stack.push((mid.clone(), b));
        stack.push((a, mid));
    }
    Ok(out)
}

/// Roots in `(0, 1]`.
pub fn isolate_positive_roots(q: &IntPolynomial, eps: f64) -> Result<Vec<RootInterval>> {
    isolate_roots(q, &BigRational::zero(), &BigRational::one(), eps)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    GtQuarter,
    GtInvSqrt5,
    /// Root strictly greater than the given rational.
    Gt(BigRational),
}

impl Bound {
    pub fn name(&self) -> alloc::string::String {
        match self {
            Bound::GtQuarter => "gt_quarter".into(),
            Bound::GtInvSqrt5 => "gt_inv_sqrt5".into(),
            Bound::Gt(r) => format!("gt_{r}"),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gt_quarter" => Ok(Bound::GtQuarter),
            "gt_inv_sqrt5" => Ok(Bound::GtInvSqrt5),
            _ => Err(Error::UnknownToken(s.into())),
        }
    }
}

/// Smallest `n / 10^k` with `(n / 10^k)^2 >= 1/5`.
pub fn inv_sqrt5_upper(k: u32) -> BigRational {
    let scale = BigInt::from(10).pow(k);
    let target = &scale * &scale;
    let mut n = (&target / 5u32).sqrt();
    while BigInt::from(5) * &n * &n < target {
        n += 1u32;
    }
    BigRational::new(n, scale)
}

/// Largest `n / 10^k` with `(n / 10^k)^2 < 1/5`.
pub fn inv_sqrt5_lower(k: u32) -> BigRational {
    let scale = BigInt::from(10).pow(k);
    let target = &scale * &scale;
    let mut n = (&target / 5u32).sqrt();
    while BigInt::from(5) * &n * &n >= target {
        n -= 1u32;
    }
    BigRational::new(n, scale)
}

const MAX_BRACKET_DIGITS: u32 = 40;

/// Proves that the unique root of `q` in `(0, 1]` exceeds the bound.
///
/// Refuses (with an error) when `q` does not have exactly one root there.
/// `Ok(false)` means the inequality was refuted or could not be settled.
pub fn certify_bound(q: &IntPolynomial, bound: &Bound) -> Result<bool> {
    let sturm = SturmChain::new(q)?;
    let zero = BigRational::zero();
    let one = BigRational::one();
    let total = sturm.count(&zero, &one);
    if total != 1 {
        return Err(Error::Analysis(format!(
            "expected exactly one root in (0, 1], found {total}; refusing to certify"
        )));
    }
    // the root is above r iff the single root lies in (r, 1]
    let above = |r: &BigRational| sturm.count(r, &one) == 1;
    match bound {
        Bound::GtQuarter => Ok(above(&rat(1, 4))),
        Bound::Gt(r) => Ok(above(r)),
        Bound::GtInvSqrt5 => {
            for k in 1..=MAX_BRACKET_DIGITS {
                if above(&inv_sqrt5_upper(k)) {
                    return Ok(true);
                }
                if !above(&inv_sqrt5_lower(k)) {
                    return Ok(false);
                }
            }
            Ok(false)
        }
    }
}

/// Tail growth rate: `(T_m / T_{m-s})^(1/s)` averaged over the last quartile,
/// where `s` is the distance back to the previous nonzero count.
pub fn growth_rate_estimate(table: &CensusTable) -> Result<f64> {
    let n = table.len();
    if n < 50 {
        return Err(Error::Analysis(format!("table of length {n} is too short (need 50)")));
    }
    let start = n - n / 4;
    let mut sum = 0.0;
    let mut samples = 0usize;
    for i in start..n {
        if table.counts[i].is_zero() {
            continue;
        }
        let Some(j) = (0..i).rev().find(|&j| !table.counts[j].is_zero()) else {
            continue;
        };
        let s = (i - j) as f64;
        let ln_ratio = ln_biguint(&table.counts[i]) - ln_biguint(&table.counts[j]);
        sum += libm::exp(ln_ratio / s);
        samples += 1;
    }
    if samples == 0 {
        return Err(Error::Analysis("no nonzero counts in the tail".into()));
    }
    Ok(sum / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn linear_root() {
        let roots = isolate_positive_roots(&p(&[-1, 2]), 1e-9).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].approx - 0.5).abs() < 1e-9);
        assert!(roots[0].simple);
    }

    #[test]
    fn repeated_and_boundary_roots() {
        // z (2z - 1)^2 (4z - 3): roots 0 (excluded), 1/2 double, 3/4
        let q = &(&p(&[0, 1]) * &(&p(&[-1, 2]) * &p(&[-1, 2]))) * &p(&[-3, 4]);
        let roots = isolate_positive_roots(&q, 1e-6).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(!roots[0].simple);
        assert!(roots[1].simple);
        assert!((roots[1].approx - 0.75).abs() < 1e-6);
        // root exactly at the right end is included
        assert_eq!(isolate_positive_roots(&p(&[-1, 1]), 1e-6).unwrap().len(), 1);
    }

    #[test]
    fn bad_precision() {
        assert!(isolate_positive_roots(&p(&[-1, 2]), 0.0).is_err());
        assert!(isolate_positive_roots(&p(&[-1, 2]), f64::NAN).is_err());
    }

    #[test]
    fn inv_sqrt5_brackets() {
        for k in 1..8 {
            let (lo, hi) = (inv_sqrt5_lower(k), inv_sqrt5_upper(k));
            assert!(to_f64(&lo) < 1.0 / libm::sqrt(5.0));
            assert!(to_f64(&hi) > 1.0 / libm::sqrt(5.0));
            assert_eq!(&hi - &lo, BigRational::new(1.into(), BigInt::from(10).pow(k)));
        }
    }

    #[test]
    fn certification() {
        assert!(certify_bound(&p(&[-1, 2]), &Bound::GtQuarter).unwrap());
        assert!(certify_bound(&p(&[-1, 2]), &Bound::GtInvSqrt5).unwrap());
        assert!(!certify_bound(&p(&[-1, 5]), &Bound::GtQuarter).unwrap());
        // 0.44 < 1/sqrt 5 = 0.4472..
        assert!(!certify_bound(&p(&[-11, 25]), &Bound::GtInvSqrt5).unwrap());
        // two roots: refuse
        assert!(certify_bound(&(&p(&[-1, 2]) * &p(&[-3, 4])), &Bound::GtQuarter).is_err());
    }

    #[test]
    fn geometric_growth() {
        let counts = (0..60).map(|k| BigUint::from(2u32).pow(k)).collect();
        let g = growth_rate_estimate(&CensusTable { counts }).unwrap();
        assert!((g - 2.0).abs() < 1e-9);
        let short = CensusTable { counts: vec![BigUint::one(); 10] };
        assert!(growth_rate_estimate(&short).is_err());
    }

    #[test]
    fn periodic_zeros() {
        // 3^(m/2) on even m, 0 on odd m: rate sqrt 3
        let counts = (1..=80u32)
            .map(|m| if m % 2 == 0 { BigUint::from(3u32).pow(m / 2) } else { BigUint::zero() })
            .collect();
        let g = growth_rate_estimate(&CensusTable { counts }).unwrap();
        assert!((g - libm::sqrt(3.0)).abs() < 1e-9);
    }
}
