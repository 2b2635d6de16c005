//! Generating functions of the walk families: series solutions, defining
//! polynomials, discriminants, and their positive roots.

pub mod poly;
pub mod resultant;
pub mod roots;
pub mod series;

pub use poly::{BivariatePolynomial, IntPolynomial};
pub use resultant::{discriminant_wrt_t, resultant_wrt_t};
pub use roots::{certify_bound, growth_rate_estimate, isolate_positive_roots, isolate_roots, Bound, RootInterval};
pub use series::{defining_polynomial, solve_series, substitute, Equation, PowerSeries};

/// Discriminant polynomials as printed in the literature for the two equations.
pub fn reference_discriminant(eq: Equation) -> IntPolynomial {
    match eq {
        Equation::Erase => IntPolynomial::from_i64(&[-4, -19, 32, -2, 36, 229]),
        Equation::Search => IntPolynomial::from_i64(&[-1, -12, 24, 80, 288]),
    }
}

/// Reference positive roots of [`reference_discriminant`].
pub fn reference_root(eq: Equation) -> f64 {
    match eq {
        Equation::Erase => 0.4575,
        Equation::Search => 0.25372,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_discriminant() {
        let p = BivariatePolynomial::from_terms(&[(1, 0, 2), (-1, 1, 0)]);
        assert_eq!(discriminant_wrt_t(&p).unwrap(), IntPolynomial::from_i64(&[0, 4]));
    }

    #[test]
    fn discriminants_match_reference_up_to_scalar() {
        for eq in Equation::ALL {
            let d = discriminant_wrt_t(&defining_polynomial(eq)).unwrap();
            let (_, rest) = d.split_monomial();
            assert!(rest.scalar_ratio(&reference_discriminant(eq)).is_some(), "{eq}: {d}");
        }
    }

    #[test]
    fn unique_positive_roots_and_bounds() {
        for (eq, bound) in [(Equation::Erase, Bound::GtInvSqrt5), (Equation::Search, Bound::GtQuarter)] {
            let d = discriminant_wrt_t(&defining_polynomial(eq)).unwrap();
            let roots = isolate_positive_roots(&d, 1e-6).unwrap();
            assert_eq!(roots.len(), 1);
            assert!(roots[0].simple);
            assert!((roots[0].approx - reference_root(eq)).abs() < 5e-4);
            assert!(certify_bound(&d, &bound).unwrap());
        }
    }
}
