//! Exact multivariate polynomials over the rationals.

mod monomial;
mod parse;
mod polynomial;

pub use monomial::Monomial;
pub use parse::parse_polynomial;
pub use polynomial::{var_index, vars, Polynomial, Vars};

/// Exact rational coefficient. Always stored in lowest terms with a positive denominator.
pub type Scalar = num_rational::BigRational;

/// Convenience constructor for integer scalars.
pub fn scalar(n: i64) -> Scalar {
    Scalar::from_integer(n.into())
}

/// Parse a list of polynomials over the same variables.
pub fn parse_many<S: AsRef<str>>(texts: &[S], vars: &Vars) -> crate::Result<Vec<Polynomial>> {
    texts.iter().map(|t| parse_polynomial(t.as_ref(), vars)).collect()
}
