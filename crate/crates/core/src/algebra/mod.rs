//! Exact field arithmetic and sparse multivariate polynomial calculus.

pub mod calculus;
pub mod field;
pub mod monomial;
pub mod multipoly;
pub mod resultant;
pub mod text;
pub mod unipoly;

pub use calculus::{
    expand_factors, gradient, hasse_derivative, pth_power_structure, restrict_to_line, square_free_part,
    PthPower,
};
pub use field::{is_prime_u64, Field, FieldKind, Scalar};
pub use monomial::Monomial;
pub use multipoly::MultiPoly;
pub use resultant::{bareiss_determinant, resultant, sylvester_matrix};
pub use text::{format_poly, parse_factor_list, parse_poly, parse_poly_auto};
pub use unipoly::UniPoly;
