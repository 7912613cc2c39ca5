//! Exact integer, rational, and certified algebraic-number arithmetic.

pub mod factor;
pub mod interval;
pub mod matrix;
pub mod numfield;
pub mod poly;
pub mod roots;

pub use factor::{factor_monic, factor_squarefree_monic, is_irreducible, unit_circle_roots};
pub use interval::{ComplexInterval, Prec, RealInterval};
pub use matrix::{FieldCtx, FieldMat, IntMatrix, RationalField, UnimodularMatrix};
pub use numfield::{NfElement, NfField, NumberField};
pub use poly::{cyclotomic, IntPolynomial};
pub use roots::{certified_roots, CertifiedRoot, RootConfig};
