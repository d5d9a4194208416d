//! Asymptotic expansions of Laplace-type integrals
//! `I(k) = ∫ e^{-k f(x)} g(x) dx` around an interior minimum of `f`.

pub mod coefficients;
pub mod error;
pub mod multiindex;
pub mod number;
pub mod oracle;
pub mod quadrature;
pub mod series;
pub mod spectral;
pub mod taylor;

pub use error::{Error, Result};
