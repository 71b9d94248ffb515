//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] of order `K` in `dim` variables carries every partial derivative
//! of a scalar field up to total degree `K` at one base point. Arithmetic is
//! exact up to floating point and truncation, so composite expressions yield
//! their exact higher derivatives.

mod jet;
mod layout;
mod univariate;

pub use jet::{Jet, RECIP_THRESHOLD};
pub use layout::{coeff_count, Layout, MultiIndex};
pub use univariate::{taylor_coefficients, UnaryFn};
