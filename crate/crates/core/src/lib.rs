//! Numerical laboratory for the sharpness of the Bohnenblust–Hille exponent
//! `2m/(m+1)`.
//!
//! Random-sign (Kahane–Salem–Zygmund) polynomials are sampled, their sup
//! norms on the unit polydisc are estimated, coefficient norms are computed
//! exactly, and the growth of the ratio between the two is fitted across
//! dimensions.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod ksz;
pub mod multilinear;
pub mod output;
pub mod polynomial;
pub mod seed;
pub mod supnorm;

pub use error::{Error, Result};
