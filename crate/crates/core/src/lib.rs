//! Bergman kernels, Toeplitz operators and exact `L^p` ranges on the
//! generalized Hartogs triangles `H_{m/n} = {|z1|^(m/n) < |z2| < 1}`.

pub mod error;
pub mod index;
pub mod kernel;
pub mod moments;
pub mod quad;
pub mod ranges;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
pub use index::{HartogsExponent, MultiIndex, WitnessMonomial};
pub use moments::SymbolSpec;
pub use ranges::{Extended, PRange, Rational, TypeCD};
