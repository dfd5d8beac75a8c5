//! Numerical laboratory for the McMullen family `f(z) = z^m + lambda / z^l`.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the pure algorithmic
//! parts: map arithmetic and orbit analysis ([`dynamics`]), escape
//! classification of the Julia set ([`trichotomy`]), the exact Cantor models
//! ([`cantor`]), the piecewise quasiregular model map ([`surgery`]), curve
//! geometry in the chordal metric ([`geometry`]) and the raster substrate
//! shared by all of them ([`grid`]).
//!
//! IO, parallel rendering, image encoding and the command-line driver live in
//! the companion `mcmullen-lab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cantor;
pub mod cmath;
pub mod dynamics;
pub mod geometry;
pub mod grid;
pub mod surgery;
pub mod trichotomy;

pub use cmath::ExtComplex;
pub use dynamics::{CycleKind, CycleReport, CycleSearch, DynamicsError, Exponents, MapParams, OrbitTrace, RealLevels};
pub use grid::{Bounds, FieldGrid, GridError, PayloadKind};
pub use num_complex::Complex64;
pub use trichotomy::{ClassifierConfig, RealBracket, TrichotomyError, Verdict, VerdictClass};
