//! Three-center overlap integrals over s-type Slater orbitals in linear
//! conformation, and the Coulomb-exchange repulsion integrals `[aa,bc]` and
//! `[bb,ac]` assembled from them.
//!
//! The analytic path expands one exponential in elliptical coordinates and
//! reduces everything to Mulliken `A_n`, exponential-integral `T_n^(+/-)` and
//! two-variable `B_{nm;k}` auxiliary integrals. An independent tanh-sinh
//! quadrature backend ([`oracle`]) referees every closed form.
//!
//! All arithmetic runs on MPFR floats sized by a [`PrecisionContext`].

pub mod auxiliary;
pub mod combinatorics;
pub mod error;
pub mod geometry;
pub mod numkernel;
pub mod oracle;
pub mod overlap;
pub mod repulsion;

pub use error::{Error, Result};
pub use numkernel::{ExtReal, PrecisionContext};
