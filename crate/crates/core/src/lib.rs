//! Exact computations on hypertoric varieties and their Gale duals:
//! fixed points, equivariant K-theory restrictions, the intertwining class,
//! K-theoretic stable envelopes, localization limits and theta-function
//! q-series.

pub mod data;
pub mod elliptic;
pub mod kirwan;
pub mod lattice;
pub mod linalg;
pub mod localization;
pub mod loops;
pub mod lp;
pub mod qseries;
pub mod report;
pub mod stab;
pub mod xi;

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub use data::{FixedPoint, HypertoricData};
pub use kirwan::Space;
pub use lattice::{CharLattice, LaurentPoly, RationalChar};
