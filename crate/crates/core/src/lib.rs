//! Exact and certified computations for hypergeometric variations: operator
//! algebra in `z` and `D = z d/dz`, Frobenius and quasi-period series,
//! classification of hypergeometric data, zeta identities at special
//! points, algebraicity certificates and a worked elliptic family.

pub mod error;
pub mod numerics;
pub mod par;

pub use error::{Error, Result};
pub mod hgdef;
pub mod opalg;
pub mod series;
pub mod identities;
pub mod algebraicity;
pub mod ellfam;
