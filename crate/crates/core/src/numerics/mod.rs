//! Exact scalars, high-precision reals and integer-relation detection.

pub mod hpreal;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod relation;
pub mod zeta;

pub use hpreal::{ln_q, pi, HPReal};
pub use parse::parse_poly;
pub use poly::QPoly;
pub use rational::{fmt_q, parse_q, pochhammer, q, qi, Q};
pub use relation::{integer_relation, IntRelation};
pub use zeta::zeta_int;
