//! Numerical convex analysis around autoconjugate representers of linear
//! monotone operators on R^n.
//!
//! The crate has three layers:
//!
//! * closed forms — quadratic-form calculus ([`linop`]), Fitzpatrick
//!   functions ([`fitzpatrick`]), and the Penot-Zalinescu, proximal-average,
//!   and Ghoussoub constructions ([`representers`]);
//! * independent brute-force oracles — grid Legendre transforms, graph
//!   extraction, and monotonicity audits ([`oracle`]) that cross-verify
//!   every closed form;
//! * a gallery of scalar examples with exact formulas ([`gallery`]):
//!   the identity's nonuniqueness family, the negative-log suite where the
//!   constructions genuinely differ, and diagonal truncations of an
//!   unbounded operator.
//!
//! Grid sweeps are data-parallel; the default `parallel` feature runs them
//! on rayon, and disabling it falls back to identical sequential code.

pub mod exec;
pub mod extreal;
pub mod fitzpatrick;
pub mod gallery;
pub mod linop;
pub mod minimize;
pub mod oracle;
pub mod representers;
pub mod suites;

pub use extreal::ExtReal;
pub use linop::{LinearMonotoneOperator, QuadraticForm};
pub use oracle::{BivariateFunction, GridSpec};
