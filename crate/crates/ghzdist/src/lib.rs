//! Exact rational verification of GHZ-type entanglement distillation claims.
//!
//! Everything that decides a mathematical question here runs over arbitrary
//! precision rationals: matrix algebra, positive-semidefiniteness, linear
//! feasibility, and polyhedron enumeration all produce exact answers with
//! checkable certificates. Floating point appears only in the explicitly
//! labeled numerical estimator (`activation::seesaw_estimate`).
//!
//! Conventions used throughout:
//! * tensor factor 0 is the most significant index (party 1 of an N-party
//!   state is factor 0);
//! * matrices are real, row-major, dense;
//! * rationals cross process boundaries as `"p"` or `"p/q"` strings.

pub mod error;
pub mod rat;

pub mod activation;
pub mod channels;
pub mod depolarize;
pub mod exactmat;
pub mod lemmas;
pub mod polylp;
pub mod pptgen;
pub mod sampling;
pub mod qcore;

pub use error::{Error, Result};
pub use rat::Rat;
