//! Multilevel diversity coding with regenerating codes.
//!
//! * [`field`] and [`matrix`]: arithmetic over a prime field.
//! * [`mbr`]: a product-matrix code at the minimum-bandwidth point.
//! * [`mldr`]: one such code per level, stacked on the same nodes.
//! * [`bounds`]: exact outer bounds on normalized storage and bandwidth.
//! * [`prover`]: entropy models and certificates behind those bounds.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod field;
pub mod matrix;
pub mod mbr;
pub mod mldr;
pub mod prover;

pub use bounds::{MessageProfile, RatePoint, Rational};
pub use error::{Error, Result};
pub use field::{Fe, Field};
pub use matrix::Matrix;
pub use mbr::{MbrCode, MbrParams};
pub use mldr::{MldrConfig, MldrSystem};
