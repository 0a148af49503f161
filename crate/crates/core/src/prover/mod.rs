//! Shannon-type entropy inequalities over storage-system variables.
//!
//! Claims are [`Functional`]s asserted to be nonnegative. A [`ConeProgram`]
//! turns a [`GroundModel`] into linear constraints on joint entropies; a
//! claim holds on the model when an exact [`Certificate`] writes it as a
//! nonnegative combination of those constraints. Solving for the
//! certificate needs a floating-point LP solver and lives outside this crate;
//! checking it does not.

pub mod catalog;
pub mod certificate;
pub mod expr;
pub mod model;
pub mod universe;
pub mod varset;

pub use catalog::{Catalog, Claim, Identity, Justification, Outcome, Relation, ShannonUse, Step};
pub use certificate::Certificate;
pub use expr::{parse_claim, parse_claim_with, Functional, Scalar};
pub use model::{Column, ConeProgram, GroundModel, ProgramOptions, Reduction, Row, RowLabel, MAX_GROUPS};
pub use universe::{Dependency, GroundPerm, Universe, VarKind};
pub use varset::VarSet;
