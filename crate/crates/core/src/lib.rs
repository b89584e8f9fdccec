//! Computational kernel for divisor-sieve variance sums over number fields.
//!
//! The crate parses a monic defining polynomial, certifies the resulting
//! order's invariants, enumerates every integral ideal of bounded norm in
//! fully factored form, and evaluates the headline variance/bilinear sums
//! together with a brute-force verification harness for the supporting
//! estimates. All floating-point reductions are deterministic across thread
//! counts.

pub mod arith;
pub mod cache;
pub mod constants;
pub mod error;
pub mod field;
pub mod ideals;
pub mod lemmas;
pub mod oracle;
pub mod poly;
pub mod reduce;
pub mod sums;

pub use error::{Error, Result};
pub use field::{FieldInvariants, FieldSpec, NumberField, RationalPrimeSplit};
pub use ideals::{enumerate_ideals, FactoredIdeal, IdealTable, PrimeIdealRec, DEFAULT_MEMORY_BUDGET};
pub use lemmas::{Baseline, LemmaCtx, LemmaReport};
pub use sums::SumReport;
