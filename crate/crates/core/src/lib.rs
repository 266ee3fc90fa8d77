//! Combinatorial, probabilistic and spectral invariants of operator algebras and subfactors.

pub mod cyclotomic;
pub mod error;
pub mod exact;
pub mod freeprob;
pub mod graphinv;
pub mod hadamard;
pub mod partitions;
pub mod randmat;
pub mod reproduce;
pub mod series;
pub mod spinplanar;
pub mod tl;
pub mod weingarten;

pub use error::{Error, Result};
