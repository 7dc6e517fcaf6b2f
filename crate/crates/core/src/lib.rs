//! Persistent homology engine built on `D V = R` factorizations that can be
//! updated in place when a filtration is permuted, grown or shrunk.

pub mod error;
pub mod field;
pub mod filtration;
pub mod formats;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod persistence;
pub mod reduction;
pub mod sparse;
pub mod state;
pub mod update;

pub use error::{Error, ErrorCategory, Result};
pub use field::{Coeff, Field, FieldElement};
pub use persistence::{
    compute_persistence, update_persistence, Barcode, DecompositionSet, PersistenceOptions,
    PersistencePair,
};
pub use reduction::{Mode, OperationCounters, RUDecomposition};
pub use sparse::{ColumnMatrix, Permutation, SparseColumn};
