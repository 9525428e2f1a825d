//! Degenerate-flag network coding over finite fields.
//!
//! The crate is layered bottom-up: [`gf`] provides prime and extension field
//! arithmetic, [`linalg`] matrices and subspaces over those fields, [`flags`]
//! degenerate flags and their upper triangular coordinates, [`codes`] flag
//! rank metric codes with syndrome decoding, and [`netsim`] a packet-level
//! simulator of the network protocol built on top of them.

pub mod codes;
pub mod error;
pub mod flags;
pub mod gf;
pub mod linalg;
pub mod netsim;

pub use codes::{FlagRankCode, SyndromeTable};
pub use error::{Error, Result};
pub use flags::{flag_distance, flag_rank, DegenerateFlag, UpperTriangular};
pub use gf::{FieldElement, FieldSpec};
pub use linalg::{MatrixF, Subspace};
