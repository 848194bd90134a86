//! Exact algorithms for fixed and periodic subgroups of endomorphisms of
//! `Z^m x F_n`.

pub mod bounds;
pub mod error;
pub mod fixpoint;
pub mod freewords;
pub mod intlat;
pub mod morphism;
pub mod oracle;
pub mod serial;
pub mod subgroup;

pub use error::{Error, Result};
pub use fixpoint::{FixInput, FixResult};
pub use freewords::Word;
pub use intlat::{IntMatrix, Lattice};
pub use morphism::{FreeMap, Morphism};
pub use subgroup::{Ambient, GroupElement, SubgroupBasis};
