//! Exact computations with finite `Z/n`-modules: canonical forms, tensor and
//! internal hom, conflations, tensor-purity, flatness and the character dual
//! `M⁺ = Hom(M, Z/n)`, extended to bounded cochain complexes.

pub mod complex;
pub mod enumerate;
pub mod error;
pub mod exact;
pub mod harness;
pub mod linalg;
pub mod module;
pub mod naturality;
pub mod purity;
pub mod report;
pub mod system;

pub use error::{Error, Result};
pub use exact::{make_conflation, splits, Conflation, SplitWitness};
pub use module::{FiniteModule, Morphism, Presentation, RingSpec};
