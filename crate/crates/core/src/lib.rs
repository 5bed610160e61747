//! Entanglement swapping by post-selected Bell measurements on doubled
//! fermionic Gaussian states.
//!
//! Two identical copies of a number-conserving free-fermion state live on the
//! upper and lower layer of a bilayer. Projecting half of the interlayer rungs
//! onto a uniform Bell outcome leaves the unmeasured rungs in a product of
//! Bell pairs, independent of the initial state. The crate provides two
//! independent backends for checking this:
//!
//! * [`fock`]: a dense Fock-space simulator (at most 16 modes) that applies
//!   projectors as explicit fermionic operators;
//! * [`gaussian`]: a Majorana correlation-matrix backend using the product
//!   rule for Gaussian operators, which scales to hundreds of sites.
//!
//! [`slater`] holds the determinant side (minors, post-selection probability,
//! entanglement spectrum, Plücker relations), [`models`] the initial states,
//! [`protocol`] the measurement protocols, and [`experiments`] the data
//! generators behind the `bellswap` command-line tool.
//!
//! Mode ordering is bilayer-block everywhere: upper-layer site `i` is mode
//! `i`, its lower-layer partner is mode `L + i`. All indices are zero-based.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod gaussian;
pub(crate) mod linalg;
pub mod models;
pub mod orbital;
pub mod protocol;
pub mod slater;

pub use error::{Error, Result};
pub use fock::{FockState, ModeOrdering};
pub use gaussian::{GaussianOperator, MajoranaCorrelation, SubsystemSpec};
pub use models::ChainSpec;
pub use orbital::OrbitalMatrix;
pub use protocol::{Backend, ProtocolResult, RungProjector};
pub use slater::EntanglementSpectrum;

pub use num_complex::Complex64;
