//! Simulation and verification of the two-photon all-versus-nothing
//! argument against local realism.
//!
//! - [`hilbert`]: dense complex algebra on the 16-dim pol⊗path⊗pol⊗path space
//! - [`observables`]: the doubly entangled state, Pauli observables, the nine
//!   eigenequations and the Bell–Mermin operator
//! - [`lhv`]: exhaustive local-hidden-variable enumeration and the parity
//!   contradiction
//! - [`optics`]: linear-optics elements, the six measurement apparatuses and
//!   Born-rule shot sampling
//! - [`experiment`]: white-noise model, Monte Carlo estimation of ⟨O⟩ and the
//!   visibility sweep

pub mod experiment;
pub mod hilbert;
pub mod lhv;
pub mod observables;
pub mod optics;

pub use hilbert::{Operator, StateVector, C64, TOL};
pub use lhv::{ContradictionCertificate, LhvAssignment};
pub use observables::{build_mermin, build_psi, BellLabel};
