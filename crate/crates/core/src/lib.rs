//! One-shot thermodynamics of bipartite systems coupled to two heat baths.
//!
//! A system `S12 = S1 ⊗ S2` with non-interacting Hamiltonian interacts
//! semi-locally with baths at inverse temperatures `β1` and `β2`. Allowed
//! operations conserve the weighted energy `β1·E1 + β2·E2` exactly, which
//! singles out the semi-Gibbs states `γ1 ⊗ γ2` as the free states and the
//! weighted Hamiltonian `β1·H1⊗I + I⊗β2·H2` as the dephasing reference.
//!
//! The crate decides state-transformation feasibility in this setting
//! (catalytically via Rényi free-entropy scans, non-catalytically via
//! thermo-majorization Lorenz curves and an LP feasibility oracle), computes
//! one-shot work quantities and engine efficiency statements, and ships a
//! seeded cross-oracle verification harness.
//!
//! All entropic quantities are in nats; natural logarithms throughout.

pub mod asymmetry;
pub mod divergences;
pub mod engine;
pub mod instance;
pub mod linalg;
pub mod lp;
pub mod majorization;
pub mod scan;
pub mod spectra;
pub mod transforms;
pub mod veribench;

pub use divergences::AlphaValue;
pub use spectra::{
    BathPair, BlockSpectrum, DenseState, EnergyLevels, EngineSpec, SemiGibbs, WeightedSpectrum,
};
pub use transforms::{SplitRule, TransformReport, Transformation};
