//! Strongly focused vector light beams interacting with a single
//! `J = 0 → J = 1` atom in free space.
//!
//! The crate is generic over the floating point type ([`Real`]); the aliases
//! below fix it to `f64`, which is what every production path uses.

pub mod atom;
pub mod coupling;
pub mod diagnostics;
pub mod error;
pub mod focusing;
pub mod modes;
pub mod numerics;
pub mod observables;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type ComplexVec3 = numerics::ComplexVec3<f64>;
pub type ModeIndex = modes::ModeIndex<f64>;
pub type Cylindrical = modes::Cylindrical<f64>;
pub type BeamSpec = focusing::BeamSpec<f64>;
pub type BeamParams = focusing::BeamParams<f64>;
pub type FocusedBeam = focusing::FocusedBeam<f64>;
pub use focusing::{BeamModel, SpotMetrics};
pub type AtomSpec = atom::AtomSpec<f64>;
pub type AtomState = atom::AtomState<f64>;
pub type Scene = observables::Scene<f64>;
pub use observables::{MapCell, MapGrid, ScanConfig, ScanResult, ScanRow, ScanSummary};
pub use coupling::{CouplingReport, DipolePolicy, JointBounds, Optimum};
