//! Simulation of conditional optical cat-state preparation from circular
//! coherent-state superpositions.
//!
//! A coherent state sent through a self-Kerr medium at rational interaction
//! strength decomposes into N equally weighted coherent components on a
//! circle. Two identical copies interfere on a balanced beam splitter; a
//! homodyne measurement of one output projects the other onto a superposition
//! of the vacuum and N(N−1)/2 symmetric cat states, and for the right input
//! amplitude the vacuum amplitude vanishes by destructive interference.
//!
//! Everything is computed in the closed-form coherent-term algebra (Gram
//! matrices of coherent overlaps), with a truncated Fock expansion available
//! as an independent brute-force oracle:
//!
//! - [`coherent`]: amplitudes, superpositions, overlaps, quadrature kernels,
//!   norms and fidelities;
//! - [`fock`]: truncated photon-number expansions;
//! - [`kerr`]: the circular decomposition and its Fock-evolution oracle;
//! - [`scheme`]: beam splitter, homodyne conditioning, cat decomposition and
//!   Born-rule sampling;
//! - [`analysis`]: amplitude scans, interference-zero refinement, circle
//!   radii and peak separability;
//! - [`phase_space`]: constellations and Wigner-function grids.

pub mod analysis;
pub mod coherent;
pub mod error;
pub mod fock;
pub mod kerr;
pub mod phase_space;
pub mod scheme;

pub use analysis::{RadiiReport, ScanPoint, ScanResult, SeparabilityReport, VacuumZero};
pub use coherent::{ComplexAmplitude, SingleModeState, TwoModeState};
pub use error::{Error, Result};
pub use fock::FockVector;
pub use kerr::KerrCoefficients;
pub use phase_space::{GridSpec, WignerGrid};
pub use scheme::{ConditionalResult, CssLabel, SchemeConfig, XmSelection};
