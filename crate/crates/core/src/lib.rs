//! Resonance poles, survival amplitudes and decoherence of Friedrichs-type
//! open quantum systems, with a discretized-Hamiltonian oracle for checking.

pub mod numerics;
pub mod friedrichs;
pub mod oracle;
pub mod multipole;
pub mod leefriedrichs;
